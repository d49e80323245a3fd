//! Character-level Aho–Corasick automaton over vocabulary term texts.
//!
//! Nested retrieval feeds the query through the automaton and keeps only hits
//! that start and end on token boundaries. Super retrieval ignores failure
//! links and searches the goto trie depth first, pruning by the per-state
//! maximum character depth below it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::baselines::word_trie::{kmp_step, prefix_function};
use crate::counter::ComparisonCounter;
use crate::term::Term;

pub type StateId = u32;

const ROOT: StateId = 0;

#[derive(Debug, Clone, Default)]
pub struct AcState {
    pub goto: HashMap<char, StateId>,
    pub fail: StateId,
    /// Every term ending at this state, including those reached through
    /// failure links.
    pub output: Vec<u32>,
    /// Term whose text is exactly the goto path to this state.
    pub terminal: Option<u32>,
    /// Characters on the longest goto path below this state.
    pub max_subtree_depth: u32,
    parent: StateId,
}

#[derive(Debug, Clone)]
pub struct AcAutomaton {
    states: Vec<AcState>,
    /// Distinct vocabulary terms with their character lengths.
    terms: Vec<(Term, u32)>,
}

impl AcAutomaton {
    pub fn build(vocabulary: &[Term]) -> AcAutomaton {
        let mut ac = AcAutomaton {
            states: vec![AcState::default()],
            terms: Vec::new(),
        };
        let mut seen = HashSet::new();
        for term in vocabulary {
            if seen.insert(term.as_str()) {
                ac.insert(term);
            }
        }
        ac.link_failures();
        ac.compute_depths();
        ac
    }

    fn insert(&mut self, term: &Term) {
        let mut state = ROOT;
        let mut chars = 0u32;
        for c in term.as_str().chars() {
            chars += 1;
            state = match self.states[state as usize].goto.get(&c) {
                Some(&next) => next,
                None => {
                    let next = self.states.len() as StateId;
                    self.states.push(AcState { parent: state, ..Default::default() });
                    self.states[state as usize].goto.insert(c, next);
                    next
                }
            };
        }
        let id = self.terms.len() as u32;
        self.terms.push((term.clone(), chars));
        self.states[state as usize].terminal = Some(id);
    }

    fn link_failures(&mut self) {
        let mut queue = VecDeque::new();
        let root_children: Vec<StateId> = self.states[ROOT as usize].goto.values().copied().collect();
        for s in root_children {
            self.states[s as usize].fail = ROOT;
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            let mut output: Vec<u32> = self.states[s as usize].terminal.into_iter().collect();
            let fail = self.states[s as usize].fail;
            output.extend_from_slice(&self.states[fail as usize].output);
            self.states[s as usize].output = output;

            let edges: Vec<(char, StateId)> = self.states[s as usize].goto.iter().map(|(&c, &t)| (c, t)).collect();
            for (c, child) in edges {
                let mut f = fail;
                let target = loop {
                    if let Some(&t) = self.states[f as usize].goto.get(&c) {
                        break t;
                    }
                    if f == ROOT {
                        break ROOT;
                    }
                    f = self.states[f as usize].fail;
                };
                self.states[child as usize].fail = target;
                queue.push_back(child);
            }
        }
    }

    fn compute_depths(&mut self) {
        for id in (1..self.states.len()).rev() {
            let depth = self.states[id].max_subtree_depth + 1;
            let parent = self.states[id].parent as usize;
            let parent = &mut self.states[parent];
            parent.max_subtree_depth = parent.max_subtree_depth.max(depth);
        }
    }

    pub fn state(&self, id: StateId) -> &AcState {
        &self.states[id as usize]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn term(&self, id: u32) -> &Term {
        &self.terms[id as usize].0
    }

    /// Vocabulary terms nested in `query`. One tick per transition taken,
    /// failure transitions and the root self-loop included.
    pub fn nested_terms(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        let chars: Vec<char> = query.as_str().chars().collect();
        let n = chars.len();
        let mut out = BTreeSet::new();
        let mut state = ROOT;
        for (end, c) in chars.iter().enumerate() {
            loop {
                if let Some(&next) = self.states[state as usize].goto.get(c) {
                    state = next;
                    counter.tick();
                    break;
                }
                counter.tick();
                if state == ROOT {
                    break;
                }
                state = self.states[state as usize].fail;
            }
            let ends_on_boundary = end + 1 == n || chars[end + 1] == ' ';
            if !ends_on_boundary {
                continue;
            }
            for &id in &self.states[state as usize].output {
                let (term, len) = &self.terms[id as usize];
                let len = *len as usize;
                let start = end + 1 - len;
                if len < n && (start == 0 || chars[start - 1] == ' ') {
                    out.insert(term.as_str().to_owned());
                }
            }
        }
        out
    }

    pub fn super_terms(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        self.super_terms_with(query, counter, true)
    }

    /// Depth-first search of the goto trie for terms containing the query on
    /// token boundaries. The path is matched against `" " + query + " "` as if
    /// it were padded with a space on each side.
    pub fn super_terms_with(&self, query: &Term, counter: &mut ComparisonCounter, prune: bool) -> BTreeSet<String> {
        let mut pattern = vec![' '];
        pattern.extend(query.as_str().chars());
        pattern.push(' ');
        let full = pattern.len();
        let query_len = full - 2;
        let fail = prefix_function(&pattern);
        let mut out = BTreeSet::new();

        // Characters still needed to complete a match from KMP state `j`; the
        // closing space may come from the end of the term.
        let remaining = |j: usize, found: bool| if found { 0 } else { (full - 1 - j) as u32 };

        // (state, KMP state over the padded path, match already inside the path)
        let mut stack: Vec<(StateId, usize, bool)> = Vec::new();
        let start = (ROOT, 1, false);
        if !prune || remaining(start.1, false) <= self.states[ROOT as usize].max_subtree_depth {
            stack.push(start);
        }
        while let Some((id, matched, found)) = stack.pop() {
            for (c, &child) in &self.states[id as usize].goto {
                counter.tick();
                let (matched, found) = if found {
                    (matched, true)
                } else {
                    let j = kmp_step(&pattern, &fail, matched, c);
                    (j, j == full)
                };
                let node = &self.states[child as usize];
                if let Some(tid) = node.terminal {
                    let (term, len) = &self.terms[tid as usize];
                    let closes = found || kmp_step(&pattern, &fail, matched, &' ') == full;
                    if closes && *len as usize != query_len {
                        out.insert(term.as_str().to_owned());
                    }
                }
                if prune && remaining(matched, found) > node.max_subtree_depth {
                    continue;
                }
                stack.push((child, matched, found));
            }
        }
        out
    }
}
