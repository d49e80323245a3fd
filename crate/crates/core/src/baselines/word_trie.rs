//! Word-level trie: one node per token, terminals flagged.
//!
//! Nested retrieval walks the trie from every start position of the query.
//! Super retrieval has no index to lean on and must traverse the trie; each
//! node records the longest word path below it so the traversal can skip a
//! subtree that is too shallow to complete a match.

use std::collections::{BTreeSet, HashMap};

use crate::counter::ComparisonCounter;
use crate::term::Term;

pub type NodeId = u32;

const ROOT: NodeId = 0;

#[derive(Debug, Clone, Default)]
pub struct WordTrieNode {
    pub children: HashMap<Box<str>, NodeId>,
    pub is_terminal: bool,
    /// Words on the longest path from this node down to a terminal.
    pub max_subtree_depth: u32,
    parent: NodeId,
    token: Box<str>,
}

#[derive(Debug, Clone)]
pub struct WordTrie {
    nodes: Vec<WordTrieNode>,
    term_count: usize,
}

impl WordTrie {
    pub fn build(vocabulary: &[Term]) -> WordTrie {
        let mut trie = WordTrie {
            nodes: vec![WordTrieNode::default()],
            term_count: 0,
        };
        for term in vocabulary {
            trie.insert(term);
        }
        trie.compute_depths();
        trie
    }

    fn insert(&mut self, term: &Term) {
        let mut node = ROOT;
        for token in term.tokens() {
            node = match self.nodes[node as usize].children.get(token) {
                Some(&child) => child,
                None => {
                    let child = self.nodes.len() as NodeId;
                    self.nodes.push(WordTrieNode {
                        parent: node,
                        token: token.into(),
                        ..Default::default()
                    });
                    self.nodes[node as usize].children.insert(token.into(), child);
                    child
                }
            };
        }
        let end = &mut self.nodes[node as usize];
        if !end.is_terminal {
            end.is_terminal = true;
            self.term_count += 1;
        }
    }

    // Children always have larger ids than their parent.
    fn compute_depths(&mut self) {
        for id in (1..self.nodes.len()).rev() {
            let depth = self.nodes[id].max_subtree_depth + 1;
            let parent = self.nodes[id].parent as usize;
            let parent = &mut self.nodes[parent];
            parent.max_subtree_depth = parent.max_subtree_depth.max(depth);
        }
    }

    pub fn node(&self, id: NodeId) -> &WordTrieNode {
        &self.nodes[id as usize]
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    fn path_text(&self, mut id: NodeId) -> String {
        let mut tokens = Vec::new();
        while id != ROOT {
            let node = &self.nodes[id as usize];
            tokens.push(&*node.token);
            id = node.parent;
        }
        tokens.reverse();
        tokens.join(" ")
    }

    /// Vocabulary terms nested in `query`. One tick per node entered.
    pub fn nested_terms(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        let m = query.token_count();
        let mut out = BTreeSet::new();
        for start in 0..m {
            let mut node = ROOT;
            for end in start..m {
                let Some(&child) = self.nodes[node as usize].children.get(query.token(end)) else {
                    break;
                };
                counter.tick();
                node = child;
                if self.nodes[node as usize].is_terminal && !(start == 0 && end + 1 == m) {
                    out.insert(query.ngram_text(start, end + 1).to_owned());
                }
            }
        }
        out
    }

    /// Vocabulary terms that properly contain `query`, with depth pruning.
    pub fn super_terms(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        self.super_terms_with(query, counter, true)
    }

    /// Depth-first search over the whole trie, tracking how much of the query
    /// the current path ends with (KMP over tokens). With `prune`, a node's
    /// subtree is skipped when the words still needed exceed its depth.
    pub fn super_terms_with(&self, query: &Term, counter: &mut ComparisonCounter, prune: bool) -> BTreeSet<String> {
        let pattern: Vec<&str> = query.tokens().collect();
        let m = pattern.len();
        let fail = prefix_function(&pattern);
        let mut out = BTreeSet::new();

        // (node, matched prefix length, match already seen, path length in words)
        let mut stack: Vec<(NodeId, usize, bool, usize)> = Vec::new();
        if !prune || m as u32 <= self.nodes[ROOT as usize].max_subtree_depth {
            stack.push((ROOT, 0, false, 0));
        }
        while let Some((id, matched, found, depth)) = stack.pop() {
            for (token, &child) in &self.nodes[id as usize].children {
                counter.tick();
                let (matched, found) = if found {
                    (matched, true)
                } else {
                    let j = kmp_step(&pattern, &fail, matched, &&**token);
                    if j == m {
                        (j, true)
                    } else {
                        (j, false)
                    }
                };
                let node = &self.nodes[child as usize];
                if node.is_terminal && found && depth + 1 != m {
                    out.insert(self.path_text(child));
                }
                let remaining = if found { 0 } else { (m - matched) as u32 };
                if prune && remaining > node.max_subtree_depth {
                    continue;
                }
                stack.push((child, matched, found, depth + 1));
            }
        }
        out
    }
}

pub(crate) fn prefix_function<T: PartialEq>(pattern: &[T]) -> Vec<usize> {
    let mut pi = vec![0; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = pi[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        pi[i] = k;
    }
    pi
}

/// Advances a KMP state `j < pattern.len()` by one symbol.
pub(crate) fn kmp_step<T: PartialEq>(pattern: &[T], fail: &[usize], mut j: usize, symbol: &T) -> usize {
    while j > 0 && pattern[j] != *symbol {
        j = fail[j - 1];
    }
    if pattern[j] == *symbol {
        j + 1
    } else {
        0
    }
}
