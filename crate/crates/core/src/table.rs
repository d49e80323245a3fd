use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::mem::size_of;

use crate::counter::ComparisonCounter;
use crate::term::Term;

pub type TermId = u32;

/// Map from every vocabulary term to the set of its super terms within the
/// vocabulary. Shared by the bucket index and the quadratic baseline.
///
/// Terms are interned by insertion order; value sets hold ids. Callers are
/// responsible for adding each (nested, super) pair at most once.
#[derive(Debug, Clone, Default)]
pub struct SuperTermsTable {
    terms: Vec<Term>,
    ids: HashMap<String, TermId>,
    supers: Vec<Vec<TermId>>,
}

impl SuperTermsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        SuperTermsTable {
            terms: Vec::with_capacity(n),
            ids: HashMap::with_capacity(n),
            supers: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains_key(&self, text: &str) -> bool {
        self.ids.contains_key(text)
    }

    /// One hash probe.
    pub fn probe(&self, text: &str, counter: &mut ComparisonCounter) -> Option<TermId> {
        counter.tick();
        self.ids.get(text).copied()
    }

    pub fn id_of(&self, text: &str) -> Option<TermId> {
        self.ids.get(text).copied()
    }

    /// Adds `term` as a key with an empty super set. Returns `None` when the
    /// key is already present.
    pub fn insert_key(&mut self, term: Term) -> Option<TermId> {
        if self.ids.contains_key(term.as_str()) {
            return None;
        }
        let id = self.terms.len() as TermId;
        self.ids.insert(term.as_str().to_owned(), id);
        self.terms.push(term);
        self.supers.push(Vec::new());
        Some(id)
    }

    pub fn add_super(&mut self, nested: TermId, super_term: TermId) {
        debug_assert_ne!(nested, super_term);
        self.supers[nested as usize].push(super_term);
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn super_ids(&self, id: TermId) -> &[TermId] {
        &self.supers[id as usize]
    }

    pub fn supers_of(&self, id: TermId) -> impl Iterator<Item = &Term> + '_ {
        self.supers[id as usize].iter().map(move |&s| self.term(s))
    }

    pub fn relation_count(&self) -> usize {
        self.supers.iter().map(Vec::len).sum()
    }

    /// Every (nested, super) pair, unordered.
    pub fn relations(&self) -> impl Iterator<Item = (&Term, &Term)> + '_ {
        self.supers.iter().enumerate().flat_map(move |(nested, sups)| {
            sups.iter()
                .map(move |&s| (&self.terms[nested], &self.terms[s as usize]))
        })
    }

    /// Order-independent view used for equality checks and snapshots.
    pub fn canonical(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        self.terms
            .iter()
            .zip(&self.supers)
            .map(|(term, sups)| {
                let set = sups.iter().map(|&s| self.terms[s as usize].as_str()).collect();
                (term.as_str(), set)
            })
            .collect()
    }

    /// Rough heap footprint in bytes, from lengths and capacities.
    pub fn approx_heap_bytes(&self) -> usize {
        let term_bytes: usize = self
            .terms
            .iter()
            .map(|t| t.as_str().len() + t.token_count() * size_of::<(u32, u32)>())
            .sum();
        let key_bytes: usize = self.ids.keys().map(String::len).sum();
        let set_bytes: usize = self
            .supers
            .iter()
            .map(|s| s.capacity() * size_of::<TermId>())
            .sum();
        self.terms.capacity() * size_of::<Term>()
            + term_bytes
            + self.ids.capacity() * (size_of::<String>() + size_of::<TermId>())
            + key_bytes
            + self.supers.capacity() * size_of::<Vec<TermId>>()
            + set_bytes
    }
}

impl PartialEq for SuperTermsTable {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.relation_count() == other.relation_count()
            && self.canonical() == other.canonical()
    }
}

impl Eq for SuperTermsTable {}
