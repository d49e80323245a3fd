//! Terminological bucket indexing.
//!
//! The term store is two tables. The super-terms table maps each vocabulary
//! term to the set of its super terms and answers both retrieval directions.
//! The bucket table groups terms by four keys,
//!
//! ```text
//! tot_nsp_char -> tot_tok -> len -> lt_len -> {terms}
//! ```
//!
//! and exists only to make building fast: terms are indexed shortest first,
//! and each new term looks for its nested terms only in buckets whose keys are
//! all smaller (`lt_len` may be equal). A proper nested term always has fewer
//! non-space characters, fewer tokens, a shorter text and a largest token no
//! longer than its container's, so the pruned buckets can never hold one.

use std::collections::BTreeMap;
use std::mem::size_of;
use std::ops::Bound;

use thiserror::Error;

use crate::counter::ComparisonCounter;
use crate::table::{SuperTermsTable, TermId};
use crate::term::{Term, TermMetrics};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("term not in vocabulary: {0:?}")]
    NotInVocabulary(String),
    #[error("bucket table was discarded; the index can no longer grow")]
    IndexFrozen,
}

type Leaf = Vec<TermId>;
type ByLargestToken = BTreeMap<usize, Leaf>;
type ByLen = BTreeMap<usize, ByLargestToken>;
type ByTokens = BTreeMap<usize, ByLen>;

/// Four-level bucket table. Every indexed term sits in exactly one leaf,
/// addressed by its own metrics.
#[derive(Debug, Clone, Default)]
pub struct BucketTable {
    root: BTreeMap<usize, ByTokens>,
    len: usize,
}

impl BucketTable {
    pub fn insert(&mut self, id: TermId, m: &TermMetrics) {
        self.root
            .entry(m.tot_nsp_char)
            .or_default()
            .entry(m.tot_tok)
            .or_default()
            .entry(m.len)
            .or_default()
            .entry(m.lt_len)
            .or_default()
            .push(id);
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn leaf(&self, m: &TermMetrics) -> Option<&[TermId]> {
        self.root
            .get(&m.tot_nsp_char)?
            .get(&m.tot_tok)?
            .get(&m.len)?
            .get(&m.lt_len)
            .map(Vec::as_slice)
    }

    /// Visits every leaf whose keys pass `pruning` relative to `m`.
    fn for_each_candidate_leaf(
        &self,
        m: &TermMetrics,
        pruning: BucketPruning,
        mut visit: impl FnMut(&[TermId]),
    ) {
        let below = |on: bool, k: usize| if on { Bound::Excluded(k) } else { Bound::Unbounded };
        let up_to = |on: bool, k: usize| if on { Bound::Included(k) } else { Bound::Unbounded };

        for by_tok in self.root.range((Bound::Unbounded, below(pruning.nsp_char, m.tot_nsp_char))).map(|e| e.1) {
            for by_len in by_tok.range((Bound::Unbounded, below(pruning.tokens, m.tot_tok))).map(|e| e.1) {
                for by_lt in by_len.range((Bound::Unbounded, below(pruning.len, m.len))).map(|e| e.1) {
                    for leaf in by_lt.range((Bound::Unbounded, up_to(pruning.largest_token, m.lt_len))).map(|e| e.1) {
                        visit(leaf);
                    }
                }
            }
        }
    }

    /// Visits every leaf that may hold a super term of a term with metrics `m`.
    fn for_each_super_candidate_leaf(&self, m: &TermMetrics, mut visit: impl FnMut(&[TermId])) {
        let above = |k: usize| (Bound::Excluded(k), Bound::Unbounded);
        for by_tok in self.root.range(above(m.tot_nsp_char)).map(|e| e.1) {
            for by_len in by_tok.range(above(m.tot_tok)).map(|e| e.1) {
                for by_lt in by_len.range(above(m.len)).map(|e| e.1) {
                    for leaf in by_lt.range(m.lt_len..).map(|e| e.1) {
                        visit(leaf);
                    }
                }
            }
        }
    }

    fn approx_heap_bytes(&self) -> usize {
        // Per-node overhead of the nested maps is approximated by one entry each.
        let mut bytes = 0;
        for by_tok in self.root.values() {
            bytes += size_of::<(usize, ByTokens)>();
            for by_len in by_tok.values() {
                bytes += size_of::<(usize, ByLen)>();
                for by_lt in by_len.values() {
                    bytes += size_of::<(usize, ByLargestToken)>();
                    for leaf in by_lt.values() {
                        bytes += size_of::<(usize, Leaf)>() + leaf.capacity() * size_of::<TermId>();
                    }
                }
            }
        }
        bytes
    }
}

/// Which of the four bucket inequalities the nested-term scan applies.
///
/// [`BucketPruning::ALL`] is the indexing algorithm proper; turning a level off
/// scans every key at that level. Output is identical either way, only the
/// number of candidates examined changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BucketPruning {
    /// `k1 < tot_nsp_char`
    pub nsp_char: bool,
    /// `k2 < tot_tok`
    pub tokens: bool,
    /// `k3 < len`
    pub len: bool,
    /// `k4 <= lt_len`
    pub largest_token: bool,
}

impl BucketPruning {
    pub const ALL: BucketPruning = BucketPruning {
        nsp_char: true,
        tokens: true,
        len: true,
        largest_token: true,
    };

    /// The four variants with exactly one inequality relaxed.
    pub fn single_relaxations() -> [BucketPruning; 4] {
        [
            BucketPruning { nsp_char: false, ..Self::ALL },
            BucketPruning { tokens: false, ..Self::ALL },
            BucketPruning { len: false, ..Self::ALL },
            BucketPruning { largest_token: false, ..Self::ALL },
        ]
    }
}

impl Default for BucketPruning {
    fn default() -> Self {
        Self::ALL
    }
}

/// The hybrid term store.
#[derive(Debug, Clone)]
pub struct TbiIndex {
    super_terms: SuperTermsTable,
    buckets: Option<BucketTable>,
    pruning: BucketPruning,
}

/// Builds the index. `counter` receives one tick per candidate term examined
/// by the nested-term scan.
pub fn build_index(vocabulary: &[Term], counter: &mut ComparisonCounter) -> Result<TbiIndex, IndexError> {
    TbiIndex::build(vocabulary, counter)
}

impl TbiIndex {
    pub fn build(vocabulary: &[Term], counter: &mut ComparisonCounter) -> Result<TbiIndex, IndexError> {
        Self::build_with_pruning(vocabulary, BucketPruning::ALL, counter)
    }

    pub fn build_with_pruning(
        vocabulary: &[Term],
        pruning: BucketPruning,
        counter: &mut ComparisonCounter,
    ) -> Result<TbiIndex, IndexError> {
        Self::build_inspected(vocabulary, pruning, counter, |_, _| {})
    }

    /// Build with a hook that sees `(new_term_metrics, candidate_id)` for every
    /// candidate the nested-term scan examines.
    fn build_inspected(
        vocabulary: &[Term],
        pruning: BucketPruning,
        counter: &mut ComparisonCounter,
        inspect: impl FnMut(&TermMetrics, TermId),
    ) -> Result<TbiIndex, IndexError> {
        if vocabulary.is_empty() {
            return Err(IndexError::EmptyVocabulary);
        }
        let mut index = TbiIndex {
            super_terms: SuperTermsTable::with_capacity(vocabulary.len()),
            buckets: Some(BucketTable::default()),
            pruning,
        };
        index.insert_sorted(vocabulary, counter, false, inspect);
        Ok(index)
    }

    /// Wraps an already complete table, e.g. one loaded from a snapshot. The
    /// result has no bucket table and cannot grow.
    pub fn from_table(super_terms: SuperTermsTable) -> TbiIndex {
        TbiIndex {
            super_terms,
            buckets: None,
            pruning: BucketPruning::ALL,
        }
    }

    /// Indexes further terms into a live index. Unlike the initial build, the
    /// new terms may be shorter than ones already indexed, so each one also
    /// scans the larger buckets for its super terms.
    pub fn extend(&mut self, terms: &[Term], counter: &mut ComparisonCounter) -> Result<usize, IndexError> {
        if self.buckets.is_none() {
            return Err(IndexError::IndexFrozen);
        }
        let before = self.super_terms.len();
        self.insert_sorted(terms, counter, true, |_, _| {});
        Ok(self.super_terms.len() - before)
    }

    fn insert_sorted(
        &mut self,
        terms: &[Term],
        counter: &mut ComparisonCounter,
        find_supers: bool,
        mut inspect: impl FnMut(&TermMetrics, TermId),
    ) {
        let mut order: Vec<(TermMetrics, &Term)> = terms.iter().map(|t| (t.metrics(), t)).collect();
        // Stable: ties keep input order.
        order.sort_by_key(|(m, _)| m.len);

        let buckets = self.buckets.as_mut().expect("live index has buckets");
        let table = &mut self.super_terms;
        let pruning = self.pruning;
        let mut found = Vec::new();

        for (metrics, term) in order {
            if table.contains_key(term.as_str()) {
                continue;
            }
            let id = table.insert_key(term.clone()).expect("checked absent");
            buckets.insert(id, &metrics);

            buckets.for_each_candidate_leaf(&metrics, pruning, |leaf| {
                for &cand in leaf {
                    inspect(&metrics, cand);
                    counter.tick();
                    if table.term(cand).is_nested_in(term) {
                        found.push(cand);
                    }
                }
            });
            for nested in found.drain(..) {
                table.add_super(nested, id);
            }

            if find_supers {
                buckets.for_each_super_candidate_leaf(&metrics, |leaf| {
                    for &cand in leaf {
                        counter.tick();
                        if term.is_nested_in(table.term(cand)) {
                            found.push(cand);
                        }
                    }
                });
                for sup in found.drain(..) {
                    table.add_super(id, sup);
                }
            }
        }
    }

    /// Super terms of a vocabulary term: a single probe of the super-terms
    /// table.
    pub fn super_terms_of(&self, query: &Term, counter: &mut ComparisonCounter) -> Result<Vec<&Term>, IndexError> {
        match self.super_terms.probe(query.as_str(), counter) {
            Some(id) => Ok(self.super_terms.supers_of(id).collect()),
            None => Err(IndexError::NotInVocabulary(query.as_str().to_owned())),
        }
    }

    /// Nested terms of any term, in or out of the vocabulary: each distinct
    /// proper n-gram of the query is probed once.
    pub fn nested_terms_of(&self, query: &Term, counter: &mut ComparisonCounter) -> Vec<&Term> {
        query
            .proper_ngram_texts()
            .into_iter()
            .filter_map(|gram| self.super_terms.probe(gram, counter))
            .map(|id| self.super_terms.term(id))
            .collect()
    }

    /// Releases the bucket table. Retrieval is unaffected; growth is not
    /// possible afterwards.
    pub fn discard_buckets(mut self) -> TbiIndex {
        self.buckets = None;
        self
    }

    pub fn is_frozen(&self) -> bool {
        self.buckets.is_none()
    }

    pub fn buckets(&self) -> Option<&BucketTable> {
        self.buckets.as_ref()
    }

    pub fn super_terms(&self) -> &SuperTermsTable {
        &self.super_terms
    }

    pub fn into_table(self) -> SuperTermsTable {
        self.super_terms
    }

    pub fn term_count(&self) -> usize {
        self.super_terms.len()
    }

    pub fn contains(&self, query: &Term) -> bool {
        self.super_terms.contains_key(query.as_str())
    }

    pub fn approx_heap_bytes(&self) -> usize {
        self.super_terms.approx_heap_bytes()
            + self.buckets.as_ref().map_or(0, BucketTable::approx_heap_bytes)
    }
}
