//! Brute-force ground truth for the nesting relation.
//!
//! Everything here is a plain double loop over the nesting predicate: no
//! sorting, no buckets, no n-grams. It is quadratic and only meant for
//! test-scale vocabularies.

use std::collections::{BTreeMap, BTreeSet};

use crate::index::IndexError;
use crate::term::{is_nested_in, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    pub supers: BTreeMap<String, BTreeSet<String>>,
    pub nesteds: BTreeMap<String, BTreeSet<String>>,
}

impl OracleTable {
    pub fn relation_count(&self) -> usize {
        self.supers.values().map(BTreeSet::len).sum()
    }

    pub fn supers_borrowed(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        self.supers
            .iter()
            .map(|(k, v)| (k.as_str(), v.iter().map(String::as_str).collect()))
            .collect()
    }
}

pub fn oracle_build(vocabulary: &[Term]) -> Result<OracleTable, IndexError> {
    if vocabulary.is_empty() {
        return Err(IndexError::EmptyVocabulary);
    }
    let distinct: BTreeSet<&Term> = vocabulary.iter().collect();
    let mut supers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut nesteds: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for a in &distinct {
        supers.entry(a.as_str().to_owned()).or_default();
        nesteds.entry(a.as_str().to_owned()).or_default();
    }
    for a in &distinct {
        for b in &distinct {
            if is_nested_in(a, b) {
                supers.get_mut(a.as_str()).unwrap().insert(b.as_str().to_owned());
                nesteds.get_mut(b.as_str()).unwrap().insert(a.as_str().to_owned());
            }
        }
    }
    Ok(OracleTable { supers, nesteds })
}

/// Vocabulary terms nested in `query`, by linear scan.
pub fn oracle_nested_query(vocabulary: &[Term], query: &Term) -> BTreeSet<String> {
    vocabulary
        .iter()
        .filter(|t| is_nested_in(t, query))
        .map(|t| t.as_str().to_owned())
        .collect()
}

/// Vocabulary terms that `query` is nested in, by linear scan.
pub fn oracle_super_query(vocabulary: &[Term], query: &Term) -> BTreeSet<String> {
    vocabulary
        .iter()
        .filter(|t| is_nested_in(query, t))
        .map(|t| t.as_str().to_owned())
        .collect()
}
