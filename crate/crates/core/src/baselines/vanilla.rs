use crate::counter::ComparisonCounter;
use crate::table::SuperTermsTable;
use crate::index::IndexError;
use crate::term::{is_nested_in, Term};

/// Hash-table indexing that tests every ordered pair of distinct terms.
#[derive(Debug, Clone)]
pub struct VanillaHashIndex {
    table: SuperTermsTable,
    pair_tests: u64,
}

pub fn vanilla_build(vocabulary: &[Term]) -> Result<VanillaHashIndex, IndexError> {
    VanillaHashIndex::build(vocabulary)
}

impl VanillaHashIndex {
    pub fn build(vocabulary: &[Term]) -> Result<VanillaHashIndex, IndexError> {
        if vocabulary.is_empty() {
            return Err(IndexError::EmptyVocabulary);
        }
        let mut table = SuperTermsTable::with_capacity(vocabulary.len());
        for term in vocabulary {
            table.insert_key(term.clone());
        }
        let n = table.len() as u32;
        let mut pair_tests = 0u64;
        let mut found = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                pair_tests += 1;
                if is_nested_in(table.term(a), table.term(b)) {
                    found.push(b);
                }
            }
            for b in found.drain(..) {
                table.add_super(a, b);
            }
        }
        Ok(VanillaHashIndex { table, pair_tests })
    }

    pub fn table(&self) -> &SuperTermsTable {
        &self.table
    }

    pub fn into_table(self) -> SuperTermsTable {
        self.table
    }

    /// Number of nesting tests performed during the build: `v * (v - 1)`.
    pub fn pair_tests(&self) -> u64 {
        self.pair_tests
    }

    pub fn super_terms_of(&self, query: &Term, counter: &mut ComparisonCounter) -> Result<Vec<&Term>, IndexError> {
        match self.table.probe(query.as_str(), counter) {
            Some(id) => Ok(self.table.supers_of(id).collect()),
            None => Err(IndexError::NotInVocabulary(query.as_str().to_owned())),
        }
    }
}
