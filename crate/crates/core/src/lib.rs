//! Terminological bucket indexing (TBI).
//!
//! Indexes a vocabulary of multi-word terms so that both directions of the
//! token-level nesting relation can be queried quickly:
//!
//! * super terms of a vocabulary term: one probe of the super-terms table;
//! * nested terms of any term: one probe per distinct proper n-gram.
//!
//! The crate also ships the comparison systems used to evaluate it (a
//! quadratic hash index, a word trie and an Aho–Corasick automaton, all
//! instrumented with a [`ComparisonCounter`]), a brute-force oracle, corpus
//! tooling and the benchmark harness behind the `tbi` binary.
//!
//! ```
//! use tbi::{ComparisonCounter, TbiIndex, Term};
//!
//! let vocab: Vec<Term> = ["Google", "LLC", "Google LLC"]
//!     .iter()
//!     .map(|s| Term::normalize(s).unwrap())
//!     .collect();
//! let mut counter = ComparisonCounter::new();
//! let index = TbiIndex::build(&vocab, &mut counter).unwrap().discard_buckets();
//!
//! let supers = index.super_terms_of(&vocab[0], &mut counter).unwrap();
//! assert_eq!(supers[0].as_str(), "Google LLC");
//! ```

pub mod baselines;
pub mod bench;
pub mod corpus;
pub mod counter;
pub mod index;
pub mod oracle;
pub mod snapshot;
pub mod table;
pub mod term;

pub use counter::ComparisonCounter;
pub use index::{build_index, BucketPruning, BucketTable, IndexError, TbiIndex};
pub use table::{SuperTermsTable, TermId};
pub use term::{is_nested_in, proper_ngrams, Term, TermError, TermMetrics};
