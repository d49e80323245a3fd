//! Comparison systems: quadratic hash indexing, a word-level trie and a
//! character-level Aho–Corasick automaton.

pub mod aho_corasick;
pub mod vanilla;
pub mod word_trie;

pub use aho_corasick::{AcAutomaton, AcState};
pub use vanilla::{vanilla_build, VanillaHashIndex};
pub use word_trie::{WordTrie, WordTrieNode};
