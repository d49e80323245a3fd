//! Terms, their bucket-key metrics, and the token-level nesting relation.
//!
//! A [`Term`] is a normalized vocabulary entry: tokens separated by exactly one
//! space, no leading or trailing whitespace. Every index in this crate works on
//! the same definition of nesting: `a` is nested in `b` when the tokens of `a`
//! form a contiguous run inside the tokens of `b` and `a != b`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("term contains no non-whitespace character")]
    EmptyTerm,
}

/// A normalized, tokenized vocabulary entry.
///
/// Token boundaries are kept as byte spans into `text`, so n-grams of a term
/// can be borrowed as `&str` without allocating.
#[derive(Clone)]
pub struct Term {
    text: String,
    spans: Vec<(u32, u32)>,
}

impl Term {
    /// Normalizes `raw` into a term: trims, collapses every whitespace run to a
    /// single space, and keeps case untouched.
    pub fn normalize(raw: &str) -> Result<Term, TermError> {
        let mut text = String::with_capacity(raw.len());
        let mut spans = Vec::new();
        for token in raw.split_whitespace() {
            if !text.is_empty() {
                text.push(' ');
            }
            let start = text.len();
            text.push_str(token);
            spans.push((start as u32, text.len() as u32));
        }
        if spans.is_empty() {
            return Err(TermError::EmptyTerm);
        }
        Ok(Term { text, spans })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn token_count(&self) -> usize {
        self.spans.len()
    }

    pub fn token(&self, i: usize) -> &str {
        let (s, e) = self.spans[i];
        &self.text[s as usize..e as usize]
    }

    pub fn tokens(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.spans
            .iter()
            .map(move |&(s, e)| &self.text[s as usize..e as usize])
    }

    /// Text of the token window `[start, end)`, borrowed from this term.
    pub fn ngram_text(&self, start: usize, end: usize) -> &str {
        debug_assert!(start < end && end <= self.spans.len());
        let from = self.spans[start].0 as usize;
        let to = self.spans[end - 1].1 as usize;
        &self.text[from..to]
    }

    pub fn metrics(&self) -> TermMetrics {
        TermMetrics::of(self)
    }

    /// True iff `self` is a proper contiguous token run of `container`.
    pub fn is_nested_in(&self, container: &Term) -> bool {
        is_nested_in(self, container)
    }

    /// Every proper n-gram (1..m-1 tokens), deduplicated.
    pub fn proper_ngrams(&self) -> BTreeSet<Term> {
        proper_ngrams(self)
    }

    /// Distinct texts of the proper n-grams, in generation order (shortest
    /// windows first, left to right).
    pub fn proper_ngram_texts(&self) -> Vec<&str> {
        let m = self.spans.len();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for width in 1..m {
            for start in 0..=m - width {
                let text = self.ngram_text(start, start + width);
                if seen.insert(text) {
                    out.push(text);
                }
            }
        }
        out
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({:?})", self.text)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

// Spans are a function of the text, so identity is the text alone.
impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text.cmp(&other.text)
    }
}

impl std::str::FromStr for Term {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Term::normalize(s)
    }
}

impl AsRef<str> for Term {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

/// The four bucket keys of a term. Lengths count Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermMetrics {
    /// Characters in the text, spaces included.
    pub len: usize,
    pub tot_tok: usize,
    /// Characters in the longest token.
    pub lt_len: usize,
    pub tot_nsp_char: usize,
}

impl TermMetrics {
    pub fn of(term: &Term) -> TermMetrics {
        let tot_tok = term.token_count();
        let lt_len = term.tokens().map(|t| t.chars().count()).max().unwrap_or(0);
        let len = term.text.chars().count();
        TermMetrics {
            len,
            tot_tok,
            lt_len,
            tot_nsp_char: len - tot_tok + 1,
        }
    }

    /// Keys in bucket-table order: (non-space chars, tokens, length, largest token).
    pub fn bucket_key(&self) -> (usize, usize, usize, usize) {
        (self.tot_nsp_char, self.tot_tok, self.len, self.lt_len)
    }
}

pub fn is_nested_in(candidate: &Term, container: &Term) -> bool {
    let n = candidate.token_count();
    let m = container.token_count();
    // A contiguous run of equal length would be the container itself.
    if n >= m {
        return false;
    }
    // Tokens are joined by single spaces, so a token window equals the
    // candidate iff the window's text equals the candidate's text.
    let needle = candidate.text.as_bytes();
    let hay = container.text.as_bytes();
    container.spans[..=m - n]
        .iter()
        .zip(&container.spans[n - 1..])
        .any(|(&(from, _), &(_, to))| hay[from as usize..to as usize] == *needle)
}

pub fn proper_ngrams(term: &Term) -> BTreeSet<Term> {
    term.proper_ngram_texts()
        .into_iter()
        .map(|text| Term::normalize(text).expect("n-gram of a valid term is non-empty"))
        .collect()
}
