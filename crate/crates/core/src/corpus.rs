//! Vocabulary files, corpus statistics and a seeded synthetic vocabulary
//! generator.
//!
//! A vocabulary file is UTF-8 text with one raw term per line (LF or CRLF).
//! Lines that do not normalize to a term are skipped and counted; duplicates
//! keep their first occurrence.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::Term;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: invalid UTF-8")]
    Encoding { line: usize },
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Fail on the first invalid UTF-8 line instead of skipping it.
    pub strict_utf8: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadedVocabulary {
    pub terms: Vec<Term>,
    pub duplicates: usize,
    /// Lines dropped because they were blank or not valid UTF-8.
    pub skipped: usize,
    pub invalid_utf8: usize,
}

pub fn load_vocabulary(path: impl AsRef<Path>, options: LoadOptions) -> Result<LoadedVocabulary, CorpusError> {
    let file = File::open(path)?;
    read_vocabulary(BufReader::new(file), options)
}

pub fn read_vocabulary(mut reader: impl BufRead, options: LoadOptions) -> Result<LoadedVocabulary, CorpusError> {
    let mut out = LoadedVocabulary::default();
    let mut seen = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let mut line = buf.as_slice();
        if let Some(rest) = line.strip_suffix(b"\n") {
            line = rest;
        }
        if let Some(rest) = line.strip_suffix(b"\r") {
            line = rest;
        }
        let Ok(text) = std::str::from_utf8(line) else {
            if options.strict_utf8 {
                return Err(CorpusError::Encoding { line: line_no });
            }
            out.invalid_utf8 += 1;
            out.skipped += 1;
            continue;
        };
        match Term::normalize(text) {
            Ok(term) => {
                if seen.insert(term.as_str().to_owned()) {
                    out.terms.push(term);
                } else {
                    out.duplicates += 1;
                }
            }
            Err(_) => out.skipped += 1,
        }
    }
    Ok(out)
}

pub fn write_vocabulary(terms: &[Term], mut writer: impl Write) -> io::Result<()> {
    for term in terms {
        writeln!(writer, "{term}")?;
    }
    writer.flush()
}

pub fn save_vocabulary(terms: &[Term], path: impl AsRef<Path>) -> io::Result<()> {
    write_vocabulary(terms, io::BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_unique_terms: usize,
    pub avg_tokens_per_term: f64,
    pub avg_chars_per_term: f64,
}

/// Averages over unique terms; characters counted as in `TermMetrics::len`.
pub fn compute_stats(vocabulary: &[Term]) -> Result<CorpusStats, CorpusError> {
    let mut seen = HashSet::new();
    let (mut tokens, mut chars) = (0usize, 0usize);
    for term in vocabulary {
        if seen.insert(term.as_str()) {
            tokens += term.token_count();
            chars += term.as_str().chars().count();
        }
    }
    let n = seen.len();
    if n == 0 {
        return Err(CorpusError::EmptyVocabulary);
    }
    Ok(CorpusStats {
        total_unique_terms: n,
        avg_tokens_per_term: tokens as f64 / n as f64,
        avg_chars_per_term: chars as f64 / n as f64,
    })
}

/// A bounded count distribution: `min + Binomial(max - min, p)` with `p`
/// chosen so the mean is `mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl CountRange {
    pub fn new(min: usize, max: usize, mean: f64) -> Self {
        CountRange { min, max, mean }
    }

    fn validate(&self, what: &str) -> Result<(), CorpusError> {
        if self.min == 0 || self.min > self.max {
            return Err(CorpusError::InvalidSpec(format!("{what}: need 1 <= min <= max")));
        }
        if !(self.min as f64..=self.max as f64).contains(&self.mean) {
            return Err(CorpusError::InvalidSpec(format!("{what}: mean outside [min, max]")));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let span = self.max - self.min;
        if span == 0 {
            return self.min;
        }
        let p = (self.mean - self.min as f64) / span as f64;
        self.min + (0..span).filter(|_| rng.gen_bool(p)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub term_count: usize,
    pub token_pool_size: usize,
    pub tokens_per_term: CountRange,
    pub token_length: CountRange,
    /// Zipf exponent for choosing tokens from the pool; 0 is uniform. Skew
    /// makes frequent tokens appear both alone and inside longer terms.
    pub token_skew: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Shaped like a noun-phrase vocabulary from a one-million-word corpus:
    /// about 2.2 tokens and 15 characters per term.
    pub fn brown_like(term_count: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            term_count,
            token_pool_size: term_count.max(64),
            tokens_per_term: CountRange::new(1, 6, 2.1),
            token_length: CountRange::new(2, 14, 6.3),
            token_skew: 0.75,
            seed,
        }
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.term_count == 0 {
            return Err(CorpusError::InvalidSpec("term_count must be positive".into()));
        }
        if self.token_pool_size == 0 {
            return Err(CorpusError::InvalidSpec("token_pool_size must be positive".into()));
        }
        if !(self.token_skew >= 0.0 && self.token_skew.is_finite()) {
            return Err(CorpusError::InvalidSpec("token_skew must be finite and >= 0".into()));
        }
        self.tokens_per_term.validate("tokens_per_term")?;
        self.token_length.validate("token_length")?;
        let spellable: f64 = (self.token_length.min..=self.token_length.max)
            .map(|l| 26f64.powi(l as i32))
            .sum();
        if spellable < self.token_pool_size as f64 {
            return Err(CorpusError::InvalidSpec("token_length range too narrow for the pool".into()));
        }
        let combos: f64 = (self.tokens_per_term.min..=self.tokens_per_term.max)
            .map(|k| (self.token_pool_size as f64).powi(k as i32))
            .sum();
        if combos < self.term_count as f64 {
            return Err(CorpusError::InvalidSpec("pool cannot form that many distinct terms".into()));
        }
        Ok(())
    }
}

/// Deterministic in `spec` (including its seed). Returns exactly
/// `spec.term_count` distinct terms.
pub fn generate_vocabulary(spec: &SynthSpec) -> Result<Vec<Term>, CorpusError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut pool = Vec::with_capacity(spec.token_pool_size);
    let mut seen = HashSet::new();
    let mut attempts = 0usize;
    while pool.len() < spec.token_pool_size {
        attempts += 1;
        if attempts > spec.token_pool_size * 100 + 1000 {
            return Err(CorpusError::InvalidSpec("could not draw enough distinct tokens".into()));
        }
        let len = spec.token_length.sample(&mut rng);
        let token: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        if seen.insert(token.clone()) {
            pool.push(token);
        }
    }

    let weights = (1..=pool.len()).map(|rank| (rank as f64).powf(-spec.token_skew));
    let pick = WeightedIndex::new(weights).map_err(|e| CorpusError::InvalidSpec(e.to_string()))?;

    let mut terms = Vec::with_capacity(spec.term_count);
    let mut seen = HashSet::with_capacity(spec.term_count);
    let mut attempts = 0usize;
    let mut text = String::new();
    while terms.len() < spec.term_count {
        attempts += 1;
        if attempts > spec.term_count * 50 + 1000 {
            return Err(CorpusError::InvalidSpec(format!(
                "only {} distinct terms after {attempts} draws",
                terms.len()
            )));
        }
        text.clear();
        for i in 0..spec.tokens_per_term.sample(&mut rng) {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(&pool[pick.sample(&mut rng)]);
        }
        if seen.insert(text.clone()) {
            terms.push(Term::normalize(&text).expect("generated text is non-empty"));
        }
    }
    Ok(terms)
}
