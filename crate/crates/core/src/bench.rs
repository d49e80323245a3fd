//! Benchmark harness: retrieval comparison counts and indexing wall clock.
//!
//! Every run that reports numbers first checks that the participating systems
//! agree on every result set. A disagreement aborts the run with
//! [`BenchError::ResultMismatch`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{AcAutomaton, VanillaHashIndex, WordTrie};
use crate::counter::ComparisonCounter;
use crate::index::{IndexError, TbiIndex};
use crate::term::Term;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("result mismatch on {direction} query {query:?}: {detail}")]
    ResultMismatch {
        direction: Direction,
        query: String,
        detail: String,
    },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("{0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Tbi,
    WordTrie,
    AhoCorasick,
    Vanilla,
}

impl System {
    pub const RETRIEVAL: [System; 3] = [System::Tbi, System::WordTrie, System::AhoCorasick];

    pub fn name(self) -> &'static str {
        match self {
            System::Tbi => "tbi",
            System::WordTrie => "word_trie",
            System::AhoCorasick => "aho_corasick",
            System::Vanilla => "vanilla",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tbi" => Ok(System::Tbi),
            "word_trie" | "word-trie" => Ok(System::WordTrie),
            "aho_corasick" | "aho-corasick" => Ok(System::AhoCorasick),
            "vanilla" => Ok(System::Vanilla),
            other => Err(format!("unknown system {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Nested,
    Super,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Nested => "nested",
            Direction::Super => "super",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Index,
    Nested,
    Super,
}

impl From<Direction> for Operation {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Nested => Operation::Nested,
            Direction::Super => Operation::Super,
        }
    }
}

/// One result row. Indexing rows carry `wall_clock_secs`; retrieval rows
/// carry the comparison fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub system: System,
    pub dataset: String,
    pub operation: Operation,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_secs: Option<f64>,
    /// Total comparisons / query count, rounded to 2 decimals.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub avg_comparisons: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_comparisons: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub query_count: Option<usize>,
    pub environment: String,
}

pub fn environment_note() -> String {
    let cpus = std::thread::available_parallelism().map_or(0, |n| n.get());
    format!("{}-{} cpus={cpus} single-threaded", std::env::consts::OS, std::env::consts::ARCH)
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Uniform view of the retrieval systems for cross-checking.
pub trait Retriever {
    fn system(&self) -> System;
    fn nested(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String>;
    /// `None` when the system cannot answer for this query (out of vocabulary).
    fn supers(&self, query: &Term, counter: &mut ComparisonCounter) -> Option<BTreeSet<String>>;
}

impl Retriever for TbiIndex {
    fn system(&self) -> System {
        System::Tbi
    }

    fn nested(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        self.nested_terms_of(query, counter).into_iter().map(|t| t.as_str().to_owned()).collect()
    }

    fn supers(&self, query: &Term, counter: &mut ComparisonCounter) -> Option<BTreeSet<String>> {
        let found = self.super_terms_of(query, counter).ok()?;
        Some(found.into_iter().map(|t| t.as_str().to_owned()).collect())
    }
}

impl Retriever for WordTrie {
    fn system(&self) -> System {
        System::WordTrie
    }

    fn nested(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        self.nested_terms(query, counter)
    }

    fn supers(&self, query: &Term, counter: &mut ComparisonCounter) -> Option<BTreeSet<String>> {
        Some(self.super_terms(query, counter))
    }
}

impl Retriever for AcAutomaton {
    fn system(&self) -> System {
        System::AhoCorasick
    }

    fn nested(&self, query: &Term, counter: &mut ComparisonCounter) -> BTreeSet<String> {
        self.nested_terms(query, counter)
    }

    fn supers(&self, query: &Term, counter: &mut ComparisonCounter) -> Option<BTreeSet<String>> {
        Some(self.super_terms(query, counter))
    }
}

pub fn build_retriever(system: System, vocabulary: &[Term]) -> Result<Box<dyn Retriever>, BenchError> {
    Ok(match system {
        System::Tbi => Box::new(TbiIndex::build(vocabulary, &mut ComparisonCounter::new())?.discard_buckets()),
        System::WordTrie => Box::new(WordTrie::build(vocabulary)),
        System::AhoCorasick => Box::new(AcAutomaton::build(vocabulary)),
        System::Vanilla => {
            return Err(BenchError::InvalidArgument("vanilla is an indexing baseline only".into()));
        }
    })
}

/// Queries per direction. Super queries must be vocabulary terms.
#[derive(Debug, Clone, Default)]
pub struct QuerySet {
    pub nested: Vec<Term>,
    pub supers: Vec<Term>,
}

impl QuerySet {
    /// `sample_size` distinct vocabulary terms, used for both directions.
    pub fn sample_vocabulary(vocabulary: &[Term], sample_size: usize, seed: u64) -> Result<QuerySet, BenchError> {
        if sample_size > vocabulary.len() {
            return Err(BenchError::InvalidArgument(format!(
                "sample size {sample_size} exceeds vocabulary size {}",
                vocabulary.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, vocabulary.len(), sample_size).into_vec();
        picked.sort_unstable();
        let queries: Vec<Term> = picked.into_iter().map(|i| vocabulary[i].clone()).collect();
        Ok(QuerySet { nested: queries.clone(), supers: queries })
    }

    /// Queries from an external list: all of them are nested queries; those in
    /// the vocabulary are also super queries. At most `sample_size` are kept.
    pub fn from_list(vocabulary: &[Term], queries: &[Term], sample_size: usize, seed: u64) -> QuerySet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = queries.to_vec();
        if chosen.len() > sample_size {
            let mut idx = rand::seq::index::sample(&mut rng, chosen.len(), sample_size).into_vec();
            idx.sort_unstable();
            chosen = idx.into_iter().map(|i| queries[i].clone()).collect();
        }
        let known: HashSet<&str> = vocabulary.iter().map(Term::as_str).collect();
        let supers = chosen.iter().filter(|q| known.contains(q.as_str())).cloned().collect();
        QuerySet { nested: chosen, supers }
    }

    /// `count` queries: half sampled from the vocabulary, half synthesized out
    /// of vocabulary by joining two vocabulary terms. Super queries are the
    /// in-vocabulary half.
    pub fn mixed(vocabulary: &[Term], count: usize, seed: u64) -> Result<QuerySet, BenchError> {
        let in_vocab = count / 2;
        let mut set = QuerySet::sample_vocabulary(vocabulary, in_vocab.min(vocabulary.len()), seed)?;
        set.nested.extend(synth_out_of_vocabulary(vocabulary, count - set.nested.len(), seed ^ 0x5eed));
        Ok(set)
    }
}

/// Terms not in the vocabulary built by joining two random vocabulary terms,
/// so they still contain vocabulary terms as n-grams.
pub fn synth_out_of_vocabulary(vocabulary: &[Term], count: usize, seed: u64) -> Vec<Term> {
    let known: HashSet<&str> = vocabulary.iter().map(Term::as_str).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut emitted = HashSet::new();
    let mut attempts = 0;
    while out.len() < count && !vocabulary.is_empty() && attempts < count * 100 + 100 {
        attempts += 1;
        let a = vocabulary.choose(&mut rng).unwrap();
        let b = vocabulary.choose(&mut rng).unwrap();
        let text = format!("{a} {b}");
        if !known.contains(text.as_str()) && emitted.insert(text.clone()) {
            out.push(Term::normalize(&text).expect("joined terms are non-empty"));
        }
    }
    out
}

/// Runs every query through every system, checks the result sets agree, and
/// returns one row per (system, direction) with average comparisons.
pub fn bench_retrieval(
    vocabulary: &[Term],
    systems: &[System],
    queries: &QuerySet,
    dataset: &str,
) -> Result<Vec<BenchReport>, BenchError> {
    if vocabulary.is_empty() {
        return Err(IndexError::EmptyVocabulary.into());
    }
    if systems.is_empty() {
        return Err(BenchError::InvalidArgument("no systems selected".into()));
    }
    let retrievers = systems
        .iter()
        .map(|&s| build_retriever(s, vocabulary))
        .collect::<Result<Vec<_>, _>>()?;

    let env = environment_note();
    let mut rows = Vec::new();
    for direction in [Direction::Nested, Direction::Super] {
        let list = match direction {
            Direction::Nested => &queries.nested,
            Direction::Super => &queries.supers,
        };
        let mut totals = vec![0u64; retrievers.len()];
        for query in list {
            let mut reference: Option<(System, BTreeSet<String>)> = None;
            for (r, total) in retrievers.iter().zip(totals.iter_mut()) {
                let mut counter = ComparisonCounter::new();
                let result = match direction {
                    Direction::Nested => r.nested(query, &mut counter),
                    Direction::Super => r.supers(query, &mut counter).ok_or_else(|| BenchError::InvalidArgument(
                        format!("super query {:?} is not in the vocabulary", query.as_str()),
                    ))?,
                };
                *total += counter.probes();
                match &reference {
                    None => reference = Some((r.system(), result)),
                    Some((first, expected)) if *expected != result => {
                        return Err(BenchError::ResultMismatch {
                            direction,
                            query: query.as_str().to_owned(),
                            detail: describe_mismatch(*first, expected, r.system(), &result),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        for (r, total) in retrievers.iter().zip(totals) {
            let n = list.len();
            rows.push(BenchReport {
                system: r.system(),
                dataset: dataset.to_owned(),
                operation: direction.into(),
                wall_clock_secs: None,
                avg_comparisons: Some(if n == 0 { 0.0 } else { round2(total as f64 / n as f64) }),
                total_comparisons: Some(total),
                query_count: Some(n),
                environment: env.clone(),
            });
        }
    }
    Ok(rows)
}

fn describe_mismatch(a: System, ra: &BTreeSet<String>, b: System, rb: &BTreeSet<String>) -> String {
    let only_a: Vec<_> = ra.difference(rb).take(5).collect();
    let only_b: Vec<_> = rb.difference(ra).take(5).collect();
    format!("{a} has {} results, {b} has {}; only {a}: {only_a:?}; only {b}: {only_b:?}", ra.len(), rb.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexBenchOptions {
    pub repetitions: usize,
    /// Run each build once untimed before measuring.
    pub dry_run: bool,
}

impl Default for IndexBenchOptions {
    fn default() -> Self {
        IndexBenchOptions { repetitions: 1, dry_run: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexBench {
    pub rows: Vec<BenchReport>,
    pub vanilla_secs: f64,
    pub tbi_secs: f64,
    /// `100 * (1 - tbi / vanilla)`
    pub reduction_pct: f64,
    pub term_count: usize,
    pub relation_count: usize,
}

/// Times the quadratic baseline against the bucket index (median over
/// repetitions) after checking both produce the same table.
pub fn bench_index(vocabulary: &[Term], dataset: &str, options: IndexBenchOptions) -> Result<IndexBench, BenchError> {
    if options.repetitions == 0 {
        return Err(BenchError::InvalidArgument("repetitions must be at least 1".into()));
    }
    if vocabulary.is_empty() {
        return Err(IndexError::EmptyVocabulary.into());
    }
    if options.dry_run {
        VanillaHashIndex::build(vocabulary)?;
        TbiIndex::build(vocabulary, &mut ComparisonCounter::new())?;
    }

    let mut vanilla_times = Vec::with_capacity(options.repetitions);
    let mut tbi_times = Vec::with_capacity(options.repetitions);
    let mut tables = None;
    for _ in 0..options.repetitions {
        let start = Instant::now();
        let vanilla = VanillaHashIndex::build(vocabulary)?;
        vanilla_times.push(start.elapsed().as_secs_f64());

        let start = Instant::now();
        let tbi = TbiIndex::build(vocabulary, &mut ComparisonCounter::new())?;
        tbi_times.push(start.elapsed().as_secs_f64());

        if tables.is_none() {
            tables = Some((vanilla, tbi));
        }
    }
    let (vanilla, tbi) = tables.expect("at least one repetition");
    check_tables_equal(&vanilla, &tbi)?;

    let vanilla_secs = median(&mut vanilla_times);
    let tbi_secs = median(&mut tbi_times);
    let env = environment_note();
    let row = |system, secs| BenchReport {
        system,
        dataset: dataset.to_owned(),
        operation: Operation::Index,
        wall_clock_secs: Some(secs),
        avg_comparisons: None,
        total_comparisons: None,
        query_count: None,
        environment: env.clone(),
    };
    Ok(IndexBench {
        rows: vec![row(System::Vanilla, vanilla_secs), row(System::Tbi, tbi_secs)],
        vanilla_secs,
        tbi_secs,
        reduction_pct: reduction_pct(vanilla_secs, tbi_secs),
        term_count: tbi.term_count(),
        relation_count: tbi.super_terms().relation_count(),
    })
}

fn check_tables_equal(vanilla: &VanillaHashIndex, tbi: &TbiIndex) -> Result<(), BenchError> {
    if vanilla.table() == tbi.super_terms() {
        return Ok(());
    }
    let v = vanilla.table().canonical();
    let t = tbi.super_terms().canonical();
    let (key, detail) = v
        .iter()
        .find(|(k, sups)| t.get(*k) != Some(*sups))
        .map(|(k, sups)| (k.to_string(), format!("vanilla {:?} vs tbi {:?}", sups, t.get(k))))
        .or_else(|| {
            t.keys()
                .find(|k| !v.contains_key(*k))
                .map(|k| (k.to_string(), "term missing from vanilla table".to_owned()))
        })
        .unwrap_or_default();
    Err(BenchError::ResultMismatch { direction: Direction::Super, query: key, detail })
}

pub fn reduction_pct(baseline: f64, candidate: f64) -> f64 {
    if baseline <= 0.0 {
        return 0.0;
    }
    100.0 * (1.0 - candidate / baseline)
}

/// Median; the mean of the two middle values for an even count.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Human-readable retrieval table: one line per dataset, nested columns then
/// super columns, systems in Aho–Corasick / word trie / TBI order.
pub fn render_retrieval_table(rows: &[BenchReport]) -> String {
    let order = [System::AhoCorasick, System::WordTrie, System::Tbi];
    let mut by_dataset: BTreeMap<&str, BTreeMap<(Direction, System), f64>> = BTreeMap::new();
    for row in rows {
        let dir = match row.operation {
            Operation::Nested => Direction::Nested,
            Operation::Super => Direction::Super,
            Operation::Index => continue,
        };
        if let Some(avg) = row.avg_comparisons {
            by_dataset.entry(&row.dataset).or_default().insert((dir, row.system), avg);
        }
    }
    let mut header = vec!["dataset".to_owned()];
    for dir in [Direction::Nested, Direction::Super] {
        for sys in order {
            header.push(format!("{dir}:{sys}"));
        }
    }
    let mut lines = vec![header];
    for (dataset, cells) in &by_dataset {
        let mut line = vec![dataset.to_string()];
        for dir in [Direction::Nested, Direction::Super] {
            for sys in order {
                line.push(cells.get(&(dir, sys)).map_or("-".to_owned(), |v| format!("{v:.2}")));
            }
        }
        lines.push(line);
    }
    align(&lines)
}

pub fn render_index_table(dataset: &str, bench: &IndexBench) -> String {
    let lines = vec![
        vec!["dataset".into(), "vanilla_secs".into(), "tbi_secs".into(), "reduction".into()],
        vec![
            dataset.to_owned(),
            format!("{:.3}", bench.vanilla_secs),
            format!("{:.3}", bench.tbi_secs),
            format!("{:.0}% less", bench.reduction_pct),
        ],
    ];
    align(&lines)
}

fn align(lines: &[Vec<String>]) -> String {
    let cols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| lines.iter().filter_map(|l| l.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in lines {
        let cells: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(i, cell)| if i == 0 { format!("{cell:<w$}", w = widths[i]) } else { format!("{cell:>w$}", w = widths[i]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
