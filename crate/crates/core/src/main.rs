use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use tbi::baselines::VanillaHashIndex;
use tbi::bench::{self, BenchError, IndexBenchOptions, QuerySet, System};
use tbi::corpus::{self, CorpusError, CountRange, LoadOptions, SynthSpec};
use tbi::snapshot;
use tbi::{ComparisonCounter, IndexError, SuperTermsTable, TbiIndex, Term};

#[derive(Parser, Debug)]
#[command(name = "tbi", version, about = "Build, query and benchmark super/nested term indexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index a vocabulary file and optionally write a snapshot
    Build {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Tbi)]
        algorithm: Algorithm,
        /// Snapshot output path
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Look up super or nested terms in a snapshot
    Query {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, value_enum)]
        direction: QueryDirection,
        query: String,
    },
    /// Average comparison counts per query for each retrieval system
    BenchRetrieval {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = System::RETRIEVAL.map(|s| s.to_string()))]
        systems: Vec<String>,
        /// Query file; by default queries are sampled from the vocabulary
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        sample_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Also write JSON rows here
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Wall-clock indexing time of the quadratic baseline against TBI
    BenchIndex {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        /// One untimed build of each system before measuring
        #[arg(long)]
        dry_run: bool,
        /// Accepted for uniformity; timing runs are not randomized
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Unique terms, average tokens and characters per term, as JSON
    Stats {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        load: LoadArgs,
    },
    /// Write a seeded synthetic vocabulary
    Generate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Token pool size (default: the term count, at least 64)
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "MEAN"])]
        tokens_per_term: Option<Vec<f64>>,
        #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "MEAN"])]
        token_length: Option<Vec<f64>>,
        /// Zipf exponent of token choice (0 = uniform)
        #[arg(long)]
        skew: Option<f64>,
    },
}

#[derive(clap::Args, Debug)]
struct LoadArgs {
    /// Treat invalid UTF-8 lines as fatal instead of skipping them
    #[arg(long)]
    strict_utf8: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Tbi,
    Vanilla,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum QueryDirection {
    Super,
    Nested,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

enum Failure {
    Usage(String),
    Data(String),
    Mismatch(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<IndexError> for Failure {
    fn from(e: IndexError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(format!("i/o error: {e}"))
    }
}

impl From<snapshot::SnapshotError> for Failure {
    fn from(e: snapshot::SnapshotError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::ResultMismatch { .. } => Failure::Mismatch(e.to_string()),
            BenchError::InvalidArgument(m) => Failure::Usage(m),
            BenchError::Index(e) => e.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build { vocab, algorithm, out, load } => cmd_build(&vocab, algorithm, out.as_deref(), &load),
        Command::Query { snapshot, direction, query } => cmd_query(&snapshot, direction, &query),
        Command::BenchRetrieval { vocab, systems, queries, sample_size, seed, dataset, format, out, load } => {
            let systems = systems
                .iter()
                .map(|s| s.parse::<System>().map_err(Failure::Usage))
                .collect::<Result<Vec<_>, _>>()?;
            let vocabulary = load_terms(&vocab, &load)?;
            let query_set = match queries {
                Some(path) => {
                    let list = load_terms(&path, &load)?;
                    QuerySet::from_list(&vocabulary, &list, sample_size, seed)
                }
                None => QuerySet::sample_vocabulary(&vocabulary, sample_size, seed)?,
            };
            let dataset = dataset.unwrap_or_else(|| dataset_name(&vocab));
            let rows = bench::bench_retrieval(&vocabulary, &systems, &query_set, &dataset)?;
            emit_rows(&rows, format, out.as_deref(), || bench::render_retrieval_table(&rows))
        }
        Command::BenchIndex { vocab, repetitions, dry_run, seed: _, dataset, format, out, load } => {
            let vocabulary = load_terms(&vocab, &load)?;
            let dataset = dataset.unwrap_or_else(|| dataset_name(&vocab));
            let result = bench::bench_index(&vocabulary, &dataset, IndexBenchOptions { repetitions, dry_run })?;
            emit_rows(&result.rows, format, out.as_deref(), || bench::render_index_table(&dataset, &result))?;
            if format == Format::Json {
                let summary = serde_json::json!({
                    "dataset": dataset,
                    "reduction_pct": bench::round2(result.reduction_pct),
                    "term_count": result.term_count,
                    "relation_count": result.relation_count,
                });
                println!("{summary}");
            } else {
                println!("reduction={:.2}%", result.reduction_pct);
            }
            Ok(())
        }
        Command::Stats { vocab, format, load } => {
            let vocabulary = load_terms(&vocab, &load)?;
            let stats = corpus::compute_stats(&vocabulary)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string(&stats).expect("stats serialize")),
                Format::Table => {
                    println!("total_unique_terms   {}", stats.total_unique_terms);
                    println!("avg_tokens_per_term  {:.2}", stats.avg_tokens_per_term);
                    println!("avg_chars_per_term   {:.2}", stats.avg_chars_per_term);
                }
            }
            Ok(())
        }
        Command::Generate { out, count, seed, pool, tokens_per_term, token_length, skew } => {
            let mut spec = SynthSpec::brown_like(count, seed);
            if let Some(pool) = pool {
                spec.token_pool_size = pool;
            }
            if let Some(v) = tokens_per_term {
                spec.tokens_per_term = count_range(&v)?;
            }
            if let Some(v) = token_length {
                spec.token_length = count_range(&v)?;
            }
            if let Some(skew) = skew {
                spec.token_skew = skew;
            }
            let terms = corpus::generate_vocabulary(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
            match out {
                Some(path) => corpus::save_vocabulary(&terms, path)?,
                None => corpus::write_vocabulary(&terms, io::stdout().lock())?,
            }
            Ok(())
        }
    }
}

fn count_range(v: &[f64]) -> Result<CountRange, Failure> {
    let whole = |x: f64| (x >= 0.0 && x.fract() == 0.0).then_some(x as usize);
    match (whole(v[0]), whole(v[1])) {
        (Some(min), Some(max)) => Ok(CountRange::new(min, max, v[2])),
        _ => Err(Failure::Usage("MIN and MAX must be whole numbers".into())),
    }
}

fn load_terms(path: &Path, load: &LoadArgs) -> Result<Vec<Term>, Failure> {
    let loaded = corpus::load_vocabulary(path, LoadOptions { strict_utf8: load.strict_utf8 })
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    if loaded.skipped > 0 || loaded.duplicates > 0 {
        eprintln!(
            "{}: {} terms, {} duplicates dropped, {} lines skipped",
            path.display(),
            loaded.terms.len(),
            loaded.duplicates,
            loaded.skipped
        );
    }
    if loaded.terms.is_empty() {
        return Err(IndexError::EmptyVocabulary.into());
    }
    Ok(loaded.terms)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "vocab".to_owned(), |s| s.to_string_lossy().into_owned())
}

fn cmd_build(vocab: &Path, algorithm: Algorithm, out: Option<&Path>, load: &LoadArgs) -> Result<(), Failure> {
    let vocabulary = load_terms(vocab, load)?;
    let start = Instant::now();
    let table: SuperTermsTable = match algorithm {
        Algorithm::Tbi => TbiIndex::build(&vocabulary, &mut ComparisonCounter::new())?.into_table(),
        Algorithm::Vanilla => VanillaHashIndex::build(&vocabulary)?.into_table(),
    };
    let secs = start.elapsed().as_secs_f64();
    println!(
        "built {} index: terms={} relations={} seconds={secs:.3}",
        match algorithm {
            Algorithm::Tbi => "tbi",
            Algorithm::Vanilla => "vanilla",
        },
        table.len(),
        table.relation_count()
    );
    if let Some(path) = out {
        snapshot::save_snapshot(&table, path)?;
    }
    Ok(())
}

fn cmd_query(snapshot_path: &Path, direction: QueryDirection, raw: &str) -> Result<(), Failure> {
    let query = Term::normalize(raw).map_err(|e| Failure::Usage(e.to_string()))?;
    let index = TbiIndex::from_table(snapshot::load_snapshot(snapshot_path)?);
    let mut counter = ComparisonCounter::new();
    let mut results: Vec<&str> = match direction {
        QueryDirection::Super => index
            .super_terms_of(&query, &mut counter)
            .map_err(|e| Failure::Data(format!("NotInVocabulary: {e}")))?
            .into_iter()
            .map(Term::as_str)
            .collect(),
        QueryDirection::Nested => index.nested_terms_of(&query, &mut counter).into_iter().map(Term::as_str).collect(),
    };
    results.sort_unstable();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for r in results {
        writeln!(out, "{r}")?;
    }
    writeln!(out, "probes={}", counter.probes())?;
    Ok(())
}

fn emit_rows(
    rows: &[bench::BenchReport],
    format: Format,
    out: Option<&Path>,
    table: impl FnOnce() -> String,
) -> Result<(), Failure> {
    let json: Vec<String> = rows.iter().map(|r| serde_json::to_string(r).expect("report serializes")).collect();
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        for line in &json {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
    }
    match format {
        Format::Json => json.iter().for_each(|line| println!("{line}")),
        Format::Table => print!("{}", table()),
    }
    Ok(())
}
