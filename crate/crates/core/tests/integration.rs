use std::collections::BTreeSet;
use std::io::Cursor;

use tbi::baselines::{AcAutomaton, VanillaHashIndex, WordTrie};
use tbi::bench::{self, BenchError, IndexBenchOptions, QuerySet, System};
use tbi::corpus::{compute_stats, generate_vocabulary, read_vocabulary, CorpusError, LoadOptions, SynthSpec};
use tbi::oracle::oracle_build;
use tbi::snapshot::{load_snapshot, save_snapshot, snapshot_lines};
use tbi::{ComparisonCounter, IndexError, TbiIndex, Term};

fn brown(n: usize, seed: u64) -> Vec<Term> {
    generate_vocabulary(&SynthSpec::brown_like(n, seed)).unwrap()
}

fn terms(v: &[&str]) -> Vec<Term> {
    v.iter().map(|s| Term::normalize(s).unwrap()).collect()
}

#[test]
fn vanilla_and_tbi_snapshots_are_byte_identical() {
    let vocab = brown(1_000, 11);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("vanilla.tsv"), dir.path().join("tbi.tsv"));
    save_snapshot(VanillaHashIndex::build(&vocab).unwrap().table(), &a).unwrap();
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    save_snapshot(index.super_terms(), &b).unwrap();
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert_eq!(load_snapshot(dir.path().join("tbi.tsv")).unwrap(), *index.super_terms());
}

#[test]
fn snapshot_lists_every_term() {
    let index = TbiIndex::build(&terms(&["google", "llc", "google llc", "solo"]), &mut ComparisonCounter::new()).unwrap();
    assert_eq!(
        snapshot_lines(index.super_terms()),
        ["google\tgoogle llc", "llc\tgoogle llc", "solo"]
    );
}

#[test]
fn discarding_buckets_shrinks_memory_and_keeps_answers() {
    let vocab = brown(10_000, 12);
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    let before = index.approx_heap_bytes();
    let queries = QuerySet::mixed(&vocab, 200, 12).unwrap();
    let mut c = ComparisonCounter::new();
    let answers: Vec<Vec<String>> = queries
        .nested
        .iter()
        .map(|q| index.nested_terms_of(q, &mut c).iter().map(|t| t.to_string()).collect())
        .collect();

    let mut frozen = index.discard_buckets();
    assert!(frozen.approx_heap_bytes() < before);
    assert!(frozen.is_frozen());
    let after: Vec<Vec<String>> = queries
        .nested
        .iter()
        .map(|q| frozen.nested_terms_of(q, &mut c).iter().map(|t| t.to_string()).collect())
        .collect();
    assert_eq!(answers, after);
    assert_eq!(
        frozen.extend(&terms(&["brand new term"]), &mut c).unwrap_err(),
        IndexError::IndexFrozen
    );
}

#[test]
fn extend_matches_rebuild() {
    let vocab = brown(3_000, 13);
    let (head, tail) = vocab.split_at(2_000);
    let mut c = ComparisonCounter::new();
    let mut grown = TbiIndex::build(head, &mut c).unwrap();
    grown.extend(tail, &mut c).unwrap();
    let rebuilt = TbiIndex::build(&vocab, &mut c).unwrap();
    assert_eq!(grown.super_terms(), rebuilt.super_terms());
}

#[test]
fn generated_vocabulary_has_target_shape() {
    let vocab = brown(10_000, 14);
    let stats = compute_stats(&vocab).unwrap();
    assert_eq!(stats.total_unique_terms, 10_000);
    // Brown-shaped: about 2.2 tokens and 15 characters per term.
    assert!((stats.avg_tokens_per_term - 2.2).abs() <= 0.22, "{stats:?}");
    assert!((stats.avg_chars_per_term - 15.0).abs() <= 1.5, "{stats:?}");
    // Enough shared tokens for a meaningful nesting relation.
    let relations = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap().super_terms().relation_count();
    assert!(relations >= 1_000, "only {relations} relations");
    assert_eq!(brown(10_000, 14), vocab, "generation is seeded");
}

#[test]
fn mid_scale_oracle_agreement_with_unicode() {
    let mut vocab = brown(1_500, 15);
    vocab.extend(terms(&["café", "café crème", "crème brûlée", "café crème brûlée", "日本", "日本 語"]));
    let oracle = oracle_build(&vocab).unwrap();
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    assert_eq!(index.super_terms().canonical(), oracle.supers_borrowed());
    assert_eq!(
        oracle.supers["crème brûlée"],
        BTreeSet::from(["café crème brûlée".to_owned()])
    );
}

#[test]
fn retrieval_bench_reports_every_system() {
    let vocab = brown(1_000, 16);
    let queries = QuerySet::sample_vocabulary(&vocab, 100, 16).unwrap();
    let rows = bench::bench_retrieval(&vocab, &System::RETRIEVAL, &queries, "brown-1k").unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert_eq!(row.query_count, Some(100));
        let json = serde_json::to_value(row).unwrap();
        for key in ["system", "dataset", "operation", "avg_comparisons", "environment"] {
            assert!(json.get(key).is_some(), "missing {key} in {json}");
        }
        assert!(json.get("wall_clock_secs").is_none());
    }
    assert!(matches!(
        QuerySet::sample_vocabulary(&vocab, 1_001, 0),
        Err(BenchError::InvalidArgument(_))
    ));
    assert!(matches!(
        bench::build_retriever(System::Vanilla, &vocab),
        Err(BenchError::InvalidArgument(_))
    ));
}

#[test]
fn index_bench_dry_run_and_rows() {
    let vocab = brown(500, 17);
    let b = bench::bench_index(&vocab, "brown-500", IndexBenchOptions { repetitions: 3, dry_run: true }).unwrap();
    assert_eq!(b.rows.len(), 2);
    assert!(b.rows.iter().all(|r| r.wall_clock_secs.is_some()));
    assert_eq!(b.term_count, 500);
}

#[test]
fn empty_and_degenerate_inputs() {
    let loaded = read_vocabulary(Cursor::new("\n  \n\t\n"), LoadOptions::default()).unwrap();
    assert!(loaded.terms.is_empty());
    assert!(matches!(compute_stats(&loaded.terms), Err(CorpusError::EmptyVocabulary)));
    assert_eq!(TbiIndex::build(&[], &mut ComparisonCounter::new()).unwrap_err(), IndexError::EmptyVocabulary);
    assert_eq!(VanillaHashIndex::build(&[]).unwrap_err(), IndexError::EmptyVocabulary);

    // Singletons and duplicates.
    let vocab = terms(&["alone", "alone", "alone"]);
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    assert_eq!(index.term_count(), 1);
    assert_eq!(index.super_terms().relation_count(), 0);
    let trie = WordTrie::build(&vocab);
    let ac = AcAutomaton::build(&vocab);
    let mut c = ComparisonCounter::new();
    let q = Term::normalize("alone").unwrap();
    assert!(trie.super_terms(&q, &mut c).is_empty());
    assert!(ac.super_terms(&q, &mut c).is_empty());
    assert!(index.nested_terms_of(&q, &mut c).is_empty());
}

#[test]
fn crlf_and_invalid_utf8_lines() {
    let bytes: &[u8] = b"Google LLC\r\nGoogle\r\n\xff\xfe\r\nLLC\r\n";
    let loaded = read_vocabulary(Cursor::new(bytes), LoadOptions::default()).unwrap();
    assert_eq!(loaded.terms, terms(&["Google LLC", "Google", "LLC"]));
    assert_eq!(loaded.invalid_utf8, 1);
    assert!(matches!(
        read_vocabulary(Cursor::new(bytes), LoadOptions { strict_utf8: true }),
        Err(CorpusError::Encoding { line: 3 })
    ));
}

#[test]
fn frozen_index_serves_concurrent_queries() {
    let vocab = brown(2_000, 18);
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap().discard_buckets();
    let expected: Vec<usize> = {
        let mut c = ComparisonCounter::new();
        vocab.iter().map(|t| index.super_terms_of(t, &mut c).unwrap().len()).collect()
    };
    std::thread::scope(|s| {
        for chunk in vocab.chunks(500).zip(expected.chunks(500)) {
            let index = &index;
            s.spawn(move || {
                let mut c = ComparisonCounter::new();
                for (t, &n) in chunk.0.iter().zip(chunk.1) {
                    assert_eq!(index.super_terms_of(t, &mut c).unwrap().len(), n);
                }
                assert_eq!(c.probes(), chunk.0.len() as u64);
            });
        }
    });
}
