//! Exit criteria. Each test prints one PASS/FAIL line and fails on FAIL.

use std::collections::BTreeSet;
use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use tbi::baselines::{AcAutomaton, VanillaHashIndex, WordTrie};
use tbi::bench::{self, IndexBenchOptions, QuerySet, System};
use tbi::corpus::{compute_stats, generate_vocabulary, SynthSpec};
use tbi::oracle::{oracle_build, oracle_nested_query, oracle_super_query};
use tbi::{BucketPruning, ComparisonCounter, TbiIndex, Term};

fn report(id: u32, name: &str, ok: bool, detail: String) {
    // Written to the stdout handle directly so the line survives test-output
    // capture and shows up in plain `cargo test` runs.
    let line = format!("[{}] criterion {id}: {name} :: {detail}\n", if ok { "PASS" } else { "FAIL" });
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {id} failed: {detail}");
}

fn brown(n: usize, seed: u64) -> Vec<Term> {
    generate_vocabulary(&SynthSpec::brown_like(n, seed)).unwrap()
}

fn texts<'a>(v: impl IntoIterator<Item = &'a Term>) -> BTreeSet<String> {
    v.into_iter().map(|t| t.as_str().to_owned()).collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let mut failures = Vec::new();
    let mut relations = 0;
    for seed in 1..=100u64 {
        let size = 500 + ((seed - 1) * 4500 / 99) as usize;
        let vocab = brown(size, seed);
        let oracle = oracle_build(&vocab).unwrap();
        let tbi = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
        let vanilla = VanillaHashIndex::build(&vocab).unwrap();
        relations += oracle.relation_count();
        if tbi.super_terms().canonical() != oracle.supers_borrowed() {
            failures.push(format!("seed {seed}: tbi != oracle"));
        }
        if vanilla.table() != tbi.super_terms() {
            failures.push(format!("seed {seed}: vanilla != tbi"));
        }
    }
    report(
        1,
        "TBI == oracle == vanilla on 100 vocabularies of 500..5000 terms",
        failures.is_empty() && relations > 0,
        format!("{} mismatches, {relations} relations checked {failures:?}", failures.len()),
    );
}

#[test]
fn criterion_2_super_retrieval_is_one_probe() {
    let mut worst = 0;
    let mut checked = 0;
    for n in [100, 1_000, 10_000] {
        let vocab = brown(n, 2);
        let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap().discard_buckets();
        for term in &vocab {
            let mut c = ComparisonCounter::new();
            index.super_terms_of(term, &mut c).unwrap();
            worst = worst.max(c.probes());
            checked += 1;
            if c.probes() != 1 {
                break;
            }
        }
    }
    report(
        2,
        "super_terms_of uses exactly 1 probe per vocabulary term (v = 1e2, 1e3, 1e4)",
        worst == 1,
        format!("{checked} queries, max probes {worst}"),
    );
}

#[test]
fn criterion_3_comparison_ordering() {
    let vocab = brown(10_000, 3);
    let stats = compute_stats(&vocab).unwrap();


    let queries = QuerySet::sample_vocabulary(&vocab, 1_000, 3).unwrap();
    let rows = bench::bench_retrieval(&vocab, &System::RETRIEVAL, &queries, "brown-10k").unwrap();
    let avg = |system, op| {
        rows.iter()
            .find(|r| r.system == system && r.operation == op)
            .and_then(|r| r.avg_comparisons)
            .unwrap()
    };
    use tbi::bench::Operation::{Nested, Super};
    let tbi_super = avg(System::Tbi, Super);
    let trie_super = avg(System::WordTrie, Super);
    let ac_super = avg(System::AhoCorasick, Super);
    let super_ok = trie_super >= 100.0 * tbi_super && ac_super >= 100.0 * tbi_super;

    // Per-query bound on nested probes.
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    let mut bound_violations = 0;
    for q in &queries.nested {
        let m = q.token_count() as u64;
        let mut c = ComparisonCounter::new();
        index.nested_terms_of(q, &mut c);
        if c.probes() > m * (m + 1) / 2 - 1 {
            bound_violations += 1;
        }
    }

    // Same queries against a 1e3 and a 1e4 vocabulary.
    let fixed_queries = brown(2_000, 303);
    let nested_avg = |vocab: &[Term]| {
        let index = TbiIndex::build(vocab, &mut ComparisonCounter::new()).unwrap();
        let mut c = ComparisonCounter::new();
        for q in &fixed_queries {
            index.nested_terms_of(q, &mut c);
        }
        c.probes() as f64 / fixed_queries.len() as f64
    };
    let small = nested_avg(&brown(1_000, 31));
    let large = nested_avg(&vocab);
    let ratio = large / small;
    let independent = (ratio - 1.0).abs() <= 0.05;

    report(
        3,
        "super: word_trie and aho_corasick >= 100x TBI; TBI nested within n-gram bound and independent of v",
        super_ok && bound_violations == 0 && independent,
        format!(
            "shape {:.2} tok/{:.2} chars; super avg tbi={tbi_super:.2} word_trie={trie_super:.2} aho_corasick={ac_super:.2}; \
             nested avg tbi={:.2} word_trie={:.2} aho_corasick={:.2}; bound violations {bound_violations}; \
             fixed-query nested avg v=1e3 {small:.3} v=1e4 {large:.3} ratio {ratio:.3}",
            stats.avg_tokens_per_term,
            stats.avg_chars_per_term,
            avg(System::Tbi, Nested),
            avg(System::WordTrie, Nested),
            avg(System::AhoCorasick, Nested),
        ),
    );
}

#[test]
fn criterion_4_indexing_time_reduction() {
    let vocab = brown(50_000, 4);
    let result = bench::bench_index(&vocab, "brown-50k", IndexBenchOptions { repetitions: 1, dry_run: false });
    let (ok, detail) = match result {
        Ok(b) => (
            b.reduction_pct >= 50.0,
            format!(
                "vanilla {:.2}s, tbi {:.2}s, reduction {:.1}% (tables equal, {} relations)",
                b.vanilla_secs, b.tbi_secs, b.reduction_pct, b.relation_count
            ),
        ),
        Err(e) => (false, e.to_string()),
    };
    report(4, "TBI indexing >= 50% faster than vanilla on 50k terms", ok, detail);
}

#[test]
fn criterion_5_cross_system_agreement() {
    let vocab = brown(2_000, 5);
    let queries = QuerySet::mixed(&vocab, 1_000, 5).unwrap();
    let out_of_vocab = queries.nested.iter().filter(|q| !vocab.contains(q)).count();

    let tbi = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    let trie = WordTrie::build(&vocab);
    let ac = AcAutomaton::build(&vocab);
    let mut mismatches = Vec::new();
    let mut c = ComparisonCounter::new();
    for q in &queries.nested {
        let expected = oracle_nested_query(&vocab, q);
        let got = [
            texts(tbi.nested_terms_of(q, &mut c)),
            trie.nested_terms(q, &mut c),
            ac.nested_terms(q, &mut c),
        ];
        if got.iter().any(|g| *g != expected) {
            mismatches.push(format!("nested {q}"));
        }
    }
    for q in &queries.supers {
        let expected = oracle_super_query(&vocab, q);
        let got = [
            texts(tbi.super_terms_of(q, &mut c).unwrap()),
            trie.super_terms(q, &mut c),
            ac.super_terms(q, &mut c),
        ];
        if got.iter().any(|g| *g != expected) {
            mismatches.push(format!("super {q}"));
        }
    }
    // The harness performs the same cross-check on its own.
    let harness = bench::bench_retrieval(&vocab, &System::RETRIEVAL, &queries, "agree");

    report(
        5,
        "tbi, word_trie and aho_corasick agree on 1000 queries over 2000 terms",
        mismatches.is_empty() && harness.is_ok() && queries.nested.len() == 1_000 && out_of_vocab == 500,
        format!(
            "{} nested ({out_of_vocab} out of vocabulary) + {} super queries, {} mismatches {:?}",
            queries.nested.len(),
            queries.supers.len(),
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

fn random_term(rng: &mut ChaCha8Rng) -> Term {
    const ALPHABET: [&str; 12] = ["a", "b", "c", "d", "e", "é", "ß", "日", "本", "z", "x", "q"];
    let tokens = rng.gen_range(1..=6);
    let text: Vec<String> = (0..tokens)
        .map(|_| (0..rng.gen_range(1..=5)).map(|_| *ALPHABET.choose(rng).unwrap()).collect())
        .collect();
    Term::normalize(&text.join(" ")).unwrap()
}

#[test]
fn criterion_6_metric_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let terms: Vec<Term> = (0..100_000).map(|_| random_term(&mut rng)).collect();
    let mut formula_violations = 0;
    let mut implication_violations = 0;
    let mut pairs = 0u64;
    let implies = |a: &Term, b: &Term| {
        let (ma, mb) = (a.metrics(), b.metrics());
        ma.len < mb.len && ma.tot_tok < mb.tot_tok && ma.tot_nsp_char < mb.tot_nsp_char && ma.lt_len <= mb.lt_len
    };
    for (i, t) in terms.iter().enumerate() {
        let m = t.metrics();
        let non_space = t.as_str().chars().filter(|&c| c != ' ').count();
        if m.tot_nsp_char != non_space || m.tot_nsp_char != m.len - m.tot_tok + 1 {
            formula_violations += 1;
        }
        for gram in t.proper_ngrams() {
            if gram.is_nested_in(t) {
                pairs += 1;
                if !implies(&gram, t) {
                    implication_violations += 1;
                }
            }
        }
        let other = &terms[(i * 7919 + 1) % terms.len()];
        for (a, b) in [(t, other), (other, t)] {
            if a.is_nested_in(b) {
                pairs += 1;
                if !implies(a, b) {
                    implication_violations += 1;
                }
            }
        }
    }
    report(
        6,
        "tot_nsp_char = len - tot_tok + 1 and nesting implies all four key inequalities",
        formula_violations == 0 && implication_violations == 0 && pairs > 0,
        format!("100000 terms, {pairs} nested pairs, {formula_violations} formula / {implication_violations} implication violations"),
    );
}

#[test]
fn criterion_7_pruning_soundness() {
    let mut table_mismatches = 0;
    let mut trie_mismatches = 0;
    let mut pruned_more = 0;
    for seed in 0..50u64 {
        let n = 300 + (seed as usize * 37) % 700;
        let vocab = brown(n, 700 + seed);
        let reference = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
        for relaxed in BucketPruning::single_relaxations() {
            let relaxed_index = TbiIndex::build_with_pruning(&vocab, relaxed, &mut ComparisonCounter::new()).unwrap();
            if relaxed_index.super_terms() != reference.super_terms() {
                table_mismatches += 1;
            }
        }

        let trie = WordTrie::build(&vocab);
        let ac = AcAutomaton::build(&vocab);
        let mut queries = QuerySet::sample_vocabulary(&vocab, 40, seed).unwrap().supers;
        queries.extend(bench::synth_out_of_vocabulary(&vocab, 10, seed));
        for q in &queries {
            let (mut p, mut f) = (ComparisonCounter::new(), ComparisonCounter::new());
            if trie.super_terms_with(q, &mut p, true) != trie.super_terms_with(q, &mut f, false) {
                trie_mismatches += 1;
            }
            if p.probes() > f.probes() {
                pruned_more += 1;
            }
            let (mut p, mut f) = (ComparisonCounter::new(), ComparisonCounter::new());
            if ac.super_terms_with(q, &mut p, true) != ac.super_terms_with(q, &mut f, false) {
                trie_mismatches += 1;
            }
            if p.probes() > f.probes() {
                pruned_more += 1;
            }
        }
    }
    report(
        7,
        "relaxing any bucket inequality or disabling depth pruning never changes results",
        table_mismatches == 0 && trie_mismatches == 0 && pruned_more == 0,
        format!("50 vocabularies x 4 relaxations: {table_mismatches} table mismatches; trie pruning: {trie_mismatches} result mismatches, {pruned_more} counter increases"),
    );
}

#[test]
fn criterion_8_worked_example() {
    let m = Term::normalize("united states of america").unwrap().metrics();
    let keys_ok = m.bucket_key() == (21, 4, 24, 7);

    let vocab: Vec<Term> = ["Google", "LLC", "Google LLC"].iter().map(|s| Term::normalize(s).unwrap()).collect();
    let index = TbiIndex::build(&vocab, &mut ComparisonCounter::new()).unwrap();
    let mut c = ComparisonCounter::new();
    let google = texts(index.super_terms_of(&vocab[0], &mut c).unwrap());
    let llc = texts(index.super_terms_of(&vocab[1], &mut c).unwrap());
    let expected = BTreeSet::from(["Google LLC".to_owned()]);
    report(
        8,
        "metrics(\"united states of america\") = (21, 4, 24, 7); \"Google LLC\" is super term of \"Google\" and \"LLC\"",
        keys_ok && google == expected && llc == expected,
        format!("keys {:?}, supers(Google) {google:?}, supers(LLC) {llc:?}", m.bucket_key()),
    );
}
