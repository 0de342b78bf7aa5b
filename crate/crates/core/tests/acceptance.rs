//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::time::Instant;

use proptest::collection::btree_set;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seclud::bench::{
    adjusted_rand_index, audit, compression_report, generate_planted_corpus, generate_workload,
    theoretical_speedup, PlantedConfig, Workload,
};
use seclud::cluster::{
    build_score_tables, kmeans, multilevel_init, psi, psi_bruteforce, score_term, topdown,
    ClusterConfig, Clustering, CountMatrix,
};
use seclud::corpus::{probabilities_from_corpus, Corpus, CorpusBuilder, ProbSource, ProbTable};
use seclud::index::codec::{write_delta, write_gamma, write_golomb, BitVec};
use seclud::index::{build_index, decode, encode, Codec};
use seclud::intersect::{intersect_merge, CostModel};
use seclud::query::{build_reordering, Permutation, QueryEngine, Variant};
use seclud::TermId;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, title: &str, started: Instant, outcome: Outcome, failures: &mut Vec<usize>) {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:>2} [{tag}] {title}: {} ({:.1}s)",
        outcome.detail,
        started.elapsed().as_secs_f64()
    );
    if !outcome.pass {
        failures.push(id);
    }
}

fn uniform(n: usize) -> ProbTable {
    ProbTable::from_weights(vec![1.0; n], ProbSource::QueryLog).unwrap()
}

/// Four clusters with (n(a), n(b)) = (2000,10000), (10000,1000),
/// (40000,1000), (1000,25000); every overlap is as large as possible.
fn worked_example() -> Outcome {
    let table = [(2000u32, 10_000u32), (10_000, 1000), (40_000, 1000), (1000, 25_000)];
    let mut builder = CorpusBuilder::new();
    let mut assign = Vec::new();
    for (j, &(a, b)) in table.iter().enumerate() {
        for i in 0..a.max(b) {
            let mut doc = Vec::new();
            if i < a {
                doc.push("a");
            }
            if i < b {
                doc.push("b");
            }
            builder.add_tokens(doc);
            assign.push(j as u32);
        }
    }
    let corpus = builder.finish();
    let (ta, tb) = (corpus.term_id("a").unwrap(), corpus.term_id("b").unwrap());
    let clustering = Clustering::from_assignment(&corpus, assign, 4, 2).unwrap();
    let per = QueryEngine::per_cluster(&corpus, &clustering).query(ta, tb).steps;
    let single = QueryEngine::single(&corpus).query(ta, tb).steps;
    let s_t = theoretical_speedup(&corpus, &clustering, &uniform(2), CostModel::LookupMin).unwrap();

    let mut counts = CountMatrix::zeros(4, 2);
    for (j, &(a, b)) in table.iter().enumerate() {
        counts.set(j, 0, a);
        counts.set(j, 1, b);
    }
    let from_table = psi(&Clustering::from_counts(counts), &uniform(2));
    let mut one = CountMatrix::zeros(1, 2);
    one.set(0, 0, 53_000);
    one.set(0, 1, 37_000);
    let single_table = psi(&Clustering::from_counts(one), &uniform(2));

    Outcome {
        pass: per == 5000 && single == 37_000 && s_t == 7.4 && single_table / from_table == 7.4,
        detail: format!("per-cluster steps {per}, single steps {single}, S_T {s_t}"),
    }
}

/// Random corpus with skewed term choice: term `⌊V·x²⌋` for uniform `x`.
fn random_corpus(rng: &mut ChaCha8Rng, max_docs: usize, max_terms: usize) -> Corpus {
    let n = rng.random_range(1..=max_docs);
    let v = rng.random_range(2..=max_terms);
    let max_len = rng.random_range(1..=20usize);
    let mut builder = CorpusBuilder::new();
    for _ in 0..n {
        let len = rng.random_range(1..=max_len);
        let doc: Vec<String> = (0..len)
            .map(|_| {
                let x: f64 = rng.random();
                format!("w{}", ((v as f64) * x * x) as usize)
            })
            .collect();
        builder.add_tokens(doc);
    }
    builder.finish()
}

fn random_clustering(rng: &mut ChaCha8Rng, corpus: &Corpus) -> Clustering {
    let k = rng.random_range(1..=corpus.num_docs().min(64));
    let assign = (0..corpus.num_docs()).map(|_| rng.random_range(0..k as u32)).collect();
    Clustering::from_assignment(corpus, assign, k, 0).unwrap()
}

fn exactness() -> Outcome {
    let mut mismatches = 0u64;
    let mut queries = 0u64;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, 5000, 500);
        let clustering = random_clustering(&mut rng, &corpus);
        let index = build_index(&corpus);
        let engines: Vec<QueryEngine> = Variant::ALL
            .iter()
            .map(|&v| QueryEngine::build(v, &corpus, &clustering))
            .collect();
        let v = corpus.num_terms() as TermId;
        for _ in 0..1000 {
            // a few IDs beyond the dictionary exercise the unknown-term path
            let t = rng.random_range(0..v + 2);
            let u = rng.random_range(0..v + 2);
            let expected = if t < v && u < v {
                intersect_merge(index.posting(t), index.posting(u))
            } else {
                Vec::new()
            };
            for e in &engines {
                if e.query(t, u).docs != expected {
                    mismatches += 1;
                }
            }
            queries += 1;
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: format!("{mismatches} mismatches over {queries} queries x 4 variants"),
    }
}

fn random_counts(rng: &mut ChaCha8Rng, k: usize, f: usize, max: u32) -> CountMatrix {
    let mut counts = CountMatrix::zeros(k, f);
    for j in 0..k {
        for t in 0..f {
            if rng.random_bool(0.7) {
                counts.set(j, t, rng.random_range(0..=max));
            }
        }
    }
    counts
}

fn random_probs(rng: &mut ChaCha8Rng, f: usize) -> ProbTable {
    let mut w: Vec<f64> = (0..f)
        .map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random::<f64>() })
        .collect();
    w[0] += 1.0;
    ProbTable::from_weights(w, ProbSource::QueryLog).unwrap()
}

fn objective_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let f = rng.random_range(2..=2000);
        let k = rng.random_range(1..=8);
        let clustering = Clustering::from_counts(random_counts(&mut rng, k, f, 1000));
        let probs = random_probs(&mut rng, f);
        let fast = psi(&clustering, &probs);
        let slow = psi_bruteforce(&clustering, &probs, CostModel::LookupMin).unwrap();
        worst = worst.max((fast - slow).abs() / slow.abs().max(f64::MIN_POSITIVE));
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max relative error {worst:.2e} over 100 instances"),
    }
}

fn delta_score() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let f = rng.random_range(2..=60);
        let k = rng.random_range(1..=6);
        let counts = random_counts(&mut rng, k, f, 40);
        let probs = random_probs(&mut rng, f);
        let j = rng.random_range(0..k);
        let t = rng.random_range(0..f);
        let before = Clustering::from_counts(counts.clone());
        let tables = build_score_tables(&before, &probs);
        let score = score_term(&tables, &before, j, t as TermId, &probs);
        let mut grown = counts;
        grown.set(j, t, grown.get(j, t) + 1);
        let after = Clustering::from_counts(grown);
        let delta = psi_bruteforce(&after, &probs, CostModel::LookupMin).unwrap()
            - psi_bruteforce(&before, &probs, CostModel::LookupMin).unwrap();
        worst = worst.max((score - delta).abs());
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |score - delta psi| {worst:.2e} over 1000 insertions"),
    }
}

fn topdown_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ok = 0;
    let mut worst = String::new();
    for run in 0..50u64 {
        let n = 10f64.powf(rng.random_range(3.0..=5.0)) as usize;
        let k = rng.random_range(8..=256usize);
        let topics = rng.random_range(2..=32usize);
        let config = PlantedConfig {
            topics,
            docs_per_topic: n.div_ceil(topics),
            overlap_fraction: rng.random_range(0.0..1.0),
            doc_length: rng.random_range(5..=60),
            seed: run,
            ..PlantedConfig::default()
        };
        let corpus = generate_planted_corpus(&config).unwrap().corpus;
        let probs = probabilities_from_corpus(&corpus, 100_000).unwrap();
        let cluster_config = ClusterConfig {
            k,
            chi: 8,
            seed: run,
            ..ClusterConfig::default()
        };
        let clusters = topdown(&corpus, &probs, k, &cluster_config).unwrap().k();
        if (k..=2 * k).contains(&clusters) {
            ok += 1;
        } else {
            worst = format!("; run {run}: {} docs, k {k} -> {clusters}", corpus.num_docs());
        }
    }
    Outcome {
        pass: ok == 50,
        detail: format!("{ok}/50 runs within [k, 2k]{worst}"),
    }
}

fn codec_roundtrip() -> Outcome {
    let mut bits = BitVec::new();
    write_gamma(&mut bits, 9);
    let gamma = bits.to_bit_string();
    let mut bits = BitVec::new();
    write_delta(&mut bits, 9);
    let delta = bits.to_bit_string();
    let mut bits = BitVec::new();
    write_golomb(&mut bits, 9, 4);
    let golomb = bits.to_bit_string();
    let words_ok = gamma == "0001001" && delta == "00100001" && golomb == "11001";

    let config = Config {
        cases: 100_000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let lists = (1u32..2_000_000).prop_flat_map(|universe| {
        (Just(universe), btree_set(0..universe, 1..64usize))
    });
    let result = runner.run(&lists, |(universe, set)| {
        let docs: Vec<u32> = set.into_iter().collect();
        for codec in Codec::ALL {
            let enc = encode(&docs, codec, universe as u64);
            prop_assert_eq!(decode(&enc).unwrap(), docs.clone(), "{}", codec);
        }
        Ok(())
    });
    Outcome {
        pass: words_ok && result.is_ok(),
        detail: format!(
            "gamma(9)={gamma} delta(9)={delta} golomb(9;4)={golomb}; 100000 lists x 4 codecs {}",
            match &result {
                Ok(()) => "roundtrip".to_string(),
                Err(e) => format!("failed: {e}"),
            }
        ),
    }
}

/// Per-seed measurements on the 16-topic planted corpora.
struct PlantedRun {
    s_c: f64,
    gamma_identity: f64,
    gamma_clustered: f64,
    best_clustered: String,
    golomb_best_identity: bool,
    s_t_lookup: f64,
    s_t_comparison: f64,
}

fn planted_run(seed: u64) -> PlantedRun {
    let planted = generate_planted_corpus(&PlantedConfig {
        topics: 16,
        docs_per_topic: 3125,
        overlap_fraction: 0.2,
        seed,
        ..PlantedConfig::default()
    })
    .unwrap();
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000).unwrap();
    let config = ClusterConfig {
        k: 64,
        seed,
        ..ClusterConfig::default()
    };
    let clustering = topdown(corpus, &probs, 64, &config).unwrap();

    let workload: Workload = generate_workload(&probs, 100_000, seed).unwrap();
    let single = QueryEngine::single(corpus);
    let indexed = QueryEngine::cluster_index(corpus, &clustering);
    let steps = audit(&[&single, &indexed], &workload).expect("engines agree");
    let s_c = steps[0] as f64 / steps[1] as f64;

    let orderings = [
        ("identity".to_string(), Permutation::identity(corpus.num_docs())),
        ("clustered".to_string(), build_reordering(&clustering)),
    ];
    let rows = compression_report(corpus, &orderings, &Codec::ALL);
    let bpp = |ordering: &str, codec: Codec| {
        rows.iter()
            .find(|r| r.ordering == ordering && r.codec == codec.name())
            .unwrap()
            .bits_per_posting
    };
    let best = |ordering: &str| {
        Codec::ALL
            .into_iter()
            .min_by(|a, b| bpp(ordering, *a).total_cmp(&bpp(ordering, *b)))
            .unwrap()
    };
    let identity_min = Codec::ALL
        .into_iter()
        .map(|c| bpp("identity", c))
        .fold(f64::INFINITY, f64::min);

    let limited = probabilities_from_corpus(corpus, 2000).unwrap();
    let lookup_clustering = topdown(corpus, &limited, 64, &config).unwrap();
    let s_t_lookup = theoretical_speedup(corpus, &lookup_clustering, &limited, CostModel::LookupMin).unwrap();
    let s_t_comparison =
        theoretical_speedup(corpus, &lookup_clustering, &limited, CostModel::ComparisonLog).unwrap();

    PlantedRun {
        s_c,
        gamma_identity: bpp("identity", Codec::Gamma),
        gamma_clustered: bpp("clustered", Codec::Gamma),
        best_clustered: best("clustered").name().to_string(),
        golomb_best_identity: bpp("identity", Codec::Golomb) <= identity_min + 1e-9,
        s_t_lookup,
        s_t_comparison,
    }
}

fn multilevel_quality() -> Outcome {
    let mut good = 0;
    let mut max_rounds = 0;
    let mut aris = Vec::new();
    for seed in 1..=10u64 {
        let planted = generate_planted_corpus(&PlantedConfig {
            topics: 4,
            docs_per_topic: 2000,
            overlap_fraction: 0.1,
            seed,
            ..PlantedConfig::default()
        })
        .unwrap();
        let corpus = &planted.corpus;
        let probs = probabilities_from_corpus(corpus, 100_000).unwrap();
        let config = ClusterConfig {
            k: 4,
            seed,
            ..ClusterConfig::default()
        };
        let init = multilevel_init(corpus, &probs, 4, &config).unwrap();
        let refined = kmeans(corpus, &init.clustering, &probs, &config);
        let rounds = init.rounds + refined.rounds;
        let ari = adjusted_rand_index(refined.clustering.assignment(), &planted.topics);
        if ari >= 0.9 {
            good += 1;
        }
        max_rounds = max_rounds.max(rounds);
        aris.push(format!("{ari:.3}"));
    }
    Outcome {
        pass: good >= 9 && max_rounds <= 10,
        detail: format!("ARI >= 0.9 in {good}/10 seeds, at most {max_rounds} rounds; ARI [{}]", aris.join(" ")),
    }
}

fn main() {
    let mut failures = Vec::new();

    let t = Instant::now();
    report(1, "worked example step counts and S_T", t, worked_example(), &mut failures);
    let t = Instant::now();
    report(2, "four query variants return identical sets", t, exactness(), &mut failures);
    let t = Instant::now();
    report(3, "psi equals pair enumeration", t, objective_oracle(), &mut failures);
    let t = Instant::now();
    report(4, "score_term equals delta psi", t, delta_score(), &mut failures);
    let t = Instant::now();
    report(5, "TopDown yields between k and 2k clusters", t, topdown_bound(), &mut failures);
    let t = Instant::now();
    report(6, "codec roundtrip and reference codewords", t, codec_roundtrip(), &mut failures);

    let t = Instant::now();
    let runs: Vec<PlantedRun> = (1..=10u64).map(planted_run).collect();
    let s_c: Vec<String> = runs.iter().map(|r| format!("{:.2}", r.s_c)).collect();
    let fast = runs.iter().filter(|r| r.s_c >= 1.3).count();
    report(
        7,
        "cluster-index step speedup on planted corpora",
        t,
        Outcome {
            pass: fast >= 9,
            detail: format!("S_C >= 1.3 in {fast}/10 seeds; S_C [{}]", s_c.join(" ")),
        },
        &mut failures,
    );
    let smaller = runs.iter().filter(|r| r.gamma_clustered < r.gamma_identity).count();
    let direction = runs
        .iter()
        .filter(|r| (r.best_clustered == "gamma" || r.best_clustered == "delta") && r.golomb_best_identity)
        .count();
    let gamma: Vec<String> = runs
        .iter()
        .map(|r| format!("{:.2}->{:.2}", r.gamma_identity, r.gamma_clustered))
        .collect();
    report(
        8,
        "reordering favours gamma/delta over Golomb",
        t,
        Outcome {
            pass: smaller == 10 && direction >= 7,
            detail: format!(
                "gamma smaller after reordering in {smaller}/10, codec ranking flips in {direction}/10; gamma bits [{}]",
                gamma.join(" ")
            ),
        },
        &mut failures,
    );
    let higher = runs.iter().filter(|r| r.s_t_comparison >= r.s_t_lookup).count();
    let pairs: Vec<String> = runs
        .iter()
        .map(|r| format!("{:.2}/{:.2}", r.s_t_comparison, r.s_t_lookup))
        .collect();
    report(
        9,
        "comparison-cost S_T at least lookup S_T",
        t,
        Outcome {
            pass: higher >= 7,
            detail: format!("{higher}/10 seeds; comparison/lookup [{}]", pairs.join(" ")),
        },
        &mut failures,
    );

    let t = Instant::now();
    report(10, "multilevel K-means recovers planted topics", t, multilevel_quality(), &mut failures);

    if failures.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failures:?}");
        std::process::exit(1);
    }
}
