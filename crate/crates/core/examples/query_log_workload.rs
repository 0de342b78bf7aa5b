//! Term probabilities from a query log, a log-driven workload, and the
//! effect of the term cutoff on the speedups.
//!
//! ```bash
//! cargo run --release --example query_log_workload
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seclud::bench::{generate_planted_corpus, tc_sensitivity, PlantedConfig, Workload};
use seclud::cluster::ClusterConfig;
use seclud::corpus::{probabilities_from_log, read_query_log};

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        topics: 8,
        docs_per_topic: 500,
        seed: 2,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;

    // a synthetic log: mostly same-topic pairs, some malformed lines
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut log = String::new();
    for i in 0..5000 {
        let topic = rng.random_range(0..8);
        let a = rng.random_range(1..30);
        let b = rng.random_range(1..30);
        match i % 100 {
            0 => log.push_str("one-term-only\n"),
            1 => log.push_str(&format!("t{topic}w{a} never-seen\n")),
            _ => log.push_str(&format!("t{topic}w{a} T{topic}W{b}\n")),
        }
    }
    let parsed = read_query_log(log.as_bytes())?;
    println!("{} pairs read, {} lines skipped", parsed.pairs.len(), parsed.skipped);

    let probs = probabilities_from_log(&parsed.pairs, corpus, 100_000)?;
    let workload = Workload::from_log(&parsed.pairs, corpus, probs);
    println!("{} queries kept, {} dropped (self-pairs or unknown terms)", workload.len(), workload.dropped);

    let config = ClusterConfig {
        k: 16,
        seed: 2,
        ..ClusterConfig::default()
    };
    // S_T pairs terms independently; this log only pairs same-topic terms,
    // which share clusters, so the measured S_C stays near 1
    println!("{:>8} {:>8} {:>8} {:>8}", "tc", "S_T", "S_C", "S_R");
    for row in tc_sensitivity(corpus, &workload, &[300, 1000, 100_000], &config, 1)? {
        println!("{:>8} {:8.3} {:8.3} {:8.3}", row.tc, row.s_t, row.s_c, row.s_r);
    }
    Ok(())
}
