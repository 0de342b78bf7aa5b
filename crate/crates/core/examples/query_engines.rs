//! The four query layouts answer the same queries with different work.
//!
//! ```bash
//! cargo run --release --example query_engines
//! ```

use seclud::bench::{generate_planted_corpus, PlantedConfig};
use seclud::cluster::{topdown, ClusterConfig};
use seclud::corpus::probabilities_from_corpus;
use seclud::query::{resolve_terms, QueryEngine, Variant};

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        topics: 8,
        docs_per_topic: 500,
        seed: 5,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000)?;
    let config = ClusterConfig {
        k: 16,
        seed: 5,
        ..ClusterConfig::default()
    };
    let clustering = topdown(corpus, &probs, 16, &config)?;

    let engines: Vec<QueryEngine> = Variant::ALL
        .iter()
        .map(|&v| QueryEngine::build(v, corpus, &clustering))
        .collect();
    for query in ["t0w1 t0w2", "t0w1 t1w1", "s1 t3w1", "s1 s2 t5w3", "t0w1 unknown"] {
        let terms = resolve_terms(corpus, query).unwrap_or_default();
        print!("{query:>14}:");
        let mut reference = None;
        for e in &engines {
            let out = e.query_terms(&terms);
            print!("  {} {:>5} steps", e.variant(), out.steps);
            let docs = reference.get_or_insert_with(|| out.docs.clone());
            assert_eq!(&out.docs, docs);
        }
        println!("  ({} matches)", reference.map_or(0, |d| d.len()));
    }
    Ok(())
}
