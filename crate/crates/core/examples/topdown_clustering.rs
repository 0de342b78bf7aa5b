//! Hierarchical TopDown clustering of a planted-topic corpus.
//!
//! ```bash
//! cargo run --release --example topdown_clustering
//! ```

use std::time::Instant;

use seclud::bench::{adjusted_rand_index, generate_planted_corpus, PlantedConfig};
use seclud::cluster::{psi, topdown, ClusterConfig, Clustering};
use seclud::corpus::probabilities_from_corpus;

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        topics: 8,
        docs_per_topic: 1000,
        seed: 3,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000)?;

    let config = ClusterConfig {
        k: 32,
        seed: 3,
        ..ClusterConfig::default()
    };
    let start = Instant::now();
    let clustering = topdown(corpus, &probs, config.k, &config)?;
    println!(
        "{} documents -> {} clusters in {:.2?} (target k = {})",
        corpus.num_docs(),
        clustering.k(),
        start.elapsed(),
        config.k
    );

    let single = Clustering::single(corpus, probs.len());
    println!("psi: single {:.4}, clustered {:.4}", psi(&single, &probs), psi(&clustering, &probs));

    // leaves refine topics, so merge leaves by majority topic before comparing
    let mut votes = vec![vec![0u32; 8]; clustering.k()];
    for (d, &c) in clustering.assignment().iter().enumerate() {
        votes[c as usize][planted.topics[d] as usize] += 1;
    }
    let majority: Vec<u32> = votes
        .iter()
        .map(|v| (0..8).max_by_key(|&t| v[t]).unwrap() as u32)
        .collect();
    let merged: Vec<u32> = clustering.assignment().iter().map(|&c| majority[c as usize]).collect();
    println!("agreement with planted topics after merging leaves: ARI {:.3}", adjusted_rand_index(&merged, &planted.topics));
    Ok(())
}
