//! Flat clustering: multilevel initialization followed by K-means.
//!
//! ```bash
//! cargo run --release --example multilevel_kmeans
//! ```

use seclud::bench::{adjusted_rand_index, generate_planted_corpus, PlantedConfig};
use seclud::cluster::{kmeans, multilevel_init, psi, ClusterConfig, Clustering};
use seclud::corpus::probabilities_from_corpus;

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        topics: 4,
        docs_per_topic: 2000,
        overlap_fraction: 0.1,
        seed: 1,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000)?;
    let config = ClusterConfig {
        k: 4,
        seed: 1,
        ..ClusterConfig::default()
    };

    let init = multilevel_init(corpus, &probs, 4, &config)?;
    let refined = kmeans(corpus, &init.clustering, &probs, &config);
    let truth = Clustering::from_assignment(corpus, planted.topics.clone(), 4, probs.len())?;

    println!("rounds: {} during initialization, {} afterwards", init.rounds, refined.rounds);
    println!("sizes: {:?}", refined.clustering.sizes());
    println!("psi: found {:.4}, planted {:.4}", refined.psi, psi(&truth, &probs));
    println!(
        "adjusted Rand index vs planted topics: {:.3}",
        adjusted_rand_index(refined.clustering.assignment(), &planted.topics)
    );
    Ok(())
}
