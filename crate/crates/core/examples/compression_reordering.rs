//! Document reordering by cluster and its effect on each codec.
//!
//! ```bash
//! cargo run --release --example compression_reordering
//! ```

use seclud::bench::{best_codec, compression_report, generate_planted_corpus, standard_orderings, PlantedConfig};
use seclud::cluster::{topdown, ClusterConfig};
use seclud::corpus::probabilities_from_corpus;
use seclud::index::Codec;

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        docs_per_topic: 1000,
        seed: 4,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000)?;
    let config = ClusterConfig {
        k: 64,
        seed: 4,
        ..ClusterConfig::default()
    };
    let clustering = topdown(corpus, &probs, config.k, &config)?;

    let rows = compression_report(corpus, &standard_orderings(corpus, &clustering, 4), &Codec::ALL);
    for r in &rows {
        println!("{:>10} {:>7} {:6.3} bits/posting", r.ordering, r.codec, r.bits_per_posting);
    }
    for ordering in ["identity", "clustered", "random"] {
        let best = best_codec(&rows, ordering).expect("ordering present");
        println!("best codec under {ordering} ordering: {}", best.codec);
    }
    Ok(())
}
