//! Theoretical and measured speedups of a clustering on a generated workload.
//!
//! ```bash
//! cargo run --release --example speedup_report
//! ```

use seclud::bench::{generate_planted_corpus, generate_workload, speedup_report, write_csv, PlantedConfig};
use seclud::cluster::{topdown, ClusterConfig};
use seclud::corpus::probabilities_from_corpus;

fn main() -> seclud::Result<()> {
    let planted = generate_planted_corpus(&PlantedConfig {
        docs_per_topic: 1000,
        seed: 9,
        ..PlantedConfig::default()
    })?;
    let corpus = &planted.corpus;
    let probs = probabilities_from_corpus(corpus, 100_000)?;
    let config = ClusterConfig {
        k: 64,
        seed: 9,
        ..ClusterConfig::default()
    };
    let clustering = topdown(corpus, &probs, config.k, &config)?;
    let workload = generate_workload(&probs, 20_000, 9)?;

    let report = speedup_report(corpus, &clustering, &workload, 3)?;
    println!("{report}\n");
    write_csv(std::io::stdout(), &[report])?;
    Ok(())
}
