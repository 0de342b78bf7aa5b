//! The expected-cost objective on a hand-made count table: two equally
//! likely query terms spread over four clusters.
//!
//! ```bash
//! cargo run --example objective
//! ```

use seclud::cluster::{build_score_tables, psi, score_term, Clustering, CountMatrix};
use seclud::corpus::{ProbSource, ProbTable};

fn table(rows: &[(u32, u32)]) -> Clustering {
    let mut counts = CountMatrix::zeros(rows.len(), 2);
    for (j, &(a, b)) in rows.iter().enumerate() {
        counts.set(j, 0, a);
        counts.set(j, 1, b);
    }
    Clustering::from_counts(counts)
}

fn main() -> seclud::Result<()> {
    let probs = ProbTable::from_weights(vec![1.0, 1.0], ProbSource::QueryLog)?;
    let clustered = table(&[(2000, 10_000), (10_000, 1000), (40_000, 1000), (1000, 25_000)]);
    let single = table(&[(53_000, 37_000)]);

    let (c, s) = (psi(&clustered, &probs), psi(&single, &probs));
    println!("psi clustered = {c}, single = {s}, predicted speedup = {}", s / c);

    // adding a one-term document to a cluster raises psi by exactly its score
    let tables = build_score_tables(&clustered, &probs);
    for j in 0..clustered.k() {
        let a = score_term(&tables, &clustered, j, 0, &probs);
        let b = score_term(&tables, &clustered, j, 1, &probs);
        println!("cluster {j}: score(a) = {a}, score(b) = {b}");
    }
    Ok(())
}
