//! Compression and term-cutoff reports, clustering agreement, and CSV /
//! plot-series output.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bench::speedup::speedup_report;
use crate::bench::workload::Workload;
use crate::cluster::{derive_seed, topdown, ClusterConfig, Clustering};
use crate::corpus::Corpus;
use crate::index::{bits_per_posting, build_index, Codec};
use crate::query::{build_reordering, Permutation};
use crate::{DocId, Error, Result};

/// One (ordering, codec) cell of a compression report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionRow {
    pub ordering: String,
    pub codec: String,
    pub postings: u64,
    pub bits_per_posting: f64,
}

/// Identity, cluster-wise and uniformly random document orderings. The
/// random ordering uses a seed derived from `seed`, not `seed` itself.
pub fn standard_orderings(corpus: &Corpus, clustering: &Clustering, seed: u64) -> Vec<(String, Permutation)> {
    let n = corpus.num_docs();
    let mut random: Vec<DocId> = (0..n as DocId).collect();
    random.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x7261_6e64)));
    vec![
        ("identity".to_string(), Permutation::identity(n)),
        ("clustered".to_string(), build_reordering(clustering)),
        (
            "random".to_string(),
            Permutation::from_forward(random).expect("shuffle is a permutation"),
        ),
    ]
}

/// Bits per posting of the full index for every ordering and codec.
pub fn compression_report(
    corpus: &Corpus,
    orderings: &[(String, Permutation)],
    codecs: &[Codec],
) -> Vec<CompressionRow> {
    let index = build_index(corpus);
    let mut rows = Vec::with_capacity(orderings.len() * codecs.len());
    for (name, perm) in orderings {
        let permuted = index.permuted(perm.forward());
        for &codec in codecs {
            rows.push(CompressionRow {
                ordering: name.clone(),
                codec: codec.name().to_string(),
                postings: permuted.total_postings(),
                bits_per_posting: bits_per_posting(&permuted, codec),
            });
        }
    }
    rows
}

/// The codec with the fewest bits per posting under `ordering`; ties go to
/// the codec listed first.
pub fn best_codec<'a>(rows: &'a [CompressionRow], ordering: &str) -> Option<&'a CompressionRow> {
    rows.iter()
        .filter(|r| r.ordering == ordering)
        .fold(None, |best: Option<&CompressionRow>, r| match best {
            Some(b) if b.bits_per_posting <= r.bits_per_posting => Some(b),
            _ => Some(r),
        })
}

/// Speedups after re-clustering with the objective restricted to `tc` terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcRow {
    pub tc: usize,
    pub frequent_terms: usize,
    pub clusters: usize,
    pub s_t: f64,
    pub s_c: f64,
    pub s_r: f64,
}

/// Re-clusters with TopDown once per cutoff, keeping `config.seed`, and
/// evaluates every clustering on the same workload and probability table.
pub fn tc_sensitivity(
    corpus: &Corpus,
    workload: &Workload,
    tc_values: &[usize],
    config: &ClusterConfig,
    repetitions: usize,
) -> Result<Vec<TcRow>> {
    tc_values
        .iter()
        .map(|&tc| {
            let probs = workload.probs.truncated(tc.max(1))?;
            let config = ClusterConfig {
                tc,
                ..config.clone()
            };
            let clustering = topdown(corpus, &probs, config.k, &config)?;
            let report = speedup_report(corpus, &clustering, workload, repetitions)?;
            log::info!("tc={tc}: S_T={:.3} S_C={:.3} S_R={:.3}", report.s_t, report.s_c, report.s_r);
            Ok(TcRow {
                tc,
                frequent_terms: probs.len(),
                clusters: clustering.k(),
                s_t: report.s_t,
                s_c: report.s_c,
                s_r: report.s_r,
            })
        })
        .collect()
}

/// Adjusted Rand index of two labelings of the same items.
pub fn adjusted_rand_index(a: &[u32], b: &[u32]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must have equal length");
    let n = a.len() as f64;
    let pairs = |x: f64| x * (x - 1.0) / 2.0;
    let mut cells: HashMap<(u32, u32), f64> = HashMap::new();
    let mut rows: HashMap<u32, f64> = HashMap::new();
    let mut cols: HashMap<u32, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_default() += 1.0;
        *rows.entry(x).or_default() += 1.0;
        *cols.entry(y).or_default() += 1.0;
    }
    let index: f64 = cells.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(n);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Writes serializable rows as CSV with a header.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one `x y` series per file into `dir`, named `<name>.dat`.
pub fn write_plot_series(dir: &Path, series: &[(&str, Vec<(f64, f64)>)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Path {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, points) in series {
        let path = dir.join(format!("{name}.dat"));
        let mut text = String::new();
        for (x, y) in points {
            text.push_str(&format!("{x} {y}\n"));
        }
        fs::write(&path, text).map_err(|source| Error::Path { path, source })?;
    }
    Ok(())
}
