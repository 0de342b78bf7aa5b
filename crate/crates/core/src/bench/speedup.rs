//! Theoretical and measured speedups of the clustered layouts over the
//! single index.

use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::bench::workload::Workload;
use crate::cluster::{psi_for_model, Clustering, BRUTEFORCE_TERM_LIMIT};
use crate::corpus::{Corpus, ProbTable};
use crate::intersect::CostModel;
use crate::query::{QueryEngine, Variant};
use crate::{Error, Result};

/// ψ of the single-cluster layout divided by ψ of `clustering`, both under
/// `model` and over the terms of `probs`.
pub fn theoretical_speedup(
    corpus: &Corpus,
    clustering: &Clustering,
    probs: &ProbTable,
    model: CostModel,
) -> Result<f64> {
    let clustered = if clustering.frequent() == probs.len() {
        psi_for_model(clustering, probs, model)?
    } else {
        psi_for_model(&clustering.with_frequent(corpus, probs.len()), probs, model)?
    };
    let single = psi_for_model(&Clustering::single(corpus, probs.len()), probs, model)?;
    if clustered == 0.0 {
        return Err(Error::DegenerateWorkload);
    }
    Ok(single / clustered)
}

/// Steps and wall-clock time of one engine over a workload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub steps: u64,
    /// Mean total seconds per repetition.
    pub seconds: f64,
    /// Standard deviation of the per-repetition totals.
    pub seconds_stddev: f64,
    pub repetitions: usize,
}

/// Step count of a single pass, then `repetitions` timed passes on the
/// calling thread.
pub fn measure(engine: &QueryEngine, workload: &Workload, repetitions: usize) -> Measurement {
    let steps = workload
        .queries
        .iter()
        .map(|&(t, u)| engine.query(t, u).steps)
        .sum();
    timed(engine, workload, steps, repetitions)
}

fn timed(engine: &QueryEngine, workload: &Workload, steps: u64, repetitions: usize) -> Measurement {
    let repetitions = repetitions.max(1);
    let times: Vec<f64> = (0..repetitions)
        .map(|_| {
            let start = Instant::now();
            for &(t, u) in &workload.queries {
                black_box(engine.query(black_box(t), black_box(u)));
            }
            start.elapsed().as_secs_f64()
        })
        .collect();
    let mean = times.iter().sum::<f64>() / repetitions as f64;
    let var = times.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / repetitions as f64;
    Measurement {
        steps,
        seconds: mean,
        seconds_stddev: var.sqrt(),
        repetitions,
    }
}

/// Runs every query on every engine and fails on the first result mismatch.
/// Returns the total steps of each engine.
pub fn audit(engines: &[&QueryEngine], workload: &Workload) -> Result<Vec<u64>> {
    let mut steps = vec![0u64; engines.len()];
    let Some((first, rest)) = engines.split_first() else {
        return Ok(steps);
    };
    for &(t, u) in &workload.queries {
        let expected = first.query(t, u);
        steps[0] += expected.steps;
        for (i, e) in rest.iter().enumerate() {
            let got = e.query(t, u);
            if got.docs != expected.docs {
                return Err(Error::Invariant(format!(
                    "{} and {} disagree on query ({t}, {u})",
                    first.variant(),
                    e.variant()
                )));
            }
            steps[i + 1] += got.steps;
        }
    }
    Ok(steps)
}

/// Speedup of `candidate` over `baseline` in steps and in wall-clock time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredSpeedup {
    pub baseline: Measurement,
    pub candidate: Measurement,
    pub step_ratio: f64,
    pub time_ratio: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Audits both engines on the workload, then measures them.
pub fn measured_speedup(
    baseline: &QueryEngine,
    candidate: &QueryEngine,
    workload: &Workload,
    repetitions: usize,
) -> Result<MeasuredSpeedup> {
    let steps = audit(&[baseline, candidate], workload)?;
    let b = timed(baseline, workload, steps[0], repetitions);
    let c = timed(candidate, workload, steps[1], repetitions);
    Ok(MeasuredSpeedup {
        baseline: b,
        candidate: c,
        step_ratio: ratio(b.steps as f64, c.steps as f64),
        time_ratio: ratio(b.seconds, c.seconds),
    })
}

/// All speedups of one clustering on one workload. Field names are the CSV
/// columns.
///
/// - `s_t`: ψ ratio under the lookup cost.
/// - `s_l`: ψ ratio under the comparison cost, over at most
///   [`BRUTEFORCE_TERM_LIMIT`] most probable terms.
/// - `s_c`, `s_c_time`: cluster index over single, in steps and in time.
/// - `s_p`: per-cluster shards without the cluster index, in steps.
/// - `s_r`: reordered over single in time (its step ratio is always 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupReport {
    pub docs: usize,
    pub frequent_terms: usize,
    pub clusters: usize,
    pub queries: usize,
    pub repetitions: usize,
    pub s_t: f64,
    pub s_l: f64,
    pub s_c: f64,
    pub s_c_time: f64,
    pub s_p: f64,
    pub s_r: f64,
    pub steps_single: u64,
    pub steps_percluster: u64,
    pub steps_clusterindex: u64,
    pub steps_reordered: u64,
    pub secs_single: f64,
    pub secs_percluster: f64,
    pub secs_clusterindex: f64,
    pub secs_reordered: f64,
}

/// Builds the four engines, audits them against each other on the whole
/// workload, then times each one.
pub fn speedup_report(
    corpus: &Corpus,
    clustering: &Clustering,
    workload: &Workload,
    repetitions: usize,
) -> Result<SpeedupReport> {
    let probs = &workload.probs;
    let s_t = theoretical_speedup(corpus, clustering, probs, CostModel::LookupMin)?;
    let limited = if probs.len() > BRUTEFORCE_TERM_LIMIT {
        probs.truncated(BRUTEFORCE_TERM_LIMIT)?
    } else {
        probs.clone()
    };
    let s_l = theoretical_speedup(corpus, clustering, &limited, CostModel::ComparisonLog)?;

    let engines: Vec<QueryEngine> = Variant::ALL
        .iter()
        .map(|&v| QueryEngine::build(v, corpus, clustering))
        .collect();
    let refs: Vec<&QueryEngine> = engines.iter().collect();
    let steps = audit(&refs, workload)?;
    let m: Vec<Measurement> = engines
        .iter()
        .zip(steps)
        .map(|(e, s)| timed(e, workload, s, repetitions))
        .collect();
    let (single, per, ci, re) = (m[0], m[1], m[2], m[3]);
    log::info!(
        "steps single={} percluster={} clusterindex={} reordered={}",
        single.steps,
        per.steps,
        ci.steps,
        re.steps
    );
    Ok(SpeedupReport {
        docs: corpus.num_docs(),
        frequent_terms: probs.len(),
        clusters: clustering.k(),
        queries: workload.len(),
        repetitions: single.repetitions,
        s_t,
        s_l,
        s_c: ratio(single.steps as f64, ci.steps as f64),
        s_c_time: ratio(single.seconds, ci.seconds),
        s_p: ratio(single.steps as f64, per.steps as f64),
        s_r: ratio(single.seconds, re.seconds),
        steps_single: single.steps,
        steps_percluster: per.steps,
        steps_clusterindex: ci.steps,
        steps_reordered: re.steps,
        secs_single: single.seconds,
        secs_percluster: per.seconds,
        secs_clusterindex: ci.seconds,
        secs_reordered: re.seconds,
    })
}

impl fmt::Display for SpeedupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} docs, {} frequent terms, {} clusters, {} queries x {} repetitions",
            self.docs, self.frequent_terms, self.clusters, self.queries, self.repetitions
        )?;
        writeln!(f, "  S_T (lookup, from psi)      {:8.3}", self.s_t)?;
        writeln!(f, "  S_L (comparison, from psi)  {:8.3}", self.s_l)?;
        writeln!(f, "  S_C (cluster index, steps)  {:8.3}", self.s_c)?;
        writeln!(f, "  S_C (cluster index, time)   {:8.3}", self.s_c_time)?;
        writeln!(f, "  per-cluster (steps)         {:8.3}", self.s_p)?;
        write!(f, "  S_R (reordered, time)       {:8.3}", self.s_r)
    }
}
