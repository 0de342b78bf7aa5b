//! The expected-cost objective ψ and the delta-score tables.
//!
//! Adding a document that contains only term `t` to cluster `j` raises
//! `min(n_j(t), n_j(u))` by one exactly for the terms `u` with
//! `n_j(u) > n_j(t)`, so
//!
//! ```text
//! score(j, t) = p(t) · S_j(n_j(t)),   S_j(v) = Σ_{u : n_j(u) > v} p(u).
//! ```
//!
//! `S_j` is stored as an array indexed by count value, which gives O(1)
//! evaluation and O(1) updates when a single count moves by one.

use crate::cluster::{Clustering, CountMatrix};
use crate::corpus::{Corpus, ProbTable};
use crate::intersect::CostModel;
use crate::{DocId, Error, Result, TermId};

/// Pair enumeration is refused above this many frequent terms.
pub const BRUTEFORCE_TERM_LIMIT: usize = 2_000;

/// Suffix probability sums of one cluster: `above[v]` is the probability
/// mass of terms whose count exceeds `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    above: Vec<f64>,
}

impl ScoreTable {
    /// Builds the table from one cluster's counts.
    pub fn from_counts(counts: &[u32], probs: &[f64]) -> Self {
        let n = counts.len().min(probs.len());
        let max = counts[..n].iter().copied().max().unwrap_or(0) as usize;
        let mut above = vec![0.0; max + 1];
        // mass at each count, shifted down by one: above[c - 1] collects count c
        for t in 0..n {
            let c = counts[t] as usize;
            if c > 0 {
                above[c - 1] += probs[t];
            }
        }
        for v in (0..max).rev() {
            above[v] += above[v + 1];
        }
        Self { above }
    }

    /// `S(v)`: mass of terms with count strictly above `v`.
    #[inline]
    pub fn above(&self, v: u32) -> f64 {
        self.above.get(v as usize).copied().unwrap_or(0.0)
    }

    /// Mass of all terms present in the cluster.
    pub fn total_mass(&self) -> f64 {
        self.above(0)
    }

    /// Largest count value in the cluster.
    pub fn max_count(&self) -> u32 {
        (self.above.len() - 1) as u32
    }

    /// A term of probability `p` went from count `c` to `c + 1`.
    #[inline]
    pub(crate) fn increment(&mut self, c: u32, p: f64) {
        let c = c as usize;
        if self.above.len() < c + 2 {
            self.above.resize(c + 2, 0.0);
        }
        self.above[c] += p;
    }

    /// A term of probability `p` went from count `c` to `c - 1`.
    #[inline]
    pub(crate) fn decrement(&mut self, c: u32, p: f64) {
        debug_assert!(c >= 1);
        self.above[c as usize - 1] -= p;
    }
}

/// One [`ScoreTable`] per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTables {
    tables: Vec<ScoreTable>,
}

impl ScoreTables {
    pub fn from_counts(counts: &CountMatrix, probs: &[f64]) -> Self {
        let tables = (0..counts.k())
            .map(|j| ScoreTable::from_counts(counts.row(j), probs))
            .collect();
        Self { tables }
    }

    pub(crate) fn from_tables(tables: Vec<ScoreTable>) -> Self {
        Self { tables }
    }

    pub fn table(&self, cluster: usize) -> &ScoreTable {
        &self.tables[cluster]
    }

    pub(crate) fn table_mut(&mut self, cluster: usize) -> &mut ScoreTable {
        &mut self.tables[cluster]
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

/// Score tables for every cluster of `clustering`.
pub fn build_score_tables(clustering: &Clustering, probs: &ProbTable) -> ScoreTables {
    ScoreTables::from_counts(clustering.counts(), probs.as_slice())
}

/// Increase of ψ when a document holding only `term` joins `cluster`.
pub fn score_term(
    tables: &ScoreTables,
    clustering: &Clustering,
    cluster: usize,
    term: TermId,
    probs: &ProbTable,
) -> f64 {
    let p = probs.p(term);
    if p == 0.0 {
        return 0.0;
    }
    p * tables.table(cluster).above(clustering.count(cluster, term as usize))
}

/// Sum of [`score_term`] over the frequent terms of `doc`. Exact for
/// single-term documents; for larger documents it ignores interactions
/// between the document's own terms.
pub fn score_doc(
    tables: &ScoreTables,
    clustering: &Clustering,
    cluster: usize,
    corpus: &Corpus,
    doc: DocId,
    probs: &ProbTable,
) -> f64 {
    corpus
        .frequent_terms(doc, probs.len())
        .iter()
        .map(|&t| score_term(tables, clustering, cluster, t, probs))
        .sum()
}

/// ψ of one cluster under the `min` cost, from its counts.
///
/// Terms are visited by decreasing count; every term seen earlier has a
/// count at least as large, so the pair's `min` is the current count.
pub(crate) fn cluster_psi(counts: &[u32], probs: &[f64]) -> f64 {
    let n = counts.len().min(probs.len());
    let mut present: Vec<(u32, f64)> = (0..n)
        .filter(|&t| counts[t] > 0 && probs[t] > 0.0)
        .map(|t| (counts[t], probs[t]))
        .collect();
    present.sort_unstable_by_key(|&(c, _)| std::cmp::Reverse(c));
    let mut seen = 0.0;
    let mut total = 0.0;
    for (c, p) in present {
        total += p * c as f64 * seen;
        seen += p;
    }
    total
}

/// ψ under the `min` cost, summed over clusters in `O(m_j log m_j)` each.
pub fn psi(clustering: &Clustering, probs: &ProbTable) -> f64 {
    psi_counts(clustering.counts(), probs.as_slice())
}

pub(crate) fn psi_counts(counts: &CountMatrix, probs: &[f64]) -> f64 {
    (0..counts.k()).map(|j| cluster_psi(counts.row(j), probs)).sum()
}

pub(crate) fn psi_raw(k: usize, f: usize, counts: &[u32], probs: &[f64]) -> f64 {
    (0..k).map(|j| cluster_psi(&counts[j * f..(j + 1) * f], probs)).sum()
}

/// ψ by enumerating all unordered pairs of frequent terms.
pub fn psi_bruteforce(clustering: &Clustering, probs: &ProbTable, model: CostModel) -> Result<f64> {
    let counts = clustering.counts();
    let n = counts.frequent().min(probs.len());
    if n > BRUTEFORCE_TERM_LIMIT {
        return Err(Error::TooManyTerms {
            terms: n,
            limit: BRUTEFORCE_TERM_LIMIT,
        });
    }
    let p = probs.as_slice();
    let mut total = 0.0;
    for t in 0..n {
        for u in t + 1..n {
            let weight = p[t] * p[u];
            if weight == 0.0 {
                continue;
            }
            let pair: f64 = (0..counts.k())
                .map(|j| model.cost(counts.get(j, t) as u64, counts.get(j, u) as u64))
                .sum();
            total += weight * pair;
        }
    }
    Ok(total)
}

/// ψ for either cost model: sorting for `min`, pair enumeration for the
/// comparison-based cost.
pub fn psi_for_model(clustering: &Clustering, probs: &ProbTable, model: CostModel) -> Result<f64> {
    match model {
        CostModel::LookupMin => Ok(psi(clustering, probs)),
        CostModel::ComparisonLog => psi_bruteforce(clustering, probs, model),
    }
}
