//! Document clustering that minimizes the expected cost of two-term queries.
//!
//! The objective is
//!
//! ```text
//! ψ = Σ_{ {t,u} frequent } p(t) p(u) Σ_j cost(n_j(t), n_j(u))
//! ```
//!
//! where `n_j(t)` counts the documents of cluster `j` containing `t`.
//! Clustering always optimizes the `min` cost; the comparison-based cost is
//! only evaluated for reporting.

mod kmeans;
mod multilevel;
mod objective;
mod topdown;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::{ClusterId, DocId, Error, Result};

pub use kmeans::{kmeans, kmeans_doc_grained, kmeans_round, KMeansOutcome};
pub use multilevel::{multilevel_init, sample_size, MultilevelOutcome};
pub use objective::{
    build_score_tables, psi, psi_bruteforce, psi_for_model, score_doc, score_term, ScoreTable,
    ScoreTables, BRUTEFORCE_TERM_LIMIT,
};
pub use topdown::{piece_count, topdown};

/// Tuning knobs for every clustering algorithm. Defaults follow the
/// published implementation constants, except `max_rounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    /// Target number of clusters.
    pub k: usize,
    /// Sample factor of the multilevel initialization.
    pub epsilon: f64,
    /// K-means stops once ψ improves by less than this fraction.
    pub convergence_threshold: f64,
    /// Below this many documents, K-means updates after every single move.
    pub doc_grained_threshold: usize,
    /// Maximum number of pieces per TopDown split.
    pub chi: usize,
    /// Number of most frequent terms that enter the objective.
    pub tc: usize,
    /// Upper bound on K-means rounds or passes.
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k: 64,
            epsilon: 0.1,
            convergence_threshold: 0.01,
            doc_grained_threshold: 100_000,
            chi: 8,
            tc: 100_000,
            max_rounds: 50,
            seed: 0,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig("epsilon must lie in (0, 1)".into()));
        }
        if self.chi < 2 {
            return Err(Error::InvalidConfig("chi must be at least 2".into()));
        }
        if self.tc < 1 {
            return Err(Error::InvalidConfig("tc must be at least 1".into()));
        }
        if !(self.convergence_threshold >= 0.0) {
            return Err(Error::InvalidConfig("convergence threshold must be non-negative".into()));
        }
        if self.max_rounds < 1 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses a TOML (or plain `key = value`) file whose keys mirror the field names.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Size at or below which multilevel initialization stops sampling.
    pub fn base_case_size(&self, k: usize) -> usize {
        k.max(self.doc_grained_threshold / 10)
    }
}

/// Row-major `k × frequent` matrix of per-cluster document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    k: usize,
    frequent: usize,
    data: Vec<u32>,
}

impl CountMatrix {
    pub fn zeros(k: usize, frequent: usize) -> Self {
        Self {
            k,
            frequent,
            data: vec![0; k * frequent],
        }
    }

    pub(crate) fn from_raw(k: usize, frequent: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), k * frequent);
        Self { k, frequent, data }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn frequent(&self) -> usize {
        self.frequent
    }

    #[inline]
    pub fn get(&self, cluster: usize, term: usize) -> u32 {
        self.data[cluster * self.frequent + term]
    }

    pub fn row(&self, cluster: usize) -> &[u32] {
        &self.data[cluster * self.frequent..(cluster + 1) * self.frequent]
    }

    pub fn set(&mut self, cluster: usize, term: usize, value: u32) {
        self.data[cluster * self.frequent + term] = value;
    }
}

/// A partition of the corpus into `k` clusters together with the
/// per-cluster counts of the frequent terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assign: Vec<ClusterId>,
    sizes: Vec<u32>,
    counts: CountMatrix,
}

impl Clustering {
    /// Derives sizes and counts from an assignment. `frequent` is the number of
    /// terms, counted from ID 0, whose counts are kept.
    pub fn from_assignment(
        corpus: &Corpus,
        assign: Vec<ClusterId>,
        k: usize,
        frequent: usize,
    ) -> Result<Self> {
        if assign.len() != corpus.num_docs() {
            return Err(Error::ClusterFile(format!(
                "assignment covers {} documents, corpus has {}",
                assign.len(),
                corpus.num_docs()
            )));
        }
        if let Some(&bad) = assign.iter().find(|&&c| c as usize >= k) {
            return Err(Error::ClusterFile(format!("cluster id {bad} out of range 0..{k}")));
        }
        let frequent = corpus.frequent_count(frequent);
        let mut sizes = vec![0u32; k];
        let mut counts = CountMatrix::zeros(k, frequent);
        for (d, &c) in assign.iter().enumerate() {
            sizes[c as usize] += 1;
            for &t in corpus.frequent_terms(d as DocId, frequent) {
                counts.data[c as usize * frequent + t as usize] += 1;
            }
        }
        Ok(Self { assign, sizes, counts })
    }

    /// Every document in one cluster.
    pub fn single(corpus: &Corpus, frequent: usize) -> Self {
        Self::from_assignment(corpus, vec![0; corpus.num_docs()], 1, frequent)
            .expect("single cluster is always valid")
    }

    /// A clustering known only through its count matrix, for evaluating the
    /// objective on hand-made tables. It has no documents and zero sizes.
    pub fn from_counts(counts: CountMatrix) -> Self {
        let sizes = vec![0; counts.k()];
        Self::from_parts(Vec::new(), sizes, counts)
    }

    pub(crate) fn from_parts(assign: Vec<ClusterId>, sizes: Vec<u32>, counts: CountMatrix) -> Self {
        Self { assign, sizes, counts }
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn num_docs(&self) -> usize {
        self.assign.len()
    }

    pub fn assignment(&self) -> &[ClusterId] {
        &self.assign
    }

    pub fn cluster_of(&self, doc: DocId) -> ClusterId {
        self.assign[doc as usize]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn counts(&self) -> &CountMatrix {
        &self.counts
    }

    /// Number of frequent terms tracked in the counts.
    pub fn frequent(&self) -> usize {
        self.counts.frequent
    }

    /// `n_j(t)`; zero for terms outside the frequent range.
    pub fn count(&self, cluster: usize, term: usize) -> u32 {
        if term < self.counts.frequent {
            self.counts.get(cluster, term)
        } else {
            0
        }
    }

    /// Members of each cluster in ascending document order.
    pub fn members(&self) -> Vec<Vec<DocId>> {
        let mut members: Vec<Vec<DocId>> = self.sizes.iter().map(|&s| Vec::with_capacity(s as usize)).collect();
        for (d, &c) in self.assign.iter().enumerate() {
            members[c as usize].push(d as DocId);
        }
        members
    }

    /// The same partition with counts over a different number of frequent terms.
    pub fn with_frequent(&self, corpus: &Corpus, frequent: usize) -> Self {
        Self::from_assignment(corpus, self.assign.clone(), self.k(), frequent)
            .expect("assignment already validated")
    }

    /// Checks that sizes and counts match a recount from the corpus.
    pub fn verify(&self, corpus: &Corpus) -> Result<()> {
        let fresh = Self::from_assignment(corpus, self.assign.clone(), self.k(), self.frequent())?;
        if fresh.sizes != self.sizes {
            return Err(Error::Invariant("cluster sizes disagree with assignment".into()));
        }
        if fresh.counts != self.counts {
            return Err(Error::Invariant("term counts disagree with assignment".into()));
        }
        Ok(())
    }

    /// Writes `doc_id,cluster_id` rows after a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["doc_id", "cluster_id"])?;
        for (d, &c) in self.assign.iter().enumerate() {
            writer.write_record([d.to_string(), c.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Path {
            path: path.to_owned(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Reads a `doc_id,cluster_id` CSV. Every document must appear exactly once;
/// cluster IDs are taken as given and `k` is one more than the largest.
pub fn read_assignment_csv<R: Read>(input: R, num_docs: usize) -> Result<(Vec<ClusterId>, usize)> {
    let mut reader = csv::Reader::from_reader(input);
    let mut assign = vec![None; num_docs];
    for row in reader.records() {
        let row = row?;
        let parse = |i: usize| -> Result<u64> {
            row.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::ClusterFile(format!("bad row {:?}", row)))
        };
        let (d, c) = (parse(0)? as usize, parse(1)?);
        if d >= num_docs {
            return Err(Error::ClusterFile(format!("doc id {d} out of range")));
        }
        if c > u32::MAX as u64 {
            return Err(Error::ClusterFile(format!("cluster id {c} too large")));
        }
        if assign[d].replace(c as ClusterId).is_some() {
            return Err(Error::ClusterFile(format!("doc id {d} listed twice")));
        }
    }
    let assign: Vec<ClusterId> = assign
        .into_iter()
        .enumerate()
        .map(|(d, c)| c.ok_or_else(|| Error::ClusterFile(format!("doc id {d} missing"))))
        .collect::<Result<_>>()?;
    let k = assign.iter().max().map_or(0, |&c| c as usize + 1);
    Ok((assign, k))
}

pub fn load_clustering(path: &Path, corpus: &Corpus, frequent: usize) -> Result<Clustering> {
    let file = std::fs::File::open(path).map_err(|source| Error::Path {
        path: path.to_owned(),
        source,
    })?;
    let (assign, k) = read_assignment_csv(std::io::BufReader::new(file), corpus.num_docs())?;
    Clustering::from_assignment(corpus, assign, k.max(1), frequent)
}

/// Deterministic seed for a child subproblem.
pub(crate) fn derive_seed(seed: u64, child: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ child.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
