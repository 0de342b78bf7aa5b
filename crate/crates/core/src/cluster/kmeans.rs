//! K-means over the expected-cost objective.
//!
//! Two regimes share one workspace:
//!
//! - rounds: score tables are frozen, every document moves to its best
//!   cluster in parallel, then counts are rebuilt;
//! - document-grained passes: a document is taken out of its cluster, scored
//!   against all clusters and inserted into the best one, with the two
//!   affected tables updated after every move.
//!
//! Scores only measure the cost of adding a document. Ties go to the lowest
//! cluster ID.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::objective::{psi_raw, ScoreTable, ScoreTables};
use crate::cluster::{derive_seed, ClusterConfig, Clustering, CountMatrix};
use crate::corpus::{Corpus, ProbTable};
use crate::{DocId, TermId};

pub(crate) const UNASSIGNED: u32 = u32::MAX;

pub(crate) struct Workspace<'a> {
    docs: Vec<&'a [TermId]>,
    probs: &'a [f64],
    f: usize,
    k: usize,
    assign: Vec<u32>,
    counts: Vec<u32>,
    sizes: Vec<u32>,
}

impl<'a> Workspace<'a> {
    /// `docs` hold only frequent terms, i.e. IDs below `probs.len()`.
    pub fn new(docs: Vec<&'a [TermId]>, probs: &'a [f64], k: usize) -> Self {
        let f = probs.len();
        debug_assert!(docs.iter().all(|d| d.iter().all(|&t| (t as usize) < f)));
        let n = docs.len();
        Self {
            docs,
            probs,
            f,
            k,
            assign: vec![UNASSIGNED; n],
            counts: vec![0; k * f],
            sizes: vec![0; k],
        }
    }

    pub fn with_assignment(docs: Vec<&'a [TermId]>, probs: &'a [f64], k: usize, assign: &[u32]) -> Self {
        let mut ws = Self::new(docs, probs, k);
        for (i, &j) in assign.iter().enumerate() {
            ws.add(i, j as usize, None);
        }
        ws
    }

    pub fn from_clustering(corpus: &'a Corpus, clustering: &Clustering, probs: &'a ProbTable) -> Self {
        let docs = frequent_docs(corpus, probs.len());
        Self::with_assignment(docs, probs.as_slice(), clustering.k(), clustering.assignment())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assign
    }

    pub fn add(&mut self, i: usize, j: usize, mut tables: Option<&mut ScoreTables>) {
        debug_assert_eq!(self.assign[i], UNASSIGNED);
        let row = j * self.f;
        for &t in self.docs[i] {
            let slot = &mut self.counts[row + t as usize];
            if let Some(tables) = tables.as_deref_mut() {
                tables.table_mut(j).increment(*slot, self.probs[t as usize]);
            }
            *slot += 1;
        }
        self.sizes[j] += 1;
        self.assign[i] = j as u32;
    }

    pub fn remove(&mut self, i: usize, mut tables: Option<&mut ScoreTables>) {
        let j = self.assign[i] as usize;
        debug_assert!(j < self.k);
        let row = j * self.f;
        for &t in self.docs[i] {
            let slot = &mut self.counts[row + t as usize];
            if let Some(tables) = tables.as_deref_mut() {
                tables.table_mut(j).decrement(*slot, self.probs[t as usize]);
            }
            *slot -= 1;
        }
        self.sizes[j] -= 1;
        self.assign[i] = UNASSIGNED;
    }

    pub fn tables(&self) -> ScoreTables {
        ScoreTables::from_tables(
            (0..self.k)
                .map(|j| ScoreTable::from_counts(&self.counts[j * self.f..(j + 1) * self.f], self.probs))
                .collect(),
        )
    }

    #[inline]
    pub fn score(&self, tables: &ScoreTables, j: usize, i: usize) -> f64 {
        let table = tables.table(j);
        let row = &self.counts[j * self.f..(j + 1) * self.f];
        self.docs[i]
            .iter()
            .map(|&t| self.probs[t as usize] * table.above(row[t as usize]))
            .sum()
    }

    /// Cheapest cluster for document `i`; ties go to the lowest ID.
    pub fn best(&self, tables: &ScoreTables, i: usize) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for j in 0..self.k {
            let s = self.score(tables, j, i);
            if s < best.1 {
                best = (j, s);
            }
        }
        best
    }

    pub fn psi(&self) -> f64 {
        psi_raw(self.k, self.f, &self.counts, self.probs)
    }

    /// Places unassigned documents one by one, in `order`, into their best cluster.
    pub fn insert_greedy(&mut self, order: &[usize]) {
        let mut tables = self.tables();
        for &i in order {
            let (j, _) = self.best(&tables, i);
            self.add(i, j, Some(&mut tables));
        }
    }

    /// One frozen-table round. Returns the number of documents that changed cluster.
    pub fn round(&mut self) -> usize {
        let tables = self.tables();
        let next: Vec<u32> = (0..self.len())
            .into_par_iter()
            .map(|i| self.best(&tables, i).0 as u32)
            .collect();
        let moves = next.iter().zip(&self.assign).filter(|(a, b)| a != b).count();
        self.rebuild(next);
        if self.sizes.contains(&0) {
            let fresh = self.tables();
            self.reseed_empty(&fresh);
        }
        moves
    }

    fn rebuild(&mut self, assign: Vec<u32>) {
        const CHUNK: usize = 4096;
        let (k, f) = (self.k, self.f);
        let docs = &self.docs;
        let (counts, sizes) = assign
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut counts = vec![0u32; k * f];
                let mut sizes = vec![0u32; k];
                for (off, &j) in chunk.iter().enumerate() {
                    sizes[j as usize] += 1;
                    for &t in docs[c * CHUNK + off] {
                        counts[j as usize * f + t as usize] += 1;
                    }
                }
                (counts, sizes)
            })
            .reduce(
                || (vec![0u32; k * f], vec![0u32; k]),
                |(mut ca, mut sa), (cb, sb)| {
                    ca.iter_mut().zip(cb).for_each(|(a, b)| *a += b);
                    sa.iter_mut().zip(sb).for_each(|(a, b)| *a += b);
                    (ca, sa)
                },
            );
        self.counts = counts;
        self.sizes = sizes;
        self.assign = assign;
    }

    /// Refills each empty cluster with the document that scores worst in its
    /// own cluster, taken from a cluster that keeps at least one member. Only
    /// documents with a positive score qualify.
    fn reseed_empty(&mut self, tables: &ScoreTables) {
        for e in 0..self.k {
            if self.sizes[e] != 0 {
                continue;
            }
            let mut pick: Option<(usize, f64)> = None;
            for i in 0..self.len() {
                let j = self.assign[i] as usize;
                if self.sizes[j] < 2 {
                    continue;
                }
                let s = self.score(tables, j, i);
                if s > 0.0 && pick.is_none_or(|(_, best)| s > best) {
                    pick = Some((i, s));
                }
            }
            let Some((i, _)) = pick else { return };
            self.remove(i, None);
            self.add(i, e, None);
        }
    }

    /// One document-grained pass in `order`. Returns the number of moves.
    pub fn doc_grained_pass(&mut self, order: &[usize], tables: &mut ScoreTables) -> usize {
        let mut moves = 0;
        for &i in order {
            let old = self.assign[i] as usize;
            self.remove(i, Some(tables));
            let (j, _) = self.best(tables, i);
            self.add(i, j, Some(tables));
            if j != old {
                moves += 1;
            }
        }
        moves
    }

    /// K-means until ψ improves by less than the convergence threshold, a
    /// round changes nothing, or `max_rounds` is reached. Document-grained
    /// below the configured size threshold. Returns the rounds run.
    pub fn refine(&mut self, config: &ClusterConfig, rng: &mut ChaCha8Rng) -> usize {
        let doc_grained = self.len() < config.doc_grained_threshold;
        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut tables = if doc_grained { Some(self.tables()) } else { None };
        let mut prev = self.psi();
        let mut rounds = 0;
        while rounds < config.max_rounds {
            rounds += 1;
            let moves = match tables.as_mut() {
                Some(tables) => {
                    order.shuffle(rng);
                    self.doc_grained_pass(&order, tables)
                }
                None => self.round(),
            };
            let current = self.psi();
            let improved = prev > 0.0 && (prev - current) / prev >= config.convergence_threshold;
            prev = current;
            if moves == 0 || !improved {
                break;
            }
        }
        rounds
    }

    pub fn into_clustering(self) -> Clustering {
        Clustering::from_parts(
            self.assign,
            self.sizes,
            CountMatrix::from_raw(self.k, self.f, self.counts),
        )
    }
}

pub(crate) fn frequent_docs(corpus: &Corpus, frequent: usize) -> Vec<&[TermId]> {
    (0..corpus.num_docs())
        .map(|d| corpus.frequent_terms(d as DocId, frequent))
        .collect()
}

/// A converged clustering, the rounds it took and its final ψ.
#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub clustering: Clustering,
    pub rounds: usize,
    pub psi: f64,
}

/// One round with frozen score tables: every document moves to its cheapest
/// cluster. Returns the new clustering and its ψ.
pub fn kmeans_round(corpus: &Corpus, clustering: &Clustering, probs: &ProbTable) -> (Clustering, f64) {
    let mut ws = Workspace::from_clustering(corpus, clustering, probs);
    ws.round();
    let psi = ws.psi();
    (ws.into_clustering(), psi)
}

/// Document-grained passes in seeded random order until a pass moves
/// nothing or `max_rounds` passes have run.
pub fn kmeans_doc_grained(
    corpus: &Corpus,
    clustering: &Clustering,
    probs: &ProbTable,
    config: &ClusterConfig,
) -> Clustering {
    let mut ws = Workspace::from_clustering(corpus, clustering, probs);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xd0c));
    let mut order: Vec<usize> = (0..ws.len()).collect();
    let mut tables = ws.tables();
    for _ in 0..config.max_rounds {
        order.shuffle(&mut rng);
        if ws.doc_grained_pass(&order, &mut tables) == 0 {
            break;
        }
    }
    ws.into_clustering()
}

/// Runs K-means from `clustering` until convergence.
pub fn kmeans(
    corpus: &Corpus,
    clustering: &Clustering,
    probs: &ProbTable,
    config: &ClusterConfig,
) -> KMeansOutcome {
    let mut ws = Workspace::from_clustering(corpus, clustering, probs);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0x6b6d));
    let rounds = ws.refine(config, &mut rng);
    let psi = ws.psi();
    KMeansOutcome {
        clustering: ws.into_clustering(),
        rounds,
        psi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::objective::psi;
    use crate::corpus::{ingest, probabilities_from_corpus, InputFormat};

    #[test]
    fn identical_documents_collapse_into_cluster_zero() {
        let corpus = ingest("a b\na b\na b\na b\n".as_bytes(), InputFormat::Plain).unwrap();
        let probs = probabilities_from_corpus(&corpus, 10).unwrap();
        let start = Clustering::from_assignment(&corpus, vec![0, 1, 2, 1], 3, 10).unwrap();
        let (next, psi_value) = kmeans_round(&corpus, &start, &probs);
        next.verify(&corpus).unwrap();
        assert_eq!(next.assignment(), &[0, 0, 0, 0]);
        assert_eq!(next.sizes(), &[4, 0, 0]);
        assert_eq!(psi_value, psi(&Clustering::single(&corpus, 10), &probs));
    }

    #[test]
    fn single_document_goes_to_cheaper_cluster() {
        let corpus = ingest("a b\na c\nb\n".as_bytes(), InputFormat::Plain).unwrap();
        let probs = probabilities_from_corpus(&corpus, 10).unwrap();
        let docs = frequent_docs(&corpus, probs.len());
        let mut ws = Workspace::new(docs, probs.as_slice(), 2);
        ws.add(0, 0, None);
        ws.add(1, 1, None);
        let tables = ws.tables();
        let s0 = ws.score(&tables, 0, 2);
        let s1 = ws.score(&tables, 1, 2);
        let (best, score) = ws.best(&tables, 2);
        assert_eq!(score, s0.min(s1));
        assert_eq!(best, if s0 <= s1 { 0 } else { 1 });
    }

    #[test]
    fn doc_grained_terminates_on_symmetric_pair() {
        let corpus = ingest("a\na\n".as_bytes(), InputFormat::Plain).unwrap();
        let probs = probabilities_from_corpus(&corpus, 10).unwrap();
        let start = Clustering::from_assignment(&corpus, vec![1, 0], 2, 10).unwrap();
        let config = ClusterConfig {
            max_rounds: 1000,
            ..ClusterConfig::default()
        };
        let out = kmeans_doc_grained(&corpus, &start, &probs, &config);
        out.verify(&corpus).unwrap();
    }

    #[test]
    fn kmeans_terminates_and_keeps_counts_consistent() {
        let text = "a b c\na b\nx y z\nx y\na c\nz y\nb c\nx z\n";
        let corpus = ingest(text.as_bytes(), InputFormat::Plain).unwrap();
        let probs = probabilities_from_corpus(&corpus, 100).unwrap();
        let start = Clustering::from_assignment(&corpus, vec![0, 1, 0, 1, 0, 1, 0, 1], 2, 100).unwrap();
        for threshold in [0, 100] {
            let config = ClusterConfig {
                doc_grained_threshold: threshold,
                ..ClusterConfig::default()
            };
            let out = kmeans(&corpus, &start, &probs, &config);
            assert!(out.rounds >= 1 && out.rounds <= config.max_rounds);
            out.clustering.verify(&corpus).unwrap();
            assert!((out.psi - psi(&out.clustering, &probs)).abs() < 1e-12);
        }
    }
}
