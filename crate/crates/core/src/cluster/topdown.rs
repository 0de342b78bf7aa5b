//! TopDown clustering: recursively split every subproblem larger than
//! `|D|/k` into `clamp(⌈s·k/|D|⌉, 2, χ)` pieces with multilevel K-means.
//! Leaves are numbered in depth-first order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::kmeans::frequent_docs;
use crate::cluster::multilevel::cluster_documents;
use crate::cluster::{derive_seed, ClusterConfig, Clustering};
use crate::corpus::{Corpus, ProbTable};
use crate::{DocId, Error, Result, TermId};

/// Pieces for a subproblem of `s` out of `total` documents.
pub fn piece_count(s: usize, total: usize, k: usize, chi: usize) -> usize {
    ((s * k).div_ceil(total)).clamp(2, chi)
}

/// Clusters `corpus` hierarchically into between `k` and `2k` clusters.
pub fn topdown(corpus: &Corpus, probs: &ProbTable, k: usize, config: &ClusterConfig) -> Result<Clustering> {
    config.validate()?;
    let n = corpus.num_docs();
    if k < 2 {
        return Err(Error::InvalidConfig("TopDown needs k >= 2".into()));
    }
    if n < k {
        return Err(Error::TooFewDocuments { docs: n, k });
    }
    let docs = frequent_docs(corpus, probs.len());
    let all: Vec<DocId> = (0..n as DocId).collect();
    let splitter = Splitter {
        docs: &docs,
        probs: probs.as_slice(),
        total: n,
        k,
        config,
    };
    let leaves = splitter.split(all, config.seed)?;
    let mut assign = vec![0u32; n];
    for (c, leaf) in leaves.iter().enumerate() {
        for &d in leaf {
            assign[d as usize] = c as u32;
        }
    }
    Clustering::from_assignment(corpus, assign, leaves.len(), probs.len())
}

struct Splitter<'a> {
    docs: &'a [&'a [TermId]],
    probs: &'a [f64],
    total: usize,
    k: usize,
    config: &'a ClusterConfig,
}

impl Splitter<'_> {
    fn is_leaf(&self, s: usize) -> bool {
        // s <= total / k, in integers
        s * self.k <= self.total
    }

    fn split(&self, members: Vec<DocId>, seed: u64) -> Result<Vec<Vec<DocId>>> {
        let s = members.len();
        if self.is_leaf(s) {
            return Ok(vec![members]);
        }
        let q = piece_count(s, self.total, self.k, self.config.chi).min(s);
        let config = ClusterConfig {
            seed,
            ..self.config.clone()
        };
        let sub: Vec<&[TermId]> = members.iter().map(|&d| self.docs[d as usize]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (assign, _) = cluster_documents(sub, self.probs, q, &config, &mut rng)?;

        let mut pieces = vec![Vec::new(); q];
        for (&d, &j) in members.iter().zip(&assign) {
            pieces[j as usize].push(d);
        }
        pieces.retain(|p| !p.is_empty());
        if pieces.len() < 2 {
            // indistinguishable documents: split by position
            let chunk = s.div_ceil(q);
            pieces = members.chunks(chunk).map(<[DocId]>::to_vec).collect();
        }

        let nested: Vec<Vec<Vec<DocId>>> = pieces
            .into_par_iter()
            .enumerate()
            .map(|(i, piece)| self.split(piece, derive_seed(seed, i as u64)))
            .collect::<Result<_>>()?;
        Ok(nested.into_iter().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piece_counts() {
        assert_eq!(piece_count(1000, 1000, 10, 8), 8);
        assert_eq!(piece_count(150, 1000, 10, 8), 2);
        assert_eq!(piece_count(101, 1000, 10, 8), 2);
        assert_eq!(piece_count(350, 1000, 10, 8), 4);
    }
}
