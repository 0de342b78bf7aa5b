//! Multilevel initialization: cluster a uniform sample of
//! `max(k, ⌈ε·|D|⌉)` documents recursively, place the remaining documents
//! greedily, then refine with K-means. Small inputs are seeded with `k`
//! singleton clusters instead of sampling further; seeds are spread out by
//! sampling each new one with probability proportional to its cheapest
//! insertion score against the seeds chosen so far.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::kmeans::{frequent_docs, Workspace};
use crate::cluster::{derive_seed, ClusterConfig, Clustering};
use crate::corpus::{Corpus, ProbTable};
use crate::{Error, Result, TermId};

/// Size of the sample clustered at the next level: `max(k, ⌈ε·n⌉)`.
pub fn sample_size(n: usize, k: usize, epsilon: f64) -> usize {
    k.max((epsilon * n as f64).ceil() as usize)
}

/// A multilevel clustering and the K-means rounds run at the top level.
#[derive(Debug, Clone)]
pub struct MultilevelOutcome {
    pub clustering: Clustering,
    pub rounds: usize,
}

/// Clusters the whole corpus into `k` clusters.
pub fn multilevel_init(
    corpus: &Corpus,
    probs: &ProbTable,
    k: usize,
    config: &ClusterConfig,
) -> Result<MultilevelOutcome> {
    config.validate()?;
    let docs = frequent_docs(corpus, probs.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (assign, rounds) = cluster_documents(docs, probs.as_slice(), k, config, &mut rng)?;
    let clustering = Clustering::from_assignment(corpus, assign, k, probs.len())?;
    Ok(MultilevelOutcome { clustering, rounds })
}

/// Assigns each of `docs` to one of `k` clusters. Returns the assignment and
/// the number of K-means rounds run on the full set.
pub(crate) fn cluster_documents(
    docs: Vec<&[TermId]>,
    probs: &[f64],
    k: usize,
    config: &ClusterConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<u32>, usize)> {
    let n = docs.len();
    if n < k || k == 0 {
        return Err(Error::TooFewDocuments { docs: n, k });
    }
    if n == k {
        return Ok(((0..k as u32).collect(), 0));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let (seeded, seed_assign) = if n <= config.base_case_size(k) {
        let seeds = spread_seeds(&docs, probs, k, rng);
        let mut rest: Vec<usize> = order.iter().copied().filter(|i| !seeds.contains(i)).collect();
        order = seeds;
        order.append(&mut rest);
        (k, (0..k as u32).collect::<Vec<_>>())
    } else {
        let s = sample_size(n, k, config.epsilon);
        let sample: Vec<&[TermId]> = order[..s].iter().map(|&i| docs[i]).collect();
        let mut child = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, n as u64));
        let (sample_assign, _) = cluster_documents(sample, probs, k, config, &mut child)?;
        (s, sample_assign)
    };
    let mut ws = Workspace::new(docs, probs, k);
    for (&i, &j) in order[..seeded].iter().zip(&seed_assign) {
        ws.add(i, j as usize, None);
    }
    ws.insert_greedy(&order[seeded..]);
    let rounds = ws.refine(config, rng);
    Ok((ws.assignment().to_vec(), rounds))
}

/// ψ increase when `doc` joins a cluster holding only `seed`: every term of
/// `doc` missing from `seed` pairs once with each term of `seed`.
fn singleton_score(doc: &[TermId], seed: &[TermId], seed_mass: f64, probs: &[f64]) -> f64 {
    let mut missing = 0.0;
    let mut j = 0;
    for &t in doc {
        while j < seed.len() && seed[j] < t {
            j += 1;
        }
        if j == seed.len() || seed[j] != t {
            missing += probs[t as usize];
        }
    }
    missing * seed_mass
}

/// Picks `k` distinct seed documents: the first uniformly, each further one
/// with probability proportional to its smallest singleton score against
/// the seeds so far. Falls back to uniform choice when all scores are zero.
fn spread_seeds(docs: &[&[TermId]], probs: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = docs.len();
    let mass = |d: &[TermId]| d.iter().map(|&t| probs[t as usize]).sum::<f64>();
    let mut seeds = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let mut nearest = vec![f64::INFINITY; n];
    let mut next = rand::Rng::random_range(rng, 0..n);
    loop {
        seeds.push(next);
        taken[next] = true;
        if seeds.len() == k {
            return seeds;
        }
        let seed = docs[next];
        let seed_mass = mass(seed);
        for (i, doc) in docs.iter().enumerate() {
            if !taken[i] {
                nearest[i] = nearest[i].min(singleton_score(doc, seed, seed_mass, probs));
            }
        }
        let weights: Vec<f64> = (0..n).map(|i| if taken[i] { 0.0 } else { nearest[i] }).collect();
        next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
                free[rand::Rng::random_range(rng, 0..free.len())]
            }
        };
    }
}
