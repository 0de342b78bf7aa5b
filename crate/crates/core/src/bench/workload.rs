//! Two-term query workloads: i.i.d. pairs drawn from a probability table, or
//! pairs read from a query log.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, ProbTable};
use crate::{Error, Result, TermId};

/// A list of term pairs, repeated pairs kept, plus the table that S_T uses.
#[derive(Debug, Clone)]
pub struct Workload {
    pub queries: Vec<(TermId, TermId)>,
    pub probs: ProbTable,
    /// Pairs dropped because both terms were equal or unknown.
    pub dropped: usize,
}

impl Workload {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Builds a workload from logged pairs. Self-pairs and pairs with a term
    /// outside the dictionary are dropped and counted.
    pub fn from_log<S: AsRef<str>>(log: &[(S, S)], corpus: &Corpus, probs: ProbTable) -> Self {
        let mut queries = Vec::with_capacity(log.len());
        let mut dropped = 0;
        for (a, b) in log {
            match (corpus.term_id(a.as_ref()), corpus.term_id(b.as_ref())) {
                (Some(t), Some(u)) if t != u => queries.push((t, u)),
                _ => dropped += 1,
            }
        }
        Self { queries, probs, dropped }
    }
}

/// Draws `num_queries` pairs with both terms independent under `probs`;
/// a pair with equal terms is redrawn.
pub fn generate_workload(probs: &ProbTable, num_queries: usize, seed: u64) -> Result<Workload> {
    let support = probs.as_slice().iter().filter(|&&p| p > 0.0).count();
    if support < 2 {
        return Err(Error::DegenerateWorkload);
    }
    let dist = WeightedIndex::new(probs.as_slice()).map_err(|_| Error::DegenerateWorkload)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let queries = (0..num_queries)
        .map(|_| loop {
            let t = dist.sample(&mut rng) as TermId;
            let u = dist.sample(&mut rng) as TermId;
            if t != u {
                break (t, u);
            }
        })
        .collect();
    Ok(Workload {
        queries,
        probs: probs.clone(),
        dropped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ProbSource;

    fn table(w: &[f64]) -> ProbTable {
        ProbTable::from_weights(w.to_vec(), ProbSource::QueryLog).unwrap()
    }

    #[test]
    fn deterministic_and_without_self_pairs() {
        let p = table(&[0.7, 0.2, 0.1]);
        let a = generate_workload(&p, 1000, 5).unwrap();
        let b = generate_workload(&p, 1000, 5).unwrap();
        assert_eq!(a.queries, b.queries);
        assert!(a.queries.iter().all(|(t, u)| t != u));
        assert_eq!(a.len(), 1000);
    }

    #[test]
    fn needs_two_terms() {
        assert!(matches!(
            generate_workload(&table(&[1.0, 0.0]), 10, 0),
            Err(Error::DegenerateWorkload)
        ));
    }

    #[test]
    fn from_log_drops_self_and_unknown_pairs() {
        let corpus = crate::corpus::ingest("a b\nb c\n".as_bytes(), crate::corpus::InputFormat::Plain).unwrap();
        let p = table(&[1.0, 1.0, 1.0]);
        let log = [("a", "b"), ("a", "a"), ("a", "zz"), ("c", "b")];
        let w = Workload::from_log(&log, &corpus, p);
        assert_eq!(w.len(), 2);
        assert_eq!(w.dropped, 2);
    }
}
