//! Planted-topic corpora: documents drawn from per-topic Zipf vocabularies
//! mixed with a shared pool, with the true topic of every document kept as
//! ground truth.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusBuilder};
use crate::{Error, Result};

/// Parameters of [`generate_planted_corpus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedConfig {
    pub topics: usize,
    pub docs_per_topic: usize,
    /// Private vocabulary size of each topic.
    pub vocab_per_topic: usize,
    /// Size of the pool shared by all topics.
    pub shared_vocab: usize,
    /// Probability that a token comes from the shared pool.
    pub overlap_fraction: f64,
    pub zipf_exponent: f64,
    /// Tokens drawn per document, before duplicates collapse.
    pub doc_length: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            topics: 16,
            docs_per_topic: 3125,
            vocab_per_topic: 200,
            shared_vocab: 200,
            overlap_fraction: 0.2,
            zipf_exponent: 1.0,
            doc_length: 40,
            seed: 0,
        }
    }
}

impl PlantedConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("topics", self.topics),
            ("docs_per_topic", self.docs_per_topic),
            ("vocab_per_topic", self.vocab_per_topic),
            ("shared_vocab", self.shared_vocab),
            ("doc_length", self.doc_length),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidConfig("overlap_fraction must lie in [0, 1]".into()));
        }
        if !(self.zipf_exponent > 0.0) {
            return Err(Error::InvalidConfig("zipf_exponent must be positive".into()));
        }
        Ok(())
    }
}

/// A generated corpus and the topic of each document.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    pub topics: Vec<u32>,
}

/// Generates a planted-topic corpus. Document order is shuffled so that
/// identity ordering carries no topic information.
pub fn generate_planted_corpus(config: &PlantedConfig) -> Result<PlantedCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let private = Zipf::new(config.vocab_per_topic as f64, config.zipf_exponent)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let shared = Zipf::new(config.shared_vocab as f64, config.zipf_exponent)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut labels: Vec<u32> = (0..config.topics)
        .flat_map(|t| std::iter::repeat_n(t as u32, config.docs_per_topic))
        .collect();
    labels.shuffle(&mut rng);

    let mut builder = CorpusBuilder::new();
    let mut tokens = Vec::with_capacity(config.doc_length);
    for &topic in &labels {
        tokens.clear();
        for _ in 0..config.doc_length {
            let token = if rng.random::<f64>() < config.overlap_fraction {
                format!("s{}", shared.sample(&mut rng) as u64)
            } else {
                format!("t{topic}w{}", private.sample(&mut rng) as u64)
            };
            tokens.push(token);
        }
        builder.add_tokens(tokens.iter());
    }
    Ok(PlantedCorpus {
        corpus: builder.finish(),
        topics: labels,
    })
}

/// Least-squares slope of `ln df` against `ln rank` over ranks `from..=to`
/// (1-based, clamped to the vocabulary).
pub fn rank_frequency_slope(corpus: &Corpus, from: usize, to: usize) -> f64 {
    let to = to.min(corpus.num_terms());
    let points: Vec<(f64, f64)> = (from.max(1)..=to)
        .filter_map(|r| {
            let df = corpus.df((r - 1) as u32);
            (df > 0).then(|| ((r as f64).ln(), (df as f64).ln()))
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
