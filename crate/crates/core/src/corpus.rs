//! Documents as term sets, the term dictionary and term probabilities.
//!
//! Term IDs are ranked by document frequency (ties broken by first
//! occurrence), so the `tc` most frequent terms are exactly the IDs `0..tc`.
//! The tokenizer is a fixed stand-in: lowercased maximal runs of alphanumeric
//! code points. It does no stemming or stop-word removal.

use std::collections::HashMap;
use std::io::BufRead;

use serde::Deserialize;

use crate::{DocId, Error, Result, TermId};

/// Splits `text` into lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Input layout accepted by [`ingest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// One document per line.
    Plain,
    /// One `{"id": ..., "text": ...}` object per line.
    Jsonl,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" | "txt" => Ok(Self::Plain),
            "jsonl" | "json" => Ok(Self::Jsonl),
            other => Err(Error::InvalidConfig(format!("unknown input format {other:?}"))),
        }
    }
}

#[derive(Deserialize)]
struct JsonDocument {
    #[allow(dead_code)]
    id: String,
    text: String,
}

/// An immutable document collection: per-document sorted term sets plus the
/// dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    docs: Vec<Vec<TermId>>,
    terms: Vec<String>,
    lookup: HashMap<String, TermId>,
    df: Vec<u32>,
    total_size: u64,
}

impl Corpus {
    /// Number of documents.
    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    /// Dictionary size.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Sum of the distinct-term counts of all documents.
    pub fn total_size(&self) -> u64 {
        self.total_size
    }

    /// Sorted distinct terms of document `doc`.
    pub fn doc(&self, doc: DocId) -> &[TermId] {
        &self.docs[doc as usize]
    }

    pub fn docs(&self) -> impl ExactSizeIterator<Item = &[TermId]> + '_ {
        self.docs.iter().map(Vec::as_slice)
    }

    /// Terms of `doc` whose ID is below `frequent`. Terms are sorted, so this is a prefix.
    pub fn frequent_terms(&self, doc: DocId, frequent: usize) -> &[TermId] {
        let terms = self.doc(doc);
        let end = terms.partition_point(|&t| (t as usize) < frequent);
        &terms[..end]
    }

    pub fn df(&self, term: TermId) -> u32 {
        self.df[term as usize]
    }

    pub fn dfs(&self) -> &[u32] {
        &self.df
    }

    pub fn term(&self, term: TermId) -> &str {
        &self.terms[term as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.lookup.get(term).copied()
    }

    /// Number of frequent terms under cutoff `tc`.
    pub fn frequent_count(&self, tc: usize) -> usize {
        tc.min(self.terms.len())
    }

    /// Rebuilds a corpus from a dictionary already in TermId order and
    /// per-document term lists using those IDs. IDs are re-ranked if the
    /// dictionary order does not match document frequencies.
    pub fn from_parts(terms: Vec<String>, docs: Vec<Vec<TermId>>) -> Result<Self> {
        let mut builder = CorpusBuilder::default();
        for term in &terms {
            builder.intern(term);
        }
        for doc in docs {
            let mut ids = Vec::with_capacity(doc.len());
            for t in doc {
                if t as usize >= terms.len() {
                    return Err(Error::Format(format!("term id {t} outside dictionary")));
                }
                ids.push(t);
            }
            builder.push_ids(ids);
        }
        Ok(builder.finish())
    }
}

/// Accumulates documents, then assigns frequency-ranked term IDs in [`CorpusBuilder::finish`].
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    // provisional ids in order of first occurrence
    terms: Vec<String>,
    lookup: HashMap<String, u32>,
    docs: Vec<Vec<u32>>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.lookup.get(term) {
            return id;
        }
        let id = self.terms.len() as u32;
        self.terms.push(term.to_owned());
        self.lookup.insert(term.to_owned(), id);
        id
    }

    fn push_ids(&mut self, mut ids: Vec<u32>) {
        ids.sort_unstable();
        ids.dedup();
        self.docs.push(ids);
    }

    /// Adds a document given its tokens; repeated tokens collapse.
    pub fn add_tokens<I, S>(&mut self, tokens: I) -> DocId
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let ids = tokens.into_iter().map(|t| self.intern(t.as_ref())).collect();
        self.push_ids(ids);
        (self.docs.len() - 1) as DocId
    }

    /// Tokenizes `text` and adds it as one document.
    pub fn add_text(&mut self, text: &str) -> DocId {
        self.add_tokens(tokenize(text))
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn finish(self) -> Corpus {
        let mut df = vec![0u32; self.terms.len()];
        for doc in &self.docs {
            for &t in doc {
                df[t as usize] += 1;
            }
        }
        let mut order: Vec<u32> = (0..self.terms.len() as u32).collect();
        // stable sort keeps first-occurrence order among equal frequencies
        order.sort_by(|&a, &b| df[b as usize].cmp(&df[a as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }

        let mut terms = Vec::with_capacity(order.len());
        let mut ranked_df = Vec::with_capacity(order.len());
        let mut strings: Vec<Option<String>> = self.terms.into_iter().map(Some).collect();
        for &old in &order {
            terms.push(strings[old as usize].take().expect("each id visited once"));
            ranked_df.push(df[old as usize]);
        }
        let lookup = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();

        let mut total_size = 0u64;
        let docs = self
            .docs
            .into_iter()
            .map(|doc| {
                let mut ids: Vec<TermId> = doc.into_iter().map(|t| remap[t as usize]).collect();
                ids.sort_unstable();
                total_size += ids.len() as u64;
                ids
            })
            .collect();

        Corpus {
            docs,
            terms,
            lookup,
            df: ranked_df,
            total_size,
        }
    }
}

/// Reads a document stream. Document IDs follow input order.
pub fn ingest<R: BufRead>(reader: R, format: InputFormat) -> Result<Corpus> {
    let mut builder = CorpusBuilder::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        match format {
            InputFormat::Plain => {
                builder.add_text(&line);
            }
            InputFormat::Jsonl => {
                if line.trim().is_empty() {
                    continue;
                }
                let doc: JsonDocument =
                    serde_json::from_str(&line).map_err(|e| Error::MalformedJsonl {
                        line: idx + 1,
                        message: e.to_string(),
                    })?;
                builder.add_text(&doc.text);
            }
        }
    }
    Ok(builder.finish())
}

/// Two-term queries read from a log, plus the number of lines skipped for
/// not having exactly two tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLog {
    pub pairs: Vec<(String, String)>,
    pub skipped: usize,
}

/// Parses a query log: one query per line, exactly two whitespace-separated
/// terms. Terms are normalized with [`tokenize`]'s lowercasing.
pub fn read_query_log<R: BufRead>(reader: R) -> Result<QueryLog> {
    let mut log = QueryLog::default();
    for line in reader.lines() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => log.pairs.push((a.to_lowercase(), b.to_lowercase())),
            _ => log.skipped += 1,
        }
    }
    if log.skipped > 0 {
        log::warn!("query log: skipped {} lines without exactly two terms", log.skipped);
    }
    Ok(log)
}

/// Where a [`ProbTable`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbSource {
    CorpusFrequency,
    QueryLog,
}

/// Query-term probabilities over the frequent terms `0..len`. Terms at or
/// beyond `len` have probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    probs: Vec<f64>,
    source: ProbSource,
}

impl ProbTable {
    /// Normalizes non-negative weights into a table. Fails if all weights are zero.
    pub fn from_weights(weights: Vec<f64>, source: ProbSource) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptyWorkload);
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { probs, source })
    }

    pub fn p(&self, term: TermId) -> f64 {
        self.probs.get(term as usize).copied().unwrap_or(0.0)
    }

    /// Number of frequent terms covered by the table.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn source(&self) -> ProbSource {
        self.source
    }

    /// Restricts the table to the first `tc` terms and renormalizes.
    pub fn truncated(&self, tc: usize) -> Result<Self> {
        let weights = self.probs[..tc.min(self.probs.len())].to_vec();
        Self::from_weights(weights, self.source)
    }
}

/// Term probabilities proportional to occurrences in a query log. Terms that
/// are unknown or not among the `tc` most frequent are dropped.
pub fn probabilities_from_log<S: AsRef<str>>(
    log: &[(S, S)],
    corpus: &Corpus,
    tc: usize,
) -> Result<ProbTable> {
    if tc == 0 {
        return Err(Error::InvalidConfig("term cutoff must be at least 1".into()));
    }
    let frequent = corpus.frequent_count(tc);
    let mut weights = vec![0.0; frequent];
    for (a, b) in log {
        for term in [a.as_ref(), b.as_ref()] {
            if let Some(id) = corpus.term_id(term) {
                if (id as usize) < frequent {
                    weights[id as usize] += 1.0;
                }
            }
        }
    }
    ProbTable::from_weights(weights, ProbSource::QueryLog)
}

/// Term probabilities proportional to document frequency over the `tc`
/// most frequent terms.
pub fn probabilities_from_corpus(corpus: &Corpus, tc: usize) -> Result<ProbTable> {
    if corpus.num_docs() == 0 || corpus.num_terms() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if tc == 0 {
        return Err(Error::InvalidConfig("term cutoff must be at least 1".into()));
    }
    let frequent = corpus.frequent_count(tc);
    let weights = corpus.dfs()[..frequent].iter().map(|&d| d as f64).collect();
    ProbTable::from_weights(weights, ProbSource::CorpusFrequency)
}
