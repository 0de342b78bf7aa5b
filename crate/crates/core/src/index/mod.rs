//! Inverted indices, the bucketed posting-list layout and posting codecs.

pub mod codec;
pub mod store;

use crate::corpus::Corpus;
use crate::{DocId, TermId};

pub use codec::{bits_per_posting, decode, encode, golomb_parameter, Codec, EncodedList};

/// Sorted, duplicate-free document IDs of one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingList {
    pub term: TermId,
    pub docs: Vec<DocId>,
}

/// Posting lists for every term of a corpus, indexed by [`TermId`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    num_docs: u32,
    postings: Vec<Vec<DocId>>,
}

impl InvertedIndex {
    /// Builds posting lists from per-document term sets. Documents are
    /// numbered in iteration order.
    pub fn from_documents<'a, I>(docs: I, num_terms: usize) -> Self
    where
        I: IntoIterator<Item = &'a [TermId]>,
    {
        let mut postings = vec![Vec::new(); num_terms];
        let mut num_docs = 0u32;
        for (d, terms) in docs.into_iter().enumerate() {
            for &t in terms {
                postings[t as usize].push(d as DocId);
            }
            num_docs = d as u32 + 1;
        }
        Self { num_docs, postings }
    }

    /// Wraps existing lists. Each list must be sorted and unique with all IDs below `num_docs`.
    pub fn from_postings(num_docs: u32, postings: Vec<Vec<DocId>>) -> Self {
        debug_assert!(postings
            .iter()
            .all(|l| l.windows(2).all(|w| w[0] < w[1]) && l.last().is_none_or(|&x| x < num_docs)));
        Self { num_docs, postings }
    }

    pub fn num_docs(&self) -> u32 {
        self.num_docs
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    /// Posting list of `term`; empty for unknown terms.
    pub fn posting(&self, term: TermId) -> &[DocId] {
        self.postings.get(term as usize).map_or(&[], Vec::as_slice)
    }

    pub fn postings(&self) -> impl Iterator<Item = PostingList> + '_ {
        self.postings.iter().enumerate().map(|(t, docs)| PostingList {
            term: t as TermId,
            docs: docs.clone(),
        })
    }

    pub fn lists(&self) -> &[Vec<DocId>] {
        &self.postings
    }

    /// Total number of postings.
    pub fn total_postings(&self) -> u64 {
        self.postings.iter().map(|l| l.len() as u64).sum()
    }

    /// Renumbers documents: document `d` becomes `permutation[d]`.
    pub fn permuted(&self, permutation: &[DocId]) -> Self {
        let postings = self
            .postings
            .iter()
            .map(|list| {
                let mut out: Vec<DocId> = list.iter().map(|&d| permutation[d as usize]).collect();
                out.sort_unstable();
                out
            })
            .collect();
        Self {
            num_docs: self.num_docs,
            postings,
        }
    }

    /// Inverts the index back into per-document term sets.
    pub fn documents(&self) -> Vec<Vec<TermId>> {
        let mut docs = vec![Vec::new(); self.num_docs as usize];
        for (t, list) in self.postings.iter().enumerate() {
            for &d in list {
                docs[d as usize].push(t as TermId);
            }
        }
        docs
    }
}

/// Posting lists of every term in `corpus`.
pub fn build_index(corpus: &Corpus) -> InvertedIndex {
    InvertedIndex::from_documents(corpus.docs(), corpus.num_terms())
}

/// A posting list with a bucket directory: document `x` can only be stored
/// in bucket `x / width`, and the directory maps each bucket to its slice in
/// O(1). The width is chosen so that buckets hold about `bucket_size`
/// entries on average.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketedIndex {
    universe: u32,
    width: u32,
    offsets: Vec<u32>,
    docs: Vec<DocId>,
}

impl BucketedIndex {
    pub fn new(docs: Vec<DocId>, bucket_size: u32, universe: u32) -> Self {
        assert!(bucket_size >= 1, "bucket size must be positive");
        debug_assert!(docs.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(docs.last().is_none_or(|&x| x < universe));
        if docs.is_empty() {
            return Self {
                universe,
                width: 1,
                offsets: vec![0],
                docs,
            };
        }
        let len = docs.len() as u64;
        let width = (universe as u64 * bucket_size as u64).div_ceil(len).max(1);
        let width = width.min(u32::MAX as u64) as u32;
        let buckets = (universe as u64).div_ceil(width as u64) as usize;
        let mut offsets = vec![0u32; buckets + 1];
        for &x in &docs {
            offsets[(x / width) as usize + 1] += 1;
        }
        for b in 0..buckets {
            offsets[b + 1] += offsets[b];
        }
        Self {
            universe,
            width,
            offsets,
            docs,
        }
    }

    pub fn docs(&self) -> &[DocId] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn bucket_width(&self) -> u32 {
        self.width
    }

    pub fn num_buckets(&self) -> usize {
        self.offsets.len() - 1
    }

    /// The slice of documents sharing `x`'s bucket. Empty when `x` lies beyond the universe.
    #[inline]
    pub fn lookup_bucket(&self, x: DocId) -> &[DocId] {
        let b = (x / self.width) as usize;
        if b + 1 >= self.offsets.len() {
            return &[];
        }
        &self.docs[self.offsets[b] as usize..self.offsets[b + 1] as usize]
    }

    /// Membership test through the bucket directory.
    #[inline]
    pub fn contains(&self, x: DocId) -> bool {
        self.lookup_bucket(x).contains(&x)
    }
}

/// Builds the bucket directory for `list` over documents `0..universe`.
pub fn bucketize(list: &PostingList, bucket_size: u32, universe: u32) -> BucketedIndex {
    BucketedIndex::new(list.docs.clone(), bucket_size, universe)
}
