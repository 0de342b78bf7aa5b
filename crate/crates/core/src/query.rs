//! Exact conjunctive query engines.
//!
//! Four layouts answer the same queries:
//!
//! - `single`: one global index; the shorter list drives bucket lookups into
//!   the longer one.
//! - `per-cluster`: one index per cluster, each queried separately.
//! - `cluster-index`: a term → clusters index prunes the clusters that lack
//!   either term before the per-cluster intersections.
//! - `reordered`: one global index over document IDs renumbered cluster by
//!   cluster; the clustering is otherwise ignored.
//!
//! Every engine counts one step per bucket lookup, so the single engine pays
//! `min(df(t), df(u))` and the per-cluster engine `Σ_j min(n_j(t), n_j(u))`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::cluster::Clustering;
use crate::corpus::Corpus;
use crate::index::{build_index, BucketedIndex, InvertedIndex};
use crate::intersect::intersect_lookup_counted;
use crate::{DocId, Error, Result, TermId};

/// Bucket size of document-level posting lists.
pub const DEFAULT_BUCKET_SIZE: u32 = 16;
/// Bucket size of the cluster index.
pub const DEFAULT_CLUSTER_BUCKET_SIZE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Single,
    PerCluster,
    ClusterIndex,
    Reordered,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Single,
        Variant::PerCluster,
        Variant::ClusterIndex,
        Variant::Reordered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Single => "single",
            Variant::PerCluster => "percluster",
            Variant::ClusterIndex => "clusterindex",
            Variant::Reordered => "reordered",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Variant::Single),
            "percluster" | "per-cluster" => Ok(Variant::PerCluster),
            "clusterindex" | "cluster-index" => Ok(Variant::ClusterIndex),
            "reordered" => Ok(Variant::Reordered),
            other => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

/// Result set of a query (sorted original document IDs) and the lookups spent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryOutcome {
    pub docs: Vec<DocId>,
    pub steps: u64,
}

/// A document renumbering: `forward[old] = new`, `inverse[new] = old`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<DocId>,
    inverse: Vec<DocId>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<DocId> = (0..n as DocId).collect();
        Self {
            forward: ids.clone(),
            inverse: ids,
        }
    }

    /// Fails unless `forward` is a bijection on `0..len`.
    pub fn from_forward(forward: Vec<DocId>) -> Result<Self> {
        let mut inverse = vec![DocId::MAX; forward.len()];
        for (old, &new) in forward.iter().enumerate() {
            let slot = inverse
                .get_mut(new as usize)
                .ok_or_else(|| Error::Invariant(format!("image {new} out of range")))?;
            if *slot != DocId::MAX {
                return Err(Error::Invariant(format!("image {new} used twice")));
            }
            *slot = old as DocId;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[DocId] {
        &self.forward
    }

    pub fn inverse(&self) -> &[DocId] {
        &self.inverse
    }

    pub fn apply(&self, old: DocId) -> DocId {
        self.forward[old as usize]
    }
}

/// Numbers documents cluster by cluster in ascending cluster ID, keeping the
/// original order inside a cluster: the `j`-th document of cluster `i` gets
/// `j + Σ_{l<i} |c_l|`.
pub fn build_reordering(clustering: &Clustering) -> Permutation {
    let mut start = Vec::with_capacity(clustering.k());
    let mut acc = 0u32;
    for &s in clustering.sizes() {
        start.push(acc);
        acc += s;
    }
    let forward = clustering
        .assignment()
        .iter()
        .map(|&c| {
            let id = start[c as usize];
            start[c as usize] += 1;
            id
        })
        .collect();
    Permutation::from_forward(forward).expect("cluster-wise numbering is a bijection")
}

/// One index over a subset of documents with local IDs `0..members.len()`.
#[derive(Debug, Clone)]
struct Shard {
    members: Vec<DocId>,
    lists: HashMap<TermId, BucketedIndex>,
}

impl Shard {
    fn build(corpus: &Corpus, members: Vec<DocId>, bucket_size: u32) -> Self {
        let universe = members.len() as u32;
        let mut raw: HashMap<TermId, Vec<DocId>> = HashMap::new();
        for (local, &d) in members.iter().enumerate() {
            for &t in corpus.doc(d) {
                raw.entry(t).or_default().push(local as DocId);
            }
        }
        let lists = raw
            .into_iter()
            .map(|(t, docs)| (t, BucketedIndex::new(docs, bucket_size, universe)))
            .collect();
        Self { members, lists }
    }

    fn df(&self, t: TermId) -> usize {
        self.lists.get(&t).map_or(0, BucketedIndex::len)
    }

    /// Appends matches (global IDs) and returns the steps spent.
    fn conjunctive(&self, terms: &[TermId], out: &mut Vec<DocId>) -> u64 {
        let mut lists = Vec::with_capacity(terms.len());
        for t in terms {
            match self.lists.get(t) {
                Some(l) => lists.push(l),
                None => return 0,
            }
        }
        let mut steps = 0;
        let local = conjunctive(&lists, &mut steps);
        out.extend(local.into_iter().map(|l| self.members[l as usize]));
        steps
    }
}

/// Intersects bucketed lists: the two shortest by lookup, then the rest by
/// membership probes in increasing length.
fn conjunctive(lists: &[&BucketedIndex], steps: &mut u64) -> Vec<DocId> {
    match lists.len() {
        0 => return Vec::new(),
        1 => return lists[0].docs().to_vec(),
        _ => {}
    }
    let mut order: Vec<&BucketedIndex> = lists.to_vec();
    order.sort_by_key(|l| l.len());
    let mut acc = intersect_lookup_counted(order[0].docs(), order[1], steps);
    for list in &order[2..] {
        if acc.is_empty() {
            break;
        }
        *steps += acc.len() as u64;
        acc.retain(|&x| list.contains(x));
    }
    acc
}

#[derive(Debug, Clone)]
enum Layout {
    Global {
        lists: Vec<BucketedIndex>,
        permutation: Option<Permutation>,
    },
    Clustered {
        shards: Vec<Shard>,
        cluster_lists: Option<Vec<BucketedIndex>>,
    },
}

/// An immutable query engine of one [`Variant`].
#[derive(Debug, Clone)]
pub struct QueryEngine {
    variant: Variant,
    layout: Layout,
}

fn bucketed(index: &InvertedIndex, bucket_size: u32) -> Vec<BucketedIndex> {
    index
        .lists()
        .iter()
        .map(|l| BucketedIndex::new(l.clone(), bucket_size, index.num_docs()))
        .collect()
}

impl QueryEngine {
    /// Unclustered baseline over the global index.
    pub fn single(corpus: &Corpus) -> Self {
        Self::single_with(corpus, DEFAULT_BUCKET_SIZE)
    }

    pub fn single_with(corpus: &Corpus, bucket_size: u32) -> Self {
        Self {
            variant: Variant::Single,
            layout: Layout::Global {
                lists: bucketed(&build_index(corpus), bucket_size),
                permutation: None,
            },
        }
    }

    pub fn per_cluster(corpus: &Corpus, clustering: &Clustering) -> Self {
        Self::clustered(corpus, clustering, DEFAULT_BUCKET_SIZE, None)
    }

    pub fn cluster_index(corpus: &Corpus, clustering: &Clustering) -> Self {
        Self::clustered(corpus, clustering, DEFAULT_BUCKET_SIZE, Some(DEFAULT_CLUSTER_BUCKET_SIZE))
    }

    fn clustered(
        corpus: &Corpus,
        clustering: &Clustering,
        bucket_size: u32,
        cluster_bucket_size: Option<u32>,
    ) -> Self {
        let shards: Vec<Shard> = clustering
            .members()
            .into_iter()
            .map(|m| Shard::build(corpus, m, bucket_size))
            .collect();
        let cluster_lists = cluster_bucket_size.map(|b| {
            let mut raw = vec![Vec::new(); corpus.num_terms()];
            for (j, shard) in shards.iter().enumerate() {
                let mut terms: Vec<TermId> = shard.lists.keys().copied().collect();
                terms.sort_unstable();
                for t in terms {
                    raw[t as usize].push(j as DocId);
                }
            }
            let k = shards.len() as u32;
            raw.into_iter().map(|l| BucketedIndex::new(l, b, k)).collect()
        });
        let variant = if cluster_lists.is_some() {
            Variant::ClusterIndex
        } else {
            Variant::PerCluster
        };
        Self {
            variant,
            layout: Layout::Clustered { shards, cluster_lists },
        }
    }

    /// Global index over IDs renumbered by `permutation`.
    pub fn reordered(corpus: &Corpus, permutation: Permutation) -> Self {
        assert_eq!(permutation.len(), corpus.num_docs(), "permutation must cover the corpus");
        let index = build_index(corpus).permuted(permutation.forward());
        Self {
            variant: Variant::Reordered,
            layout: Layout::Global {
                lists: bucketed(&index, DEFAULT_BUCKET_SIZE),
                permutation: Some(permutation),
            },
        }
    }

    /// Builds the engine of `variant`; `clustering` is ignored for `single`.
    pub fn build(variant: Variant, corpus: &Corpus, clustering: &Clustering) -> Self {
        match variant {
            Variant::Single => Self::single(corpus),
            Variant::PerCluster => Self::per_cluster(corpus, clustering),
            Variant::ClusterIndex => Self::cluster_index(corpus, clustering),
            Variant::Reordered => Self::reordered(corpus, build_reordering(clustering)),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Documents containing both terms.
    pub fn query(&self, t: TermId, u: TermId) -> QueryOutcome {
        self.query_terms(&[t, u])
    }

    /// Documents containing all `terms`. Terms outside the dictionary give an empty result.
    pub fn query_terms(&self, terms: &[TermId]) -> QueryOutcome {
        let mut terms = terms.to_vec();
        terms.sort_unstable();
        terms.dedup();
        let mut outcome = QueryOutcome::default();
        if terms.is_empty() {
            return outcome;
        }
        match &self.layout {
            Layout::Global { lists, permutation } => {
                let mut chosen = Vec::with_capacity(terms.len());
                for &t in &terms {
                    match lists.get(t as usize) {
                        Some(l) => chosen.push(l),
                        None => return outcome,
                    }
                }
                let docs = conjunctive(&chosen, &mut outcome.steps);
                outcome.docs = match permutation {
                    Some(p) => {
                        let mut back: Vec<DocId> = docs.into_iter().map(|d| p.inverse()[d as usize]).collect();
                        back.sort_unstable();
                        back
                    }
                    None => docs,
                };
            }
            Layout::Clustered { shards, cluster_lists } => {
                let mut docs = Vec::new();
                match cluster_lists {
                    Some(cl) => {
                        let mut chosen = Vec::with_capacity(terms.len());
                        for &t in &terms {
                            match cl.get(t as usize) {
                                Some(l) => chosen.push(l),
                                None => return outcome,
                            }
                        }
                        let clusters = conjunctive(&chosen, &mut outcome.steps);
                        for j in clusters {
                            outcome.steps += shards[j as usize].conjunctive(&terms, &mut docs);
                        }
                    }
                    None => {
                        for shard in shards {
                            outcome.steps += shard.conjunctive(&terms, &mut docs);
                        }
                    }
                }
                docs.sort_unstable();
                outcome.docs = docs;
            }
        }
        outcome
    }

    /// Analytic step count of a two-term query on this engine, from list
    /// lengths alone.
    pub fn predicted_steps(&self, t: TermId, u: TermId) -> u64 {
        match &self.layout {
            Layout::Global { lists, .. } => {
                let len = |x: TermId| lists.get(x as usize).map_or(0, BucketedIndex::len);
                if t == u {
                    return 0;
                }
                len(t).min(len(u)) as u64
            }
            Layout::Clustered { shards, .. } => {
                if t == u {
                    return 0;
                }
                shards.iter().map(|s| s.df(t).min(s.df(u)) as u64).sum()
            }
        }
    }
}

/// Looks up both query strings; `None` when either is unknown.
pub fn resolve_terms(corpus: &Corpus, query: &str) -> Option<Vec<TermId>> {
    crate::corpus::tokenize(query)
        .iter()
        .map(|t| corpus.term_id(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest, InputFormat};
    use crate::intersect::intersect_merge;

    fn corpus() -> Corpus {
        ingest(
            "a b c\nb c\na c\nc d\na b\nb d\na b c d\nd\n".as_bytes(),
            InputFormat::Plain,
        )
        .unwrap()
    }

    fn id(c: &Corpus, s: &str) -> TermId {
        c.term_id(s).unwrap()
    }

    #[test]
    fn reordering_formula() {
        let c = ingest("x\nx\nx\nx\nx\n".as_bytes(), InputFormat::Plain).unwrap();
        // sizes [3, 2]: docs 0,2,4 in cluster 0; 1,3 in cluster 1
        let cl = Clustering::from_assignment(&c, vec![0, 1, 0, 1, 0], 2, 10).unwrap();
        let p = build_reordering(&cl);
        assert_eq!(p.apply(3), 1 + 3);
        assert_eq!(p.forward(), &[0, 3, 1, 4, 2]);
        let mut image = p.forward().to_vec();
        image.sort_unstable();
        assert_eq!(image, (0..5).collect::<Vec<_>>());

        let single = Clustering::single(&c, 10);
        assert_eq!(build_reordering(&single), Permutation::identity(5));
    }

    #[test]
    fn permutation_rejects_non_bijections() {
        assert!(Permutation::from_forward(vec![0, 0]).is_err());
        assert!(Permutation::from_forward(vec![0, 2]).is_err());
    }

    #[test]
    fn single_engine_basics() {
        let c = corpus();
        let e = QueryEngine::single(&c);
        let idx = build_index(&c);
        let (a, b, d) = (id(&c, "a"), id(&c, "b"), id(&c, "d"));
        assert_eq!(e.query(a, a).docs, idx.posting(a));
        let out = e.query(a, b);
        assert_eq!(out.docs, intersect_merge(idx.posting(a), idx.posting(b)));
        assert_eq!(out.steps, idx.posting(a).len().min(idx.posting(b).len()) as u64);
        assert_eq!(e.query(a, d).docs, vec![6]);
        assert!(e.query(a, 999).docs.is_empty());
    }

    #[test]
    fn variants_agree_and_count_steps() {
        let c = corpus();
        let cl = Clustering::from_assignment(&c, vec![0, 1, 0, 2, 0, 1, 2, 2], 3, 100).unwrap();
        let engines: Vec<QueryEngine> = Variant::ALL.iter().map(|&v| QueryEngine::build(v, &c, &cl)).collect();
        for t in 0..c.num_terms() as TermId {
            for u in 0..c.num_terms() as TermId {
                let reference = engines[0].query(t, u).docs;
                for e in &engines[1..] {
                    assert_eq!(e.query(t, u).docs, reference, "{} on ({t},{u})", e.variant());
                }
                if t != u {
                    let psi: u64 = (0..3).map(|j| cl.count(j, t as usize).min(cl.count(j, u as usize)) as u64).sum();
                    assert_eq!(engines[1].query(t, u).steps, psi);
                    assert_eq!(engines[1].predicted_steps(t, u), psi);
                    assert_eq!(engines[3].query(t, u).steps, engines[0].query(t, u).steps);
                }
            }
        }
    }

    #[test]
    fn cluster_index_skips_disjoint_clusters() {
        let c = ingest("a\na\nb\nb\n".as_bytes(), InputFormat::Plain).unwrap();
        let cl = Clustering::from_assignment(&c, vec![0, 0, 1, 1], 2, 10).unwrap();
        let e = QueryEngine::cluster_index(&c, &cl);
        let out = e.query(id(&c, "a"), id(&c, "b"));
        assert!(out.docs.is_empty());
        // one lookup in the cluster index, no per-cluster work
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn k1_matches_single() {
        let c = corpus();
        let cl = Clustering::single(&c, 100);
        let single = QueryEngine::single(&c);
        let per = QueryEngine::per_cluster(&c, &cl);
        let re = QueryEngine::reordered(&c, build_reordering(&cl));
        for t in 0..4 {
            for u in 0..4 {
                assert_eq!(per.query(t, u), single.query(t, u));
                assert_eq!(re.query(t, u), single.query(t, u));
            }
        }
    }

    #[test]
    fn multi_term_queries() {
        let c = corpus();
        let cl = Clustering::from_assignment(&c, vec![0, 1, 0, 1, 0, 1, 0, 1], 2, 100).unwrap();
        let terms = [id(&c, "a"), id(&c, "b"), id(&c, "c")];
        for v in Variant::ALL {
            let e = QueryEngine::build(v, &c, &cl);
            assert_eq!(e.query_terms(&terms).docs, vec![0, 6], "{v}");
            assert_eq!(e.query_terms(&[terms[0]]).docs, vec![0, 2, 4, 6]);
        }
        assert_eq!(resolve_terms(&c, "A b"), Some(vec![id(&c, "a"), id(&c, "b")]));
        assert_eq!(resolve_terms(&c, "a zzz"), None);
    }
}
