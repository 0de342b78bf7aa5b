//! Exact two-term conjunctive search over clustered document collections.
//!
//! Documents are partitioned so that the expected cost of intersecting two
//! posting lists, summed over clusters, is as small as possible. Queries are
//! then answered per cluster, through a cluster-level index, or over a global
//! index whose document IDs were renumbered cluster by cluster. Every variant
//! returns exactly the documents a plain inverted index would return.
//!
//! The crate is organized bottom-up:
//!
//! - [`corpus`]: tokenizing, ingesting documents and query logs, term
//!   probabilities.
//! - [`index`]: posting lists, the bucketed layout used by the lookup
//!   intersection, integer codecs and the on-disk container.
//! - [`intersect`]: intersection kernels and the analytic cost models.
//! - [`cluster`]: the expected-cost objective, delta-score tables, K-means,
//!   multilevel initialization and TopDown splitting.
//! - [`query`]: the four query engines.
//! - [`bench`]: planted-topic corpora, workloads, speedups and compression
//!   reports.
//! - [`cli`]: the `seclud` command line front end.

pub mod bench;
pub mod cli;
pub mod cluster;
pub mod corpus;
mod error;
pub mod index;
pub mod intersect;
pub mod query;

pub use error::{Error, Result};

/// Dense document identifier, `0..n`.
pub type DocId = u32;
/// Dense term identifier; smaller IDs belong to terms with higher document frequency.
pub type TermId = u32;
/// Cluster identifier, `0..k`.
pub type ClusterId = u32;
