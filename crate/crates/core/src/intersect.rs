//! Intersection kernels for sorted document lists, and the cost models that
//! estimate their running time from list lengths.

use std::cmp::Ordering;

use crate::index::BucketedIndex;
use crate::DocId;

/// Linear merge of two sorted lists.
pub fn intersect_merge(a: &[DocId], b: &[DocId]) -> Vec<DocId> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Walks `small` and probes the bucket of each element in `large`. Adds one
/// step per probe to `steps`.
pub fn intersect_lookup_counted(small: &[DocId], large: &BucketedIndex, steps: &mut u64) -> Vec<DocId> {
    let mut out = Vec::new();
    for &x in small {
        if large.lookup_bucket(x).contains(&x) {
            out.push(x);
        }
    }
    *steps += small.len() as u64;
    out
}

/// Lookup intersection; `small` should be the shorter list.
pub fn intersect_lookup(small: &[DocId], large: &BucketedIndex) -> Vec<DocId> {
    let mut steps = 0;
    intersect_lookup_counted(small, large, &mut steps)
}

/// Doubling search from the shorter list into the longer one.
pub fn intersect_gallop(a: &[DocId], b: &[DocId]) -> Vec<DocId> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(small.len());
    let mut base = 0usize;
    for &x in small {
        if base >= large.len() {
            break;
        }
        // find a window [base + bound/2, base + bound) holding the first element >= x
        let mut bound = 1usize;
        while base + bound < large.len() && large[base + bound - 1] < x {
            bound *= 2;
        }
        let lo = base + bound / 2;
        let hi = (base + bound).min(large.len());
        let pos = lo + large[lo..hi].partition_point(|&y| y < x);
        if pos < large.len() && large[pos] == x {
            out.push(x);
            base = pos + 1;
        } else {
            base = pos;
        }
    }
    out
}

/// Analytic cost of intersecting lists of lengths `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostModel {
    /// `min(x, y)`: one bucket probe per element of the shorter list.
    LookupMin,
    /// `m · (1 + log2(M / m))` with `m = min`, `M = max`: comparison-based
    /// intersection. The `+1` keeps equal-length intersections from being free.
    ComparisonLog,
}

impl CostModel {
    pub fn cost(self, x: u64, y: u64) -> f64 {
        let (m, big) = if x <= y { (x, y) } else { (y, x) };
        if m == 0 {
            return 0.0;
        }
        match self {
            CostModel::LookupMin => m as f64,
            CostModel::ComparisonLog => m as f64 * (1.0 + (big as f64 / m as f64).log2()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CostModel::LookupMin => "lookup-min",
            CostModel::ComparisonLog => "comparison-log",
        }
    }
}

/// Free-function form of [`CostModel::cost`].
pub fn cost(model: CostModel, x: u64, y: u64) -> f64 {
    model.cost(x, y)
}
