//! Sorted-list intersection kernels and their analytic cost models.
//!
//! ```bash
//! cargo run --example intersection
//! ```

use seclud::index::BucketedIndex;
use seclud::intersect::{intersect_gallop, intersect_lookup_counted, intersect_merge, CostModel};

fn main() {
    let universe = 100_000;
    let short: Vec<u32> = (0..universe).step_by(997).collect();
    let long: Vec<u32> = (0..universe).step_by(3).collect();

    let merged = intersect_merge(&short, &long);
    assert_eq!(intersect_gallop(&short, &long), merged);

    // bucket size 16: each probe scans about 16 entries of the long list
    let buckets = BucketedIndex::new(long.clone(), 16, universe);
    let mut steps = 0;
    let looked_up = intersect_lookup_counted(&short, &buckets, &mut steps);
    assert_eq!(looked_up, merged);
    println!(
        "|short|={} |long|={} matches={} lookup steps={steps}",
        short.len(),
        long.len(),
        merged.len()
    );

    for model in [CostModel::LookupMin, CostModel::ComparisonLog] {
        let cost = model.cost(short.len() as u64, long.len() as u64);
        println!("{:>15}: {cost:.1}", model.name());
    }
}
