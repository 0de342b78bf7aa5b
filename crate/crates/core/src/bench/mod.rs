//! Benchmark harness: planted-topic corpora, query workloads, speedups over
//! the single index, compression and term-cutoff reports.

mod report;
mod speedup;
mod synth;
mod workload;

pub use report::{
    adjusted_rand_index, best_codec, compression_report, standard_orderings, tc_sensitivity,
    write_csv, write_plot_series, CompressionRow, TcRow,
};
pub use speedup::{
    audit, measure, measured_speedup, speedup_report, theoretical_speedup, Measurement,
    MeasuredSpeedup, SpeedupReport,
};
pub use synth::{generate_planted_corpus, rank_frequency_slope, PlantedConfig, PlantedCorpus};
pub use workload::{generate_workload, Workload};
