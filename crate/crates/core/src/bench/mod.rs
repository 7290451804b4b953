//! Synthetic workloads and the measurements taken over them.

mod gen;
mod stats;

pub use gen::{default_tbox, generate, suite_queries, unit_name, GenConfig, ROLES};
pub use stats::{bench, bin_label, bin_of, ontology_label, stats, Bin, BenchRow, StatsReport, BENCH_HEADER};
