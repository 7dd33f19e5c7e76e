//! Attraction-basin diagnostics and the benchmark harness.

mod basin;
mod bench;

pub use basin::{
    basin_profile, descend, in_k_basin, is_k_attractor, BasinProfile, MAX_ENUMERATED_SERVED,
};
pub use bench::{run_benchmark, BenchConfig, BenchReport, BenchRow, MethodSummary};
