//! Benchmark harness comparing plain CKKS-style encryption with the Rache
//! and Smuche caches.

pub mod error;
pub mod report;
pub mod runner;
pub mod workload;

pub use error::{BenchError, Result};
pub use report::{emit_report, Format};
pub use runner::{run_benchmark, BenchConfig, BenchReport, BenchRow, RowStatus, Scheme};
pub use workload::{gen_synthetic, load_dataset, Source, Workload};
