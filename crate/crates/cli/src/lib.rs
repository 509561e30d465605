//! Experiment driver behind the `cesaro-lab` binary.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod failure;
pub mod run;
pub mod sweep;

pub use config::{EtaSource, ExperimentConfig, OutputFormat, OutputSpec, Task};
pub use failure::Failure;
pub use run::{run, RunSummary};
pub use sweep::{sweep, SweepRow};
