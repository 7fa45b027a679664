//! Experiment runner behind the `hybridcat` binary: configuration files and
//! flags, parameter sweeps and deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{parse_sweep, resolve, ExperimentConfig, Protocol, RawConfig, RawValue, ResourceKind, MAX_DIM_ENV};
pub use error::CliError;
pub use experiment::{compute, estimate, Estimate, PointResult, Row};
pub use output::{results_csv, write_all, Written, RESULTS_HEADER};

/// Resolves, runs and writes an experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Written, CliError> {
    let points = compute(cfg)?;
    write_all(cfg, &points)
}
