//! Experiment runner for `stablearn-core`: random doped circuits, tester and
//! learner trials, oracle identity suites and tomography calibration, with
//! seeded per-trial streams and JSON/CSV reports.

pub mod config;
pub mod report;
pub mod runner;
pub mod seed;

pub use config::{CircuitSource, DopingKind, ExperimentConfig, Format, Mode};
pub use report::{Aggregate, CalibrationPoint, Report, TrialReport};
pub use runner::run;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] stablearn_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("copy meter read {metered}, budget says {budgeted}")]
    Meter { metered: u64, budgeted: u64 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
