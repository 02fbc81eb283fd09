use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// One trial. Fields a mode does not produce are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub t_hat: Option<usize>,
    pub k_hat: Option<usize>,
    pub accept: Option<bool>,
    pub trace_distance: Option<f64>,
    pub fidelity: Option<f64>,
    pub copies_used: u64,
    /// Identity suites that failed (`validate`).
    pub failures: Vec<String>,
    pub error: Option<String>,
    pub elapsed_ms: u64,
}

impl TrialReport {
    pub fn new(trial: usize, seed: u64) -> Self {
        Self {
            trial,
            seed,
            success: false,
            t_hat: None,
            k_hat: None,
            accept: None,
            trace_distance: None,
            fidelity: None,
            copies_used: 0,
            failures: Vec::new(),
            error: None,
            elapsed_ms: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub constant: f64,
    pub t: usize,
    pub successes: usize,
    pub trials: usize,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_trace_distance: Option<f64>,
    pub mean_copies: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Aggregate {
    pub fn from_trials(trials: &[TrialReport], threshold: f64) -> Self {
        let count = trials.len();
        let successes = trials.iter().filter(|t| t.success).count();
        let distances: Vec<f64> = trials.iter().filter_map(|t| t.trace_distance).collect();
        let success_rate = if count == 0 {
            0.0
        } else {
            successes as f64 / count as f64
        };
        Self {
            trials: count,
            successes,
            success_rate,
            mean_trace_distance: (!distances.is_empty())
                .then(|| distances.iter().sum::<f64>() / distances.len() as f64),
            mean_copies: if count == 0 {
                0.0
            } else {
                trials.iter().map(|t| t.copies_used as f64).sum::<f64>() / count as f64
            },
            threshold,
            passed: count > 0 && success_rate >= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialReport>,
    pub calibration: Vec<CalibrationPoint>,
    /// Smallest grid constant meeting the target at every `t̂` (`calibrate`).
    pub chosen_constant: Option<f64>,
    pub aggregate: Aggregate,
}

/// Columns of the CSV projection, one row per trial.
pub const CSV_COLUMNS: [&str; 12] = [
    "trial",
    "seed",
    "success",
    "t_hat",
    "k_hat",
    "accept",
    "trace_distance",
    "fidelity",
    "copies_used",
    "failures",
    "error",
    "elapsed_ms",
];

impl Report {
    pub fn passed(&self) -> bool {
        self.aggregate.passed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), HarnessError> {
        w.write_all(self.to_json().as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    }

    /// Per-trial rows, or one row per grid point for `calibrate`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(w);
        if !self.calibration.is_empty() {
            out.write_record(["constant", "t", "successes", "trials", "success_rate"])?;
            for p in &self.calibration {
                out.write_record([
                    p.constant.to_string(),
                    p.t.to_string(),
                    p.successes.to_string(),
                    p.trials.to_string(),
                    p.success_rate.to_string(),
                ])?;
            }
        } else {
            out.write_record(CSV_COLUMNS)?;
            let opt = |v: Option<String>| v.unwrap_or_default();
            for t in &self.trials {
                out.write_record([
                    t.trial.to_string(),
                    t.seed.to_string(),
                    t.success.to_string(),
                    opt(t.t_hat.map(|v| v.to_string())),
                    opt(t.k_hat.map(|v| v.to_string())),
                    opt(t.accept.map(|v| v.to_string())),
                    opt(t.trace_distance.map(|v| v.to_string())),
                    opt(t.fidelity.map(|v| v.to_string())),
                    t.copies_used.to_string(),
                    t.failures.join(";"),
                    opt(t.error.clone()),
                    t.elapsed_ms.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// The JSON report with every `elapsed_ms` field zeroed.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for t in &mut r.trials {
            t.elapsed_ms = 0;
        }
        r
    }
}
