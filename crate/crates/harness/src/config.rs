use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use stablearn_core::simstate::SimCaps;
use stablearn_core::{Doping, LearnerConfig};

use crate::HarnessError;

/// Constants tried by `calibrate` when no grid is given.
pub const DEFAULT_CALIBRATION_GRID: [f64; 12] = [
    0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Test,
    Learn,
    Validate,
    Calibrate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DopingKind {
    T,
    HaarU1,
}

impl From<DopingKind> for Doping {
    fn from(d: DopingKind) -> Self {
        match d {
            DopingKind::T => Doping::T,
            DopingKind::HaarU1 => Doping::HaarU1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitSource {
    /// The same circuit file for every trial.
    File(PathBuf),
    /// A fresh random circuit per trial.
    Random { gates: usize, doping: DopingKind },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    /// Doping count of generated circuits; the largest `t̂` swept by `calibrate`.
    pub t: usize,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub circuit: CircuitSource,
    /// Tester threshold; defaults to `n - 2t`, or 1 for Haar inputs.
    pub k: Option<usize>,
    /// Feed Haar-random states to the tester instead of circuits.
    pub haar: bool,
    /// Required success rate; defaults to `1 - δ` (1 for `validate`).
    pub threshold: Option<f64>,
    pub learner: LearnerConfig,
    pub calibration_grid: Vec<f64>,
    #[serde(skip)]
    pub caps: Option<SimCaps>,
}

impl ExperimentConfig {
    /// A config with per-mode defaults for everything but `n`.
    pub fn new(mode: Mode, n: usize) -> Self {
        let (eps, delta, t, trials) = match mode {
            Mode::Test => (0.3, 0.01, 0, 1),
            Mode::Learn => (0.2, 0.1, 0, 1),
            Mode::Validate => (0.3, 0.1, 1, 1),
            Mode::Calibrate => (0.1, 1.0 / 30.0, 3, 200),
        };
        Self {
            mode,
            n,
            t,
            eps,
            delta,
            trials,
            seed: 0,
            circuit: CircuitSource::Random {
                gates: default_gates(n),
                doping: DopingKind::T,
            },
            k: None,
            haar: false,
            threshold: None,
            learner: LearnerConfig::default(),
            calibration_grid: DEFAULT_CALIBRATION_GRID.to_vec(),
            caps: None,
        }
    }

    pub fn caps(&self) -> SimCaps {
        self.caps.unwrap_or_else(SimCaps::from_env)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(match self.mode {
            Mode::Validate => 1.0,
            _ => 1.0 - self.delta,
        })
    }

    /// The tester's `k`.
    pub fn tester_k(&self) -> usize {
        self.k.unwrap_or(if self.haar {
            1
        } else {
            self.n.saturating_sub(2 * self.t).max(1)
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta = {} must lie in (0, 1]", self.delta));
        }
        let eps_ok = match self.mode {
            Mode::Test => self.eps > 0.0 && self.eps < 0.375,
            _ => self.eps > 0.0 && self.eps <= 1.0,
        };
        if !eps_ok {
            return bad(format!(
                "eps = {} is out of range for {:?}",
                self.eps, self.mode
            ));
        }
        if self.mode != Mode::Calibrate && self.t > self.n {
            return bad(format!("t = {} exceeds n = {}", self.t, self.n));
        }
        if let Some(k) = self.k {
            if k == 0 || k > self.n {
                return bad(format!("k = {k} must lie in 1..={}", self.n));
            }
        }
        if let Some(th) = self.threshold {
            if !(0.0..=1.0).contains(&th) {
                return bad(format!("threshold = {th} must lie in [0, 1]"));
            }
        }
        if self.mode == Mode::Calibrate && (self.t == 0 || self.calibration_grid.is_empty()) {
            return bad("calibrate needs t >= 1 and a non-empty grid".into());
        }
        Ok(())
    }
}

/// Default Clifford gate count of generated circuits.
pub fn default_gates(n: usize) -> usize {
    4 * n * n
}
