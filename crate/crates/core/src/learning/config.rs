use std::fmt;
use std::str::FromStr;

use crate::annealer::SamplerBackend;
use crate::error::{Error, Result};
use crate::model::ControlRange;
use crate::thermometry::RegressionOptions;

/// Training procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    /// Annealer samples, temperature re-estimated every iteration.
    QualeEffective,
    /// Annealer samples, temperature assumed fixed.
    QualeFixed(f64),
    /// Contrastive divergence with `k` Gibbs steps; no annealer.
    Cd(usize),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::QualeEffective => write!(f, "QuALe@T_eff"),
            Algorithm::QualeFixed(t) => write!(f, "QuALe@{t}"),
            Algorithm::Cd(k) => write!(f, "CD-{k}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown algorithm '{s}'"));
        if s == "QuALe@T_eff" {
            return Ok(Algorithm::QualeEffective);
        }
        if let Some(t) = s.strip_prefix("QuALe@") {
            let t: f64 = t.parse().map_err(|_| bad())?;
            return Ok(Algorithm::QualeFixed(t));
        }
        if let Some(k) = s.strip_prefix("CD-") {
            return Ok(Algorithm::Cd(k.parse().map_err(|_| bad())?));
        }
        Err(bad())
    }
}

/// How `T_eff` is estimated in each QuALe@T_eff iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thermometer {
    Regression,
    PseudoLikelihood,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub eta: f64,
    /// Total iterations, warm start included.
    pub iterations: usize,
    /// Samples per set.
    pub samples: usize,
    pub d_kl: f64,
    pub algorithm: Algorithm,
    /// CD-1 iterations before switching to the annealer.
    pub warm_start_cd1: usize,
    pub bias_correction: bool,
    pub importance_reuse: bool,
    pub eval_every: usize,
    pub seed: u64,
    pub thermometer: Thermometer,
    pub regression: RegressionOptions,
    /// Below this largest |J| the rescaled set uses the plus root.
    pub noise_floor: f64,
    /// Half-width of the uniform initial control parameters.
    pub init_scale: f64,
    /// Temperature assumed before the first estimate (also converts the
    /// warm-start model to control parameters).
    pub t_guess: f64,
    pub calibration_samples: usize,
    pub calibration_events: usize,
    pub calibration_rounds: usize,
    pub calibration_temperature: f64,
    pub backend: SamplerBackend,
    pub range: ControlRange,
    /// Record wall-clock milliseconds; off keeps traces byte-reproducible.
    pub record_wall_time: bool,
    /// Iterations at which to keep the full regression point cloud.
    pub diagnostics_at: Vec<usize>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            eta: 0.03,
            iterations: 5000,
            samples: 1000,
            d_kl: 500.0,
            algorithm: Algorithm::QualeEffective,
            warm_start_cd1: 100,
            bias_correction: true,
            importance_reuse: true,
            eval_every: 50,
            seed: 0,
            thermometer: Thermometer::Regression,
            regression: RegressionOptions::default(),
            noise_floor: 0.05,
            init_scale: 0.05,
            t_guess: 0.1,
            calibration_samples: 10_000,
            calibration_events: 100,
            calibration_rounds: 3,
            calibration_temperature: 0.1,
            backend: SamplerBackend::Auto,
            range: ControlRange::default(),
            record_wall_time: false,
            diagnostics_at: Vec::new(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return fail(format!("eta must be non-negative, got {}", self.eta));
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if self.samples < 2 {
            return fail(format!("samples must be at least 2, got {}", self.samples));
        }
        if !(self.d_kl > 0.0) {
            return fail(format!("d_kl must be positive, got {}", self.d_kl));
        }
        if self.eval_every == 0 {
            return fail("eval_every must be at least 1".into());
        }
        if !(self.t_guess > 0.0) || !(self.calibration_temperature > 0.0) {
            return fail("temperatures must be positive".into());
        }
        match self.algorithm {
            Algorithm::QualeFixed(t) if !(t > 0.0) => fail(format!("fixed temperature must be positive, got {t}")),
            Algorithm::Cd(0) => fail("CD needs k >= 1".into()),
            _ => Ok(()),
        }
    }
}
