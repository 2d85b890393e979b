//! Effective-temperature estimation from sample sets.

mod histogram;
mod pseudolikelihood;
mod regression;
mod scaling;

pub use histogram::{bin_count, bin_energies, pooled_edges, EnergyHistogram};
pub use pseudolikelihood::{
    estimate_temperature_pseudolikelihood, pseudo_likelihood, PseudoLikelihoodOptions,
};
pub use regression::{
    estimate_temperature_regression, estimate_temperature_sweep, log_ratio_single_pair,
    regression_with_diagnostics, RegressionDiagnostics, RegressionOptions,
};
pub use scaling::{choose_scaling, scaling_factor, RootSign, ScalingChoice};

use crate::annealer::SampleSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    Regression,
    SinglePair,
    PseudoLikelihood,
}

/// An inverse-temperature estimate with its fit diagnostics. Fit fields
/// that do not apply to a method are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureEstimate {
    pub beta_eff: f64,
    pub t_eff: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_coeff: f64,
    pub n_points: usize,
    pub method: EstimationMethod,
}

impl TemperatureEstimate {
    pub(crate) fn from_beta(beta: f64, method: EstimationMethod) -> Self {
        Self {
            beta_eff: beta,
            t_eff: 1.0 / beta,
            slope: f64::NAN,
            intercept: f64::NAN,
            r_coeff: f64::NAN,
            n_points: 0,
            method,
        }
    }
}

/// Unbiased variance of the cached energies.
pub fn energy_variance(samples: &SampleSet) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("sample set is empty"));
    }
    Ok(crate::stats::variance(&samples.energies))
}
