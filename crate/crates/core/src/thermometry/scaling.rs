//! Choice of the scale factor `x` for the second sample set.
//!
//! To second order, `D_KL(P_β || P_xβ) ≈ ½ (x-1)² β² σ_E²` per sample, so
//! requiring `R` samples to separate the two sets by `d_KL` gives
//! `x = 1 ± √(2 d_KL / (R β² σ_E²))`.

use crate::error::{Error, Result};
use crate::model::ControlParameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSign {
    Plus,
    Minus,
}

pub fn scaling_factor(beta: f64, sigma_e: f64, r: usize, d_kl: f64, sign: RootSign) -> Result<f64> {
    if !(beta > 0.0 && sigma_e > 0.0 && d_kl > 0.0 && r > 0) {
        return Err(Error::invalid(format!(
            "scaling factor needs positive arguments (beta={beta}, sigma_E={sigma_e}, R={r}, d_KL={d_kl})"
        )));
    }
    let delta = (2.0 * d_kl / (r as f64 * beta * beta * sigma_e * sigma_e)).sqrt();
    Ok(match sign {
        RootSign::Plus => 1.0 + delta,
        RootSign::Minus => 1.0 - delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingChoice {
    pub x: f64,
    pub sign: RootSign,
    /// `x` was reduced to keep the scaled parameters inside the device range.
    pub clamped: bool,
}

/// Select a root for `control`. The minus root is used unless it is not
/// positive or would push the largest rescaled coupling below
/// `noise_floor`. A plus root that would leave the device range falls back
/// to a valid minus root, and is clamped only when there is none.
pub fn choose_scaling(
    beta: f64,
    sigma_e: f64,
    r: usize,
    d_kl: f64,
    control: &ControlParameters,
    noise_floor: f64,
) -> Result<ScalingChoice> {
    let minus = scaling_factor(beta, sigma_e, r, d_kl, RootSign::Minus)?;
    let plus = scaling_factor(beta, sigma_e, r, d_kl, RootSign::Plus)?;
    let limit = control.max_scale();
    let minus_ok = minus > 0.0;
    let choice = |x, sign, clamped| Ok(ScalingChoice { x, sign, clamped });
    if minus_ok && minus * control.max_abs_coupling() >= noise_floor {
        choice(minus, RootSign::Minus, false)
    } else if plus <= limit {
        choice(plus, RootSign::Plus, false)
    } else if minus_ok {
        choice(minus, RootSign::Minus, false)
    } else {
        choice(limit, RootSign::Plus, true)
    }
}
