//! Temperature from the overlap of two energy histograms.
//!
//! For Boltzmann samples at `β` and `β' = x β` the degeneracies cancel in
//!
//! `Δℓ_ab = ln[P_β(E_a) P_β'(E_b) / (P_β(E_b) P_β'(E_a))] = (β' - β)(E_a - E_b)`,
//!
//! so a line through the `(ΔE, Δℓ)` points of every pair of bins populated
//! in both histograms has slope `(x - 1) β`.

use std::fmt::Write as _;

use super::histogram::{bin_count, bin_energies, pooled_edges, EnergyHistogram};
use super::{EstimationMethod, TemperatureEstimate};
use crate::annealer::SampleSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionOptions {
    /// Weight each point by the harmonic mean of its four bin counts.
    /// Unweighted fits are pulled flat by sparsely populated tail bins and
    /// underestimate `β` by several percent at any `R`.
    pub weighted: bool,
    /// Override the `⌈√(2R)⌉` bin count.
    pub bins: Option<usize>,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        Self {
            weighted: true,
            bins: None,
        }
    }
}

impl RegressionOptions {
    pub fn unweighted() -> Self {
        Self {
            weighted: false,
            bins: None,
        }
    }
}

/// The point cloud behind one regression estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDiagnostics {
    /// `(ΔE, Δℓ)` per ordered pair of overlapping bins.
    pub points: Vec<(f64, f64)>,
    pub estimate: TemperatureEstimate,
    pub x: f64,
    pub bins: usize,
    pub native: EnergyHistogram,
    pub scaled: EnergyHistogram,
}

impl RegressionDiagnostics {
    /// Metadata comment line, then `dE,dlogl` rows.
    pub fn to_csv(&self) -> String {
        let e = &self.estimate;
        let mut out = format!(
            "# slope={:?},intercept={:?},r_coeff={:?},x={:?},K={},t_eff={:?}\ndE,dlogl\n",
            e.slope, e.intercept, e.r_coeff, self.x, self.bins, e.t_eff
        );
        for (de, dl) in &self.points {
            let _ = writeln!(out, "{de:?},{dl:?}");
        }
        out
    }
}

struct Fit {
    slope: f64,
    intercept: f64,
    r: f64,
}

fn least_squares(points: &[(f64, f64)], weights: &[f64]) -> Option<Fit> {
    let sw: f64 = weights.iter().sum();
    if points.len() < 2 || sw <= 0.0 {
        return None;
    }
    let mx = points.iter().zip(weights).map(|((x, _), w)| w * x).sum::<f64>() / sw;
    let my = points.iter().zip(weights).map(|((_, y), w)| w * y).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((x, y), w) in points.iter().zip(weights) {
        let dx = x - mx;
        let dy = y - my;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r = if syy > 0.0 { sxy / (sxx * syy).sqrt() } else { 0.0 };
    Some(Fit {
        slope,
        intercept: my - slope * mx,
        r,
    })
}

fn harmonic_mean(xs: [usize; 4]) -> f64 {
    4.0 / xs.iter().map(|&c| 1.0 / c as f64).sum::<f64>()
}

pub fn regression_with_diagnostics(
    native: &SampleSet,
    scaled: &SampleSet,
    x: f64,
    options: RegressionOptions,
) -> Result<RegressionDiagnostics> {
    if !(x.is_finite() && x > 0.0) || x == 1.0 {
        return Err(Error::invalid(format!(
            "scale factor must be positive and different from 1, got {x}"
        )));
    }
    if native.is_empty() || scaled.is_empty() {
        return Err(Error::invalid("both sample sets must be non-empty"));
    }
    let k = options
        .bins
        .unwrap_or_else(|| bin_count(native.len().min(scaled.len())));
    let edges = pooled_edges(&[native, scaled], k)?;
    let hn = bin_energies(native, &edges)?;
    let hs = bin_energies(scaled, &edges)?;
    let overlap: Vec<usize> = (0..k)
        .filter(|&b| hn.counts[b] > 0 && hs.counts[b] > 0)
        .collect();
    if overlap.len() < 2 {
        return Err(Error::InsufficientOverlap {
            populated: overlap.len(),
        });
    }
    let log_ratio: Vec<f64> = overlap
        .iter()
        .map(|&b| (hn.frequency(b) / hs.frequency(b)).ln())
        .collect();
    let mut points = Vec::with_capacity(overlap.len() * (overlap.len() - 1));
    let mut weights = Vec::with_capacity(points.capacity());
    for (ia, &a) in overlap.iter().enumerate() {
        for (ib, &b) in overlap.iter().enumerate() {
            if ia == ib {
                continue;
            }
            let dl = log_ratio[ia] - log_ratio[ib];
            points.push((hn.midpoints[a] - hn.midpoints[b], dl));
            weights.push(if options.weighted {
                harmonic_mean([hn.counts[a], hn.counts[b], hs.counts[a], hs.counts[b]])
            } else {
                1.0
            });
        }
    }
    let fit = least_squares(&points, &weights).ok_or(Error::InsufficientOverlap {
        populated: overlap.len(),
    })?;
    let beta = fit.slope / (x - 1.0);
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NonPhysical {
            slope: fit.slope,
            x,
            beta,
        });
    }
    let estimate = TemperatureEstimate {
        beta_eff: beta,
        t_eff: 1.0 / beta,
        slope: fit.slope,
        intercept: fit.intercept,
        r_coeff: fit.r,
        n_points: points.len(),
        method: EstimationMethod::Regression,
    };
    Ok(RegressionDiagnostics {
        points,
        estimate,
        x,
        bins: k,
        native: hn,
        scaled: hs,
    })
}

/// Regression estimate with the default options.
pub fn estimate_temperature_regression(
    native: &SampleSet,
    scaled: &SampleSet,
    x: f64,
) -> Result<TemperatureEstimate> {
    Ok(regression_with_diagnostics(native, scaled, x, RegressionOptions::default())?.estimate)
}

/// `ln[P̂(E_1) / P̂(E_2)]` for two populated bins.
pub fn log_ratio_single_pair(hist: &EnergyHistogram, bin1: usize, bin2: usize) -> Result<f64> {
    let count = |b: usize| {
        hist.counts
            .get(b)
            .copied()
            .ok_or_else(|| Error::invalid(format!("bin {b} does not exist")))
    };
    let (c1, c2) = (count(bin1)?, count(bin2)?);
    if c1 == 0 || c2 == 0 {
        return Err(Error::invalid(format!(
            "bins {bin1} and {bin2} must both be populated"
        )));
    }
    Ok((c1 as f64 / c2 as f64).ln())
}

/// Baseline estimator from a sweep of scale factors: the log-ratio of two
/// fixed energy bins is linear in `x` with slope `-β ΔE`. Each set's
/// `scale` field gives its `x`. The two bins are those containing the
/// pooled lower and upper quartile energies.
pub fn estimate_temperature_sweep(sets: &[SampleSet]) -> Result<TemperatureEstimate> {
    if sets.len() < 2 {
        return Err(Error::invalid("a sweep needs at least two scale factors"));
    }
    let refs: Vec<&SampleSet> = sets.iter().collect();
    let r = sets.iter().map(SampleSet::len).min().unwrap_or(0);
    let edges = pooled_edges(&refs, bin_count(r))?;
    let pooled: Vec<f64> = sets.iter().flat_map(|s| s.energies.iter().copied()).collect();
    let hists = sets
        .iter()
        .map(|s| bin_energies(s, &edges))
        .collect::<Result<Vec<_>>>()?;
    let q_low = crate::stats::quantile(&pooled, 0.25);
    let q_high = crate::stats::quantile(&pooled, 0.75);
    let b1 = hists[0].bin_of(q_low).expect("quantile inside pooled range");
    let b2 = hists[0].bin_of(q_high).expect("quantile inside pooled range");
    if b1 == b2 {
        return Err(Error::InsufficientOverlap { populated: 1 });
    }
    let mut points = Vec::with_capacity(sets.len());
    for (set, h) in sets.iter().zip(&hists) {
        points.push((set.scale, log_ratio_single_pair(h, b1, b2)?));
    }
    let fit = least_squares(&points, &vec![1.0; points.len()]).ok_or_else(|| {
        Error::invalid("sweep needs at least two distinct scale factors")
    })?;
    let delta_e = hists[0].midpoints[b1] - hists[0].midpoints[b2];
    let beta = -fit.slope / delta_e;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NonPhysical {
            slope: fit.slope,
            x: f64::NAN,
            beta,
        });
    }
    Ok(TemperatureEstimate {
        beta_eff: beta,
        t_eff: 1.0 / beta,
        slope: fit.slope,
        intercept: fit.intercept,
        r_coeff: fit.r,
        n_points: points.len(),
        method: EstimationMethod::SinglePair,
    })
}
