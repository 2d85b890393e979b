//! Temperature as the maximiser of the average pseudo-likelihood.
//!
//! With device energy `E = Σ J s s + Σ h s`, the conditional of unit `i` is
//! `P(s_i | rest) = 1 / (1 + exp(2 s_i F_i / T))` where `F_i = h_i + Σ J s_j`
//! is its local field, so `Λ(T) = -mean ln(1 + exp(2 s_i F_i / T))`.

use super::{EstimationMethod, TemperatureEstimate};
use crate::annealer::SampleSet;
use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, ControlParameters};
use crate::stats::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoLikelihoodOptions {
    pub t0: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PseudoLikelihoodOptions {
    fn default() -> Self {
        Self {
            t0: 1.0,
            tol: 1e-5,
            max_iter: 200,
        }
    }
}

/// `2 s_i F_i` for every unit of every sample.
fn scaled_fields(samples: &SampleSet, graph: &BipartiteGraph, control: &ControlParameters) -> Result<Vec<f64>> {
    if samples.is_empty() || !samples.has_configurations() {
        return Err(Error::invalid("pseudo-likelihood needs sampled configurations"));
    }
    if samples.num_units() != graph.num_units() {
        return Err(Error::invalid("sample width does not match the graph"));
    }
    control.validate(graph)?;
    let n = graph.num_units();
    let mut out = Vec::with_capacity(samples.len() * n);
    for s in samples.iter() {
        for i in 0..n {
            let f = control.fields[i]
                + graph
                    .neighbours(i)
                    .iter()
                    .map(|&(k, j)| control.couplings[k] * f64::from(s[j]))
                    .sum::<f64>();
            out.push(2.0 * f64::from(s[i]) * f);
        }
    }
    Ok(out)
}

/// Value, first and second derivative of `Λ` with respect to `T`.
fn objective(a: &[f64], t: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &ai in a {
        let u = ai / t;
        let p = sigmoid(u);
        v -= softplus(u);
        // dΛ/dT = Σ σ(u) a / T², d²Λ/dT² = -Σ [σ'(u) a² / T⁴ + 2 σ(u) a / T³]
        d1 += p * ai / (t * t);
        d2 -= p * (1.0 - p) * ai * ai / t.powi(4) + 2.0 * p * ai / t.powi(3);
    }
    let n = a.len() as f64;
    (v / n, d1 / n, d2 / n)
}

/// Average pseudo-likelihood at temperature `t`.
pub fn pseudo_likelihood(
    samples: &SampleSet,
    graph: &BipartiteGraph,
    control: &ControlParameters,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("temperature must be positive"));
    }
    Ok(objective(&scaled_fields(samples, graph, control)?, t).0)
}

/// Newton ascent on `Λ(T)` from `options.t0`. A step that leaves `T > 0`
/// or lowers `Λ` is halved; where `Λ` is not concave a half-`T` step is
/// taken along the gradient.
pub fn estimate_temperature_pseudolikelihood(
    samples: &SampleSet,
    graph: &BipartiteGraph,
    control: &ControlParameters,
    options: PseudoLikelihoodOptions,
) -> Result<TemperatureEstimate> {
    if !(options.t0 > 0.0 && options.tol > 0.0) {
        return Err(Error::invalid("initial temperature and tolerance must be positive"));
    }
    let a = scaled_fields(samples, graph, control)?;
    if a.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateLandscape);
    }
    let mut t = options.t0;
    let mut last_step = f64::INFINITY;
    for _ in 0..options.max_iter {
        let (v, d1, d2) = objective(&a, t);
        let mut step = if d2 < 0.0 { -d1 / d2 } else { 0.5 * t * d1.signum() };
        let mut halvings = 0;
        while halvings < 60 {
            let next = t + step;
            if next > 0.0 && objective(&a, next).0 >= v {
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        if halvings == 60 {
            step = 0.0;
        }
        t += step;
        last_step = step.abs();
        if last_step < options.tol {
            return Ok(TemperatureEstimate::from_beta(1.0 / t, EstimationMethod::PseudoLikelihood));
        }
    }
    Err(Error::Convergence {
        iterations: options.max_iter,
        last_step,
    })
}
