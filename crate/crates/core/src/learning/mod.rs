//! Gradient-ascent training: exact data moments against sampled or CD-k
//! model moments, and the annealer-in-the-loop training procedure.

mod config;
mod train;

pub use config::{Algorithm, Thermometer, TrainingConfig};
pub use train::{cd_train, quale_train, IterationEstimate, TraceRecord, TrainingTrace};

use rand::Rng;
use rayon::prelude::*;

use crate::annealer::{sample_hidden, sample_visible, SampleSet};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, ModelParameters, Moments, Rbm};
use crate::seed::{derive_seed, rng_from};
use crate::stats::log_sum_exp;

/// `ΔW = ⟨s s⟩_D - ⟨s s⟩_M`, `Δb = ⟨s⟩_D - ⟨s⟩_M`.
pub fn gradient(data: &Moments, model: &Moments) -> Result<ModelParameters> {
    if data.units.len() != model.units.len() || data.edges.len() != model.edges.len() {
        return Err(Error::invalid("moment sets have different shapes"));
    }
    Ok(ModelParameters {
        weights: data.edges.iter().zip(&model.edges).map(|(d, m)| d - m).collect(),
        biases: data.units.iter().zip(&model.units).map(|(d, m)| d - m).collect(),
    })
}

/// `params + eta * increment`.
pub fn update(params: &ModelParameters, increment: &ModelParameters, eta: f64) -> Result<ModelParameters> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::invalid(format!("learning rate must be non-negative, got {eta}")));
    }
    if params.weights.len() != increment.weights.len() || params.biases.len() != increment.biases.len() {
        return Err(Error::invalid("increment shape does not match parameters"));
    }
    Ok(ModelParameters {
        weights: params.weights.iter().zip(&increment.weights).map(|(p, d)| p + eta * d).collect(),
        biases: params.biases.iter().zip(&increment.biases).map(|(p, d)| p + eta * d).collect(),
    })
}

/// Largest absolute component of an increment.
pub fn max_norm(increment: &ModelParameters) -> f64 {
    increment.max_abs()
}

/// CD-k model moments: one chain per datapoint, `k` block-Gibbs steps
/// (hidden then visible) from the datapoint, hidden units of the final
/// state replaced by their conditional means.
pub fn cd_k_model_moments(rbm: &Rbm, data: &Dataset, k: usize, seed: u64) -> Result<Moments> {
    if k == 0 {
        return Err(Error::invalid("CD needs at least one Gibbs step"));
    }
    if data.is_empty() || data.width() != rbm.num_visible() {
        return Err(Error::invalid("dataset does not match the visible layer"));
    }
    let graph = &rbm.graph;
    let n = rbm.num_visible();
    let chains: Vec<Moments> = data
        .datapoints
        .par_iter()
        .enumerate()
        .map(|(d, v0)| {
            let mut rng = rng_from(derive_seed(seed, &[d as u64]));
            let mut state = vec![1i8; graph.num_units()];
            state[..n].copy_from_slice(v0);
            let mut fields = vec![0.0; n.max(rbm.num_hidden())];
            for _ in 0..k {
                sample_hidden(rbm, &mut state, &mut fields[..rbm.num_hidden()], &mut rng);
                sample_visible(rbm, &mut state, &mut fields, &mut rng);
            }
            let means: Vec<f64> = rbm.hidden_fields(&state[..n]).into_iter().map(f64::tanh).collect();
            let mut m = Moments::zeros(graph);
            for i in 0..n {
                m.units[i] = f64::from(state[i]);
            }
            m.units[n..].copy_from_slice(&means);
            for (e, out) in graph.edges().iter().zip(m.edges.iter_mut()) {
                *out = f64::from(state[e.visible]) * means[e.hidden];
            }
            m
        })
        .collect();
    let mut total = Moments::zeros(graph);
    for m in &chains {
        for (t, v) in total.units.iter_mut().zip(&m.units) {
            *t += v;
        }
        for (t, v) in total.edges.iter_mut().zip(&m.edges) {
            *t += v;
        }
    }
    total.units.iter_mut().chain(total.edges.iter_mut()).for_each(|v| *v /= chains.len() as f64);
    Ok(total)
}

/// Model moments at `beta` pooled from a native set (drawn at `beta`) and
/// a rescaled set (drawn at `beta_prime`) reweighted by
/// `ρ = exp(-(beta - beta_prime) E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMoments {
    pub moments: Moments,
    /// `(Σρ)² / Σρ²` over the rescaled set.
    pub effective_samples: f64,
    /// Effective sample size below a tenth of the rescaled set.
    pub degenerate: bool,
}

pub fn importance_weighted_moments(
    graph: &BipartiteGraph,
    native: &SampleSet,
    scaled: &SampleSet,
    beta: f64,
    beta_prime: f64,
) -> Result<ImportanceMoments> {
    for set in [native, scaled] {
        if !set.has_configurations() || set.num_units() != graph.num_units() {
            return Err(Error::invalid("sample sets must carry configurations for this graph"));
        }
    }
    let log_rho: Vec<f64> = scaled.energies.iter().map(|e| -(beta - beta_prime) * e).collect();
    let lse = log_sum_exp(&log_rho);
    if !lse.is_finite() {
        return Err(Error::DegenerateWeights(format!("log-sum of weights is {lse}")));
    }
    // normalised so that Σw = (Σρ)²/Σρ² is the effective sample size
    let rho: Vec<f64> = log_rho.iter().map(|l| (l - lse).exp()).collect();
    let sum_sq: f64 = rho.iter().map(|r| r * r).sum();
    if !(sum_sq > 0.0) {
        return Err(Error::DegenerateWeights("all weights underflow".into()));
    }
    let ess = 1.0 / sum_sq;
    let mut m = Moments::zeros(graph);
    for s in native.iter() {
        m.accumulate(graph, s, 1.0);
    }
    for (s, r) in scaled.iter().zip(&rho) {
        m.accumulate(graph, s, r * ess);
    }
    m.scale(1.0 / (native.len() as f64 + ess));
    Ok(ImportanceMoments {
        moments: m,
        effective_samples: ess,
        degenerate: ess < 0.1 * scaled.len() as f64,
    })
}

/// Uniform `[-scale, scale]` draws, one per edge and per unit.
pub(crate) fn uniform_parameters(graph: &BipartiteGraph, scale: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_from(seed);
    let mut draw = || if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 };
    let j = (0..graph.num_edges()).map(|_| draw()).collect();
    let h = (0..graph.num_units()).map(|_| draw()).collect();
    (j, h)
}
