//! Exact inference by enumerating the visible layer.
//!
//! For each visible vector `v` the hidden layer is summed analytically:
//!
//! `ln p*(v) = Σ_i b_i v_i + Σ_j ln 2cosh(b_j + Σ_i W_ij v_i)`.
//!
//! Visible vectors are encoded as bit masks (bit `i` set means `v_i = +1`)
//! and visited in Gray-code order, so each step flips one visible unit.
//! Every hidden unit keeps the bits of its own visible neighbourhood in a
//! small register; when that neighbourhood is at most
//! [`TABLE_NEIGHBOURHOOD`] units wide, `ln 2cosh` and `tanh` of its input are
//! precomputed for every register value. Wider neighbourhoods fall back to
//! summing chunked partial inputs. No running sums are carried from one
//! state to the next, so each value is computed exactly as from scratch.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{Moments, Rbm};
use crate::stats::{ln_2cosh, log_sum_exp, pairwise_sum};

/// Largest visible layer that may be enumerated.
pub const MAX_ENUMERATED_VISIBLE: usize = 24;

/// Neighbourhood width up to which a hidden unit gets a full lookup table.
pub const TABLE_NEIGHBOURHOOD: usize = 12;

const CHUNK: usize = 8;

enum HiddenEval {
    Table {
        slot: usize,
        ln2cosh: Vec<f64>,
        tanh: Vec<f64>,
    },
    Chunked {
        bias: f64,
        slots: std::ops::Range<usize>,
        /// One partial-input table per slot.
        partial: Vec<Vec<f64>>,
    },
}

/// Precomputed enumeration plan for one model.
pub(crate) struct VisibleEnumerator {
    n_visible: usize,
    hidden: Vec<HiddenEval>,
    n_slots: usize,
    /// Per visible unit: `(slot, bit)` registers to toggle when it flips.
    incidence: Vec<Vec<(usize, u32)>>,
    /// Visible-bias contribution per 8-bit chunk of the mask.
    bias_chunks: Vec<Vec<f64>>,
}

/// Spin value encoded by bit `bit` of `mask`.
#[inline]
fn spin(mask: u32, bit: usize) -> f64 {
    if mask >> bit & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Table of `bias + Σ_k w_k s_k` over all sign patterns of `w`.
fn input_table(bias: f64, weights: &[f64]) -> Vec<f64> {
    (0..1u32 << weights.len())
        .map(|idx| {
            weights
                .iter()
                .enumerate()
                .fold(bias, |acc, (k, w)| acc + w * spin(idx, k))
        })
        .collect()
}

impl VisibleEnumerator {
    pub(crate) fn new(rbm: &Rbm) -> Result<Self> {
        let n = rbm.num_visible();
        if n > MAX_ENUMERATED_VISIBLE {
            return Err(Error::Capacity {
                what: "visible layer",
                got: n,
                limit: MAX_ENUMERATED_VISIBLE,
            });
        }
        let graph = &rbm.graph;
        let params = &rbm.params;
        let mut incidence = vec![Vec::new(); n];
        let mut hidden = Vec::with_capacity(rbm.num_hidden());
        let mut n_slots = 0;
        for j in 0..rbm.num_hidden() {
            let unit = n + j;
            let neigh = graph.neighbours(unit);
            let bias = params.biases[unit];
            if neigh.len() <= TABLE_NEIGHBOURHOOD {
                let slot = n_slots;
                n_slots += 1;
                let weights: Vec<f64> = neigh.iter().map(|&(k, _)| params.weights[k]).collect();
                for (bit, &(_, i)) in neigh.iter().enumerate() {
                    incidence[i].push((slot, 1 << bit));
                }
                let inputs = input_table(bias, &weights);
                hidden.push(HiddenEval::Table {
                    slot,
                    ln2cosh: inputs.iter().map(|&x| ln_2cosh(x)).collect(),
                    tanh: inputs.iter().map(|&x| x.tanh()).collect(),
                });
            } else {
                let start = n_slots;
                let mut partial = Vec::new();
                for chunk in neigh.chunks(CHUNK) {
                    let slot = n_slots;
                    n_slots += 1;
                    for (bit, &(_, i)) in chunk.iter().enumerate() {
                        incidence[i].push((slot, 1 << bit));
                    }
                    let weights: Vec<f64> =
                        chunk.iter().map(|&(k, _)| params.weights[k]).collect();
                    partial.push(input_table(0.0, &weights));
                }
                hidden.push(HiddenEval::Chunked {
                    bias,
                    slots: start..n_slots,
                    partial,
                });
            }
        }
        let bias_chunks = (0..n)
            .step_by(CHUNK)
            .map(|start| {
                let end = (start + CHUNK).min(n);
                input_table(0.0, &params.biases[start..end])
            })
            .collect();
        Ok(Self {
            n_visible: n,
            hidden,
            n_slots,
            incidence,
            bias_chunks,
        })
    }

    pub(crate) fn num_states(&self) -> usize {
        1usize << self.n_visible
    }

    #[inline]
    fn visible_bias(&self, mask: u32) -> f64 {
        let mut acc = 0.0;
        for (c, table) in self.bias_chunks.iter().enumerate() {
            acc += table[(mask >> (c * CHUNK)) as usize & (table.len() - 1)];
        }
        acc
    }

    #[inline]
    fn hidden_input(bias: f64, slots: &std::ops::Range<usize>, partial: &[Vec<f64>], regs: &[u32]) -> f64 {
        slots
            .clone()
            .zip(partial)
            .fold(bias, |acc, (s, table)| acc + table[regs[s] as usize])
    }

    #[inline]
    fn log_weight(&self, mask: u32, regs: &[u32]) -> f64 {
        let mut acc = self.visible_bias(mask);
        for h in &self.hidden {
            acc += match h {
                HiddenEval::Table { slot, ln2cosh, .. } => ln2cosh[regs[*slot] as usize],
                HiddenEval::Chunked {
                    bias,
                    slots,
                    partial,
                } => ln_2cosh(Self::hidden_input(*bias, slots, partial, regs)),
            };
        }
        acc
    }

    #[inline]
    fn hidden_means(&self, regs: &[u32], out: &mut [f64]) {
        for (o, h) in out.iter_mut().zip(&self.hidden) {
            *o = match h {
                HiddenEval::Table { slot, tanh, .. } => tanh[regs[*slot] as usize],
                HiddenEval::Chunked {
                    bias,
                    slots,
                    partial,
                } => Self::hidden_input(*bias, slots, partial, regs).tanh(),
            };
        }
    }

    /// Visit every visible mask in Gray-code order.
    fn walk(&self, mut visit: impl FnMut(u32, &[u32])) {
        let mut regs = vec![0u32; self.n_slots];
        let mut mask = 0u32;
        for step in 0..self.num_states() {
            if step > 0 {
                let flip = step.trailing_zeros() as usize;
                mask ^= 1 << flip;
                for &(slot, bit) in &self.incidence[flip] {
                    regs[slot] ^= bit;
                }
            }
            visit(mask, &regs);
        }
    }

    /// `ln p*(v)` indexed by visible mask.
    pub(crate) fn log_weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_states()];
        self.walk(|mask, regs| out[mask as usize] = self.log_weight(mask, regs));
        out
    }
}

/// Visible mask → ±1 vector of length `n`.
pub fn mask_to_spins(mask: u32, n: usize) -> Vec<i8> {
    (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

pub fn spins_to_mask(v: &[i8]) -> u32 {
    v.iter()
        .enumerate()
        .fold(0u32, |m, (i, &s)| if s > 0 { m | 1 << i } else { m })
}

/// Unnormalised log marginal `ln Σ_u exp(-E(v, u))` of one visible vector.
pub fn log_unnormalized_marginal(rbm: &Rbm, v: &[i8]) -> f64 {
    let vis: f64 = v
        .iter()
        .zip(&rbm.params.biases)
        .map(|(&s, b)| b * f64::from(s))
        .sum();
    vis + rbm.hidden_fields(v).into_iter().map(ln_2cosh).sum::<f64>()
}

/// Unnormalised log marginals of all visible vectors, indexed by mask.
pub fn visible_log_weights(rbm: &Rbm) -> Result<Vec<f64>> {
    Ok(VisibleEnumerator::new(rbm)?.log_weights())
}

pub fn log_partition_function(rbm: &Rbm) -> Result<f64> {
    Ok(log_sum_exp(&visible_log_weights(rbm)?))
}

fn check_data(rbm: &Rbm, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::invalid("dataset is empty"));
    }
    if data.width() != rbm.num_visible() {
        return Err(Error::invalid(format!(
            "datapoints have {} entries, model has {} visible units",
            data.width(),
            rbm.num_visible()
        )));
    }
    Ok(())
}

/// `(1/D) Σ_d ln P(v^d)`, with `ln Z` supplied by the caller.
pub fn average_log_likelihood_with(rbm: &Rbm, data: &Dataset, log_z: f64) -> Result<f64> {
    check_data(rbm, data)?;
    let terms: Vec<f64> = data
        .datapoints
        .iter()
        .map(|v| log_unnormalized_marginal(rbm, v))
        .collect();
    Ok(pairwise_sum(&terms) / data.len() as f64 - log_z)
}

pub fn average_log_likelihood(rbm: &Rbm, data: &Dataset) -> Result<f64> {
    check_data(rbm, data)?;
    let log_z = log_partition_function(rbm)?;
    average_log_likelihood_with(rbm, data, log_z)
}

/// Data averages with hidden units replaced by their conditional means.
pub fn exact_data_averages(rbm: &Rbm, data: &Dataset) -> Result<Moments> {
    check_data(rbm, data)?;
    let graph = &rbm.graph;
    let n = rbm.num_visible();
    let mut m = Moments::zeros(graph);
    for v in &data.datapoints {
        let means: Vec<f64> = rbm.hidden_fields(v).into_iter().map(f64::tanh).collect();
        for i in 0..n {
            m.units[i] += f64::from(v[i]);
        }
        for (j, t) in means.iter().enumerate() {
            m.units[n + j] += t;
        }
        for (k, e) in graph.edges().iter().enumerate() {
            m.edges[k] += f64::from(v[e.visible]) * means[e.hidden];
        }
    }
    m.scale(1.0 / data.len() as f64);
    Ok(m)
}

/// Exact first and second moments under `P_B`.
pub fn exact_model_averages(rbm: &Rbm) -> Result<Moments> {
    let en = VisibleEnumerator::new(rbm)?;
    let log_w = en.log_weights();
    let log_z = log_sum_exp(&log_w);
    let graph = &rbm.graph;
    let n = rbm.num_visible();
    let mut m = Moments::zeros(graph);
    let mut means = vec![0.0; rbm.num_hidden()];
    en.walk(|mask, regs| {
        let p = (log_w[mask as usize] - log_z).exp();
        en.hidden_means(regs, &mut means);
        for i in 0..n {
            m.units[i] += p * spin(mask, i);
        }
        for (j, t) in means.iter().enumerate() {
            m.units[n + j] += p * t;
        }
        for (k, e) in graph.edges().iter().enumerate() {
            m.edges[k] += p * spin(mask, e.visible) * means[e.hidden];
        }
    });
    Ok(m)
}

/// Exact `P(v)` for every visible mask.
pub fn visible_distribution(rbm: &Rbm) -> Result<Vec<f64>> {
    let log_w = visible_log_weights(rbm)?;
    let log_z = log_sum_exp(&log_w);
    Ok(log_w.iter().map(|l| (l - log_z).exp()).collect())
}
