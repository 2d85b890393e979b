//! Bipartite Boltzmann machines: graph, parameters, energies, and the
//! sign dictionary between model and device parameters.
//!
//! Units are numbered visible first (`0..N`) then hidden (`N..N+M`); spin
//! configurations are `i8` slices of length `N + M` in that order.
//!
//! Sign conventions, fixed here once:
//!
//! * model energy `E_model(s) = -Σ W_ij s_i s_j - Σ b_i s_i`, with
//!   `P_B(s) ∝ exp(-E_model(s))`;
//! * device energy `E_device(s) = +Σ J_ij s_i s_j + Σ h_i s_i`, sampled as
//!   `exp(-E_device(s) / T_eff)`;
//! * hence `W = -J / T_eff` and `b = -h / T_eff`.

pub mod exact;
pub mod io;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::topology::BipartitePartition;

/// A visible–hidden coupling, by layer-local positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub visible: usize,
    pub hidden: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_visible: usize,
    n_hidden: usize,
    edges: Vec<Edge>,
    /// Per unit: `(edge index, neighbouring unit)`.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl BipartiteGraph {
    pub fn new(n_visible: usize, n_hidden: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.visible >= n_visible || e.hidden >= n_hidden {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) outside a {n_visible}+{n_hidden} graph",
                    e.visible, e.hidden
                )));
            }
            if !seen.insert(*e) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    e.visible, e.hidden
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n_visible + n_hidden];
        for (k, e) in edges.iter().enumerate() {
            let h = n_visible + e.hidden;
            adjacency[e.visible].push((k, h));
            adjacency[h].push((k, e.visible));
        }
        Ok(Self {
            n_visible,
            n_hidden,
            edges,
            adjacency,
        })
    }

    /// Complete bipartite graph `K_{n,m}`.
    pub fn complete(n_visible: usize, n_hidden: usize) -> Self {
        let edges = (0..n_visible)
            .flat_map(|v| (0..n_hidden).map(move |h| Edge { visible: v, hidden: h }))
            .collect();
        Self::new(n_visible, n_hidden, edges).expect("complete graph is valid")
    }

    pub fn from_partition(partition: &BipartitePartition) -> Self {
        let edges = partition
            .edges
            .iter()
            .map(|&(v, h)| Edge { visible: v, hidden: h })
            .collect();
        Self::new(partition.num_visible(), partition.num_hidden(), edges)
            .expect("partition edges are valid")
    }

    pub fn num_visible(&self) -> usize {
        self.n_visible
    }

    pub fn num_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn num_units(&self) -> usize {
        self.n_visible + self.n_hidden
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(visible unit, hidden unit)` global indices of edge `k`.
    #[inline]
    pub fn endpoints(&self, k: usize) -> (usize, usize) {
        let e = self.edges[k];
        (e.visible, self.n_visible + e.hidden)
    }

    pub fn neighbours(&self, unit: usize) -> &[(usize, usize)] {
        &self.adjacency[unit]
    }
}

/// Dimensionless weights `W` (one per edge) and biases `b` (one per unit).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl ModelParameters {
    pub fn zeros(graph: &BipartiteGraph) -> Self {
        Self {
            weights: vec![0.0; graph.num_edges()],
            biases: vec![0.0; graph.num_units()],
        }
    }

    pub fn validate(&self, graph: &BipartiteGraph) -> Result<()> {
        if self.weights.len() != graph.num_edges() || self.biases.len() != graph.num_units() {
            return Err(Error::invalid(format!(
                "parameter shape ({} weights, {} biases) does not match graph ({} edges, {} units)",
                self.weights.len(),
                self.biases.len(),
                graph.num_edges(),
                graph.num_units()
            )));
        }
        if self.weights.iter().chain(&self.biases).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite model parameter"));
        }
        Ok(())
    }

    /// Model parameters represented by device parameters at temperature `t`.
    pub fn from_control(control: &ControlParameters, t: f64) -> Self {
        Self {
            weights: control.couplings.iter().map(|j| -j / t).collect(),
            biases: control.fields.iter().map(|h| -h / t).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(&self.biases)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Programmable range of the device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlRange {
    pub j_min: f64,
    pub j_max: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for ControlRange {
    /// Couplers span [-1, 1] by definition of the unit system. The field
    /// range is a guess: [-2, 2].
    fn default() -> Self {
        Self {
            j_min: -1.0,
            j_max: 1.0,
            h_min: -2.0,
            h_max: 2.0,
        }
    }
}

/// Device couplings `J` (one per edge) and fields `h` (one per unit).
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParameters {
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
    pub range: ControlRange,
}

impl ControlParameters {
    pub fn zeros(graph: &BipartiteGraph) -> Self {
        Self {
            couplings: vec![0.0; graph.num_edges()],
            fields: vec![0.0; graph.num_units()],
            range: ControlRange::default(),
        }
    }

    /// Device parameters for model parameters at temperature `t`
    /// (`J = -t W`, `h = -t b`), clamped into the device range. Returns the
    /// parameters and the number of clamped entries.
    pub fn from_model(model: &ModelParameters, t: f64, range: ControlRange) -> (Self, usize) {
        let mut clamped = 0;
        let mut clip = |v: f64, lo: f64, hi: f64| {
            if v < lo || v > hi {
                clamped += 1;
            }
            v.clamp(lo, hi)
        };
        let couplings = model
            .weights
            .iter()
            .map(|w| clip(-t * w, range.j_min, range.j_max))
            .collect();
        let fields = model
            .biases
            .iter()
            .map(|b| clip(-t * b, range.h_min, range.h_max))
            .collect();
        (
            Self {
                couplings,
                fields,
                range,
            },
            clamped,
        )
    }

    pub fn validate(&self, graph: &BipartiteGraph) -> Result<()> {
        if self.couplings.len() != graph.num_edges() || self.fields.len() != graph.num_units() {
            return Err(Error::invalid("control parameter shape does not match graph"));
        }
        self.check_range()
    }

    pub fn check_range(&self) -> Result<()> {
        let r = self.range;
        for (index, &value) in self.couplings.iter().enumerate() {
            if !(r.j_min..=r.j_max).contains(&value) {
                return Err(Error::ControlOutOfRange {
                    index,
                    value,
                    min: r.j_min,
                    max: r.j_max,
                });
            }
        }
        for (i, &value) in self.fields.iter().enumerate() {
            if !(r.h_min..=r.h_max).contains(&value) {
                return Err(Error::ControlOutOfRange {
                    index: self.couplings.len() + i,
                    value,
                    min: r.h_min,
                    max: r.h_max,
                });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, x: f64) -> Self {
        Self {
            couplings: self.couplings.iter().map(|j| x * j).collect(),
            fields: self.fields.iter().map(|h| x * h).collect(),
            range: self.range,
        }
    }

    /// Root mean square over all couplings and fields.
    pub fn rms(&self) -> f64 {
        let n = self.couplings.len() + self.fields.len();
        if n == 0 {
            return 0.0;
        }
        let sq: f64 = self.couplings.iter().chain(&self.fields).map(|v| v * v).sum();
        (sq / n as f64).sqrt()
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest `x > 0` such that `x * self` stays inside the device range.
    pub fn max_scale(&self) -> f64 {
        let r = self.range;
        let mut limit = f64::INFINITY;
        for &j in &self.couplings {
            if j > 0.0 {
                limit = limit.min(r.j_max / j);
            } else if j < 0.0 {
                limit = limit.min(r.j_min / j);
            }
        }
        for &h in &self.fields {
            if h > 0.0 {
                limit = limit.min(r.h_max / h);
            } else if h < 0.0 {
                limit = limit.min(r.h_min / h);
            }
        }
        limit
    }
}

/// A full assignment of ±1 to every unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("spin values must be ±1"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[i8]> for SpinConfiguration {
    fn as_ref(&self) -> &[i8] {
        &self.0
    }
}

/// Anything that assigns an Ising energy to a configuration.
pub trait Hamiltonian {
    /// Energy of `s`, with `s.len() == graph.num_units()` already checked.
    fn energy_unchecked(&self, graph: &BipartiteGraph, s: &[i8]) -> f64;

    fn energy(&self, graph: &BipartiteGraph, s: &[i8]) -> Result<f64> {
        if s.len() != graph.num_units() {
            return Err(Error::invalid(format!(
                "configuration has {} spins, graph has {} units",
                s.len(),
                graph.num_units()
            )));
        }
        Ok(self.energy_unchecked(graph, s))
    }
}

fn ising_sum(graph: &BipartiteGraph, pair: &[f64], unit: &[f64], s: &[i8]) -> f64 {
    let mut acc = 0.0;
    for (k, &w) in pair.iter().enumerate() {
        let (a, b) = graph.endpoints(k);
        acc += w * f64::from(s[a] * s[b]);
    }
    for (i, &b) in unit.iter().enumerate() {
        acc += b * f64::from(s[i]);
    }
    acc
}

impl Hamiltonian for ModelParameters {
    fn energy_unchecked(&self, graph: &BipartiteGraph, s: &[i8]) -> f64 {
        -ising_sum(graph, &self.weights, &self.biases, s)
    }
}

impl Hamiltonian for ControlParameters {
    fn energy_unchecked(&self, graph: &BipartiteGraph, s: &[i8]) -> f64 {
        ising_sum(graph, &self.couplings, &self.fields, s)
    }
}

pub fn energy<H: Hamiltonian>(graph: &BipartiteGraph, params: &H, s: &[i8]) -> Result<f64> {
    params.energy(graph, s)
}

/// A bipartite Boltzmann machine: graph plus model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    pub graph: Arc<BipartiteGraph>,
    pub params: ModelParameters,
}

/// A Chimera-RBM is an `Rbm` on a Chimera-derived graph.
pub type ChimeraModel = Rbm;

impl Rbm {
    pub fn new(graph: Arc<BipartiteGraph>, params: ModelParameters) -> Result<Self> {
        params.validate(&graph)?;
        Ok(Self { graph, params })
    }

    pub fn zeros(graph: Arc<BipartiteGraph>) -> Self {
        let params = ModelParameters::zeros(&graph);
        Self { graph, params }
    }

    pub fn num_visible(&self) -> usize {
        self.graph.num_visible()
    }

    pub fn num_hidden(&self) -> usize {
        self.graph.num_hidden()
    }

    /// Input to hidden unit `j` (layer-local) from visible vector `v`:
    /// `b_j + Σ_i W_ij v_i`.
    pub fn hidden_fields(&self, v: &[i8]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_hidden()];
        self.fill_hidden_fields(v, &mut out);
        out
    }

    pub fn fill_hidden_fields(&self, v: &[i8], out: &mut [f64]) {
        let n = self.num_visible();
        for (j, o) in out.iter_mut().enumerate() {
            let unit = n + j;
            *o = self.graph.neighbours(unit).iter().fold(
                self.params.biases[unit],
                |acc, &(k, i)| acc + self.params.weights[k] * f64::from(v[i]),
            );
        }
    }

    /// Input to visible unit `i` from hidden vector `u` (layer-local).
    pub fn visible_fields(&self, u: &[i8]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_visible()];
        self.fill_visible_fields(u, &mut out);
        out
    }

    pub fn fill_visible_fields(&self, u: &[i8], out: &mut [f64]) {
        let n = self.num_visible();
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.graph.neighbours(i).iter().fold(
                self.params.biases[i],
                |acc, &(k, h)| acc + self.params.weights[k] * f64::from(u[h - n]),
            );
        }
    }

    pub fn energy(&self, s: &[i8]) -> Result<f64> {
        self.params.energy(&self.graph, s)
    }
}

/// First and second moments aligned with a graph: `units[i] = ⟨s_i⟩`,
/// `edges[k] = ⟨s_v s_h⟩` for edge `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub units: Vec<f64>,
    pub edges: Vec<f64>,
}

impl Moments {
    pub fn zeros(graph: &BipartiteGraph) -> Self {
        Self {
            units: vec![0.0; graph.num_units()],
            edges: vec![0.0; graph.num_edges()],
        }
    }

    /// Plain averages of a batch of configurations.
    pub fn from_samples<'a, I>(graph: &BipartiteGraph, samples: I) -> Self
    where
        I: IntoIterator<Item = &'a [i8]>,
    {
        let mut m = Self::zeros(graph);
        let mut count = 0usize;
        for s in samples {
            m.accumulate(graph, s, 1.0);
            count += 1;
        }
        if count > 0 {
            m.scale(1.0 / count as f64);
        }
        m
    }

    pub(crate) fn accumulate(&mut self, graph: &BipartiteGraph, s: &[i8], weight: f64) {
        for (acc, &si) in self.units.iter_mut().zip(s) {
            *acc += weight * f64::from(si);
        }
        for (k, acc) in self.edges.iter_mut().enumerate() {
            let (a, b) = graph.endpoints(k);
            *acc += weight * f64::from(s[a] * s[b]);
        }
    }

    pub(crate) fn scale(&mut self, c: f64) {
        self.units.iter_mut().chain(self.edges.iter_mut()).for_each(|v| *v *= c);
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.units.iter().chain(&self.edges).copied()
    }

    pub fn len(&self) -> usize {
        self.units.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
