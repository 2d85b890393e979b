//! Classical emulation of an annealer used as a Boltzmann sampler.
//!
//! The emulator samples `exp(-E_device(s) / T_eff)` for the *realised*
//! device parameters: what was programmed, plus a persistent offset fixed
//! for the lifetime of an [`AnnealerProfile`] (one "chip location"), plus
//! fresh Gaussian programming noise drawn at every call. `T_eff` itself
//! comes from a hidden [`TemperatureLaw`]; callers never see it and have to
//! estimate it from samples.
//!
//! Temperatures are in the dimensionless unit where a coupler value of 1.0
//! is the largest programmable coupling. On the reference hardware that
//! unit is `B(1) = 7.9 GHz` and the 12.5 mK fridge sits at 0.033.

mod gibbs;
mod sample_set;

pub use gibbs::{gibbs_chain, gibbs_sweep};
pub(crate) use gibbs::{sample_hidden, sample_visible};
pub use sample_set::SampleSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::exact::{mask_to_spins, VisibleEnumerator};
use crate::model::{BipartiteGraph, ControlParameters, Moments, ModelParameters, Rbm};
use crate::seed::{derive_seed, rng_from, stream};
use crate::stats::{log_sum_exp, sigmoid};

/// Fridge temperature of the reference device in dimensionless units.
pub const PHYSICAL_TEMPERATURE: f64 = 0.033;

/// Energy scale of a unit coupling on the reference device, in GHz.
pub const ENERGY_SCALE_GHZ: f64 = 7.9;

/// Phenomenological effective-temperature law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureLaw {
    Constant(f64),
    /// `T = a + b * rms(J, h)`.
    Affine { a: f64, b: f64 },
}

impl Default for TemperatureLaw {
    fn default() -> Self {
        TemperatureLaw::Affine { a: 0.08, b: 0.05 }
    }
}

impl TemperatureLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TemperatureLaw::Constant(t) if t > 0.0 && t.is_finite() => Ok(()),
            TemperatureLaw::Affine { a, b } if a > 0.0 && b >= 0.0 && b.is_finite() => Ok(()),
            other => Err(Error::invalid(format!(
                "temperature law {other:?} can produce a non-positive temperature"
            ))),
        }
    }

    pub fn temperature(&self, control: &ControlParameters) -> f64 {
        match *self {
            TemperatureLaw::Constant(t) => t,
            TemperatureLaw::Affine { a, b } => a + b * control.rms(),
        }
    }
}

/// Gaussian spreads of the persistent and per-programming parameter errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub persistent_h: f64,
    pub persistent_j: f64,
    pub programming_h: f64,
    pub programming_j: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            persistent_h: 0.02,
            persistent_j: 0.02,
            programming_h: 0.01,
            programming_j: 0.01,
        }
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            persistent_h: 0.0,
            persistent_j: 0.0,
            programming_h: 0.0,
            programming_j: 0.0,
        }
    }
}

/// Additive offsets on couplings and fields.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasOffsets {
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
}

impl BiasOffsets {
    pub fn zeros(graph: &BipartiteGraph) -> Self {
        Self {
            couplings: vec![0.0; graph.num_edges()],
            fields: vec![0.0; graph.num_units()],
        }
    }

    fn gaussian(graph: &BipartiteGraph, sigma_j: f64, sigma_h: f64, rng: &mut impl Rng) -> Self {
        let mut draw = |sigma: f64| {
            if sigma > 0.0 {
                Normal::new(0.0, sigma).expect("positive spread").sample(rng)
            } else {
                0.0
            }
        };
        let couplings = (0..graph.num_edges()).map(|_| draw(sigma_j)).collect();
        let fields = (0..graph.num_units()).map(|_| draw(sigma_h)).collect();
        Self { couplings, fields }
    }

    fn matches(&self, graph: &BipartiteGraph) -> bool {
        self.couplings.len() == graph.num_edges() && self.fields.len() == graph.num_units()
    }

    pub fn max_abs(&self) -> f64 {
        self.couplings
            .iter()
            .chain(&self.fields)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Hidden ground truth of one emulated device location.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealerProfile {
    pub law: TemperatureLaw,
    pub noise: NoiseModel,
    pub base_temperature: f64,
    pub persistent: BiasOffsets,
    /// Evaluate the temperature law on the realised (noisy) parameters
    /// instead of the programmed ones.
    pub noise_affects_temperature: bool,
}

impl AnnealerProfile {
    /// Draws persistent offsets for `graph` from `location_seed`.
    pub fn new(
        graph: &BipartiteGraph,
        law: TemperatureLaw,
        noise: NoiseModel,
        location_seed: u64,
    ) -> Result<Self> {
        law.validate()?;
        let mut rng = rng_from(derive_seed(location_seed, &[stream::PROFILE]));
        let persistent =
            BiasOffsets::gaussian(graph, noise.persistent_j, noise.persistent_h, &mut rng);
        Ok(Self {
            law,
            noise,
            base_temperature: PHYSICAL_TEMPERATURE,
            persistent,
            noise_affects_temperature: false,
        })
    }

    /// A noiseless profile with the given law.
    pub fn ideal(graph: &BipartiteGraph, law: TemperatureLaw) -> Result<Self> {
        Self::new(graph, law, NoiseModel::none(), 0)
    }

    pub fn with_persistent(mut self, offsets: BiasOffsets) -> Self {
        self.persistent = offsets;
        self
    }
}

/// The hidden temperature the emulator samples at for `control`.
pub fn effective_temperature(profile: &AnnealerProfile, control: &ControlParameters) -> f64 {
    profile.law.temperature(control)
}

/// How configurations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerBackend {
    /// Visible-layer enumeration plus conditional hidden draws.
    Exact,
    /// Block Gibbs sampling.
    Gibbs {
        burn_in: usize,
        thinning: usize,
        chains: usize,
    },
    /// Exact up to [`AUTO_EXACT_LIMIT`] visible units, Gibbs beyond.
    Auto,
}

pub const AUTO_EXACT_LIMIT: usize = 20;

impl Default for SamplerBackend {
    fn default() -> Self {
        SamplerBackend::Auto
    }
}

impl SamplerBackend {
    pub const DEFAULT_GIBBS: SamplerBackend = SamplerBackend::Gibbs {
        burn_in: 1000,
        thinning: 10,
        chains: 1,
    };

    fn resolve(self, graph: &BipartiteGraph) -> SamplerBackend {
        match self {
            SamplerBackend::Auto if graph.num_visible() <= AUTO_EXACT_LIMIT => {
                SamplerBackend::Exact
            }
            SamplerBackend::Auto => SamplerBackend::DEFAULT_GIBBS,
            other => other,
        }
    }
}

/// One programming event.
#[derive(Debug, Clone, Copy)]
pub struct SampleRequest<'a> {
    /// Clean reference parameters; cached energies refer to these.
    pub reference: &'a ControlParameters,
    /// Factor applied to the reference before programming.
    pub scale: f64,
    /// Offsets subtracted after scaling (persistent-bias correction).
    pub correction: Option<&'a BiasOffsets>,
    pub samples: usize,
    pub seed: u64,
}

impl<'a> SampleRequest<'a> {
    pub fn new(reference: &'a ControlParameters, samples: usize, seed: u64) -> Self {
        Self {
            reference,
            scale: 1.0,
            correction: None,
            samples,
            seed,
        }
    }

    pub fn scaled(mut self, x: f64) -> Self {
        self.scale = x;
        self
    }

    pub fn corrected(mut self, offsets: Option<&'a BiasOffsets>) -> Self {
        self.correction = offsets;
        self
    }
}

/// Draw `n` joint configurations from `rbm` exactly.
pub fn exact_samples(rbm: &Rbm, n: usize, rng: &mut impl Rng) -> Result<Vec<i8>> {
    let en = VisibleEnumerator::new(rbm)?;
    let log_w = en.log_weights();
    let log_z = log_sum_exp(&log_w);
    let mut cdf = Vec::with_capacity(log_w.len());
    let mut acc = 0.0;
    for lw in &log_w {
        acc += (lw - log_z).exp();
        cdf.push(acc);
    }
    let total = acc;
    let nv = rbm.num_visible();
    let units = rbm.graph.num_units();
    let mut out = Vec::with_capacity(n * units);
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * total;
        let mask = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u32;
        let v = mask_to_spins(mask, nv);
        let fields = rbm.hidden_fields(&v);
        out.extend_from_slice(&v);
        for f in fields {
            out.push(if rng.random::<f64>() < sigmoid(2.0 * f) { 1 } else { -1 });
        }
    }
    Ok(out)
}

fn gibbs_samples(
    rbm: &Rbm,
    n: usize,
    burn_in: usize,
    thinning: usize,
    chains: usize,
    seed: u64,
) -> Vec<i8> {
    let chains = chains.clamp(1, n.max(1));
    let units = rbm.graph.num_units();
    let mut out = Vec::with_capacity(n * units);
    for c in 0..chains {
        let quota = n / chains + usize::from(c < n % chains);
        let mut rng = rng_from(derive_seed(seed, &[stream::CHAIN, c as u64]));
        let mut state: Vec<i8> = (0..units)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        for _ in 0..burn_in {
            gibbs_sweep(rbm, &mut state, &mut rng);
        }
        for _ in 0..quota {
            for _ in 0..thinning.max(1) {
                gibbs_sweep(rbm, &mut state, &mut rng);
            }
            out.extend_from_slice(&state);
        }
    }
    out
}

/// Program the emulated device and draw `request.samples` configurations.
pub fn program_and_sample(
    profile: &AnnealerProfile,
    graph: &std::sync::Arc<BipartiteGraph>,
    request: &SampleRequest<'_>,
    backend: SamplerBackend,
) -> Result<SampleSet> {
    if request.samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let reference = request.reference;
    reference.validate(graph)?;
    if !profile.persistent.matches(graph) {
        return Err(Error::invalid("profile offsets do not match the graph"));
    }
    let mut programmed = reference.scaled(request.scale);
    programmed.check_range()?;
    if let Some(c) = request.correction {
        if !c.matches(graph) {
            return Err(Error::invalid("correction offsets do not match the graph"));
        }
        let r = programmed.range;
        for (j, d) in programmed.couplings.iter_mut().zip(&c.couplings) {
            *j = (*j - d).clamp(r.j_min, r.j_max);
        }
        for (h, d) in programmed.fields.iter_mut().zip(&c.fields) {
            *h = (*h - d).clamp(r.h_min, r.h_max);
        }
    }

    let mut noise_rng = rng_from(derive_seed(request.seed, &[stream::NOISE]));
    let fresh = BiasOffsets::gaussian(
        graph,
        profile.noise.programming_j,
        profile.noise.programming_h,
        &mut noise_rng,
    );
    let mut realised = programmed.clone();
    for ((j, p), n) in realised
        .couplings
        .iter_mut()
        .zip(&profile.persistent.couplings)
        .zip(&fresh.couplings)
    {
        *j += p + n;
    }
    for ((h, p), n) in realised
        .fields
        .iter_mut()
        .zip(&profile.persistent.fields)
        .zip(&fresh.fields)
    {
        *h += p + n;
    }
    let t = if profile.noise_affects_temperature {
        effective_temperature(profile, &realised)
    } else {
        effective_temperature(profile, &programmed)
    };
    let rbm = Rbm::new(graph.clone(), ModelParameters::from_control(&realised, t))?;

    let spins = match backend.resolve(graph) {
        SamplerBackend::Exact => {
            let mut rng = rng_from(derive_seed(request.seed, &[stream::NATIVE]));
            exact_samples(&rbm, request.samples, &mut rng)?
        }
        SamplerBackend::Gibbs {
            burn_in,
            thinning,
            chains,
        } => gibbs_samples(&rbm, request.samples, burn_in, thinning, chains, request.seed),
        SamplerBackend::Auto => unreachable!("resolved above"),
    };
    Ok(SampleSet::from_spins(
        graph,
        reference,
        spins,
        request.scale,
        request.seed,
    ))
}

/// Settings for [`calibrate_persistent_bias_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Total samples per round.
    pub samples: usize,
    /// Programming events the samples are split over; averaging over
    /// events suppresses the fresh programming noise of any single one.
    pub events: usize,
    /// Rounds of re-measuring with the current estimate subtracted.
    pub rounds: usize,
    /// Assumed temperature at zero programming.
    pub t_hat: f64,
}

impl CalibrationOptions {
    pub fn new(samples: usize, t_hat: f64) -> Self {
        Self {
            samples,
            events: 1,
            rounds: 1,
            t_hat,
        }
    }
}

/// Estimate persistent offsets by programming all-zero parameters.
///
/// With nothing programmed, a field offset `δh_i` alone gives
/// `⟨s_i⟩ = -tanh(δh_i / T)` and a coupling offset alone gives
/// `⟨s_i s_j⟩ = -tanh(δJ_ij / T)`; each statistic is inverted on its own,
/// ignoring interactions between offsets. `t_hat` is the assumed
/// temperature at zero programming.
pub fn calibrate_persistent_bias(
    profile: &AnnealerProfile,
    graph: &std::sync::Arc<BipartiteGraph>,
    samples: usize,
    t_hat: f64,
    seed: u64,
    backend: SamplerBackend,
) -> Result<BiasOffsets> {
    calibrate_persistent_bias_with(profile, graph, CalibrationOptions::new(samples, t_hat), seed, backend)
}

/// Calibration over several programming events and rounds. Round `r > 0`
/// programs zero minus the current estimate and adds the first-order
/// estimate of the remainder.
pub fn calibrate_persistent_bias_with(
    profile: &AnnealerProfile,
    graph: &std::sync::Arc<BipartiteGraph>,
    options: CalibrationOptions,
    seed: u64,
    backend: SamplerBackend,
) -> Result<BiasOffsets> {
    let CalibrationOptions {
        samples,
        events,
        rounds,
        t_hat,
    } = options;
    if !(t_hat > 0.0) {
        return Err(Error::invalid("calibration temperature must be positive"));
    }
    if rounds == 0 || events == 0 || samples < events {
        return Err(Error::invalid("calibration needs rounds >= 1 and samples >= events >= 1"));
    }
    let zeros = ControlParameters::zeros(graph);
    let mut offsets = BiasOffsets::zeros(graph);
    for round in 0..rounds {
        let mut m = Moments::zeros(graph);
        for event in 0..events {
            let event_seed = match (round, event) {
                (0, 0) => derive_seed(seed, &[stream::CALIBRATION]),
                _ => derive_seed(seed, &[stream::CALIBRATION, round as u64, event as u64]),
            };
            let n = samples / events + usize::from(event < samples % events);
            let request = SampleRequest::new(&zeros, n, event_seed).corrected(Some(&offsets));
            let set = program_and_sample(profile, graph, &request, backend)?;
            for s in set.iter() {
                m.accumulate(graph, s, 1.0);
            }
        }
        m.scale(1.0 / samples as f64);
        let invert = |mean: f64, what: &'static str, index: usize| {
            if mean.abs() >= 1.0 {
                Err(Error::Saturated { what, index })
            } else {
                Ok(-t_hat * mean.atanh())
            }
        };
        for (i, &mean) in m.units.iter().enumerate() {
            offsets.fields[i] += invert(mean, "unit", i)?;
        }
        for (k, &mean) in m.edges.iter().enumerate() {
            offsets.couplings[k] += invert(mean, "edge", k)?;
        }
    }
    Ok(offsets)
}
