use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use super::config::{Algorithm, Thermometer, TrainingConfig};
use super::{cd_k_model_moments, gradient, importance_weighted_moments, max_norm, uniform_parameters, update};
use crate::annealer::{
    calibrate_persistent_bias_with, program_and_sample, CalibrationOptions, AnnealerProfile, BiasOffsets, SampleRequest, SampleSet,
};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::exact::{average_log_likelihood, exact_data_averages};
use crate::model::{BipartiteGraph, ControlParameters, ModelParameters, Moments, Rbm};
use crate::seed::{derive_seed, stream};
use crate::thermometry::{
    choose_scaling, energy_variance, estimate_temperature_pseudolikelihood, regression_with_diagnostics,
    RegressionDiagnostics,
};

/// One logged row of a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub log_likelihood: f64,
    pub t_eff_hat: f64,
    pub x: f64,
    pub slope: f64,
    pub r_coeff: f64,
    pub grad_max_norm: f64,
    pub wall_ms: u64,
}

/// Temperature bookkeeping of one annealer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationEstimate {
    pub iteration: usize,
    /// Temperature used for this iteration's update.
    pub t_eff_hat: f64,
    pub x: f64,
    pub slope: f64,
    pub r_coeff: f64,
    /// Estimation failed and the previous temperature was kept.
    pub fallback: bool,
    /// Effective size of the reweighted set, NaN without reuse.
    pub effective_samples: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub algorithm: Algorithm,
    pub records: Vec<TraceRecord>,
    /// One entry per annealer iteration (empty for CD).
    pub estimates: Vec<IterationEstimate>,
    pub diagnostics: Vec<(usize, RegressionDiagnostics)>,
    pub final_model: ModelParameters,
    pub final_control: Option<ControlParameters>,
    pub correction: Option<BiasOffsets>,
}

pub const TRACE_HEADER: &str = "iter,algo,L_av,T_eff_hat,x,slope,r_coeff,grad_maxnorm,wall_ms";

impl TrainingTrace {
    pub fn fallbacks(&self) -> usize {
        self.estimates.iter().filter(|e| e.fallback).count()
    }

    pub fn final_log_likelihood(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.log_likelihood)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{TRACE_HEADER}\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{}",
                r.iteration, self.algorithm, r.log_likelihood, r.t_eff_hat, r.x, r.slope, r.r_coeff, r.grad_max_norm, r.wall_ms
            );
        }
        out
    }

    /// Parse rows written by [`TrainingTrace::to_csv`]; returns the algorithm
    /// label and the records.
    pub fn parse_csv(text: &str) -> Result<(String, Vec<TraceRecord>)> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            _ => return Err(Error::Format { line: 1, message: "missing trace header".into() }),
        }
        let mut algo = String::new();
        let mut records = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |m: &str| Error::Format { line: n + 1, message: m.to_string() };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(err("expected 9 fields"));
            }
            let num = |i: usize| f[i].trim().parse::<f64>().map_err(|_| err("bad number"));
            algo = f[1].to_string();
            records.push(TraceRecord {
                iteration: f[0].trim().parse().map_err(|_| err("bad iteration"))?,
                log_likelihood: num(2)?,
                t_eff_hat: num(3)?,
                x: num(4)?,
                slope: num(5)?,
                r_coeff: num(6)?,
                grad_max_norm: num(7)?,
                wall_ms: f[8].trim().parse().map_err(|_| err("bad wall time"))?,
            });
        }
        Ok((algo, records))
    }

    /// Per-iteration temperature estimates as CSV.
    pub fn temperatures_csv(&self) -> String {
        let mut out = String::from("iter,T_eff_hat,x,slope,r_coeff,fallback,ess\n");
        for e in &self.estimates {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{:?},{:?},{},{:?}",
                e.iteration, e.t_eff_hat, e.x, e.slope, e.r_coeff, u8::from(e.fallback), e.effective_samples
            );
        }
        out
    }
}

struct Logger<'a> {
    config: &'a TrainingConfig,
    data: &'a Dataset,
    start: Instant,
    records: Vec<TraceRecord>,
}

impl Logger<'_> {
    fn due(&self, it: usize) -> bool {
        it % self.config.eval_every == 0 || it == self.config.iterations
    }

    fn log(&mut self, rbm: &Rbm, it: usize, t: f64, est: Option<&IterationEstimate>, grad: f64) -> Result<()> {
        let ll = average_log_likelihood(rbm, self.data)?;
        let nan = f64::NAN;
        self.records.push(TraceRecord {
            iteration: it,
            log_likelihood: ll,
            t_eff_hat: t,
            x: est.map_or(nan, |e| e.x),
            slope: est.map_or(nan, |e| e.slope),
            r_coeff: est.map_or(nan, |e| e.r_coeff),
            grad_max_norm: grad,
            wall_ms: if self.config.record_wall_time {
                self.start.elapsed().as_millis() as u64
            } else {
                0
            },
        });
        Ok(())
    }
}

fn check_inputs(config: &TrainingConfig, graph: &BipartiteGraph, data: &Dataset) -> Result<()> {
    config.validate()?;
    if data.is_empty() || data.width() != graph.num_visible() {
        return Err(Error::invalid(format!(
            "dataset width {} does not match {} visible units",
            data.width(),
            graph.num_visible()
        )));
    }
    Ok(())
}

fn initial_control(config: &TrainingConfig, graph: &BipartiteGraph) -> ControlParameters {
    let (couplings, fields) = uniform_parameters(graph, config.init_scale, derive_seed(config.seed, &[stream::INIT]));
    let raw = ControlParameters { couplings, fields, range: config.range };
    // re-clamp in case the range is narrower than the initial width
    ControlParameters::from_model(&ModelParameters::from_control(&raw, 1.0), 1.0, config.range).0
}

fn cd_step(rbm: &Rbm, data: &Dataset, k: usize, eta: f64, seed: u64) -> Result<(ModelParameters, f64)> {
    let mm = cd_k_model_moments(rbm, data, k, seed)?;
    let dm = exact_data_averages(rbm, data)?;
    let inc = gradient(&dm, &mm)?;
    Ok((update(&rbm.params, &inc, eta)?, max_norm(&inc)))
}

/// Contrastive-divergence training; the initial model is the QuALe initial
/// control parameters converted at `t_guess`.
pub fn cd_train(config: &TrainingConfig, graph: &Arc<BipartiteGraph>, data: &Dataset) -> Result<TrainingTrace> {
    check_inputs(config, graph, data)?;
    let Algorithm::Cd(k) = config.algorithm else {
        return Err(Error::invalid("cd_train needs a CD algorithm"));
    };
    let mut logger = Logger { config, data, start: Instant::now(), records: Vec::new() };
    let init = initial_control(config, graph);
    let mut rbm = Rbm::new(graph.clone(), ModelParameters::from_control(&init, config.t_guess))?;
    logger.log(&rbm, 0, f64::NAN, None, f64::NAN)?;
    for it in 1..=config.iterations {
        let (params, g) = cd_step(&rbm, data, k, config.eta, derive_seed(config.seed, &[stream::CD, it as u64]))?;
        rbm.params = params;
        if logger.due(it) {
            logger.log(&rbm, it, f64::NAN, None, g)?;
        }
    }
    Ok(TrainingTrace {
        algorithm: config.algorithm,
        records: logger.records,
        estimates: Vec::new(),
        diagnostics: Vec::new(),
        final_model: rbm.params,
        final_control: None,
        correction: None,
    })
}

/// Training against the emulated annealer.
///
/// Each iteration samples at the current control parameters (and, for
/// QuALe@T_eff, at a rescaled copy), estimates the temperature, reads the
/// model off as `W = -J / T̂`, takes a gradient step in model space and
/// programs `J = -T̂ W` for the next iteration. A failed estimate keeps the
/// previous temperature.
pub fn quale_train(
    config: &TrainingConfig,
    profile: &AnnealerProfile,
    graph: &Arc<BipartiteGraph>,
    data: &Dataset,
) -> Result<TrainingTrace> {
    check_inputs(config, graph, data)?;
    let fixed = match config.algorithm {
        Algorithm::QualeEffective => None,
        Algorithm::QualeFixed(t) => Some(t),
        Algorithm::Cd(_) => return Err(Error::invalid("quale_train needs a QuALe algorithm")),
    };
    let seed = config.seed;
    let mut logger = Logger { config, data, start: Instant::now(), records: Vec::new() };
    let mut t_hat = fixed.unwrap_or(config.t_guess);
    let mut control = initial_control(config, graph);
    let mut rbm = Rbm::new(graph.clone(), ModelParameters::from_control(&control, t_hat))?;

    let correction = if config.bias_correction {
        let options = CalibrationOptions {
            samples: config.calibration_samples,
            events: config.calibration_events,
            rounds: config.calibration_rounds,
            t_hat: config.calibration_temperature,
        };
        Some(calibrate_persistent_bias_with(profile, graph, options, derive_seed(seed, &[stream::CALIBRATION]), config.backend)?)
    } else {
        None
    };

    let mut estimates = Vec::new();
    let mut diagnostics = Vec::new();
    logger.log(&rbm, 0, t_hat, None, f64::NAN)?;
    for it in 1..=config.iterations {
        let step_seed = |tag| derive_seed(seed, &[tag, it as u64]);
        if it <= config.warm_start_cd1 {
            let (params, g) = cd_step(&rbm, data, 1, config.eta, step_seed(stream::WARM_START))?;
            rbm.params = params;
            control = ControlParameters::from_model(&rbm.params, t_hat, config.range).0;
            if logger.due(it) {
                logger.log(&rbm, it, t_hat, None, g)?;
            }
            continue;
        }

        let request = SampleRequest::new(&control, config.samples, step_seed(stream::NATIVE)).corrected(correction.as_ref());
        let native = program_and_sample(profile, graph, &request, config.backend)?;
        let mut est = IterationEstimate {
            iteration: it,
            t_eff_hat: t_hat,
            x: f64::NAN,
            slope: f64::NAN,
            r_coeff: f64::NAN,
            fallback: false,
            effective_samples: f64::NAN,
        };
        let mut scaled: Option<SampleSet> = None;
        if fixed.is_none() {
            let choice = energy_variance(&native)
                .and_then(|v| choose_scaling(1.0 / t_hat, v.sqrt(), config.samples, config.d_kl, &control, config.noise_floor));
            match choice {
                Ok(choice) => {
                    let request = SampleRequest::new(&control, config.samples, step_seed(stream::SCALED))
                        .scaled(choice.x)
                        .corrected(correction.as_ref());
                    let set = program_and_sample(profile, graph, &request, config.backend)?;
                    est.x = choice.x;
                    let estimate = match config.thermometer {
                        Thermometer::Regression => {
                            regression_with_diagnostics(&native, &set, choice.x, config.regression).map(|d| {
                                let e = d.estimate;
                                if config.diagnostics_at.contains(&it) {
                                    diagnostics.push((it, d));
                                }
                                e
                            })
                        }
                        Thermometer::PseudoLikelihood => {
                            estimate_temperature_pseudolikelihood(&native, graph, &control, Default::default())
                        }
                    };
                    match estimate {
                        Ok(e) => {
                            t_hat = e.t_eff;
                            est.slope = e.slope;
                            est.r_coeff = e.r_coeff;
                        }
                        Err(_) => est.fallback = true,
                    }
                    scaled = Some(set);
                }
                Err(_) => est.fallback = true,
            }
            est.t_eff_hat = t_hat;
        }

        rbm.params = ModelParameters::from_control(&control, t_hat);
        let mut model_moments = None;
        if let (true, Some(set)) = (config.importance_reuse, &scaled) {
            let beta = 1.0 / t_hat;
            if let Ok(r) = importance_weighted_moments(graph, &native, set, beta, est.x * beta) {
                est.effective_samples = r.effective_samples;
                model_moments = Some(r.moments);
            }
        }
        let mm = model_moments.unwrap_or_else(|| Moments::from_samples(graph, native.iter()));
        let dm = exact_data_averages(&rbm, data)?;
        let inc = gradient(&dm, &mm)?;
        let next = update(&rbm.params, &inc, config.eta)?;
        control = ControlParameters::from_model(&next, t_hat, config.range).0;
        rbm.params = ModelParameters::from_control(&control, t_hat);
        estimates.push(est);
        if logger.due(it) {
            logger.log(&rbm, it, t_hat, Some(&est), max_norm(&inc))?;
        }
    }
    Ok(TrainingTrace {
        algorithm: config.algorithm,
        records: logger.records,
        estimates,
        diagnostics,
        final_model: rbm.params,
        final_control: Some(control),
        correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annealer::{NoiseModel, TemperatureLaw};

    fn small_setup() -> (Arc<BipartiteGraph>, Dataset) {
        let g = Arc::new(BipartiteGraph::complete(4, 3));
        let data = Dataset::new(
            "d",
            vec![vec![1, 1, -1, -1], vec![-1, -1, 1, 1], vec![1, -1, 1, -1]],
        )
        .unwrap();
        (g, data)
    }

    fn short(algorithm: Algorithm) -> TrainingConfig {
        TrainingConfig {
            algorithm,
            iterations: 60,
            warm_start_cd1: 10,
            samples: 500,
            d_kl: 250.0,
            eval_every: 20,
            seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn zero_learning_rate_freezes_everything() {
        let (g, data) = small_setup();
        let profile = AnnealerProfile::new(&g, TemperatureLaw::default(), NoiseModel::default(), 3).unwrap();
        for algorithm in [Algorithm::QualeFixed(0.1), Algorithm::Cd(1)] {
            let cfg = TrainingConfig { eta: 0.0, ..short(algorithm) };
            let trace = match algorithm {
                Algorithm::Cd(_) => cd_train(&cfg, &g, &data).unwrap(),
                _ => quale_train(&cfg, &profile, &g, &data).unwrap(),
            };
            let first = trace.records[0].log_likelihood;
            assert!(trace.records.iter().all(|r| r.log_likelihood == first), "{algorithm}");
            assert_eq!(trace.records.len(), 4);
        }
    }

    #[test]
    fn quale_improves_likelihood_and_is_deterministic() {
        let (g, data) = small_setup();
        let profile = AnnealerProfile::new(&g, TemperatureLaw::default(), NoiseModel::default(), 3).unwrap();
        let cfg = short(Algorithm::QualeEffective);
        let a = quale_train(&cfg, &profile, &g, &data).unwrap();
        let b = quale_train(&cfg, &profile, &g, &data).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.temperatures_csv(), b.temperatures_csv());
        assert_eq!(a.estimates.len(), 50);
        assert!(a.final_log_likelihood() > a.records[0].log_likelihood);
        let (algo, rows) = TrainingTrace::parse_csv(&a.to_csv()).unwrap();
        assert_eq!(algo, "QuALe@T_eff");
        assert_eq!(rows.len(), a.records.len());
        assert_eq!(rows[3].log_likelihood, a.records[3].log_likelihood);
    }

    #[test]
    fn cd_rejects_annealer_algorithms() {
        let (g, data) = small_setup();
        assert!(cd_train(&short(Algorithm::QualeEffective), &g, &data).is_err());
        let wrong = Dataset::new("w", vec![vec![1, 1]]).unwrap();
        assert!(cd_train(&short(Algorithm::Cd(1)), &g, &wrong).is_err());
    }

    #[test]
    fn malformed_trace_row_is_reported() {
        let text = format!("{TRACE_HEADER}\n0,CD-1,1.0,NaN,NaN,NaN,NaN,NaN,0\n1,CD-1,oops,NaN,NaN,NaN,NaN,NaN,0\n");
        match TrainingTrace::parse_csv(&text) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
