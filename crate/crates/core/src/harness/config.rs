use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::annealer::{NoiseModel, SamplerBackend, TemperatureLaw};
use crate::error::{Error, Result};
use crate::learning::{Algorithm, Thermometer, TrainingConfig};
use crate::topology::SideAssignment;

/// Label of the fixed-temperature run at the mean QuALe@T_eff estimate.
pub const T_AV_LABEL: &str = "QuALe@T_av";

/// The seven algorithms of the comparison experiment.
pub const COMPARE_PRESET: [&str; 7] = [
    "QuALe@T_eff",
    T_AV_LABEL,
    "QuALe@0.08",
    "QuALe@0.16",
    "CD-1",
    "CD-10",
    "CD-100",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetChoice {
    Bas(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    Constant,
    Affine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Per-run settings; `training.seed` and `training.algorithm` are
    /// overwritten per job.
    pub training: TrainingConfig,
    /// Algorithm labels; `QuALe@T_av` is resolved after the QuALe@T_eff runs.
    pub algorithms: Vec<String>,
    pub law: LawKind,
    pub t0: f64,
    pub a: f64,
    pub b: f64,
    pub noise: NoiseModel,
    pub noise_affects_temperature: bool,
    pub rows: usize,
    pub cols: usize,
    pub sides: SideAssignment,
    pub dataset: DatasetChoice,
    pub output: PathBuf,
    pub seed: u64,
    pub repeats: usize,
    /// Distinct persistent-bias realisations; repeat `r` uses `r % locations`.
    pub locations: usize,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            training: TrainingConfig::default(),
            algorithms: vec!["QuALe@T_eff".to_string()],
            law: LawKind::Affine,
            t0: 0.1,
            a: 0.08,
            b: 0.05,
            noise: NoiseModel::default(),
            noise_affects_temperature: false,
            rows: 2,
            cols: 2,
            sides: SideAssignment::Checkerboard,
            dataset: DatasetChoice::Bas(4),
            output: PathBuf::from("out"),
            seed: 0,
            repeats: 5,
            locations: 5,
            workers: 1,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean '{value}' for {key}"))),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    pub fn temperature_law(&self) -> TemperatureLaw {
        match self.law {
            LawKind::Constant => TemperatureLaw::Constant(self.t0),
            LawKind::Affine => TemperatureLaw::Affine { a: self.a, b: self.b },
        }
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.training;
        match key {
            "seed" => self.seed = parse_value(key, value)?,
            "repeats" => self.repeats = parse_value(key, value)?,
            "locations" => self.locations = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            "output" => self.output = PathBuf::from(value),
            "topology.rows" => self.rows = parse_value(key, value)?,
            "topology.cols" => self.cols = parse_value(key, value)?,
            "topology.sides" => {
                self.sides = match value {
                    "checkerboard" => SideAssignment::Checkerboard,
                    "uniform" => SideAssignment::Uniform,
                    _ => return Err(Error::Config(format!("unknown side assignment '{value}'"))),
                }
            }
            "data.bas" => self.dataset = DatasetChoice::Bas(parse_value(key, value)?),
            "data.file" => self.dataset = DatasetChoice::File(PathBuf::from(value)),
            "annealer.law" => {
                self.law = match value {
                    "constant" => LawKind::Constant,
                    "affine" => LawKind::Affine,
                    _ => return Err(Error::Config(format!("unknown temperature law '{value}'"))),
                }
            }
            "annealer.t0" => self.t0 = parse_value(key, value)?,
            "annealer.a" => self.a = parse_value(key, value)?,
            "annealer.b" => self.b = parse_value(key, value)?,
            "annealer.persistent_h" => self.noise.persistent_h = parse_value(key, value)?,
            "annealer.persistent_j" => self.noise.persistent_j = parse_value(key, value)?,
            "annealer.programming_h" => self.noise.programming_h = parse_value(key, value)?,
            "annealer.programming_j" => self.noise.programming_j = parse_value(key, value)?,
            "annealer.noise_affects_temperature" => self.noise_affects_temperature = parse_bool(key, value)?,
            "train.algorithms" => {
                let algos: Vec<String> = list(value).map(str::to_string).collect();
                for a in &algos {
                    if a != T_AV_LABEL {
                        a.parse::<Algorithm>()?;
                    }
                }
                self.algorithms = algos;
            }
            "train.eta" => t.eta = parse_value(key, value)?,
            "train.iterations" => t.iterations = parse_value(key, value)?,
            "train.samples" => t.samples = parse_value(key, value)?,
            "train.d_kl" => t.d_kl = parse_value(key, value)?,
            "train.warm_start_cd1" => t.warm_start_cd1 = parse_value(key, value)?,
            "train.bias_correction" => t.bias_correction = parse_bool(key, value)?,
            "train.importance_reuse" => t.importance_reuse = parse_bool(key, value)?,
            "train.eval_every" => t.eval_every = parse_value(key, value)?,
            "train.thermometer" => {
                t.thermometer = match value {
                    "regression" => Thermometer::Regression,
                    "pseudo_likelihood" => Thermometer::PseudoLikelihood,
                    _ => return Err(Error::Config(format!("unknown thermometer '{value}'"))),
                }
            }
            "train.weighted_regression" => t.regression.weighted = parse_bool(key, value)?,
            "train.noise_floor" => t.noise_floor = parse_value(key, value)?,
            "train.init_scale" => t.init_scale = parse_value(key, value)?,
            "train.t_guess" => t.t_guess = parse_value(key, value)?,
            "train.calibration_samples" => t.calibration_samples = parse_value(key, value)?,
            "train.calibration_events" => t.calibration_events = parse_value(key, value)?,
            "train.calibration_rounds" => t.calibration_rounds = parse_value(key, value)?,
            "train.calibration_temperature" => t.calibration_temperature = parse_value(key, value)?,
            "train.backend" => {
                t.backend = match value {
                    "auto" => SamplerBackend::Auto,
                    "exact" => SamplerBackend::Exact,
                    "gibbs" => SamplerBackend::DEFAULT_GIBBS,
                    _ => return Err(Error::Config(format!("unknown backend '{value}'"))),
                }
            }
            "train.diagnostics_at" => {
                t.diagnostics_at = list(value).map(|v| parse_value(key, v)).collect::<Result<_>>()?;
            }
            "train.record_wall_time" => t.record_wall_time = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines over the defaults. `#` starts a comment;
    /// a `[section]` line prefixes the following keys with `section.`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                line: n + 1,
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim();
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            config.set(&full, value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        self.temperature_law().validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if self.algorithms.iter().any(|a| a == T_AV_LABEL) && !self.algorithms.iter().any(|a| a == "QuALe@T_eff") {
            return Err(Error::Config(format!("{T_AV_LABEL} needs QuALe@T_eff in the same experiment")));
        }
        if self.repeats == 0 || self.locations == 0 || self.workers == 0 {
            return Err(Error::Config("repeats, locations and workers must be at least 1".into()));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("topology dimensions must be at least 1".into()));
        }
        Ok(())
    }

    /// Every key with its current value, in the format [`parse`] reads.
    ///
    /// [`parse`]: ExperimentConfig::parse
    pub fn to_text(&self) -> String {
        let t = &self.training;
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("seed", self.seed.to_string());
        kv.insert("repeats", self.repeats.to_string());
        kv.insert("locations", self.locations.to_string());
        kv.insert("workers", self.workers.to_string());
        kv.insert("output", self.output.display().to_string());
        kv.insert("topology.rows", self.rows.to_string());
        kv.insert("topology.cols", self.cols.to_string());
        kv.insert(
            "topology.sides",
            match self.sides {
                SideAssignment::Checkerboard => "checkerboard",
                SideAssignment::Uniform => "uniform",
            }
            .into(),
        );
        match &self.dataset {
            DatasetChoice::Bas(n) => kv.insert("data.bas", n.to_string()),
            DatasetChoice::File(p) => kv.insert("data.file", p.display().to_string()),
        };
        kv.insert(
            "annealer.law",
            match self.law {
                LawKind::Constant => "constant",
                LawKind::Affine => "affine",
            }
            .into(),
        );
        kv.insert("annealer.t0", format!("{:?}", self.t0));
        kv.insert("annealer.a", format!("{:?}", self.a));
        kv.insert("annealer.b", format!("{:?}", self.b));
        kv.insert("annealer.persistent_h", format!("{:?}", self.noise.persistent_h));
        kv.insert("annealer.persistent_j", format!("{:?}", self.noise.persistent_j));
        kv.insert("annealer.programming_h", format!("{:?}", self.noise.programming_h));
        kv.insert("annealer.programming_j", format!("{:?}", self.noise.programming_j));
        kv.insert("annealer.noise_affects_temperature", self.noise_affects_temperature.to_string());
        kv.insert("train.algorithms", self.algorithms.join(","));
        kv.insert("train.eta", format!("{:?}", t.eta));
        kv.insert("train.iterations", t.iterations.to_string());
        kv.insert("train.samples", t.samples.to_string());
        kv.insert("train.d_kl", format!("{:?}", t.d_kl));
        kv.insert("train.warm_start_cd1", t.warm_start_cd1.to_string());
        kv.insert("train.bias_correction", t.bias_correction.to_string());
        kv.insert("train.importance_reuse", t.importance_reuse.to_string());
        kv.insert("train.eval_every", t.eval_every.to_string());
        kv.insert(
            "train.thermometer",
            match t.thermometer {
                Thermometer::Regression => "regression",
                Thermometer::PseudoLikelihood => "pseudo_likelihood",
            }
            .into(),
        );
        kv.insert("train.weighted_regression", t.regression.weighted.to_string());
        kv.insert("train.noise_floor", format!("{:?}", t.noise_floor));
        kv.insert("train.init_scale", format!("{:?}", t.init_scale));
        kv.insert("train.t_guess", format!("{:?}", t.t_guess));
        kv.insert("train.calibration_samples", t.calibration_samples.to_string());
        kv.insert("train.calibration_events", t.calibration_events.to_string());
        kv.insert("train.calibration_rounds", t.calibration_rounds.to_string());
        kv.insert("train.calibration_temperature", format!("{:?}", t.calibration_temperature));
        kv.insert(
            "train.backend",
            match t.backend {
                SamplerBackend::Auto => "auto",
                SamplerBackend::Exact => "exact",
                SamplerBackend::Gibbs { .. } => "gibbs",
            }
            .into(),
        );
        let diag: Vec<String> = t.diagnostics_at.iter().map(usize::to_string).collect();
        kv.insert("train.diagnostics_at", diag.join(","));
        kv.insert("train.record_wall_time", t.record_wall_time.to_string());
        let mut out = String::new();
        for (k, v) in kv {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
