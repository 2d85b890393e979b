use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use super::config::{DatasetChoice, ExperimentConfig, T_AV_LABEL};
use super::generate_bas;
use crate::annealer::{AnnealerProfile, SampleSet};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learning::{cd_train, quale_train, Algorithm, TraceRecord, TrainingTrace};
use crate::model::BipartiteGraph;
use crate::seed::{derive_seed, stream};
use crate::stats::quantile;
use crate::thermometry::{regression_with_diagnostics, RegressionDiagnostics, RegressionOptions};
use crate::topology::{build_chimera, chimera_rbm_with};

#[derive(Debug, Clone)]
pub struct JobResult {
    pub label: String,
    pub repeat: usize,
    pub trace: TrainingTrace,
}

/// Per-iteration spread of `L_av` across repeats of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub iteration: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub runs: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    pub jobs: Vec<JobResult>,
    pub summary: Vec<SummaryRow>,
    /// Mean QuALe@T_eff estimate used for the QuALe@T_av runs.
    pub t_av: Option<f64>,
}

impl ExperimentOutput {
    /// Final `L_av` of every repeat of `label`.
    pub fn finals(&self, label: &str) -> Vec<f64> {
        self.jobs
            .iter()
            .filter(|j| j.label == label)
            .map(|j| j.trace.final_log_likelihood())
            .collect()
    }
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn load_dataset(choice: &DatasetChoice) -> Result<Dataset> {
    match choice {
        DatasetChoice::Bas(n) => generate_bas(*n),
        DatasetChoice::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Dataset::from_text(&path.display().to_string(), &text)
        }
    }
}

struct Job {
    label: String,
    algorithm: Algorithm,
    repeat: usize,
}

/// Run every configured algorithm for every repeat and write the traces,
/// temperature histories, regression point clouds, summary and metadata
/// under `config.output`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let topology = build_chimera(config.rows, config.cols)?;
    let graph = Arc::new(BipartiteGraph::from_partition(&chimera_rbm_with(&topology, config.sides)));
    let data = load_dataset(&config.dataset)?;
    if data.width() != graph.num_visible() {
        return Err(Error::Config(format!(
            "dataset '{}' has width {}, the model has {} visible units",
            data.name,
            data.width(),
            graph.num_visible()
        )));
    }
    let profiles = (0..config.locations)
        .map(|loc| {
            let mut p = AnnealerProfile::new(
                &graph,
                config.temperature_law(),
                config.noise,
                derive_seed(config.seed, &[stream::PROFILE, loc as u64]),
            )?;
            p.noise_affects_temperature = config.noise_affects_temperature;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.workers)))?;

    let run = |jobs: Vec<Job>| -> Result<Vec<JobResult>> {
        pool.install(|| {
            jobs.into_par_iter()
                .map(|job| {
                    let mut cfg = config.training.clone();
                    cfg.algorithm = job.algorithm;
                    cfg.seed = derive_seed(config.seed, &[stream::REPEAT, job.repeat as u64]);
                    let trace = match job.algorithm {
                        Algorithm::Cd(_) => cd_train(&cfg, &graph, &data)?,
                        _ => quale_train(&cfg, &profiles[job.repeat % config.locations], &graph, &data)?,
                    };
                    Ok(JobResult {
                        label: job.label,
                        repeat: job.repeat,
                        trace,
                    })
                })
                .collect()
        })
    };

    let mut first = Vec::new();
    for label in config.algorithms.iter().filter(|l| *l != T_AV_LABEL) {
        let algorithm: Algorithm = label.parse()?;
        for repeat in 0..config.repeats {
            first.push(Job {
                label: label.clone(),
                algorithm,
                repeat,
            });
        }
    }
    let mut results = run(first)?;

    let mut t_av = None;
    if config.algorithms.iter().any(|l| l == T_AV_LABEL) {
        let temps: Vec<f64> = results
            .iter()
            .filter(|r| r.trace.algorithm == Algorithm::QualeEffective)
            .flat_map(|r| r.trace.estimates.iter().map(|e| e.t_eff_hat))
            .collect();
        if temps.is_empty() {
            return Err(Error::Config(format!("{T_AV_LABEL} needs QuALe@T_eff iterations past the warm start")));
        }
        let t = crate::stats::mean(&temps);
        t_av = Some(t);
        let jobs = (0..config.repeats)
            .map(|repeat| Job {
                label: T_AV_LABEL.to_string(),
                algorithm: Algorithm::QualeFixed(t),
                repeat,
            })
            .collect();
        results.extend(run(jobs)?);
    }
    // configured order, then repeat
    let rank = |label: &str| config.algorithms.iter().position(|l| l == label).unwrap_or(usize::MAX);
    results.sort_by_key(|r| (rank(&r.label), r.repeat));

    let dir = config.output.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut named = Vec::with_capacity(results.len());
    for r in &results {
        let stem = format!("{}_r{}", file_label(&r.label), r.repeat);
        let mut csv = r.trace.to_csv();
        if r.label == T_AV_LABEL {
            // keep the label rather than the resolved temperature
            csv = csv.replace(&format!(",{},", r.trace.algorithm), &format!(",{T_AV_LABEL},"));
        }
        write(&dir.join(format!("trace_{stem}.csv")), &csv)?;
        if !r.trace.estimates.is_empty() {
            write(&dir.join(format!("temperatures_{stem}.csv")), &r.trace.temperatures_csv())?;
        }
        for (it, d) in &r.trace.diagnostics {
            write(&dir.join(format!("regression_{stem}_it{it}.csv")), &d.to_csv())?;
        }
        named.push((r.label.clone(), r.trace.records.clone()));
    }
    let summary = summarize(&named);
    write(&dir.join("summary.csv"), &summary_csv(&summary))?;

    let mut meta = config.to_text();
    if let Some(t) = t_av {
        let _ = writeln!(meta, "# resolved {T_AV_LABEL} = {t:?}");
    }
    for (loc, p) in profiles.iter().enumerate() {
        let _ = writeln!(meta, "# location {loc}: max |persistent offset| = {:?}", p.persistent.max_abs());
    }
    write(&dir.join("metadata.txt"), &meta)?;

    Ok(ExperimentOutput {
        dir,
        jobs: results,
        summary,
        t_av,
    })
}

/// Median and quartiles of `L_av` per algorithm and logged iteration,
/// sorted by algorithm label then iteration.
pub fn summarize(traces: &[(String, Vec<TraceRecord>)]) -> Vec<SummaryRow> {
    let mut labels: Vec<&str> = traces.iter().map(|(l, _)| l.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut rows = Vec::new();
    for label in labels {
        let runs: Vec<&Vec<TraceRecord>> = traces.iter().filter(|(l, _)| l == label).map(|(_, r)| r).collect();
        let len = runs.iter().map(|r| r.len()).min().unwrap_or(0);
        for i in 0..len {
            let values: Vec<f64> = runs.iter().map(|r| r[i].log_likelihood).collect();
            rows.push(SummaryRow {
                algorithm: label.to_string(),
                iteration: runs[0][i].iteration,
                median: quantile(&values, 0.5),
                q1: quantile(&values, 0.25),
                q3: quantile(&values, 0.75),
                runs: values.len(),
            });
        }
    }
    rows
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("algo,iter,median,q1,q3,n\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:?},{:?},{:?},{}", r.algorithm, r.iteration, r.median, r.q1, r.q3, r.runs);
    }
    out
}

/// Every `trace_*.csv` in `dir`, in file-name order.
pub fn read_traces(dir: &Path) -> Result<Vec<(String, Vec<TraceRecord>)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("trace_") && n.ends_with(".csv"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            TrainingTrace::parse_csv(&text)
        })
        .collect()
}

/// Regression estimate from two sample-set CSV files.
pub fn estimate_temperature_files(
    native: &Path,
    scaled: &Path,
    x: f64,
    options: RegressionOptions,
) -> Result<RegressionDiagnostics> {
    if x == 1.0 {
        return Err(Error::invalid("scale factor x = 1 carries no temperature information"));
    }
    let read = |p: &Path| -> Result<SampleSet> {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        SampleSet::from_csv(&text)
    };
    regression_with_diagnostics(&read(native)?, &read(scaled)?, x, options)
}
