use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use qale_core::annealer::{
    calibrate_persistent_bias_with, program_and_sample, AnnealerProfile, CalibrationOptions, SampleRequest,
};
use qale_core::harness::{
    estimate_temperature_files, generate_bas, read_traces, run_experiment, summarize, summary_csv,
    ExperimentConfig, COMPARE_PRESET,
};
use qale_core::model::io::read_model;
use qale_core::model::{BipartiteGraph, ControlParameters};
use qale_core::seed::{derive_seed, stream};
use qale_core::thermometry::RegressionOptions;
use qale_core::topology::{build_chimera, chimera_rbm_with};
use qale_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qale", version, about = "Annealer-assisted RBM training on an emulated device")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra settings applied after the file, e.g. `--set train.eta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                ExperimentConfig::parse(&text)?
            }
            None => ExperimentConfig::default(),
        };
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{kv}' is not KEY=VALUE")))?;
            config.set(k.trim(), v.trim())?;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the bars-and-stripes dataset.
    GenerateData {
        #[arg(long, default_value_t = 4)]
        side: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a sample set from the emulated annealer for a model file.
    Sample {
        #[command(flatten)]
        config: ConfigArgs,
        /// Model parameters (`read_model` format).
        #[arg(long)]
        model: PathBuf,
        /// Temperature used to convert the model to control parameters.
        #[arg(long, default_value_t = 0.1)]
        temperature: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Emulated chip location.
        #[arg(long, default_value_t = 0)]
        location: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the effective temperature from two sample-set CSV files.
    EstimateTemperature {
        #[arg(long)]
        native: PathBuf,
        #[arg(long)]
        scaled: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        unweighted: bool,
        /// Write the regression points here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the persistent offsets of one emulated location.
    Calibrate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        location: u64,
    },
    /// Run the configured algorithms and repeats.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seven-algorithm comparison.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the summary from the trace files in a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn graph_for(config: &ExperimentConfig) -> Result<Arc<BipartiteGraph>> {
    let topology = build_chimera(config.rows, config.cols)?;
    Ok(Arc::new(BipartiteGraph::from_partition(&chimera_rbm_with(&topology, config.sides))))
}

fn profile_for(config: &ExperimentConfig, graph: &BipartiteGraph, location: u64) -> Result<AnnealerProfile> {
    let mut p = AnnealerProfile::new(
        graph,
        config.temperature_law(),
        config.noise,
        derive_seed(config.seed, &[stream::PROFILE, location]),
    )?;
    p.noise_affects_temperature = config.noise_affects_temperature;
    Ok(p)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn print_final_medians(summary: &[qale_core::harness::SummaryRow]) {
    let mut last: Vec<&qale_core::harness::SummaryRow> = Vec::new();
    for row in summary {
        match last.last_mut() {
            Some(prev) if prev.algorithm == row.algorithm => *prev = row,
            _ => last.push(row),
        }
    }
    for r in last {
        println!(
            "{:<14} iter {:>5}  L_av median {:.4}  [q1 {:.4}, q3 {:.4}]  n={}",
            r.algorithm, r.iteration, r.median, r.q1, r.q3, r.runs
        );
    }
}

fn experiment(mut config: ExperimentConfig, seed: u64, out: Option<PathBuf>) -> Result<()> {
    config.seed = seed;
    if let Some(out) = out {
        config.output = out;
    }
    let output = run_experiment(&config)?;
    if let Some(t) = output.t_av {
        println!("T_av = {t:.5}");
    }
    print_final_medians(&output.summary);
    println!("wrote {}", output.dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenerateData { side, out } => {
            let data = generate_bas(side)?;
            write(&out, &data.to_text())?;
            println!("{} images of side {side} -> {}", data.len(), out.display());
        }
        Command::Sample {
            config,
            model,
            temperature,
            scale,
            samples,
            seed,
            location,
            out,
        } => {
            let config = config.load()?;
            let graph = graph_for(&config)?;
            let text = fs::read_to_string(&model).map_err(|e| Error::io(&model, e))?;
            let rbm = read_model(&text)?;
            if rbm.graph.edges() != graph.edges() || rbm.num_hidden() != graph.num_hidden() {
                return Err(Error::Config("model file does not match the configured topology".into()));
            }
            let (control, clamped) =
                ControlParameters::from_model(&rbm.params, temperature, Default::default());
            if clamped > 0 {
                eprintln!("warning: {clamped} parameters clamped into the device range");
            }
            let profile = profile_for(&config, &graph, location)?;
            let request = SampleRequest::new(&control, samples, seed).scaled(scale);
            let set = program_and_sample(&profile, &graph, &request, config.training.backend)?;
            write(&out, &set.to_csv())?;
            println!("{} samples at scale {scale} -> {}", set.len(), out.display());
        }
        Command::EstimateTemperature {
            native,
            scaled,
            x,
            unweighted,
            out,
        } => {
            let options = if unweighted {
                RegressionOptions::unweighted()
            } else {
                RegressionOptions::default()
            };
            let d = estimate_temperature_files(&native, &scaled, x, options)?;
            let e = d.estimate;
            println!("T_eff = {:.6}", e.t_eff);
            println!("beta_eff = {:.6}", e.beta_eff);
            println!("slope = {:.6}", e.slope);
            println!("intercept = {:.6}", e.intercept);
            println!("r_coeff = {:.6}", e.r_coeff);
            println!("points = {} (K = {})", e.n_points, d.bins);
            if let Some(out) = out {
                write(&out, &d.to_csv())?;
            }
        }
        Command::Calibrate { config, seed, location } => {
            let config = config.load()?;
            let graph = graph_for(&config)?;
            let profile = profile_for(&config, &graph, location)?;
            let t = &config.training;
            let options = CalibrationOptions {
                samples: t.calibration_samples,
                events: t.calibration_events,
                rounds: t.calibration_rounds,
                t_hat: t.calibration_temperature,
            };
            let est = calibrate_persistent_bias_with(&profile, &graph, options, seed, t.backend)?;
            println!("kind,index,estimate");
            for (i, v) in est.fields.iter().enumerate() {
                println!("h,{i},{v:?}");
            }
            for (k, v) in est.couplings.iter().enumerate() {
                println!("J,{k},{v:?}");
            }
        }
        Command::Train { config, seed, out } => experiment(config.load()?, seed, out)?,
        Command::Compare { config, seed, out } => {
            let mut config = config.load()?;
            config.algorithms = COMPARE_PRESET.iter().map(|s| s.to_string()).collect();
            experiment(config, seed, out)?;
        }
        Command::Report { dir } => {
            let traces = read_traces(&dir)?;
            if traces.is_empty() {
                return Err(Error::Config(format!("no trace files in {}", dir.display())));
            }
            let summary = summarize(&traces);
            write(&dir.join("summary.csv"), &summary_csv(&summary))?;
            print_final_medians(&summary);
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Format { .. } | Error::ControlOutOfRange { .. } => 2,
        e if e.is_numerical() => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
