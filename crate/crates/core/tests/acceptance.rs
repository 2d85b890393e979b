//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `QALE_ACCEPTANCE=1,3,9 cargo test --test acceptance` runs a subset.
//! A failed criterion is reported but only fails the process when
//! `QALE_ACCEPTANCE_STRICT` is set.
//! Criteria 7 and 8 train 16+16 models for 5000 iterations and dominate
//! the runtime.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::Rng;

use qale_core::annealer::{program_and_sample, AnnealerProfile, SampleRequest, SamplerBackend, TemperatureLaw};
use qale_core::data::Dataset;
use qale_core::harness::{run_experiment, ExperimentConfig, ExperimentOutput, SummaryRow};
use qale_core::learning::{cd_k_model_moments, cd_train, gradient, importance_weighted_moments, Algorithm, TrainingConfig};
use qale_core::model::exact::{
    average_log_likelihood, exact_data_averages, exact_model_averages, log_partition_function,
};
use qale_core::model::{BipartiteGraph, ControlParameters, ControlRange, Edge, ModelParameters, Moments, Rbm};
use qale_core::seed::rng_from;
use qale_core::stats::{interquartile_range, log_sum_exp, mean, median};
use qale_core::thermometry::{
    choose_scaling, energy_variance, estimate_temperature_pseudolikelihood, regression_with_diagnostics,
    PseudoLikelihoodOptions, RegressionOptions,
};
use qale_core::topology::{build_chimera, chimera_rbm};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn chimera16() -> Arc<BipartiteGraph> {
    Arc::new(BipartiteGraph::from_partition(&chimera_rbm(&build_chimera(2, 2).unwrap())))
}

fn random_rbm(rng: &mut impl Rng, n: usize, m: usize, density: f64, w: f64, b: f64) -> Rbm {
    let mut edges = Vec::new();
    for v in 0..n {
        for h in 0..m {
            if rng.random_bool(density) {
                edges.push(Edge { visible: v, hidden: h });
            }
        }
    }
    if edges.is_empty() {
        edges.push(Edge { visible: 0, hidden: 0 });
    }
    let graph = Arc::new(BipartiteGraph::new(n, m, edges).unwrap());
    let params = ModelParameters {
        weights: (0..graph.num_edges()).map(|_| rng.random_range(-w..w)).collect(),
        biases: (0..n + m).map(|_| rng.random_range(-b..b)).collect(),
    };
    Rbm::new(graph, params).unwrap()
}

fn random_data(rng: &mut impl Rng, n: usize, d: usize) -> Dataset {
    let points = (0..d)
        .map(|_| (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
        .collect();
    Dataset::new("random", points).unwrap()
}

fn spins(mask: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

/// Brute-force joint enumeration over all visible and hidden states.
struct Joint {
    log_z: f64,
    model: Moments,
    data: Moments,
    log_likelihood: f64,
}

fn enumerate(rbm: &Rbm, data: &Dataset) -> Joint {
    let g = &rbm.graph;
    let (n, m) = (g.num_visible(), g.num_hidden());
    let states: Vec<Vec<i8>> = (0..1usize << (n + m)).map(|mask| spins(mask, n + m)).collect();
    let neg_e: Vec<f64> = states.iter().map(|s| -rbm.energy(s).unwrap()).collect();
    let log_z = log_sum_exp(&neg_e);
    let moments_of = |idx: &[usize], norm: f64| {
        let mut mo = Moments::zeros(g);
        for &r in idx {
            let p = (neg_e[r] - norm).exp();
            let s = &states[r];
            for i in 0..n + m {
                mo.units[i] += p * f64::from(s[i]);
            }
            for (k, e) in g.edges().iter().enumerate() {
                mo.edges[k] += p * f64::from(s[e.visible]) * f64::from(s[n + e.hidden]);
            }
        }
        mo
    };
    let all: Vec<usize> = (0..states.len()).collect();
    let model = moments_of(&all, log_z);
    let mut data_m = Moments::zeros(g);
    let mut ll = 0.0;
    for v in &data.datapoints {
        let idx: Vec<usize> = (0..states.len()).filter(|&r| &states[r][..n] == v.as_slice()).collect();
        let lv = log_sum_exp(&idx.iter().map(|&r| neg_e[r]).collect::<Vec<_>>());
        ll += lv - log_z;
        let mo = moments_of(&idx, lv);
        for (a, b) in data_m.units.iter_mut().zip(&mo.units) {
            *a += b / data.len() as f64;
        }
        for (a, b) in data_m.edges.iter_mut().zip(&mo.edges) {
            *a += b / data.len() as f64;
        }
    }
    Joint {
        log_z,
        model,
        data: data_m,
        log_likelihood: ll / data.len() as f64,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    // relative error; moments can sit arbitrarily close to zero, where
    // rounding in the last place would dominate, so the scale is floored
    (a - b).abs() / b.abs().max(1e-3)
}

fn max_rel(a: &Moments, b: &Moments) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| rel(x, y)).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let total = rng.random_range(2..=10);
        let n = rng.random_range(1..total);
        let rbm = random_rbm(&mut rng, n, total - n, 0.7, 1.5, 1.0);
        let data = random_data(&mut rng, n, 6);
        let j = enumerate(&rbm, &data);
        worst = worst
            .max(rel(log_partition_function(&rbm).unwrap(), j.log_z))
            .max(rel(average_log_likelihood(&rbm, &data).unwrap(), j.log_likelihood))
            .max(max_rel(&exact_model_averages(&rbm).unwrap(), &j.model))
            .max(max_rel(&exact_data_averages(&rbm, &data).unwrap(), &j.data));
    }
    outcome(worst <= 1e-10, format!("20 models, max relative error {worst:.2e} (limit 1e-10)"))
}

fn criterion_2() -> Outcome {
    let mut rng = rng_from(202);
    let rbm = random_rbm(&mut rng, 4, 4, 1.0, 1.0, 0.5);
    let data = random_data(&mut rng, 4, 7);
    let grad = gradient(
        &exact_data_averages(&rbm, &data).unwrap(),
        &exact_model_averages(&rbm).unwrap(),
    )
    .unwrap();
    let h = 1e-5;
    let n_w = rbm.params.weights.len();
    let mut worst = 0.0f64;
    for c in 0..n_w + rbm.params.biases.len() {
        let at = |delta: f64| {
            let mut r = rbm.clone();
            if c < n_w {
                r.params.weights[c] += delta;
            } else {
                r.params.biases[c - n_w] += delta;
            }
            average_log_likelihood(&r, &data).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let an = if c < n_w { grad.weights[c] } else { grad.biases[c - n_w] };
        worst = worst.max((fd - an).abs());
    }
    outcome(worst <= 1e-6, format!("4+4 model, max |exact - finite difference| {worst:.2e} (limit 1e-6)"))
}

fn benchmark_control(seed: u64, g: &BipartiteGraph) -> ControlParameters {
    let mut rng = rng_from(seed);
    ControlParameters {
        couplings: (0..g.num_edges()).map(|_| rng.random_range(-0.25..0.25)).collect(),
        fields: (0..g.num_units()).map(|_| rng.random_range(-0.05..0.05)).collect(),
        range: ControlRange::default(),
    }
}

struct ThermoRun {
    regression: f64,
    r_coeff: f64,
    pl: Option<f64>,
}

/// One estimation round on exact samples at constant `T = 0.1`: sample the
/// native set, take the pseudo-likelihood estimate as the inverse-temperature
/// guess, choose `x` with `d_KL = R/2`, sample the scaled set and regress.
fn thermometry_round(g: &Arc<BipartiteGraph>, c: &ControlParameters, r: usize, seed: u64) -> ThermoRun {
    let profile = AnnealerProfile::ideal(g, TemperatureLaw::Constant(0.1)).unwrap();
    let native = program_and_sample(&profile, g, &SampleRequest::new(c, r, seed), SamplerBackend::Exact).unwrap();
    let pl = estimate_temperature_pseudolikelihood(&native, g, c, PseudoLikelihoodOptions::default())
        .ok()
        .map(|e| e.t_eff);
    let beta_guess = 1.0 / pl.unwrap_or(0.1);
    let sigma = energy_variance(&native).unwrap().sqrt();
    let x = choose_scaling(beta_guess, sigma, r, r as f64 / 2.0, c, 0.05).unwrap().x;
    let scaled = program_and_sample(&profile, g, &SampleRequest::new(c, r, seed ^ 0x5ca1ed).scaled(x), SamplerBackend::Exact)
        .unwrap();
    let d = regression_with_diagnostics(&native, &scaled, x, RegressionOptions::default()).unwrap();
    ThermoRun {
        regression: d.estimate.t_eff,
        r_coeff: d.estimate.r_coeff,
        pl,
    }
}

static THERMO: OnceLock<BTreeMap<usize, Vec<ThermoRun>>> = OnceLock::new();

fn thermo_runs() -> &'static BTreeMap<usize, Vec<ThermoRun>> {
    THERMO.get_or_init(|| {
        let g = chimera16();
        let c = benchmark_control(7, &g);
        [10_000usize, 100_000]
            .into_iter()
            .map(|r| (r, (0..15).map(|rep| thermometry_round(&g, &c, r, 1000 + rep)).collect()))
            .collect()
    })
}

fn criterion_3() -> Outcome {
    let runs = thermo_runs();
    let mut pass = true;
    let mut parts = Vec::new();
    for (&r, limit) in runs.keys().zip([0.10, 0.05]) {
        let ts: Vec<f64> = runs[&r].iter().map(|t| t.regression).collect();
        let rc: Vec<f64> = runs[&r].iter().map(|t| t.r_coeff.abs()).collect();
        let err = (median(&ts) - 0.1).abs() / 0.1;
        let rmed = median(&rc);
        pass &= err <= limit && rmed >= 0.9;
        parts.push(format!("R={r}: median T {:.4} (err {:.1}%, limit {:.0}%), median |r| {rmed:.3}", median(&ts), 100.0 * err, 100.0 * limit));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let runs = thermo_runs();
    let mut pass = true;
    let mut parts = Vec::new();
    for (&r, set) in runs {
        let pl: Vec<f64> = set.iter().filter_map(|t| t.pl).collect();
        let converged = pl.len() == set.len();
        let err = (median(&pl) - 0.1).abs() / 0.1;
        pass &= converged && err <= 0.10;
        parts.push(format!("R={r}: {}/{} converged, median T {:.4} (err {:.1}%)", pl.len(), set.len(), median(&pl), 100.0 * err));
    }

    // mid-training instances: CD-10 snapshots of BAS training, read out at
    // J = -0.1 W, sampled on the default noisy device with the affine law
    let g = chimera16();
    let data = qale_core::harness::generate_bas(4).unwrap();
    let mut config = ExperimentConfig::default();
    config.seed = 404;
    let (mut t_pl, mut t_reg, mut t_true) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..20u64 {
        let mut tc = TrainingConfig {
            algorithm: Algorithm::Cd(10),
            iterations: 100 + 50 * i as usize,
            eval_every: 100_000,
            seed: 4040 + i,
            ..Default::default()
        };
        tc.warm_start_cd1 = 0;
        let w = cd_train(&tc, &g, &data).unwrap().final_model;
        let (c, _) = ControlParameters::from_model(&w, 0.1, ControlRange::default());
        let profile = AnnealerProfile::new(
            &g,
            config.temperature_law(),
            config.noise,
            qale_core::seed::derive_seed(404, &[1, i % 5]),
        )
        .unwrap();
        t_true.push(qale_core::annealer::effective_temperature(&profile, &c));
        let native = program_and_sample(&profile, &g, &SampleRequest::new(&c, 1000, 40 + i), SamplerBackend::Auto).unwrap();
        let sigma = energy_variance(&native).unwrap().sqrt();
        let x = choose_scaling(10.0, sigma, 1000, 500.0, &c, 0.05).unwrap().x;
        let scaled = program_and_sample(&profile, &g, &SampleRequest::new(&c, 1000, 80 + i).scaled(x), SamplerBackend::Auto)
            .unwrap();
        match regression_with_diagnostics(&native, &scaled, x, RegressionOptions::default()) {
            Ok(d) => t_reg.push(d.estimate.t_eff),
            Err(e) => eprintln!("  instance {i}: regression failed: {e}"),
        }
        match estimate_temperature_pseudolikelihood(&native, &g, &c, PseudoLikelihoodOptions::default()) {
            Ok(e) => t_pl.push(e.t_eff),
            Err(e) => eprintln!("  instance {i}: pseudo-likelihood failed: {e}"),
        }
    }
    let (iqr_pl, iqr_reg) = (interquartile_range(&t_pl), interquartile_range(&t_reg));
    let offset = mean(&t_pl) - mean(&t_reg);
    pass &= t_pl.len() == 20 && iqr_pl < iqr_reg;
    parts.push(format!(
        "BAS instances: IQR pl {iqr_pl:.4} vs regression {iqr_reg:.4} ({} / {} estimates); mean T pl {:.4}, regression {:.4}, true {:.4}; recorded offset sign pl - regression: {}",
        t_pl.len(),
        t_reg.len(),
        mean(&t_pl),
        mean(&t_reg),
        mean(&t_true),
        if offset < 0.0 { "negative" } else { "positive" }
    ));
    outcome(pass, parts.join("; "))
}

/// Largest deviation in standard errors, using the exact variance of each
/// ±1 statistic and `n` effective independent samples.
fn max_z(est: &Moments, exact: &Moments, n: f64) -> f64 {
    est.iter()
        .zip(exact.iter())
        .map(|(a, m)| (a - m).abs() / ((1.0 - m * m).max(1e-12) / n).sqrt())
        .fold(0.0, f64::max)
}

fn criterion_5() -> Outcome {
    let mut rng = rng_from(505);
    let g = Arc::new(BipartiteGraph::complete(3, 3));
    let w = ModelParameters {
        weights: (0..g.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        biases: (0..6).map(|_| rng.random_range(-0.5..0.5)).collect(),
    };
    let t = 0.1;
    let rbm = Rbm::new(g.clone(), w.clone()).unwrap();
    let exact = exact_model_averages(&rbm).unwrap();
    let (c, _) = ControlParameters::from_model(&w, t, ControlRange::default());
    let profile = AnnealerProfile::ideal(&g, TemperatureLaw::Constant(t)).unwrap();
    let mut worst = 0.0f64;
    let mut ess = Vec::new();
    for rep in 0..5 {
        let r = 10_000;
        let native = program_and_sample(&profile, &g, &SampleRequest::new(&c, r, 50 + rep), SamplerBackend::Exact).unwrap();
        let scaled = program_and_sample(&profile, &g, &SampleRequest::new(&c, r, 60 + rep).scaled(0.9), SamplerBackend::Exact)
            .unwrap();
        let beta = 1.0 / t;
        let im = importance_weighted_moments(&g, &native, &scaled, beta, 0.9 * beta).unwrap();
        worst = worst.max(max_z(&im.moments, &exact, r as f64 + im.effective_samples));
        ess.push(im.effective_samples);
    }
    outcome(
        worst <= 4.0,
        format!("3+3 model, beta' = 0.9 beta, R=1e4, 5 draws: max deviation {worst:.2} SE (limit 4), median ESS {:.0}", median(&ess)),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from(606);
    let rbm = random_rbm(&mut rng, 4, 4, 1.0, 0.5, 0.4);
    let exact = exact_model_averages(&rbm).unwrap();
    let chains = 10_000;
    let starts = random_data(&mut rng, 4, chains);
    let mut parts = Vec::new();
    let mut last = f64::INFINITY;
    for k in [1, 10, 100] {
        let m = cd_k_model_moments(&rbm, &starts, k, 6060 + k as u64).unwrap();
        last = max_z(&m, &exact, chains as f64);
        parts.push(format!("k={k}: {last:.2} SE"));
    }
    outcome(last <= 4.0, format!("4+4 model, 1e4 chains, max deviation {} (limit 4 at k=100)", parts.join(", ")))
}

fn acceptance_config(seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.seed = seed;
    c.workers = workers();
    c.repeats = 5;
    c
}

/// Run an experiment in a temporary directory, or under
/// `$QALE_ACCEPTANCE_OUT/<name>` when that variable is set.
fn run_experiment_in(name: &str, mut config: ExperimentConfig) -> ExperimentOutput {
    let dir = tempfile::tempdir().unwrap();
    config.output = match std::env::var_os("QALE_ACCEPTANCE_OUT") {
        Some(root) => Path::new(&root).join(name),
        None => dir.path().to_path_buf(),
    };
    let start = Instant::now();
    let out = run_experiment(&config).unwrap();
    eprintln!("  ran {:?} in {:.0} s", config.algorithms, start.elapsed().as_secs_f64());
    out
}

const SEED_FIG: u64 = 2017;

static FIG3: OnceLock<ExperimentOutput> = OnceLock::new();

fn fig3() -> &'static ExperimentOutput {
    FIG3.get_or_init(|| {
        let mut c = acceptance_config(SEED_FIG);
        c.algorithms = ["QuALe@T_eff", "QuALe@0.08", "QuALe@0.16", "QuALe@0.033", "CD-1", "CD-10"]
            .map(String::from)
            .to_vec();
        run_experiment_in("fig3", c)
    })
}

/// Per-repeat final values, for the log.
fn log_finals(label: &str, finals: &[f64]) {
    let v: Vec<String> = finals.iter().map(|f| format!("{f:.3}")).collect();
    eprintln!("  {label}: finals [{}], median {:.3}, IQR {:.3}", v.join(", "), median(finals), interquartile_range(finals));
}

fn curve<'a>(summary: &'a [SummaryRow], label: &str) -> BTreeMap<usize, &'a SummaryRow> {
    summary.iter().filter(|r| r.algorithm == label).map(|r| (r.iteration, r)).collect()
}

fn criterion_7() -> Outcome {
    let out = fig3();
    let fin = |l: &str| {
        log_finals(l, &out.finals(l));
        median(&out.finals(l))
    };
    let (q, cd10, cd1, f08, f16, f033) = (
        fin("QuALe@T_eff"),
        fin("CD-10"),
        fin("CD-1"),
        fin("QuALe@0.08"),
        fin("QuALe@0.16"),
        fin("QuALe@0.033"),
    );
    // first logged iteration from which the QuALe median never falls below
    // the CD-1 median again
    let qc = curve(&out.summary, "QuALe@T_eff");
    let cc = curve(&out.summary, "CD-1");
    let mut overtake = None;
    for (&it, row) in qc.iter().rev() {
        match cc.get(&it) {
            Some(c) if row.median >= c.median => overtake = Some(it),
            _ => break,
        }
    }
    let checks = [
        ("QuALe@T_eff >= CD-10", q >= cd10),
        ("CD-10 >= CD-1", cd10 >= cd1),
        ("QuALe@T_eff >= QuALe@0.08", q >= f08),
        ("QuALe@T_eff >= QuALe@0.16", q >= f16),
        ("QuALe@0.033 < -14", f033 < -14.0),
        ("overtakes CD-1 by iteration 1000", overtake.is_some_and(|it| it <= 1000)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "final medians: QuALe@T_eff {q:.3}, CD-10 {cd10:.3}, CD-1 {cd1:.3}, @0.08 {f08:.3}, @0.16 {f16:.3}, @0.033 {f033:.3}; overtakes CD-1 at {}{}",
            overtake.map_or("never".to_string(), |it| it.to_string()),
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        ),
    )
}

fn criterion_8() -> Outcome {
    let base = median(&fig3().finals("QuALe@T_eff"));
    log_finals("all gadgets on", &fig3().finals("QuALe@T_eff"));
    let variant = |name: &str, key: &str, value: &str| {
        let mut c = acceptance_config(SEED_FIG);
        c.algorithms = vec!["QuALe@T_eff".into()];
        c.set(key, value).unwrap();
        let finals = run_experiment_in(name, c).finals("QuALe@T_eff");
        log_finals(name, &finals);
        median(&finals)
    };
    let no_bc = variant("no_bias_correction", "train.bias_correction", "false");
    let no_is = variant("no_importance_reuse", "train.importance_reuse", "false");
    let no_ws = variant("no_warm_start", "train.warm_start_cd1", "0");
    let checks = [
        ("bias correction", no_bc),
        ("importance reuse", no_is),
        ("warm start", no_ws),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| base < c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "final medians: all on {base:.3}; without bias correction {no_bc:.3}, importance reuse {no_is:.3}, warm start {no_ws:.3}{}",
            if failed.is_empty() { String::new() } else { format!("; on < off for: {}", failed.join(", ")) }
        ),
    )
}

fn traces(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("trace_"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn criterion_9() -> Outcome {
    let run = |workers: usize| {
        let dir = tempfile::tempdir().unwrap();
        let mut c = acceptance_config(909);
        c.algorithms = ["QuALe@T_eff", "QuALe@T_av", "QuALe@0.08", "CD-1", "CD-10"].map(String::from).to_vec();
        c.repeats = 3;
        c.training.iterations = 150;
        c.training.warm_start_cd1 = 20;
        c.training.eval_every = 25;
        c.training.calibration_events = 5;
        c.workers = workers;
        c.output = dir.path().to_path_buf();
        run_experiment(&c).unwrap();
        traces(dir.path())
    };
    let a = run(1);
    let b = run(1);
    let c = run(4);
    let pass = !a.is_empty() && a == b && a == c;
    outcome(
        pass,
        format!("{} trace files; repeat run identical: {}; 1 vs 4 workers identical: {}", a.len(), a == b, a == c),
    )
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 9] = [
        (1, "exact inference matches joint enumeration", criterion_1),
        (2, "gradient matches finite differences", criterion_2),
        (3, "regression thermometry recovers T_eff", criterion_3),
        (4, "pseudo-likelihood cross-check", criterion_4),
        (5, "importance-sampled moments", criterion_5),
        (6, "CD-k convergence", criterion_6),
        (7, "learning-curve ordering", criterion_7),
        (8, "gadget ablations", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let selected: Option<Vec<usize>> = std::env::var("QALE_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failures = 0;
    for (n, name, f) in criteria {
        if selected.as_ref().is_some_and(|s| !s.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        failures += usize::from(!o.pass);
        println!(
            "[{}] {n}. {name} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        if std::env::var_os("QALE_ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
