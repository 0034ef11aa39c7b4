mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spectralforge::bayes_freq::{bmse_curve, hermitian_eigen, linspace, optimize_probe, OptimizerSettings};
use spectralforge::bayes_phase::{optimize_phase_probe, wrap_gaussian_prior, PhaseOptimizerSettings, PhasePrior};
use spectralforge::birkhoff::{birkhoff_decompose, build_schedule};
use spectralforge::design::{
    analytic_design, fit_slope, lp_max_range_design, reduction_study, REDUCTION_SAMPLING_LAW,
};
use spectralforge::io::{
    curve_csv, read_json, study_csv, write_json, DecompositionFile, PriorFile, ScheduleFile, SpectrumFile,
    TargetFile, WeightsFile,
};
use spectralforge::minimal::{minimal_switch_design, minimal_switch_exhaustive, EXHAUSTIVE_MAX_N};
use spectralforge::scenarios::{
    optimize_target_spectrum, reproduce_figure, FigureOptions, Objective, TauSearch, FIGURES,
};
use spectralforge::schedule::{free_evolution, simulate_schedule};
use spectralforge::{Error, ProbeState, Result, Spectrum};

use manifest::{manifest_path_for, Run};

/// Version of the command and file interface.
pub const INTERFACE_VERSION: &str = "1.0";

const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

pub fn version_string() -> String {
    format!("{} (interface {INTERFACE_VERSION})", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(name = "spectralforge", about = "Spectrum design by level switching and Bayesian estimation")]
struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, env = "SPECTRALFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print tool and interface version.
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design bi-stochastic weights realising a target.
    Design(DesignArgs),
    /// Compile weights into a permutation schedule.
    Schedule(ScheduleArgs),
    /// Run a schedule on a probe and compare with the effective spectrum.
    Simulate(SimulateArgs),
    /// Bayesian frequency estimation: optimal probe and BMSE.
    EstimateFreq(FreqArgs),
    /// Bayesian phase estimation: optimal probe, measurement and cost.
    EstimatePhase(PhaseArgs),
    /// Search target spectra that minimise an estimation objective.
    OptimizeSpectrum(OptimizeArgs),
    /// Average achieved and minimal ranges over random spectra.
    ReductionStudy(StudyArgs),
    /// Regenerate the data behind a figure.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Analytic,
    Lp,
    Minimal,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value = "lp")]
    method: MethodArg,
    /// Chain length for the minimal method.
    #[arg(long, default_value_t = 4)]
    switches: usize,
    /// Random chains tried by the minimal method.
    #[arg(long, default_value_t = 64)]
    tries: usize,
    /// Enumerate all chains instead of sampling (small n only).
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    total_time: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the Birkhoff decomposition here.
    #[arg(long)]
    decomposition: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    /// Probe amplitudes; the uniform superposition if absent.
    #[arg(long)]
    probe: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FreqArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// Single dimensionless time `τ = t Δω`.
    #[arg(long, conflicts_with = "tau_range")]
    tau: Option<f64>,
    /// Curve over `a..b`.
    #[arg(long, value_parser = parse_float_range)]
    tau_range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// JSON for a single τ, CSV for a range.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PriorArgs {
    /// Prior document (`{"type": "flat" | "delta" | "fourier", ...}`).
    #[arg(long, conflicts_with = "wrapped_gaussian")]
    prior: Option<PathBuf>,
    /// Wrapped Gaussian prior `variance,time`.
    #[arg(long, value_parser = parse_pair)]
    wrapped_gaussian: Option<(f64, f64)>,
}

impl PriorArgs {
    fn load(&self, run: &mut Run) -> Result<PhasePrior> {
        if let Some(p) = &self.prior {
            run.input(p);
            return read_json::<PriorFile>(p)?.to_prior();
        }
        if let Some((v, t)) = self.wrapped_gaussian {
            return wrap_gaussian_prior(v, t);
        }
        Ok(PhasePrior::Flat)
    }
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[command(flatten)]
    prior: PriorArgs,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    /// Minimum BMSE over the interrogation time.
    Bmse,
    /// Phase-estimation cost under a prior.
    Phase,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long, value_enum, default_value = "bmse")]
    objective: ObjectiveArg,
    #[command(flatten)]
    prior: PriorArgs,
    /// Objective evaluations.
    #[arg(long, default_value_t = 60)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Inclusive range of level counts, e.g. `2..10`.
    #[arg(long, value_parser = parse_usize_range)]
    n: (usize, usize),
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// One of fig4, fig6, fig8, fig10, fig12, figA.
    figure: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 60)]
    budget: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 40)]
    curve_points: usize,
    /// Level table `label,energy,unit` (needed by fig6).
    #[arg(long)]
    levels: Option<PathBuf>,
}

fn split_range(s: &str) -> std::result::Result<(&str, &str), String> {
    s.split_once("..").ok_or_else(|| format!("expected a range `a..b`, got `{s}`"))
}

fn parse_float_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = split_range(s)?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(format!("range `{s}` must satisfy a <= b"));
    }
    Ok((a, b))
}

fn parse_usize_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = split_range(s)?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("range `{s}` must satisfy a <= b"));
    }
    Ok((a, b))
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

type Amplitudes = Vec<[f64; 2]>;

#[derive(Serialize, Deserialize)]
struct ProbeFile {
    amplitudes: Amplitudes,
}

fn amplitudes(p: &ProbeState) -> Amplitudes {
    p.amplitudes().iter().map(|c| [c.re, c.im]).collect()
}

fn load_spectrum(path: &Path, run: &mut Run) -> Result<Spectrum> {
    run.input(path);
    read_json::<SpectrumFile>(path)?.to_spectrum()
}

/// Writes one JSON output plus its manifest.
fn finish_json<T: Serialize>(mut run: Run, out: &Path, value: &T) -> Result<()> {
    write_json(out, value)?;
    run.output(out);
    run.finish(&manifest_path_for(out))?;
    Ok(())
}

#[derive(Serialize)]
struct DesignOut {
    #[serde(flatten)]
    weights: WeightsFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    swaps: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleFile>,
}

fn cmd_design(a: &DesignArgs, mut run: Run) -> Result<()> {
    let s = load_spectrum(&a.spectrum, &mut run)?;
    run.input(&a.target);
    let t = read_json::<TargetFile>(&a.target)?.to_target()?;
    let out = match a.method {
        MethodArg::Analytic | MethodArg::Lp => {
            let d = match a.method {
                MethodArg::Analytic => analytic_design(&s, &t)?,
                _ => lp_max_range_design(&s, &t)?,
            };
            DesignOut {
                weights: WeightsFile::from_design(&d),
                swaps: None,
                chain_weights: None,
                schedule: None,
            }
        }
        MethodArg::Minimal => {
            let m = if a.exhaustive {
                if s.len() > EXHAUSTIVE_MAX_N {
                    return Err(Error::InvalidArgument(format!(
                        "exhaustive search supports n <= {EXHAUSTIVE_MAX_N}"
                    )));
                }
                minimal_switch_exhaustive(&s, &t, a.switches)?
            } else {
                minimal_switch_design(&s, &t, a.switches, a.tries, run.seed)?
            };
            DesignOut {
                weights: WeightsFile::from_design(&m.design),
                swaps: Some(m.swaps.clone()),
                chain_weights: Some(m.weights.clone()),
                schedule: Some(ScheduleFile::from_schedule(&m.schedule(1.0)?)),
            }
        }
    };
    finish_json(run, &a.out, &out)
}

fn cmd_schedule(a: &ScheduleArgs, mut run: Run) -> Result<()> {
    run.input(&a.weights);
    let r = read_json::<WeightsFile>(&a.weights)?.to_weights()?;
    let d = birkhoff_decompose(&r)?;
    let sched = build_schedule(&d, a.total_time)?;
    if let Some(p) = &a.decomposition {
        write_json(p, &DecompositionFile::from_decomposition(&d))?;
        run.output(p);
    }
    finish_json(run, &a.out, &ScheduleFile::from_schedule(&sched))
}

#[derive(Serialize)]
struct SimulateOut {
    omega: f64,
    total_time: f64,
    effective: Vec<f64>,
    amplitudes: Amplitudes,
    effective_amplitudes: Amplitudes,
    max_deviation: f64,
}

fn cmd_simulate(a: &SimulateArgs, mut run: Run) -> Result<()> {
    let s = load_spectrum(&a.spectrum, &mut run)?;
    run.input(&a.schedule);
    let sched = read_json::<ScheduleFile>(&a.schedule)?.to_schedule()?;
    let probe = match &a.probe {
        Some(p) => {
            run.input(p);
            let f: ProbeFile = read_json(p)?;
            ProbeState::new(f.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect())?
        }
        None => ProbeState::uniform(s.len()),
    };
    let eff = sched.weights()?.apply(&s)?;
    let got = simulate_schedule(&s, &sched, a.omega, &probe)?;
    let want = free_evolution(&eff, a.omega, sched.total_time(), &probe)?;
    let max_deviation = got
        .amplitudes()
        .iter()
        .zip(want.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let out = SimulateOut {
        omega: a.omega,
        total_time: sched.total_time(),
        effective: eff.levels().to_vec(),
        amplitudes: amplitudes(&got),
        effective_amplitudes: amplitudes(&want),
        max_deviation,
    };
    finish_json(run, &a.out, &out)
}

#[derive(Serialize)]
struct FreqOut {
    tau: f64,
    bmse: f64,
    qfi: f64,
    probe: Amplitudes,
    /// Frequency estimates (estimator eigenvalues), ascending.
    estimates: Vec<f64>,
    /// Measurement basis, one amplitude vector per estimate.
    measurement: Vec<Amplitudes>,
    iterations: usize,
    restart_winner: usize,
    converged: bool,
    history: Vec<f64>,
}

fn cmd_estimate_freq(a: &FreqArgs, mut run: Run) -> Result<()> {
    let s = load_spectrum(&a.spectrum, &mut run)?;
    let cfg = OptimizerSettings {
        restarts: a.restarts,
        max_iter: a.max_iter,
        tol: a.tol,
    };
    match (a.tau, a.tau_range) {
        (Some(tau), None) => {
            let r = optimize_probe(&s, tau, run.seed, &cfg)?;
            let (values, vecs) = hermitian_eigen(&r.estimator);
            let measurement = (0..vecs.ncols())
                .map(|k| vecs.column(k).iter().map(|c| [c.re, c.im]).collect())
                .collect();
            let out = FreqOut {
                tau,
                bmse: r.bmse,
                qfi: r.qfi,
                probe: amplitudes(&r.probe),
                estimates: values,
                measurement,
                iterations: r.iterations,
                restart_winner: r.restart_winner,
                converged: r.converged,
                history: r.history,
            };
            finish_json(run, &a.out, &out)
        }
        (None, Some((lo, hi))) => {
            if a.points < 2 {
                return Err(Error::InvalidArgument("a curve needs at least 2 points".into()));
            }
            let points = bmse_curve(&s, &linspace(lo, hi, a.points), run.seed, &cfg)?;
            curve_csv(&points).write(&a.out)?;
            run.output(&a.out);
            run.finish(&manifest_path_for(&a.out))?;
            Ok(())
        }
        _ => Err(Error::InvalidArgument("give exactly one of --tau or --tau-range".into())),
    }
}

#[derive(Serialize)]
struct Outcome {
    phase: f64,
    vector: Amplitudes,
}

#[derive(Serialize)]
struct PhaseOut {
    prior: PriorFile,
    cost: f64,
    trace_norm: f64,
    probe: Amplitudes,
    measurement: Vec<Outcome>,
    iterations: usize,
    restart_winner: usize,
    converged: bool,
}

fn cmd_estimate_phase(a: &PhaseArgs, mut run: Run) -> Result<()> {
    let s = load_spectrum(&a.spectrum, &mut run)?;
    let prior = a.prior.load(&mut run)?;
    let cfg = PhaseOptimizerSettings {
        restarts: a.restarts,
        max_iter: a.max_iter,
        tol: a.tol,
    };
    let r = optimize_phase_probe(&s, &prior, run.seed, &cfg)?;
    let out = PhaseOut {
        prior: PriorFile::from_prior(&prior),
        cost: r.cost,
        trace_norm: r.trace_norm,
        probe: amplitudes(&r.probe),
        measurement: r
            .measurement
            .iter()
            .map(|(phase, v)| Outcome {
                phase: *phase,
                vector: v.iter().map(|c| [c.re, c.im]).collect(),
            })
            .collect(),
        iterations: r.iterations,
        restart_winner: r.restart_winner,
        converged: r.converged,
    };
    finish_json(run, &a.out, &out)
}

#[derive(Serialize)]
struct OptimizeOut {
    objective: &'static str,
    base: Vec<f64>,
    target: Vec<f64>,
    design: WeightsFile,
    schedule: ScheduleFile,
    value: f64,
    base_value: f64,
    linear_target_value: f64,
    evaluations: usize,
}

fn cmd_optimize(a: &OptimizeArgs, mut run: Run) -> Result<()> {
    let s = load_spectrum(&a.spectrum, &mut run)?;
    let objective = match a.objective {
        ObjectiveArg::Bmse => Objective::MinBmseOverTau(TauSearch::default()),
        ObjectiveArg::Phase => Objective::PhaseCost {
            prior: a.prior.load(&mut run)?,
            settings: PhaseOptimizerSettings::default(),
        },
    };
    let r = optimize_target_spectrum(&s, &objective, a.budget, run.seed)?;
    let out = OptimizeOut {
        objective: r.objective,
        base: r.base.levels().to_vec(),
        target: r.target.ratios().to_vec(),
        design: WeightsFile::from_design(&r.design),
        schedule: ScheduleFile::from_schedule(&r.schedule),
        value: r.value,
        base_value: r.base_value,
        linear_target_value: r.linear_target_value,
        evaluations: r.evaluations,
    };
    finish_json(run, &a.out, &out)
}

fn cmd_study(a: &StudyArgs, mut run: Run) -> Result<()> {
    let ns: Vec<usize> = (a.n.0..=a.n.1).collect();
    let rows = reduction_study(&ns, a.samples, run.seed)?;
    study_csv(&rows).write(&a.out)?;
    run.output(&a.out);
    if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let sa = fit_slope(&x, &rows.iter().map(|r| r.mean_range).collect::<Vec<_>>());
        let sb = fit_slope(&x, &rows.iter().map(|r| r.mean_min_range).collect::<Vec<_>>());
        println!("slope mean_range {sa:.4}");
        println!("slope mean_min_range {sb:.4}");
    }
    println!("sampling law: {REDUCTION_SAMPLING_LAW}");
    run.finish(&manifest_path_for(&a.out))?;
    Ok(())
}

fn cmd_reproduce(a: &ReproduceArgs, mut run: Run) -> Result<()> {
    if !FIGURES.contains(&a.figure.as_str()) {
        return Err(Error::UnknownFigure(a.figure.clone()));
    }
    let opts = FigureOptions {
        seed: run.seed,
        budget: a.budget,
        samples: a.samples,
        curve_points: a.curve_points,
        levels: a.levels.clone(),
    };
    if let Some(l) = &a.levels {
        run.input(l);
    }
    let figure_manifest = reproduce_figure(&a.figure, &a.out, &opts)?;
    let listed: serde_json::Value = read_json(&figure_manifest)?;
    if let Some(files) = listed.get("files").and_then(|f| f.as_array()) {
        for f in files.iter().filter_map(|f| f.as_str()) {
            run.output(&a.out.join(f));
        }
    }
    run.output(&figure_manifest);
    run.finish(&a.out.join(format!("{}_run.json", a.figure)))?;
    Ok(())
}

fn dispatch(cmd: &Command, run: Run) -> Result<()> {
    match cmd {
        Command::Design(a) => cmd_design(a, run),
        Command::Schedule(a) => cmd_schedule(a, run),
        Command::Simulate(a) => cmd_simulate(a, run),
        Command::EstimateFreq(a) => cmd_estimate_freq(a, run),
        Command::EstimatePhase(a) => cmd_estimate_phase(a, run),
        Command::OptimizeSpectrum(a) => cmd_optimize(a, run),
        Command::ReductionStudy(a) => cmd_study(a, run),
        Command::Reproduce(a) => cmd_reproduce(a, run),
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ").replace('"', "'")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.version {
        println!("spectralforge {}", version_string());
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        eprintln!("error kind=usage msg=\"no subcommand given; see --help\"");
        return ExitCode::from(EXIT_USAGE);
    };
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        eprintln!("error kind=usage msg=\"--jobs must be at least 1\"");
        return ExitCode::from(EXIT_USAGE);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        eprintln!("error kind=internal msg=\"{}\"", one_line(&e.to_string()));
        return ExitCode::from(EXIT_INTERNAL);
    }
    let run = Run::new(cli.seed, jobs);
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cmd, run)));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error kind={} msg=\"{}\"", e.kind(), one_line(&e.to_string()));
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_INTERNAL })
        }
        Err(_) => {
            eprintln!("error kind=internal msg=\"unexpected panic\"");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
