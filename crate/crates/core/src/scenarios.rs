//! Application pipelines: reference spectra, level-table ingestion, target
//! optimisation and figure reproduction.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bayes_freq::{self, bmse_curve, linspace, OptimizerSettings};
use crate::bayes_phase::{self, PhaseOptimizerSettings, PhasePrior};
use crate::birkhoff::{birkhoff_decompose, build_schedule};
use crate::design::{lp_max_range_design, reduction_study, DesignResult, REDUCTION_SAMPLING_LAW};
use crate::error::{Error, Result};
use crate::io::{curve_csv, phase_csv, study_csv, write_json, CsvTable};
use crate::nelder_mead;
use crate::rng::stream_rng;
use crate::schedule::SwitchingSchedule;
use crate::spectrum::{Spectrum, TargetVector};

/// `2^m` levels of `Σ_k Z_k` over `m` qubits, ascending.
pub fn degenerate_qubit_spectrum(m: usize) -> Result<Spectrum<f64>> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidArgument(format!("m = {m} outside 1..=20")));
    }
    let mut lv: Vec<f64> = (0..1u32 << m)
        .map(|b| m as f64 - 2.0 * b.count_ones() as f64)
        .collect();
    lv.sort_by(f64::total_cmp);
    Ok(Spectrum::new(lv)?.with_label(format!("degenerate-{m}")))
}

/// `(0, 1, …, n-1)`.
pub fn linear_spectrum(n: usize) -> Result<Spectrum<f64>> {
    Ok(Spectrum::new((0..n).map(|j| j as f64).collect())?.with_label(format!("linear-{n}")))
}

/// Each level repeated `d_a` times in place.
pub fn augment_with_ancilla(s: &Spectrum<f64>, d_a: usize) -> Result<Spectrum<f64>> {
    if d_a == 0 {
        return Err(Error::InvalidArgument("ancilla dimension must be at least 1".into()));
    }
    let lv = s
        .levels()
        .iter()
        .flat_map(|&x| std::iter::repeat_n(x, d_a))
        .collect();
    Ok(Spectrum::new(lv)?.with_label(s.label().to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnergyUnit {
    #[serde(rename = "cm-1")]
    Wavenumber,
    #[serde(rename = "dimensionless")]
    Dimensionless,
}

impl EnergyUnit {
    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "cm-1" | "cm^-1" => Ok(EnergyUnit::Wavenumber),
            "dimensionless" | "" => Ok(EnergyUnit::Dimensionless),
            other => Err(Error::Parse(format!("unknown energy unit '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRow {
    pub label: String,
    pub energy: f64,
    pub unit: EnergyUnit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    None,
    /// Lowest level moved to 0.
    Shift,
    /// Lowest level moved to 0 and the range scaled to `n - 1`.
    ShiftScale,
}

#[derive(Clone, Debug)]
pub struct LoadedLevels {
    pub rows: Vec<LevelRow>,
    pub spectrum: Spectrum<f64>,
    /// `physical = level · scale + offset`.
    pub offset: f64,
    pub scale: f64,
    pub unit: EnergyUnit,
}

/// Parses a `label,energy,unit` table; a header line is optional.
pub fn parse_levels(text: &str) -> Result<Vec<LevelRow>> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && fields.first() == Some(&"label") {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse(format!("line {}: expected label,energy,unit", ln + 1)));
        }
        let energy: f64 = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad energy '{}'", ln + 1, fields[1])))?;
        if !energy.is_finite() {
            return Err(Error::Parse(format!("line {}: energy not finite", ln + 1)));
        }
        rows.push(LevelRow {
            label: fields[0].to_string(),
            energy,
            unit: EnergyUnit::parse(fields.get(2).copied().unwrap_or(""))?,
        });
    }
    Ok(rows)
}

pub fn levels_from_rows(rows: Vec<LevelRow>, norm: Normalization) -> Result<LoadedLevels> {
    if rows.len() < 2 {
        return Err(Error::TooFewLevels(rows.len()));
    }
    let unit = rows[0].unit;
    if rows.iter().any(|r| r.unit != unit) {
        return Err(Error::Parse("mixed energy units in one table".into()));
    }
    let raw: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (offset, scale) = match norm {
        Normalization::None => (0.0, 1.0),
        Normalization::Shift => (lo, 1.0),
        Normalization::ShiftScale => {
            if !(hi > lo) {
                return Err(Error::DegenerateRange);
            }
            (lo, (hi - lo) / (rows.len() - 1) as f64)
        }
    };
    let spectrum = Spectrum::new(raw.iter().map(|e| (e - offset) / scale).collect())?.with_label("levels");
    Ok(LoadedLevels {
        rows,
        spectrum,
        offset,
        scale,
        unit,
    })
}

pub fn load_levels(path: &Path, norm: Normalization) -> Result<LoadedLevels> {
    levels_from_rows(parse_levels(&fs::read_to_string(path)?)?, norm)
}

/// `τ` search used by the BMSE objective: a grid over `τ · range` followed by
/// golden-section refinement around the best grid point.
#[derive(Clone, Copy, Debug)]
pub struct TauSearch {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refine: usize,
    pub settings: OptimizerSettings,
}

impl Default for TauSearch {
    fn default() -> Self {
        TauSearch {
            lo: 0.05,
            hi: 8.0,
            points: 24,
            refine: 12,
            settings: OptimizerSettings {
                restarts: 4,
                ..Default::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauMinimum {
    pub tau: f64,
    pub bmse: f64,
}

/// Smallest optimised BMSE over `τ`.
pub fn min_bmse_over_tau(s: &Spectrum<f64>, search: &TauSearch, seed: u64) -> Result<TauMinimum> {
    let range = s.spectral_range();
    if !(range > 0.0) {
        return Err(Error::DegenerateRange);
    }
    let f = |tau: f64| -> Result<f64> { Ok(bayes_freq::optimize_probe(s, tau, seed, &search.settings)?.bmse) };
    let grid = linspace(search.lo / range, search.hi / range, search.points.max(3));
    let vals = grid.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let k = (0..vals.len())
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("non-empty grid");
    let mut best = TauMinimum {
        tau: grid[k],
        bmse: vals[k],
    };
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..search.refine {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v < best.bmse {
            best = TauMinimum { tau: t, bmse: v };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub enum Objective {
    MinBmseOverTau(TauSearch),
    PhaseCost {
        prior: PhasePrior,
        settings: PhaseOptimizerSettings,
    },
}

impl Objective {
    pub fn evaluate(&self, s: &Spectrum<f64>, seed: u64) -> Result<f64> {
        match self {
            Objective::MinBmseOverTau(search) => Ok(min_bmse_over_tau(s, search, seed)?.bmse),
            Objective::PhaseCost { prior, settings } => {
                Ok(bayes_phase::optimize_phase_probe(s, prior, seed, settings)?.cost)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::MinBmseOverTau(_) => "min_bmse_over_tau",
            Objective::PhaseCost { .. } => "phase_cost",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub base: Spectrum<f64>,
    pub target: TargetVector<f64>,
    pub design: DesignResult<f64>,
    pub schedule: SwitchingSchedule<f64>,
    pub objective: &'static str,
    /// Objective of the optimised effective spectrum.
    pub value: f64,
    /// Objective of the base spectrum itself.
    pub base_value: f64,
    /// Objective of the design for the evenly spaced target.
    pub linear_target_value: f64,
    pub evaluations: usize,
    pub seed: u64,
}

/// Ascending target with endpoints 0 and 1 and the clamped, sorted interior.
pub fn target_from_interior(x: &[f64]) -> Result<TargetVector<f64>> {
    let mut inner: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    inner.sort_by(f64::total_cmp);
    let mut r = Vec::with_capacity(x.len() + 2);
    r.push(0.0);
    r.extend(inner);
    r.push(1.0);
    TargetVector::new(r)
}

/// Number of Nelder–Mead starts used by [`optimize_target_spectrum`].
pub const SEARCH_STARTS: usize = 3;

/// Multi-start Nelder–Mead over the interior target ratios of an ascending
/// copy of `base`. The first start is the evenly spaced target; `budget`
/// bounds the total number of objective evaluations.
pub fn optimize_target_spectrum(
    base: &Spectrum<f64>,
    objective: &Objective,
    budget: usize,
    seed: u64,
) -> Result<ScenarioReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let base = base.canonical();
    let n = base.len();
    let d = n - 2;
    let design_for = |x: &[f64]| -> Result<DesignResult<f64>> { lp_max_range_design(&base, &target_from_interior(x)?) };
    let eval = |x: &[f64]| -> f64 {
        design_for(x)
            .and_then(|r| objective.evaluate(&r.effective, seed))
            .unwrap_or(f64::INFINITY)
    };
    let linear: Vec<f64> = (1..=d).map(|i| i as f64 / (n - 1) as f64).collect();
    let starts = if d == 0 { 1 } else { SEARCH_STARTS.min(budget) };
    let per_start = (budget / starts).max(1);
    let runs: Vec<nelder_mead::Minimum> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let x0 = if k == 0 {
                linear.clone()
            } else {
                let mut rng = stream_rng(seed, 1000 + k as u64);
                let mut v: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            nelder_mead::minimize(eval, &x0, 0.15, per_start, 1e-10)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    // the first evaluation of start 0 is the evenly spaced target
    let linear_target_value = eval(&linear);
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::Infeasible("no target in the search could be designed".into()));
    }
    let target = target_from_interior(&best.x)?;
    let design = design_for(&best.x)?;
    let schedule = build_schedule(&birkhoff_decompose(&design.weights)?, 1.0)?;
    Ok(ScenarioReport {
        base_value: objective.evaluate(&base, seed)?,
        base,
        target,
        design,
        schedule,
        objective: objective.name(),
        value: best.value,
        linear_target_value,
        evaluations,
        seed,
    })
}

/// The three-peak benchmark prior.
pub fn three_peak_prior() -> PhasePrior {
    PhasePrior::delta(vec![(0.34, 2.1), (0.15, -2.5), (0.51, -2.7)]).expect("weights sum to one")
}

/// Adapts `s` to the evenly spaced target of its own length.
pub fn adapt_to_linear(s: &Spectrum<f64>) -> Result<DesignResult<f64>> {
    let n = s.len();
    let t = TargetVector::new((0..n).map(|i| i as f64 / (n - 1) as f64).collect())?;
    lp_max_range_design(&s.canonical(), &t)
}

pub const FIGURES: [&str; 6] = ["fig4", "fig6", "fig8", "fig10", "fig12", "figA"];

#[derive(Clone, Debug)]
pub struct FigureOptions {
    pub seed: u64,
    /// Objective evaluations per target optimisation.
    pub budget: usize,
    /// Samples per `n` for the reduction study.
    pub samples: usize,
    /// Points on each `τ` curve.
    pub curve_points: usize,
    /// Level table for `fig6`.
    pub levels: Option<PathBuf>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            seed: 0,
            budget: 60,
            samples: 10_000,
            curve_points: 40,
            levels: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureManifest {
    pub figure: String,
    pub seed: u64,
    pub budget: usize,
    pub samples: usize,
    pub curve_points: usize,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub weights: f64,
    pub ratios: f64,
    pub bmse_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let cfg = OptimizerSettings::default();
        Tolerances {
            weights: 1e-9,
            ratios: crate::design::ratio_tol::<f64>(),
            bmse_tol: cfg.tol,
            max_iter: cfg.max_iter,
        }
    }
}

struct FigureWriter<'a> {
    dir: &'a Path,
    id: &'static str,
    files: Vec<String>,
    notes: Vec<String>,
}

impl FigureWriter<'_> {
    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let file = format!("{}_{name}.csv", self.id);
        table.write(&self.dir.join(&file))?;
        self.files.push(file);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let file = format!("{}_{name}.json", self.id);
        write_json(&self.dir.join(&file), value)?;
        self.files.push(file);
        Ok(())
    }
}

#[derive(Serialize)]
struct DesignSummary {
    label: String,
    base: Vec<f64>,
    target: Vec<f64>,
    effective: Vec<f64>,
    achieved_range: f64,
    value: f64,
    base_value: f64,
    linear_target_value: f64,
    evaluations: usize,
    schedule: crate::io::ScheduleFile,
}

impl DesignSummary {
    fn new(label: String, r: &ScenarioReport) -> Self {
        DesignSummary {
            label,
            base: r.base.levels().to_vec(),
            target: r.target.ratios().to_vec(),
            effective: r.design.effective.levels().to_vec(),
            achieved_range: r.design.achieved_range,
            value: r.value,
            base_value: r.base_value,
            linear_target_value: r.linear_target_value,
            evaluations: r.evaluations,
            schedule: crate::io::ScheduleFile::from_schedule(&r.schedule),
        }
    }
}

fn curve_for(s: &Spectrum<f64>, hi: f64, opts: &FigureOptions) -> Result<CsvTable> {
    let grid = linspace(0.0, hi, opts.curve_points.max(2));
    let cfg = OptimizerSettings {
        restarts: 4,
        ..Default::default()
    };
    Ok(curve_csv(&bmse_curve(s, &grid, opts.seed, &cfg)?))
}

fn bmse_objective() -> Objective {
    Objective::MinBmseOverTau(TauSearch::default())
}

/// Runs a figure pipeline and writes its CSV tables plus a JSON manifest into
/// `outdir`. Returns the manifest path.
pub fn reproduce_figure(id: &str, outdir: &Path, opts: &FigureOptions) -> Result<PathBuf> {
    let Some(&id) = FIGURES.iter().find(|f| **f == id) else {
        return Err(Error::UnknownFigure(id.to_string()));
    };
    fs::create_dir_all(outdir)?;
    let mut w = FigureWriter {
        dir: outdir,
        id,
        files: Vec::new(),
        notes: Vec::new(),
    };
    match id {
        "fig4" => {
            for m in [2usize, 3] {
                let deg = degenerate_qubit_spectrum(m)?;
                let report = optimize_target_spectrum(&deg, &bmse_objective(), opts.budget, opts.seed)?;
                let hi = 8.0 / deg.spectral_range() * 2.0;
                w.csv(&format!("m{m}_degenerate"), &curve_for(&deg, hi, opts)?)?;
                w.csv(&format!("m{m}_lifted"), &curve_for(&report.design.effective, hi, opts)?)?;
                w.json(&format!("m{m}_design"), &DesignSummary::new(format!("m = {m}"), &report))?;
            }
        }
        "fig6" => {
            let path = opts.levels.as_ref().ok_or_else(|| {
                Error::MissingInput("fig6 needs a level table (label,energy,unit)".into())
            })?;
            let loaded = load_levels(path, Normalization::ShiftScale)?;
            let s = loaded.spectrum.canonical();
            let report = optimize_target_spectrum(&s, &bmse_objective(), opts.budget, opts.seed)?;
            let lin = linear_spectrum(s.len())?;
            let hi = 8.0 / s.spectral_range() * 2.0;
            w.csv("original", &curve_for(&s, hi, opts)?)?;
            w.csv("optimized", &curve_for(&report.design.effective, hi, opts)?)?;
            w.csv("linear", &curve_for(&lin, hi, opts)?)?;
            w.json("design", &DesignSummary::new(format!("{} levels", s.len()), &report))?;
            w.notes.push(format!(
                "levels normalised with offset {} and scale {} ({:?})",
                loaded.offset, loaded.scale, loaded.unit
            ));
        }
        "fig8" => {
            let lin = linear_spectrum(5)?;
            w.csv("top_n5", &curve_for(&lin, 2.0, opts)?)?;
            let mut t = CsvTable::new(&["n", "linear_bmse", "optimized_bmse", "improvement"]);
            for n in 3..=6 {
                let r = optimize_target_spectrum(&linear_spectrum(n)?, &bmse_objective(), opts.budget, opts.seed)?;
                t.row(&[
                    crate::io::Cell::U(n as u64),
                    crate::io::Cell::F(r.base_value),
                    crate::io::Cell::F(r.value),
                    crate::io::Cell::F((r.base_value - r.value) / r.base_value),
                ]);
            }
            w.csv("bottom", &t)?;
        }
        "fig10" => {
            let prior = three_peak_prior();
            let obj = Objective::PhaseCost {
                prior: prior.clone(),
                settings: PhaseOptimizerSettings::default(),
            };
            let (mut lin_rows, mut opt_rows) = (Vec::new(), Vec::new());
            for n in 2..=5 {
                let lin = linear_spectrum(n)?;
                let l = bayes_phase::optimize_phase_probe(&lin, &prior, opts.seed, &PhaseOptimizerSettings::default())?;
                lin_rows.push((n, l.cost, l.trace_norm));
                let r = optimize_target_spectrum(&lin, &obj, opts.budget, opts.seed)?;
                let o = bayes_phase::optimize_phase_probe(
                    &r.design.effective,
                    &prior,
                    opts.seed,
                    &PhaseOptimizerSettings::default(),
                )?;
                opt_rows.push((n, o.cost, o.trace_norm));
                w.json(&format!("n{n}_design"), &DesignSummary::new(format!("n = {n}"), &r))?;
            }
            w.csv("linear", &phase_csv(&lin_rows))?;
            w.csv("optimized", &phase_csv(&opt_rows))?;
        }
        "fig12" => {
            let qubit = Spectrum::from_slice(&[-1.0, 1.0])?;
            for d_a in [1usize, 2, 4] {
                let eff = adapt_to_linear(&augment_with_ancilla(&qubit, d_a)?)?.effective;
                w.csv(&format!("da{d_a}"), &curve_for(&eff, 4.0, opts)?)?;
            }
        }
        "figA" => {
            let ns: Vec<usize> = (2..=10).collect();
            let rows = reduction_study(&ns, opts.samples, opts.seed)?;
            let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
            let a = crate::design::fit_slope(&x, &rows.iter().map(|r| r.mean_range).collect::<Vec<_>>());
            let b = crate::design::fit_slope(&x, &rows.iter().map(|r| r.mean_min_range).collect::<Vec<_>>());
            w.csv("study", &study_csv(&rows))?;
            w.notes.push(format!("slope of mean range {a:.4}, slope of mean minimal edge range {b:.4}"));
            w.notes.push(format!("sampling law: {REDUCTION_SAMPLING_LAW}"));
        }
        _ => unreachable!("figure ids are checked above"),
    }
    let manifest = FigureManifest {
        figure: id.to_string(),
        seed: opts.seed,
        budget: opts.budget,
        samples: opts.samples,
        curve_points: opts.curve_points,
        files: w.files.clone(),
        notes: w.notes.clone(),
        tolerances: Tolerances::default(),
    };
    let path = outdir.join(format!("{id}_manifest.json"));
    write_json(&path, &manifest)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_spectra() {
        assert_eq!(degenerate_qubit_spectrum(1).unwrap().levels(), &[-1.0, 1.0]);
        assert_eq!(degenerate_qubit_spectrum(2).unwrap().levels(), &[-2.0, 0.0, 0.0, 2.0]);
        assert_eq!(
            degenerate_qubit_spectrum(3).unwrap().levels(),
            &[-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0]
        );
        assert_eq!(degenerate_qubit_spectrum(2).unwrap().spectral_range(), 4.0);
    }

    #[test]
    fn linear_and_ancilla() {
        let l = linear_spectrum(5).unwrap();
        assert_eq!(l.levels(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        let t = l.target_ratios().unwrap();
        assert_eq!(t.ratios()[1], 0.25);
        let q = Spectrum::from_slice(&[-1.0, 1.0]).unwrap();
        assert_eq!(augment_with_ancilla(&q, 2).unwrap().levels(), &[-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(augment_with_ancilla(&q, 1).unwrap().levels(), q.levels());
        let big = augment_with_ancilla(&l, 2).unwrap();
        assert_eq!(big.len(), 10);
        let r = adapt_to_linear(&big).unwrap();
        assert!((r.achieved_range - 4.0).abs() < 1e-9);
    }

    #[test]
    fn level_table_parsing() {
        let rows = parse_levels("label,energy,unit\na,0,cm-1\nb,10,cm-1\nc,30,cm-1\n").unwrap();
        let raw = levels_from_rows(rows.clone(), Normalization::None).unwrap();
        assert_eq!(raw.spectrum.levels(), &[0.0, 10.0, 30.0]);
        let scaled = levels_from_rows(rows, Normalization::ShiftScale).unwrap();
        assert_eq!(scaled.spectrum.levels(), &[0.0, 2.0 / 3.0, 2.0]);
        assert_eq!(scaled.scale, 15.0);
        assert_eq!(
            raw.spectrum.target_ratios().unwrap(),
            scaled.spectrum.target_ratios().unwrap()
        );
        assert!(matches!(
            levels_from_rows(parse_levels("a,1,cm-1").unwrap(), Normalization::None),
            Err(Error::TooFewLevels(1))
        ));
        assert!(matches!(parse_levels("a,x,cm-1"), Err(Error::Parse(_))));
        assert!(matches!(parse_levels("a,1,eV"), Err(Error::Parse(_))));
    }

    #[test]
    fn interior_target() {
        let t = target_from_interior(&[0.7, -0.2, 0.3]).unwrap();
        assert_eq!(t.ratios(), &[0.0, 0.0, 0.3, 0.7, 1.0]);
    }

    #[test]
    fn unknown_figure() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            reproduce_figure("fig99", dir.path(), &FigureOptions::default()),
            Err(Error::UnknownFigure(_))
        ));
        assert!(matches!(
            reproduce_figure("fig6", dir.path(), &FigureOptions::default()),
            Err(Error::MissingInput(_))
        ));
    }
}
