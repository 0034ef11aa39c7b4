//! Single-shot phase estimation with the periodic cost `4 sin²((φ - φ̃)/2)`.
//!
//! With `ρ(φ) = e^{-iφG} ρ e^{iφG}` and a prior `p(φ)` on `(-π, π]`, the
//! operator
//!
//! ```text
//! R = ½ ∫ p(φ) ρ(φ) e^{iφ} dφ,     R_ij = ½ ρ_ij ∫ p(φ) e^{iφ(1 - Λ_ij)} dφ
//! ```
//!
//! fixes the minimal average cost `4(½ - ‖R‖₁)`. The optimal covariant
//! measurement is read off the polar part of `R`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bayes_freq::{hermitian_eigen, CMatrix};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::spectrum::{ProbeState, Spectrum};

/// Tail mass left out when truncating Fourier series.
pub const FOURIER_TAIL: f64 = 1e-14;
/// Hard cap on the number of retained Fourier modes.
pub const MAX_MODES: i64 = 100_000;
/// Allowed decrease of the trace norm per optimizer iteration.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum PhasePrior {
    Flat,
    /// Point masses `(weight, location)`.
    Delta(Vec<(f64, f64)>),
    /// `p_k` for `k ≥ 0`; negative modes follow from `p_{-k} = p_k*`.
    Fourier(BTreeMap<i64, Complex64>),
}

impl PhasePrior {
    pub fn delta(peaks: Vec<(f64, f64)>) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::InvalidPrior("delta prior needs a peak".into()));
        }
        for &(w, x) in &peaks {
            if !(w >= 0.0) || !w.is_finite() || !x.is_finite() {
                return Err(Error::InvalidPrior(format!("bad peak ({w}, {x})")));
            }
        }
        let total: f64 = peaks.iter().map(|p| p.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPrior(format!("peak weights sum to {total}")));
        }
        Ok(PhasePrior::Delta(peaks))
    }

    /// Accepts any mix of signed modes as long as they are consistent.
    pub fn fourier(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (k, p) in coeffs {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::InvalidPrior(format!("p_{k} not finite")));
            }
            let (key, val) = if k < 0 { (-k, p.conj()) } else { (k, p) };
            if let Some(prev) = map.insert(key, val) {
                if (prev - val).norm() > 1e-12 {
                    return Err(Error::InvalidPrior(format!(
                        "p_{key} and p_-{key} are not conjugate"
                    )));
                }
            }
        }
        match map.get(&0) {
            Some(p0) if (p0 - Complex64::new(1.0, 0.0)).norm() <= 1e-12 => {}
            _ => return Err(Error::InvalidPrior("p_0 must equal 1".into())),
        }
        Ok(PhasePrior::Fourier(map))
    }

    /// `p_k = ∫ p(φ) e^{-ikφ} dφ`.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self {
            PhasePrior::Flat => Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0),
            PhasePrior::Delta(peaks) => peaks
                .iter()
                .map(|&(w, x)| Complex64::from_polar(w, -(k as f64) * x))
                .sum(),
            PhasePrior::Fourier(map) => {
                let p = map.get(&k.abs()).copied().unwrap_or_default();
                if k < 0 {
                    p.conj()
                } else {
                    p
                }
            }
        }
    }

    /// `∫ p(φ) e^{iφa} dφ` for real `a`.
    pub fn characteristic(&self, a: f64) -> Complex64 {
        match self {
            PhasePrior::Flat => Complex64::new(sinc(PI * a), 0.0),
            PhasePrior::Delta(peaks) => peaks
                .iter()
                .map(|&(w, x)| Complex64::from_polar(w, a * x))
                .sum(),
            PhasePrior::Fourier(map) => {
                let mut acc = Complex64::new(sinc(PI * a), 0.0);
                for (&k, &p) in map.range(1..) {
                    let kf = k as f64;
                    acc += p * sinc(PI * (kf + a)) + p.conj() * sinc(PI * (a - kf));
                }
                acc
            }
        }
    }
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Fourier modes of a Gaussian of variance `Δ²ω` wrapped after scaling by `t`.
pub fn wrap_gaussian_prior(variance: f64, t: f64) -> Result<PhasePrior> {
    if !(variance > 0.0) || !(t > 0.0) || !variance.is_finite() || !t.is_finite() {
        return Err(Error::InvalidPrior(format!(
            "variance and time must be positive (got {variance}, {t})"
        )));
    }
    let s = t * t * variance;
    let p = |k: i64| (-0.5 * (k * k) as f64 * s).exp();
    let mut coeffs = vec![(0, Complex64::new(1.0, 0.0))];
    let mut k = 1;
    // p is decreasing in k and the tail beyond K is at most p_{K+1} / (1 - e^{-s(2K+3)/2})
    loop {
        let next = p(k + 1);
        let ratio = (-0.5 * s * (2 * k + 3) as f64).exp();
        let tail = 2.0 * next / (1.0 - ratio).max(f64::MIN_POSITIVE);
        coeffs.push((k, Complex64::new(p(k), 0.0)));
        if tail < FOURIER_TAIL || k >= MAX_MODES {
            break;
        }
        k += 1;
    }
    PhasePrior::fourier(coeffs)
}

fn density(probe: &ProbeState<f64>) -> CMatrix {
    let c = probe.amplitudes();
    let n = c.len();
    CMatrix::from_fn(n, n, |i, j| c[i] * c[j].conj())
}

/// Kernel `K_ij = ∫ p(φ) e^{iφ(1 - Λ_ij)} dφ`, so that `R_ij = ½ ρ_ij K_ij`.
pub fn prior_kernel(s: &Spectrum<f64>, prior: &PhasePrior) -> CMatrix {
    let lv = s.levels();
    let n = lv.len();
    CMatrix::from_fn(n, n, |i, j| prior.characteristic(1.0 - (lv[i] - lv[j])))
}

pub fn build_r01(probe: &ProbeState<f64>, s: &Spectrum<f64>, prior: &PhasePrior) -> Result<CMatrix> {
    if probe.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: probe.len(),
        });
    }
    let k = prior_kernel(s, prior);
    Ok(density(probe).component_mul(&k) * Complex64::new(0.5, 0.0))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().sum()
}

#[derive(Clone, Debug)]
pub struct PhaseCost {
    pub cost: f64,
    pub trace_norm: f64,
    /// Outcomes `(φ_k, |Ψ_k>)` of the optimal measurement.
    pub measurement: Vec<(f64, DVector<Complex64>)>,
    /// `W = V U†`, the unitary `Σ_k e^{-iφ_k} |Ψ_k><Ψ_k|`.
    pub unitary: CMatrix,
}

fn polar_unitary(r: &CMatrix) -> (f64, CMatrix) {
    let svd = r.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let tn = svd.singular_values.iter().sum();
    (tn, v_t.adjoint() * u.adjoint())
}

/// Minimal cost and the measurement achieving it.
pub fn phase_cost(r01: &CMatrix) -> PhaseCost {
    let (tn, w) = polar_unitary(r01);
    let (q, t) = w.clone().schur().unpack();
    let measurement = (0..w.nrows())
        .map(|k| (-t[(k, k)].arg(), q.column(k).into_owned()))
        .collect();
    PhaseCost {
        cost: 4.0 * (0.5 - tn),
        trace_norm: tn,
        measurement,
        unitary: w,
    }
}

#[derive(Clone, Debug)]
pub struct PhaseEstimationResult {
    pub cost: f64,
    pub trace_norm: f64,
    pub probe: ProbeState<f64>,
    pub measurement: Vec<(f64, DVector<Complex64>)>,
    pub iterations: usize,
    pub restart_winner: usize,
    pub converged: bool,
    /// Trace norm after each iteration of the winning restart.
    pub history: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct PhaseOptimizerSettings {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PhaseOptimizerSettings {
    fn default() -> Self {
        PhaseOptimizerSettings {
            restarts: 8,
            max_iter: 2000,
            tol: 1e-13,
        }
    }
}

struct Run {
    probe: ProbeState<f64>,
    history: Vec<f64>,
    converged: bool,
}

fn ascend(kernel: &CMatrix, start: ProbeState<f64>, cfg: &PhaseOptimizerSettings) -> Result<Run> {
    let half = Complex64::new(0.5, 0.0);
    let r_of = |p: &ProbeState<f64>| density(p).component_mul(kernel) * half;
    let mut probe = start;
    let (mut best, mut w) = polar_unitary(&r_of(&probe));
    let mut history = vec![best];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        // Re tr(R W) = c† A c with A = ½ (Kᵀ ∘ W)
        let a = kernel.transpose().component_mul(&w) * half;
        let h = (&a + a.adjoint()) * half;
        let (_, vecs) = hermitian_eigen(&h);
        let n = vecs.nrows();
        let next = ProbeState::normalized(vecs.column(n - 1).iter().copied().collect())?;
        let (tn, next_w) = polar_unitary(&r_of(&next));
        if tn < best - MONOTONE_SLACK {
            converged = true;
            break;
        }
        history.push(tn);
        let gain = tn - best;
        probe = next;
        w = next_w;
        best = tn;
        if gain < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        probe,
        history,
        converged,
    })
}

/// Alternating optimisation of probe and measurement, best of `restarts`.
/// Restart 0 starts from the uniform superposition, the rest from Haar-random states.
pub fn optimize_phase_probe(
    s: &Spectrum<f64>,
    prior: &PhasePrior,
    seed: u64,
    cfg: &PhaseOptimizerSettings,
) -> Result<PhaseEstimationResult> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let kernel = prior_kernel(s, prior);
    let n = s.len();
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                ProbeState::uniform(n)
            } else {
                ProbeState::random(n, &mut stream_rng(seed, r as u64))
            };
            ascend(&kernel, start, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let (winner, run) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| {
            if b.1.history.last() > a.1.history.last() {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let pc = phase_cost(&build_r01(&run.probe, s, prior)?);
    Ok(PhaseEstimationResult {
        cost: pc.cost,
        trace_norm: pc.trace_norm,
        probe: run.probe,
        measurement: pc.measurement,
        iterations: run.history.len() - 1,
        restart_winner: winner,
        converged: run.converged,
        history: run.history,
    })
}

/// `2(1 - cos(π/(n+1)))`, the flat-prior optimum of the linear spectrum.
pub fn flat_linear_optimum(n: usize) -> f64 {
    2.0 * (1.0 - (PI / (n as f64 + 1.0)).cos())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyMap {
    /// Interrogation time `2π(n-1)/(W₀Δ)`.
    pub t_opt: f64,
    /// `∂φ/∂ω` at that time.
    pub slope: f64,
    pub phase_cost: f64,
    pub frequency_mse: f64,
}

/// Converts the flat-prior phase optimum of `G = Δ/(n-1) Σ j|j><j|` into a
/// frequency error for a flat frequency window of width `W₀`.
pub fn flat_prior_frequency_map(n: usize, w0: f64, delta: f64) -> Result<FrequencyMap> {
    if n < 2 || !(w0 > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and positive W0, delta (got {n}, {w0}, {delta})"
        )));
    }
    let t_opt = 2.0 * PI * (n - 1) as f64 / (w0 * delta);
    let slope = t_opt * delta / (n - 1) as f64;
    let phase = flat_linear_optimum(n);
    Ok(FrequencyMap {
        t_opt,
        slope,
        phase_cost: phase,
        frequency_mse: phase / (slope * slope),
    })
}
