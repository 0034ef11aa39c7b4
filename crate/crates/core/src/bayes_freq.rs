//! Single-shot Bayesian frequency estimation under a zero-mean Gaussian prior.
//!
//! The probe `|ψ>` evolves as `e^{-iωtG}|ψ>`. Averaging over the prior gives
//!
//! ```text
//! Γ = ∫ p(ω) ρ(ω) dω,    η = ∫ p(ω) ω ρ(ω) dω,
//! ```
//!
//! the optimal estimator observable `L` solves `LΓ + ΓL = 2η`, and the minimal
//! mean squared error is `Δ²ω - tr(ΓL²)`. Everything is computed in the
//! dimensionless variable `τ = t Δω` with unit prior variance unless stated.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream_id, stream_rng};
use crate::spectrum::{ProbeState, Spectrum};

pub type CMatrix = DMatrix<Complex64>;

/// Relative eigenvalue threshold below which `Γ` counts as singular.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Largest `η` weight tolerated on the null space of `Γ`.
pub const NULL_WEIGHT_TOL: f64 = 1e-9;
/// `γ_i + γ_j` below this drops the pair from the QFI sum.
pub const QFI_CUTOFF: f64 = 1e-14;
/// Allowed BMSE increase per optimizer iteration.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPrior {
    variance: f64,
}

impl GaussianPrior {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidPrior(format!(
                "variance must be positive and finite, got {variance}"
            )));
        }
        Ok(GaussianPrior { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `τ = t Δω`.
    pub fn tau(&self, t: f64) -> f64 {
        t * self.variance.sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct EffectiveOperators {
    pub gamma: CMatrix,
    pub eta: CMatrix,
}

fn check_dims(probe: &ProbeState<f64>, s: &Spectrum<f64>) -> Result<()> {
    if probe.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: probe.len(),
        });
    }
    Ok(())
}

fn check_time(x: f64, what: &str) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{what} must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// Gaussian dephasing factors `exp(-t² Δ²ω Λ_ij² / 2)`.
fn dephasing(s: &Spectrum<f64>, t: f64, variance: f64) -> DMatrix<f64> {
    let lv = s.levels();
    let n = lv.len();
    DMatrix::from_fn(n, n, |i, j| {
        let d = lv[i] - lv[j];
        (-0.5 * t * t * variance * d * d).exp()
    })
}

/// `Γ` and `η` at unit prior variance.
pub fn effective_operators(probe: &ProbeState<f64>, s: &Spectrum<f64>, tau: f64) -> Result<EffectiveOperators> {
    effective_operators_with_prior(probe, s, tau, &GaussianPrior { variance: 1.0 })
}

/// `Γ` and `η` for interrogation time `t` and an arbitrary prior variance.
pub fn effective_operators_with_prior(
    probe: &ProbeState<f64>,
    s: &Spectrum<f64>,
    t: f64,
    prior: &GaussianPrior,
) -> Result<EffectiveOperators> {
    check_dims(probe, s)?;
    check_time(t, "interrogation time")?;
    let c = probe.amplitudes();
    let lv = s.levels();
    let n = lv.len();
    let g = dephasing(s, t, prior.variance);
    let gamma = CMatrix::from_fn(n, n, |i, j| c[i] * c[j].conj() * g[(i, j)]);
    let eta = CMatrix::from_fn(n, n, |i, j| {
        let d = lv[i] - lv[j];
        Complex64::new(0.0, -t * prior.variance * d) * gamma[(i, j)]
    });
    Ok(EffectiveOperators { gamma, eta })
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    (values, vectors)
}

/// Solves `LΓ + ΓL = 2η` in the eigenbasis of `Γ`.
pub fn solve_sylvester(ops: &EffectiveOperators) -> Result<CMatrix> {
    let (gam, v) = hermitian_eigen(&ops.gamma);
    let n = gam.len();
    let top = gam.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let null = |x: f64| x < SUPPORT_TOL * top;
    let et = v.adjoint() * &ops.eta * &v;
    let mut lt = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if null(gam[a]) && null(gam[b]) {
                let w = et[(a, b)].norm();
                if w > NULL_WEIGHT_TOL {
                    return Err(Error::SingularSupport { weight: w });
                }
            } else {
                lt[(a, b)] = et[(a, b)] * (2.0 / (gam[a].max(0.0) + gam[b].max(0.0)));
            }
        }
    }
    let l = &v * lt * v.adjoint();
    Ok((&l + l.adjoint()) * Complex64::new(0.5, 0.0))
}

/// `‖LΓ + ΓL - 2η‖_F`.
pub fn sylvester_residual(ops: &EffectiveOperators, l: &CMatrix) -> f64 {
    (l * &ops.gamma + &ops.gamma * l - &ops.eta * Complex64::new(2.0, 0.0)).norm()
}

/// `tr(Γ L²)`, the information gained by the estimator.
pub fn gain(ops: &EffectiveOperators, l: &CMatrix) -> f64 {
    (&ops.gamma * l * l).trace().re
}

/// `1 - tr(Γ L²)` at unit prior variance.
pub fn bmse(ops: &EffectiveOperators, l: &CMatrix) -> f64 {
    1.0 - gain(ops, l)
}

/// Quantum Fisher information of `gamma` for the generator `t · diag(levels)`.
pub fn qfi_effective(gamma: &CMatrix, s: &Spectrum<f64>, t: f64) -> f64 {
    let (gam, v) = hermitian_eigen(gamma);
    let g = DMatrix::from_diagonal(&DVector::from_iterator(
        s.len(),
        s.levels().iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let gt = v.adjoint() * g * &v;
    let n = gam.len();
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sum = gam[i] + gam[j];
            if sum < QFI_CUTOFF {
                continue;
            }
            let d = gam[i] - gam[j];
            f += gt[(i, j)].norm_sqr() * d * d / sum;
        }
    }
    2.0 * t * t * f
}

/// Operator `T` with `BMSE(ψ | L) = 1 + <ψ|T|ψ>` for a fixed estimator `L`:
/// `T_ij = g_ij [ (L²)_ij - 2iτ Λ_ij L_ij ]`.
pub fn iteration_operator(s: &Spectrum<f64>, tau: f64, l: &CMatrix) -> CMatrix {
    let lv = s.levels();
    let n = lv.len();
    let g = dephasing(s, tau, 1.0);
    let l2 = l * l;
    CMatrix::from_fn(n, n, |i, j| {
        let d = lv[i] - lv[j];
        (l2[(i, j)] - Complex64::new(0.0, 2.0 * tau * d) * l[(i, j)]) * g[(i, j)]
    })
}

/// BMSE of `probe` measured with the fixed estimator `L`.
pub fn bmse_given_estimator(probe: &ProbeState<f64>, s: &Spectrum<f64>, tau: f64, l: &CMatrix) -> Result<f64> {
    check_dims(probe, s)?;
    let t = iteration_operator(s, tau, l);
    let c = DVector::from_column_slice(probe.amplitudes());
    Ok(1.0 + (c.adjoint() * t * c)[(0, 0)].re)
}

#[derive(Clone, Debug)]
pub struct FreqEstimationResult {
    pub tau: f64,
    pub bmse: f64,
    pub probe: ProbeState<f64>,
    /// Optimal estimator; its eigenvectors are the measurement, its
    /// eigenvalues the frequency estimates.
    pub estimator: CMatrix,
    pub qfi: f64,
    pub iterations: usize,
    pub restart_winner: usize,
    pub converged: bool,
    /// BMSE after each iteration of the winning restart.
    pub history: Vec<f64>,
}

/// BMSE, estimator and QFI of a given probe.
pub fn evaluate_probe(probe: &ProbeState<f64>, s: &Spectrum<f64>, tau: f64) -> Result<(f64, CMatrix, f64)> {
    let ops = effective_operators(probe, s, tau)?;
    let l = solve_sylvester(&ops)?;
    Ok((bmse(&ops, &l), l, qfi_effective(&ops.gamma, s, tau)))
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            restarts: 8,
            max_iter: 500,
            tol: 1e-10,
        }
    }
}

struct Run {
    probe: ProbeState<f64>,
    bmse: f64,
    estimator: CMatrix,
    history: Vec<f64>,
    converged: bool,
}

fn descend(s: &Spectrum<f64>, tau: f64, start: ProbeState<f64>, cfg: &OptimizerSettings) -> Result<Run> {
    let (mut best, mut l, _) = evaluate_probe(&start, s, tau)?;
    let mut probe = start;
    let mut history = vec![best];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let t = iteration_operator(s, tau, &l);
        let (_, vecs) = hermitian_eigen(&t);
        let next = ProbeState::normalized(vecs.column(0).iter().copied().collect())?;
        let (val, next_l, _) = evaluate_probe(&next, s, tau)?;
        if val > best + MONOTONE_SLACK {
            // numerical noise beat the descent step; keep the last good probe
            converged = true;
            break;
        }
        history.push(val);
        let improvement = best - val;
        probe = next;
        l = next_l;
        best = val;
        if improvement < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        probe,
        bmse: best,
        estimator: l,
        history,
        converged,
    })
}

fn optimize_stream(
    s: &Spectrum<f64>,
    tau: f64,
    seed: u64,
    major: u64,
    cfg: &OptimizerSettings,
) -> Result<FreqEstimationResult> {
    check_time(tau, "tau")?;
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, stream_id(major, r as u64));
            descend(s, tau, ProbeState::random(s.len(), &mut rng), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let (winner, run) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.bmse < a.1.bmse { b } else { a })
        .expect("at least one restart");
    let ops = effective_operators(&run.probe, s, tau)?;
    Ok(FreqEstimationResult {
        tau,
        bmse: run.bmse,
        qfi: qfi_effective(&ops.gamma, s, tau),
        probe: run.probe,
        estimator: run.estimator,
        iterations: run.history.len() - 1,
        restart_winner: winner,
        converged: run.converged,
        history: run.history,
    })
}

/// Iterative probe optimisation, best of `restarts` Haar-random starts.
pub fn optimize_probe(
    s: &Spectrum<f64>,
    tau: f64,
    seed: u64,
    cfg: &OptimizerSettings,
) -> Result<FreqEstimationResult> {
    optimize_stream(s, tau, seed, 0, cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub tau: f64,
    pub bmse: f64,
    pub qfi: f64,
    pub restart_winner: usize,
    pub iters: usize,
}

/// Optimised BMSE over a grid of `τ`; grid point `k` draws from stream `k`.
pub fn bmse_curve(
    s: &Spectrum<f64>,
    tau_grid: &[f64],
    seed: u64,
    cfg: &OptimizerSettings,
) -> Result<Vec<CurvePoint>> {
    tau_grid
        .par_iter()
        .enumerate()
        .map(|(k, &tau)| {
            let r = optimize_stream(s, tau, seed, k as u64, cfg)?;
            Ok(CurvePoint {
                tau,
                bmse: r.bmse,
                qfi: r.qfi,
                restart_winner: r.restart_winner,
                iters: r.iterations,
            })
        })
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(lv: &[f64]) -> Spectrum<f64> {
        Spectrum::from_slice(lv).unwrap()
    }

    fn random_probe(n: usize, seed: u64) -> ProbeState<f64> {
        ProbeState::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn zero_tau_is_pure_and_uninformative() {
        let p = random_probe(3, 1);
        let s = spec(&[0.0, 1.0, 2.5]);
        let ops = effective_operators(&p, &s, 0.0).unwrap();
        assert!(ops.eta.norm() == 0.0);
        let l = solve_sylvester(&ops).unwrap();
        assert!(l.norm() < 1e-15);
        assert!((bmse(&ops, &l) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn long_times_dephase() {
        let p = ProbeState::uniform(3);
        let ops = effective_operators(&p, &spec(&[0.0, 1.0, 2.0]), 40.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((ops.gamma[(i, j)].re - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_level_closed_form() {
        let ops = effective_operators(&ProbeState::uniform(2), &spec(&[0.0, 1.0]), 1.0).unwrap();
        let e = (-0.5f64).exp() / 2.0;
        assert!((ops.gamma[(0, 1)] - Complex64::new(e, 0.0)).norm() < 1e-15);
        // Λ_01 = -1
        assert!((ops.eta[(0, 1)] - Complex64::new(0.0, e)).norm() < 1e-15);
    }

    #[test]
    fn scalar_gamma_sylvester() {
        let n = 4;
        let gamma = CMatrix::identity(n, n) * Complex64::new(0.25, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = ProbeState::<f64>::random(n * n, &mut rng);
        let raw = CMatrix::from_iterator(n, n, a.amplitudes().iter().copied());
        let eta = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
        let ops = EffectiveOperators { gamma, eta: eta.clone() };
        let l = solve_sylvester(&ops).unwrap();
        assert!((l - eta * Complex64::new(4.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn singular_support_detected() {
        let mut gamma = CMatrix::zeros(2, 2);
        gamma[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut eta = CMatrix::zeros(2, 2);
        eta[(1, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            solve_sylvester(&EffectiveOperators { gamma, eta }),
            Err(Error::SingularSupport { .. })
        ));
    }

    #[test]
    fn pure_state_qfi() {
        let p = random_probe(4, 9);
        let s = spec(&[0.0, 0.5, 1.7, 3.0]);
        let ops = effective_operators(&p, &s, 0.0).unwrap();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (c, &x) in p.amplitudes().iter().zip(s.levels()) {
            m1 += c.norm_sqr() * x;
            m2 += c.norm_sqr() * x * x;
        }
        let t = 0.8;
        let want = 4.0 * t * t * (m2 - m1 * m1);
        assert!((qfi_effective(&ops.gamma, &s, t) - want).abs() < 1e-12);
        let flat = CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
        assert!(qfi_effective(&flat, &s, t).abs() < 1e-15);
    }

    #[test]
    fn gain_equals_qfi() {
        let s = spec(&[0.0, 1.0, 1.4, 3.0, 3.3]);
        for seed in 0..5 {
            let p = random_probe(5, seed);
            let tau = 0.3 + seed as f64 * 0.4;
            let (b, _, f) = evaluate_probe(&p, &s, tau).unwrap();
            assert!(((1.0 - b) - f).abs() < 1e-8);
        }
    }

    #[test]
    fn descent_is_monotone() {
        let s = spec(&[0.0, 1.0, 2.0, 3.0]);
        let cfg = OptimizerSettings { restarts: 2, max_iter: 200, tol: 1e-12 };
        let r = optimize_probe(&s, 0.7, 3, &cfg).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0] + MONOTONE_SLACK);
        }
        assert!(r.bmse >= 0.0 && r.bmse <= 1.0);
        assert_eq!(*r.history.last().unwrap(), r.bmse);
    }

    #[test]
    fn curve_is_deterministic() {
        let s = spec(&[0.0, 1.0, 2.0]);
        let cfg = OptimizerSettings { restarts: 2, ..Default::default() };
        let a = bmse_curve(&s, &[0.0, 0.5, 1.0], 17, &cfg).unwrap();
        let b = bmse_curve(&s, &[0.0, 0.5, 1.0], 17, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((a[0].bmse - 1.0).abs() < 1e-15);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
