//! Library results against independent brute-force computations.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use spectralforge::bayes_freq::{
    bmse_given_estimator, effective_operators, effective_operators_with_prior, evaluate_probe, optimize_probe,
    GaussianPrior, OptimizerSettings,
};
use spectralforge::bayes_phase::{
    build_r01, phase_cost, prior_kernel, trace_norm, wrap_gaussian_prior, PhasePrior,
};
use spectralforge::birkhoff::{birkhoff_decompose, build_schedule};
use spectralforge::rng::stream_rng;
use spectralforge::schedule::{free_evolution, simulate_schedule};
use spectralforge::weights::general_control_weights;
use spectralforge::{BistochasticMatrix, ProbeState, Spectrum};

const OMEGA_CUT: f64 = 12.0;
const PANELS: usize = 6000;

fn evolved(probe: &ProbeState, s: &Spectrum, omega: f64, t: f64) -> DVector<Complex64> {
    DVector::from_iterator(
        s.len(),
        probe
            .amplitudes()
            .iter()
            .zip(s.levels())
            .map(|(c, &l)| c * Complex64::from_polar(1.0, -omega * t * l)),
    )
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn gamma_and_eta_match_prior_quadrature() {
    let mut rng = stream_rng(11, 0);
    for n in 2..=5 {
        let s = random_spectrum(n, &mut rng);
        let probe = ProbeState::random(n, &mut rng);
        for &(t, v) in &[(0.3, 1.0), (0.9, 0.5), (1.7, 2.0)] {
            let ops = effective_operators_with_prior(&probe, &s, t, &GaussianPrior::new(v).unwrap()).unwrap();
            let sd = v.sqrt();
            let entry = |i: usize, j: usize, moment: bool| {
                trapezoid(
                    |w| {
                        let psi = evolved(&probe, &s, w, t);
                        let x = psi[i] * psi[j].conj() * gaussian_pdf(w, v);
                        if moment { x * w } else { x }
                    },
                    -OMEGA_CUT * sd,
                    OMEGA_CUT * sd,
                    PANELS,
                )
            };
            let gamma = DMatrix::from_fn(n, n, |i, j| entry(i, j, false));
            let eta = DMatrix::from_fn(n, n, |i, j| entry(i, j, true));
            assert!(max_diff(&gamma, &ops.gamma) < 1e-10, "gamma n={n} t={t}");
            assert!(max_diff(&eta, &ops.eta) < 1e-10, "eta n={n} t={t}");
        }
    }
}

fn brute_bmse(probe: &ProbeState, s: &Spectrum, tau: f64, l: &DMatrix<Complex64>) -> f64 {
    let n = s.len();
    trapezoid(
        |w| {
            let psi = evolved(probe, s, w, tau);
            let shifted = l - DMatrix::<Complex64>::identity(n, n) * Complex64::new(w, 0.0);
            let phi = &shifted * &psi;
            Complex64::new(phi.norm_squared() * gaussian_pdf(w, 1.0), 0.0)
        },
        -OMEGA_CUT,
        OMEGA_CUT,
        PANELS,
    )
    .re
}

#[test]
fn bmse_matches_brute_force_for_optimal_and_arbitrary_estimators() {
    let mut rng = stream_rng(12, 0);
    for n in 2..=5 {
        let s = random_spectrum(n, &mut rng);
        let probe = ProbeState::random(n, &mut rng);
        let tau = 0.2 + 0.3 * n as f64;
        let (b, l, _) = evaluate_probe(&probe, &s, tau).unwrap();
        assert!((b - brute_bmse(&probe, &s, tau, &l)).abs() < 1e-10);
        assert!((bmse_given_estimator(&probe, &s, tau, &l).unwrap() - b).abs() < 1e-10);

        let u = haar_unitary(n, &mut rng);
        let d = DMatrix::from_diagonal(&DVector::from_fn(n, |k, _| Complex64::new(k as f64 - 1.0, 0.0)));
        let arbitrary = &u * d * u.adjoint();
        let arbitrary = (&arbitrary + arbitrary.adjoint()) * Complex64::new(0.5, 0.0);
        let lib = bmse_given_estimator(&probe, &s, tau, &arbitrary).unwrap();
        let brute = brute_bmse(&probe, &s, tau, &arbitrary);
        assert!((lib - brute).abs() < 1e-10, "n={n}: {lib} vs {brute}");
        // the Sylvester solution is the optimal estimator for this probe
        assert!(lib >= b - 1e-12);
    }
}

#[test]
fn qubit_optimum_is_the_balanced_superposition() {
    let s = Spectrum::from_slice(&[0.0, 1.0]).unwrap();
    let cfg = OptimizerSettings::default();
    for &tau in &[0.4f64, 1.0, 1.6] {
        let closed = 1.0 - tau * tau * (-tau * tau).exp();
        let mut best = f64::INFINITY;
        for k in 1..200 {
            let th = PI / 2.0 * k as f64 / 200.0;
            let probe = ProbeState::new(vec![Complex64::new(th.cos(), 0.0), Complex64::new(th.sin(), 0.0)]).unwrap();
            best = best.min(evaluate_probe(&probe, &s, tau).unwrap().0);
        }
        assert!(best >= closed - 1e-12);
        assert!(best - closed < 1e-6);
        let opt = optimize_probe(&s, tau, 5, &cfg).unwrap();
        assert!((opt.bmse - closed).abs() < 1e-8, "tau={tau}: {} vs {closed}", opt.bmse);
    }
}

#[test]
fn unit_prior_operators_agree_with_the_prior_form() {
    let mut rng = stream_rng(13, 0);
    let s = random_spectrum(4, &mut rng);
    let probe = ProbeState::random(4, &mut rng);
    let a = effective_operators(&probe, &s, 0.8).unwrap();
    let b = effective_operators_with_prior(&probe, &s, 0.8, &GaussianPrior::new(1.0).unwrap()).unwrap();
    assert!(max_diff(&a.gamma, &b.gamma) < 1e-15);
    assert!(max_diff(&a.eta, &b.eta) < 1e-15);
}

#[test]
fn wrapped_gaussian_characteristic_matches_density_quadrature() {
    for &(v, t) in &[(1.0, 0.5), (1.0, 1.3), (0.3, 4.0)] {
        let prior = wrap_gaussian_prior(v, t).unwrap();
        let s2 = t * t * v;
        let density = |phi: f64| {
            (-40..=40).map(|m| gaussian_pdf(phi + 2.0 * PI * m as f64, s2)).sum::<f64>()
        };
        for &a in &[0.0, 0.37, 1.0, -1.5, 2.25] {
            let q = simpson(|phi| Complex64::from_polar(density(phi), a * phi), -PI, PI, 4000);
            let lib = prior.characteristic(a);
            assert!((q - lib).norm() < 1e-9, "v={v} t={t} a={a}: {q} vs {lib}");
        }
    }
}

#[test]
fn integer_spectrum_trace_norm_counts_unit_gaps() {
    let mut rng = stream_rng(14, 0);
    let spectra: [&[f64]; 4] = [&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 3.0, 5.0], &[0.0, 1.0, 4.0], &[3.0, 0.0, 1.0, 7.0, 2.0]];
    for lv in spectra {
        let s = Spectrum::from_slice(lv).unwrap();
        let probe = ProbeState::random(lv.len(), &mut rng);
        let r = build_r01(&probe, &s, &PhasePrior::Flat).unwrap();
        let c = probe.amplitudes();
        let mut oracle = 0.0;
        for i in 0..lv.len() {
            for j in 0..lv.len() {
                if (lv[i] - lv[j] - 1.0).abs() < 1e-12 {
                    oracle += 0.5 * c[i].norm() * c[j].norm();
                }
            }
        }
        assert!((trace_norm(&r) - oracle).abs() < 1e-10, "{lv:?}");
        let pc = phase_cost(&r);
        assert!((pc.cost - 4.0 * (0.5 - oracle)).abs() < 1e-10);
    }
}

#[test]
fn delta_prior_fourier_and_direct_forms_agree_on_integer_spectra() {
    let peaks = vec![(0.5, -1.1), (0.3, 0.4), (0.2, 2.0)];
    let direct = PhasePrior::delta(peaks.clone()).unwrap();
    let mut coeffs = BTreeMap::new();
    for k in 0..=12i64 {
        let p: Complex64 = peaks.iter().map(|&(w, x)| Complex64::from_polar(w, -(k as f64) * x)).sum();
        coeffs.insert(k, p);
    }
    let fourier = PhasePrior::fourier(coeffs).unwrap();
    for lv in [vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0, 6.0], vec![2.0, 0.0, 5.0, 1.0, 4.0]] {
        let s = Spectrum::new(lv).unwrap();
        let a = prior_kernel(&s, &direct);
        let b = prior_kernel(&s, &fourier);
        assert!(max_diff(&a, &b) < 1e-10);
    }
}

#[test]
fn measurement_attains_the_trace_norm() {
    let mut rng = stream_rng(15, 0);
    for n in 2..=5 {
        let s = random_spectrum(n, &mut rng);
        let probe = ProbeState::random(n, &mut rng);
        let r = build_r01(&probe, &s, &wrap_gaussian_prior(1.0, 0.7).unwrap()).unwrap();
        let pc = phase_cost(&r);
        // Re Σ_k e^{-iφ_k} <Ψ_k|R|Ψ_k> is the trace norm for the optimal outcomes
        let achieved: f64 = pc
            .measurement
            .iter()
            .map(|(phi, v)| (Complex64::from_polar(1.0, -phi) * (v.adjoint() * &r * v)[(0, 0)]).re)
            .sum();
        assert!((achieved - pc.trace_norm).abs() < 1e-10);
        let basis = DMatrix::from_columns(&pc.measurement.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
        let dev = (basis.adjoint() * &basis - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-10);
    }
}

#[test]
fn compiled_schedule_reproduces_effective_phases() {
    let mut rng = stream_rng(16, 0);
    for n in 2..=6 {
        for _ in 0..10 {
            let r = random_bistochastic(n, &mut rng);
            let s = random_spectrum(n, &mut rng);
            let d = birkhoff_decompose(&r).unwrap();
            let sched = build_schedule(&d, 2.5).unwrap();
            let back = sched.weights().unwrap();
            assert!((back.entries() - r.entries()).amax() < 1e-10);
            let eff = r.apply(&s).unwrap();
            let probe = ProbeState::random(n, &mut rng);
            for &w in &[0.3, -1.2] {
                let a = simulate_schedule(&s, &sched, w, &probe).unwrap();
                let b = free_evolution(&eff, w, 2.5, &probe).unwrap();
                for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                    assert!((x - y).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn general_control_weights_are_time_averaged_transition_probabilities() {
    let mut rng = stream_rng(17, 0);
    for n in 2..=5 {
        let us: Vec<_> = (0..3).map(|_| haar_unitary(n, &mut rng)).collect();
        let ds = [0.2, 0.5, 1.3];
        let p = general_control_weights(&us, &ds).unwrap();
        let total: f64 = ds.iter().sum();
        let oracle = DMatrix::from_fn(n, n, |j, m| {
            us.iter().zip(&ds).map(|(u, d)| d / total * u[(j, m)].norm_sqr()).sum::<f64>()
        });
        assert!((p.entries() - oracle).amax() < 1e-12);
        assert!(p.sum_deviation() < 1e-12);
        let perm = random_permutation(n, &mut rng);
        let pm = DMatrix::from_fn(n, n, |j, m| {
            Complex64::new(if perm.apply(j) == m { 1.0 } else { 0.0 }, 0.0)
        });
        let single = general_control_weights(&[pm], &[1.0]).unwrap();
        assert_eq!(single, BistochasticMatrix::from_permutation(&perm));
    }
}
