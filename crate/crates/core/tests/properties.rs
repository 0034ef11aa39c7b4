mod common;

use common::*;
use proptest::prelude::*;
use spectralforge::bayes_freq::{bmse, effective_operators, effective_operators_with_prior, solve_sylvester, sylvester_residual, GaussianPrior};
use spectralforge::bayes_phase::{build_r01, phase_cost, wrap_gaussian_prior};
use spectralforge::birkhoff::{birkhoff_decompose, build_schedule, max_terms, max_transpositions};
use spectralforge::design::{analytic_design, lp_max_range_design, lp_standard_form_design, ratio_tol};
use spectralforge::minimal::minimal_switch_design;
use spectralforge::rng::stream_rng;
use spectralforge::ProbeState;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lp_design_hits_target_within_reduction_bounds(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = stream_rng(seed, 0);
        let s = random_spectrum(n, &mut rng);
        prop_assume!(s.spectral_range() > 1e-3);
        let t = random_target(n, &mut rng);
        let d = lp_max_range_design(&s, &t).unwrap();
        let got = d.effective.target_ratios().unwrap();
        prop_assert!(got.max_deviation(&t) <= ratio_tol::<f64>());
        let range = s.spectral_range();
        prop_assert!(d.achieved_range >= range / (n - 1) as f64 - 1e-8);
        prop_assert!(d.achieved_range <= range + 1e-9);
        prop_assert!((d.effective.sum() - s.sum()).abs() < 1e-9 * (1.0 + s.sum().abs()));
    }

    #[test]
    fn lp_forms_agree_and_bound_the_analytic_design(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = stream_rng(seed, 1);
        let s = random_spectrum(n, &mut rng);
        prop_assume!(s.spectral_range() > 1e-3);
        let t = random_target(n, &mut rng);
        let a = lp_max_range_design(&s, &t).unwrap();
        let b = lp_standard_form_design(&s, &t).unwrap();
        prop_assert!((a.achieved_range - b.achieved_range).abs() < 1e-7);
        if let Ok(c) = analytic_design(&s, &t) {
            prop_assert!(c.achieved_range <= a.achieved_range + 1e-8);
            prop_assert!(c.effective.target_ratios().unwrap().max_deviation(&t) <= ratio_tol::<f64>());
        }
    }

    #[test]
    fn birkhoff_respects_term_and_swap_bounds(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = stream_rng(seed, 2);
        let r = random_bistochastic(n, &mut rng);
        let d = birkhoff_decompose(&r).unwrap();
        prop_assert!(d.terms.len() <= max_terms(n));
        prop_assert!(d.residual(&r) <= 1e-10);
        prop_assert!(d.terms.iter().all(|t| t.weight > 0.0));
        let sched = build_schedule(&d, 1.0).unwrap();
        prop_assert!(sched.transposition_count() <= max_transpositions(n));
        let fr: Vec<f64> = sched.segments().iter().map(|s| s.fraction).collect();
        prop_assert!(fr.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn permutation_algebra(seed in any::<u64>(), n in 1usize..=9) {
        let mut rng = stream_rng(seed, 3);
        let p = random_permutation(n, &mut rng);
        let q = random_permutation(n, &mut rng);
        prop_assert!(p.then(&p.inverse()).is_identity());
        let pq = p.then(&q);
        for j in 0..n {
            prop_assert_eq!(pq.apply(j), q.apply(p.apply(j)));
        }
        let swaps = p.transpositions();
        prop_assert!(swaps.len() < n.max(1));
    }

    #[test]
    fn variance_rescaling_is_a_time_rescaling(seed in any::<u64>(), n in 2usize..=5, t in 0.05f64..2.0, v in 0.1f64..4.0) {
        let mut rng = stream_rng(seed, 4);
        let s = random_spectrum(n, &mut rng);
        let probe = ProbeState::random(n, &mut rng);
        let prior = GaussianPrior::new(v).unwrap();
        let general = effective_operators_with_prior(&probe, &s, t, &prior).unwrap();
        let unit = effective_operators(&probe, &s, prior.tau(t)).unwrap();
        let lg = solve_sylvester(&general);
        let lu = solve_sylvester(&unit);
        prop_assume!(lg.is_ok() && lu.is_ok());
        let (lg, lu) = (lg.unwrap(), lu.unwrap());
        let gain_general = (&general.gamma * &lg * &lg).trace().re;
        prop_assert!(((v - gain_general) - v * bmse(&unit, &lu)).abs() < 1e-10 * v.max(1.0));
        prop_assert!(sylvester_residual(&unit, &lu) < 1e-10);
    }

    #[test]
    fn phase_cost_is_within_its_range(seed in any::<u64>(), n in 2usize..=6, t in 0.1f64..3.0) {
        let mut rng = stream_rng(seed, 5);
        let s = random_spectrum(n, &mut rng);
        let probe = ProbeState::random(n, &mut rng);
        let r = build_r01(&probe, &s, &wrap_gaussian_prior(1.0, t).unwrap()).unwrap();
        let pc = phase_cost(&r);
        prop_assert!(pc.trace_norm <= 0.5 + 1e-12);
        prop_assert!(pc.cost >= -1e-12 && pc.cost <= 2.0 + 1e-12);
    }

    #[test]
    fn minimal_switching_hits_its_target(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = stream_rng(seed, 6);
        let s = random_spectrum(n, &mut rng);
        prop_assume!(s.spectral_range() > 1e-2);
        let t = random_target(n, &mut rng);
        let k = n * n;
        if let Ok(m) = minimal_switch_design(&s, &t, k, 4, seed) {
            let got = m.design.effective.target_ratios().unwrap();
            prop_assert!(got.max_deviation(&t) <= ratio_tol::<f64>());
            prop_assert_eq!(m.swaps.len(), k);
            prop_assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
