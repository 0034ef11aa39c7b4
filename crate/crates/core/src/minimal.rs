//! Designs built from a chain of two-level swaps.
//!
//! `R = Σ_m r_m P_m` with `P_0 = I` and `P_m = P_{m-1} · S_m` for swaps `S_m`.
//! Consecutive chain elements differ by one swap, so running the segments in
//! chain order costs one switching operation per used segment.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::design::{ratio_tol, DesignMethod, DesignResult};
use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::schedule::{Segment, SwitchingSchedule};
use crate::simplex::{LinearProgram, Sense};
use crate::spectrum::{Spectrum, TargetVector};
use crate::weights::BistochasticMatrix;

#[derive(Clone, Debug)]
pub struct MinimalDesign<T: Real> {
    /// `r_0 .. r_k`.
    pub weights: Vec<T>,
    /// The swaps `S_1 .. S_k`.
    pub swaps: Vec<(usize, usize)>,
    /// Cumulative chain `P_0 .. P_k`.
    pub chain: Vec<Permutation>,
    pub design: DesignResult<T>,
    /// Index of the last chain element carrying weight.
    pub switch_count: usize,
    /// Index of the winning chain (enumeration index in exhaustive mode).
    pub try_index: usize,
}

impl<T: Real> MinimalDesign<T> {
    /// Segments in chain order, skipping chain elements without weight.
    pub fn schedule(&self, total_time: T) -> Result<SwitchingSchedule<T>> {
        let total: T = self.weights.iter().copied().sum();
        let segments = self
            .weights
            .iter()
            .zip(&self.chain)
            .filter(|(w, _)| **w > T::zero())
            .map(|(&w, p)| Segment {
                fraction: w / total,
                perm: p.clone(),
            })
            .collect();
        SwitchingSchedule::new(segments, total_time)
    }
}

/// All unordered pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn all_swaps(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

fn chain_of(n: usize, swaps: &[(usize, usize)]) -> Vec<Permutation> {
    let mut chain = vec![Permutation::identity(n)];
    for &(a, b) in swaps {
        let next = chain.last().unwrap().then(&Permutation::swap(n, a, b));
        chain.push(next);
    }
    chain
}

/// `k` swaps, all distinct when possible, otherwise no swap repeated back to back.
fn random_swaps<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let pool = all_swaps(n);
    if k <= pool.len() {
        return sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    }
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(k);
    while out.len() < k {
        let s = pool[rng.random_range(0..pool.len())];
        if pool.len() == 1 || out.last() != Some(&s) {
            out.push(s);
        }
    }
    out
}

/// Solves the chain LP in unit-range coordinates. `None` when the chain
/// cannot realise the target with a positive range.
fn solve_chain<T: Real>(
    unit: &[T],
    t: &TargetVector<T>,
    chain: &[Permutation],
) -> Result<Option<(Vec<T>, T)>> {
    let n = unit.len();
    let k1 = chain.len();
    let (lo, hi) = (t.low_index(), t.high_index());
    // column m, row i: λ_{P_m(i)}
    let eff = |i: usize, m: usize| unit[chain[m].apply(i)];
    let mut rows = Vec::with_capacity(n - 1);
    for (i, &ti) in t.ratios().iter().enumerate() {
        if i == lo || i == hi {
            continue;
        }
        rows.push(
            (0..k1)
                .map(|m| eff(i, m) - (T::one() - ti) * eff(lo, m) - ti * eff(hi, m))
                .collect(),
        );
    }
    let mut rhs = vec![T::zero(); rows.len()];
    rows.push(vec![T::one(); k1]);
    rhs.push(T::one());
    let lp = LinearProgram {
        cost: (0..k1).map(|m| eff(hi, m) - eff(lo, m)).collect(),
        rows,
        rhs,
        lower: vec![T::zero(); k1],
        upper: vec![T::one(); k1],
    };
    match lp.solve(Sense::Maximize) {
        Ok(sol) if sol.objective > T::weight_tol() * T::lit(10.0) => Ok(Some((sol.x, sol.objective))),
        Ok(_) | Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn unit_levels<T: Real>(s: &Spectrum<T>) -> Vec<T> {
    let (lo, range) = (s.min(), s.spectral_range());
    s.levels().iter().map(|&x| (x - lo) / range).collect()
}

fn validate<T: Real>(s: &Spectrum<T>, t: &TargetVector<T>, k: usize) -> Result<()> {
    if s.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: t.len(),
        });
    }
    if !(s.spectral_range() > T::zero()) {
        return Err(Error::DegenerateRange);
    }
    if k + 2 < s.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} below n - 2 = {}",
            s.len() - 2
        )));
    }
    Ok(())
}

type Candidate<T> = (usize, Vec<(usize, usize)>, Vec<T>, T);

fn pick_best<T: Real>(found: Vec<Option<Candidate<T>>>) -> Option<Candidate<T>> {
    found
        .into_iter()
        .flatten()
        .fold(None, |best: Option<Candidate<T>>, c| match &best {
            Some(b) if b.3 >= c.3 => best,
            _ => Some(c),
        })
}

fn assemble<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
    (try_index, swaps, mut weights, _): Candidate<T>,
) -> Result<MinimalDesign<T>> {
    let n = s.len();
    let chain = chain_of(n, &swaps);
    weights.iter_mut().for_each(|w| {
        if *w <= T::zero_tol() {
            *w = T::zero();
        }
    });
    let total: T = weights.iter().copied().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for (w, p) in weights.iter().zip(&chain) {
        for j in 0..n {
            m[(j, p.apply(j))] += *w;
        }
    }
    let weights_matrix = BistochasticMatrix::new(m)?;
    let effective = weights_matrix.apply(s)?;
    let dev = effective.target_ratios()?.max_deviation(t);
    if dev > ratio_tol() {
        return Err(Error::Invariant(format!("chain design misses target by {dev}")));
    }
    let switch_count = weights.iter().rposition(|w| *w > T::zero()).unwrap_or(0);
    Ok(MinimalDesign {
        weights,
        swaps,
        chain,
        design: DesignResult {
            achieved_range: effective.spectral_range(),
            weights: weights_matrix,
            effective,
            method: DesignMethod::Minimal,
        },
        switch_count,
        try_index,
    })
}

/// Best of `tries` random chains of `k` swaps; ties go to the earliest try.
pub fn minimal_switch_design<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
    k: usize,
    tries: usize,
    seed: u64,
) -> Result<MinimalDesign<T>> {
    validate(s, t, k)?;
    if tries == 0 {
        return Err(Error::InvalidArgument("tries must be at least 1".into()));
    }
    let n = s.len();
    let unit = unit_levels(s);
    let found = (0..tries)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream_rng(seed, idx as u64);
            let swaps = random_swaps(n, k, &mut rng);
            let chain = chain_of(n, &swaps);
            Ok(solve_chain(&unit, t, &chain)?.map(|(x, obj)| (idx, swaps, x, obj)))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = pick_best(found).ok_or(Error::NoFeasibleChain { k, tries })?;
    assemble(s, t, best)
}

/// Largest `n` accepted by [`minimal_switch_exhaustive`].
pub const EXHAUSTIVE_MAX_N: usize = 4;

/// Tries every chain of `k` swaps without immediate repeats.
pub fn minimal_switch_exhaustive<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
    k: usize,
) -> Result<MinimalDesign<T>> {
    validate(s, t, k)?;
    let n = s.len();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "exhaustive chain search limited to n <= {EXHAUSTIVE_MAX_N}"
        )));
    }
    let pool = all_swaps(n);
    let mut chains: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for _ in 0..k {
        chains = chains
            .into_iter()
            .flat_map(|c| {
                pool.iter()
                    .filter(|s| c.last() != Some(s))
                    .map(|&s| {
                        let mut next = c.clone();
                        next.push(s);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let unit = unit_levels(s);
    let found = chains
        .into_par_iter()
        .enumerate()
        .map(|(idx, swaps)| {
            let chain = chain_of(n, &swaps);
            Ok(solve_chain(&unit, t, &chain)?.map(|(x, obj)| (idx, swaps, x, obj)))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = pick_best(found).ok_or(Error::NoFeasibleChain { k, tries: 0 })?;
    assemble(s, t, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(levels: &[f64]) -> Spectrum<f64> {
        Spectrum::from_slice(levels).unwrap()
    }

    #[test]
    fn own_ratios_need_no_switch() {
        let sp = s(&[0.0, 0.7, 2.0, 3.0]);
        let d = minimal_switch_design(&sp, &sp.target_ratios().unwrap(), 2, 4, 1).unwrap();
        assert!((d.weights[0] - 1.0).abs() < 1e-9);
        assert_eq!(d.switch_count, 0);
        assert!((d.design.achieved_range - 3.0).abs() < 1e-9);
    }

    #[test]
    fn single_swap_example_matches_enumeration() {
        let sp = s(&[0.0, 1.0, 2.0]);
        let tv = TargetVector::new(vec![0.0, 1.0, 1.0]).unwrap();
        // by hand: only swap (1,2) works, with r = (1/2, 1/2) and range 3/2
        let d = minimal_switch_exhaustive(&sp, &tv, 1).unwrap();
        assert_eq!(d.swaps, vec![(1, 2)]);
        assert!((d.design.achieved_range - 1.5).abs() < 1e-9);
        let got = d.design.weights.apply(&sp).unwrap().target_ratios().unwrap();
        assert!(got.max_deviation(&tv) < 1e-7);

        let r = minimal_switch_design(&sp, &tv, 1, 16, 5).unwrap();
        assert!((r.design.achieved_range - 1.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_chain_reported() {
        // without a swap the order of two levels cannot be reversed
        let d = minimal_switch_design(&s(&[0.0, 1.0]), &TargetVector::new(vec![1.0, 0.0]).unwrap(), 0, 3, 0);
        assert!(matches!(d, Err(Error::NoFeasibleChain { k: 0, tries: 3 })));
        let d = minimal_switch_design(&s(&[0.0, 1.0]), &TargetVector::new(vec![1.0, 0.0]).unwrap(), 1, 1, 0).unwrap();
        assert_eq!(d.swaps, vec![(0, 1)]);
        assert!((d.design.achieved_range - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chain_length_bound() {
        let tv = TargetVector::new(vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(matches!(
            minimal_switch_design(&s(&[0.0, 1.0, 2.0, 3.0]), &tv, 1, 3, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let sp = s(&[0.0, 0.3, 1.1, 2.0, 2.6]);
        let tv = TargetVector::new(vec![0.0, 0.6, 0.2, 1.0, 0.9]).unwrap();
        let a = minimal_switch_design(&sp, &tv, 6, 32, 9).unwrap();
        let b = minimal_switch_design(&sp, &tv, 6, 32, 9).unwrap();
        assert_eq!(a.swaps, b.swaps);
        assert_eq!(a.weights, b.weights);
        let sched = a.schedule(1.0).unwrap();
        let diff = sched.weights().unwrap().entries() - a.design.weights.entries();
        assert!(diff.amax() < 1e-12);
    }

    #[test]
    fn chain_is_cumulative() {
        let c = chain_of(3, &[(0, 1), (1, 2)]);
        assert_eq!(c[1], Permutation::swap(3, 0, 1));
        assert_eq!(c[2], Permutation::swap(3, 0, 1).then(&Permutation::swap(3, 1, 2)));
    }
}
