//! Synthesis of bi-stochastic weights that realise a target ratio vector.
//!
//! Weights are parametrised as `R = J/n + ε`. Requiring effective level `i` to
//! sit at ratio `t_i` between the bottom level `lo` and the top level `hi`
//! gives the homogeneous rows
//!
//! ```text
//! Σ_j λ_j [ ε_ij - (1 - t_i) ε_lo,j - t_i ε_hi,j ] = 0      (i ∉ {lo, hi})
//! Σ_j ε_ij = 0,   Σ_i ε_ij = 0,   -1/n ≤ ε_ij ≤ (n-1)/n
//! ```
//!
//! and the effective range is the linear functional
//! `f·ε = Σ_j λ_j (ε_hi,j - ε_lo,j)`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream_id, stream_rng};
use crate::scalar::Real;
use crate::simplex::{LinearProgram, Sense};
use crate::spectrum::{Spectrum, TargetVector};
use crate::weights::BistochasticMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignMethod {
    Analytic,
    Lp,
    Minimal,
}

impl DesignMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignMethod::Analytic => "analytic",
            DesignMethod::Lp => "lp",
            DesignMethod::Minimal => "minimal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DesignResult<T: Real> {
    pub weights: BistochasticMatrix<T>,
    pub effective: Spectrum<T>,
    pub achieved_range: T,
    pub method: DesignMethod,
}

/// Tolerance on reproduced target ratios.
pub fn ratio_tol<T: Real>() -> T {
    T::weight_tol() * T::lit(100.0)
}

fn check_inputs<T: Real>(s: &Spectrum<T>, t: &TargetVector<T>) -> Result<()> {
    if s.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: t.len(),
        });
    }
    if !(s.spectral_range() > T::zero()) {
        return Err(Error::DegenerateRange);
    }
    Ok(())
}

/// Spectrum rescaled to `[0, 1]`; the design constraints are affine invariant.
fn unit_levels<T: Real>(s: &Spectrum<T>) -> Vec<T> {
    let lo = s.min();
    let range = s.spectral_range();
    s.levels().iter().map(|&x| (x - lo) / range).collect()
}

/// The range-maximising program over `v = vec(ε)` (row-major).
#[derive(Clone, Debug)]
pub struct LpProblem<T> {
    pub n: usize,
    pub low_index: usize,
    pub high_index: usize,
    /// `f` with `f·v = Δ_eff`.
    pub cost: Vec<T>,
    /// `n - 2` ratio rows followed by `2n - 1` independent sum rows.
    pub equality_rows: Vec<Vec<T>>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> LpProblem<T> {
    pub fn new(s: &Spectrum<T>, t: &TargetVector<T>) -> Result<Self> {
        check_inputs(s, t)?;
        Ok(Self::from_levels(s.levels(), t))
    }

    fn from_levels(levels: &[T], t: &TargetVector<T>) -> Self {
        let n = levels.len();
        let (lo, hi) = (t.low_index(), t.high_index());
        let mut rows = ratio_rows(levels, t);
        rows.extend(sum_rows(n, false));
        let mut cost = vec![T::zero(); n * n];
        for (j, &lam) in levels.iter().enumerate() {
            cost[hi * n + j] += lam;
            cost[lo * n + j] -= lam;
        }
        let nf = T::from_usize_lossy(n);
        LpProblem {
            n,
            low_index: lo,
            high_index: hi,
            cost,
            equality_rows: rows,
            lower: vec![-T::one() / nf; n * n],
            upper: vec![(nf - T::one()) / nf; n * n],
        }
    }

    pub fn to_linear_program(&self) -> LinearProgram<T> {
        LinearProgram {
            cost: self.cost.clone(),
            rows: self.equality_rows.clone(),
            rhs: vec![T::zero(); self.equality_rows.len()],
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }
}

fn ratio_rows<T: Real>(levels: &[T], t: &TargetVector<T>) -> Vec<Vec<T>> {
    let n = levels.len();
    let (lo, hi) = (t.low_index(), t.high_index());
    let mut rows = Vec::with_capacity(n.saturating_sub(2));
    for (i, &ti) in t.ratios().iter().enumerate() {
        if i == lo || i == hi {
            continue;
        }
        let mut row = vec![T::zero(); n * n];
        for (j, &lam) in levels.iter().enumerate() {
            row[i * n + j] += lam;
            row[lo * n + j] -= (T::one() - ti) * lam;
            row[hi * n + j] -= ti * lam;
        }
        rows.push(row);
    }
    rows
}

/// Row sums, then column sums; the last column sum is implied unless `all`.
fn sum_rows<T: Real>(n: usize, all: bool) -> Vec<Vec<T>> {
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = vec![T::zero(); n * n];
        for j in 0..n {
            row[i * n + j] = T::one();
        }
        rows.push(row);
    }
    let cols = if all { n } else { n - 1 };
    for j in 0..cols {
        let mut row = vec![T::zero(); n * n];
        for i in 0..n {
            row[i * n + j] = T::one();
        }
        rows.push(row);
    }
    rows
}

fn finish<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
    weights: DMatrix<T>,
    method: DesignMethod,
) -> Result<DesignResult<T>> {
    let weights = BistochasticMatrix::new(weights)
        .map_err(|e| Error::Invariant(format!("designed weights invalid: {e}")))?;
    let effective = weights.apply(s)?;
    let achieved_range = effective.spectral_range();
    if !(achieved_range > s.spectral_range() * T::weight_tol()) {
        return Err(Error::Infeasible(format!(
            "design collapsed the spectrum (effective range {achieved_range})"
        )));
    }
    let got = effective.target_ratios()?;
    let dev = got.max_deviation(t);
    if dev > ratio_tol() {
        return Err(Error::Invariant(format!(
            "designed ratios miss the target by {dev}"
        )));
    }
    Ok(DesignResult {
        weights,
        effective,
        achieved_range,
        method,
    })
}

fn weights_from_epsilon<T: Real>(n: usize, eps: &[T], scale: T) -> DMatrix<T> {
    let base = T::one() / T::from_usize_lossy(n);
    DMatrix::from_fn(n, n, |i, j| {
        (base + scale * eps[i * n + j]).max(T::zero()).min(T::one())
    })
}

/// Maximises the effective range with the bounded simplex.
pub fn lp_max_range_design<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
) -> Result<DesignResult<T>> {
    check_inputs(s, t)?;
    let problem = LpProblem::from_levels(&unit_levels(s), t);
    let sol = problem
        .to_linear_program()
        .solve(Sense::Maximize)
        .map_err(|e| match e {
            Error::Infeasible(msg) => Error::Infeasible(format!(
                "{msg} (n = {}, ratios {:?})",
                s.len(),
                t.ratios()
            )),
            other => other,
        })?;
    finish(s, t, weights_from_epsilon(s.len(), &sol.x, T::one()), DesignMethod::Lp)
}

/// Same optimum via the inequality-doubled standard form over `R ≥ 0`:
/// `max f·R  s.t.  [A; -A] R ≤ [b; -b]`.
pub fn lp_standard_form_design<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
) -> Result<DesignResult<T>> {
    check_inputs(s, t)?;
    let n = s.len();
    let levels = unit_levels(s);
    let base = LpProblem::from_levels(&levels, t);
    let n_ratio = base.equality_rows.len() - (2 * n - 1);
    let mut b = vec![T::zero(); n_ratio];
    b.extend(std::iter::repeat_n(T::one(), 2 * n - 1));

    let m = base.equality_rows.len();
    let nv = n * n;
    let total = nv + 2 * m;
    let mut rows = Vec::with_capacity(2 * m);
    let mut rhs = Vec::with_capacity(2 * m);
    for (k, sign) in [T::one(), -T::one()].into_iter().enumerate() {
        for (i, row) in base.equality_rows.iter().enumerate() {
            let mut r: Vec<T> = row.iter().map(|&a| a * sign).collect();
            r.extend(std::iter::repeat_n(T::zero(), 2 * m));
            r[nv + k * m + i] = T::one();
            rows.push(r);
            rhs.push(b[i] * sign);
        }
    }
    let mut cost = base.cost.clone();
    cost.extend(std::iter::repeat_n(T::zero(), 2 * m));
    let lp = LinearProgram {
        cost,
        rows,
        rhs,
        lower: vec![T::zero(); total],
        upper: vec![T::infinity(); total],
    };
    let sol = lp.solve(Sense::Maximize)?;
    let w = DMatrix::from_fn(n, n, |i, j| sol.x[i * n + j].max(T::zero()).min(T::one()));
    finish(s, t, w, DesignMethod::Lp)
}

/// Nullspace direction of the homogeneous system, with its admissible scale.
#[derive(Clone, Debug)]
pub struct AnalyticDirection<T> {
    pub n: usize,
    /// `vec(ε)`, row-major.
    pub epsilon: Vec<T>,
    /// Largest factor keeping every `1/n + s ε_ij` inside `[0, 1]`.
    pub max_scale: T,
}

impl<T: Real> AnalyticDirection<T> {
    pub fn weights(&self, scale: T) -> Result<BistochasticMatrix<T>> {
        if scale < T::zero() || scale > self.max_scale * (T::one() + T::weight_tol()) {
            return Err(Error::InvalidArgument(format!(
                "scale {scale} outside [0, {}]",
                self.max_scale
            )));
        }
        BistochasticMatrix::new(weights_from_epsilon(self.n, &self.epsilon, scale))
    }
}

/// Projects the range functional onto the nullspace of the constraint rows.
///
/// The projection is the nullspace element of steepest range ascent, so its
/// effective range is positive whenever any nullspace element has one.
pub fn analytic_direction<T: Real>(
    s: &Spectrum<T>,
    t: &TargetVector<T>,
) -> Result<AnalyticDirection<T>> {
    check_inputs(s, t)?;
    let n = s.len();
    let levels = unit_levels(s);
    let mut rows = ratio_rows(&levels, t);
    rows.extend(sum_rows(n, true));
    let basis = nullspace(&rows, n * n);
    let cost = LpProblem::from_levels(&levels, t).cost;

    let mut eps = vec![T::zero(); n * n];
    for b in &basis {
        let c: T = b.iter().zip(&cost).map(|(x, y)| *x * *y).sum();
        for (e, &x) in eps.iter_mut().zip(b) {
            *e += c * x;
        }
    }
    let gain: T = eps.iter().zip(&cost).map(|(x, y)| *x * *y).sum();
    let fnorm: T = cost.iter().map(|x| *x * *x).sum();
    if !(gain > fnorm * T::pivot_tol()) {
        return Err(Error::NoDirection);
    }
    let nf = T::from_usize_lossy(n);
    let (lo, hi) = (T::one() / nf, (nf - T::one()) / nf);
    let mut max_scale = T::infinity();
    for &e in &eps {
        if e > T::zero() {
            max_scale = max_scale.min(hi / e);
        } else if e < T::zero() {
            max_scale = max_scale.min(lo / -e);
        }
    }
    Ok(AnalyticDirection {
        n,
        epsilon: eps,
        max_scale,
    })
}

/// Analytic construction: nullspace direction scaled to the edge of the box.
pub fn analytic_design<T: Real>(s: &Spectrum<T>, t: &TargetVector<T>) -> Result<DesignResult<T>> {
    let dir = analytic_direction(s, t)?;
    let w = weights_from_epsilon(dir.n, &dir.epsilon, dir.max_scale);
    finish(s, t, w, DesignMethod::Analytic)
}

/// Orthonormal nullspace basis by Gauss-Jordan elimination with partial pivoting.
pub fn nullspace<T: Real>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let scale = a
        .iter()
        .flatten()
        .fold(T::zero(), |m, x| m.max(x.abs()))
        .max(T::one());
    let tol = T::pivot_tol() * scale * T::from_usize_lossy(ncols.max(1));
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let (best, mag) = (r..a.len())
            .map(|i| (i, a[i][c].abs()))
            .fold((r, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != T::zero() {
                    for (v, &pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis: Vec<Vec<T>> = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![T::zero(); ncols];
        v[f] = T::one();
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = -row[f];
        }
        // modified Gram-Schmidt, two passes
        for _ in 0..2 {
            for b in &basis {
                let d: T = v.iter().zip(b).map(|(x, y)| *x * *y).sum();
                for (x, &y) in v.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if norm > tol {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// `Δ_m = mean(λ_m..λ_{n-1}) - mean(λ_0..λ_{m-1})` on the ascending spectrum.
pub fn edge_range<T: Real>(s: &Spectrum<T>, m: usize) -> Result<T> {
    let n = s.len();
    if m == 0 || m >= n {
        return Err(Error::IndexOutOfRange { m, n });
    }
    let c = s.canonical();
    let lv = c.levels();
    let low: T = lv[..m].iter().copied().sum::<T>() / T::from_usize_lossy(m);
    let high: T = lv[m..].iter().copied().sum::<T>() / T::from_usize_lossy(n - m);
    Ok(high - low)
}

/// `(min_m Δ_m, argmin)`, ties resolved toward the smaller `m`.
pub fn min_edge_range<T: Real>(s: &Spectrum<T>) -> (T, usize) {
    let c = s.canonical();
    let lv = c.levels();
    let n = lv.len();
    let total: T = lv.iter().copied().sum();
    let mut prefix = T::zero();
    let mut best = (T::infinity(), 1);
    for m in 1..n {
        prefix += lv[m - 1];
        let d = (total - prefix) / T::from_usize_lossy(n - m) - prefix / T::from_usize_lossy(m);
        if d < best.0 {
            best = (d, m);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionStudyRow {
    pub n: usize,
    pub mean_range: f64,
    pub mean_min_range: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sampling law for random spectra and targets in the reduction study.
pub const REDUCTION_SAMPLING_LAW: &str =
    "levels: n iid U[0, n-1] with argmin pinned to 0 and argmax pinned to n-1; \
     targets: n iid U[0, 1] with argmin pinned to 0 and argmax pinned to 1";

/// `n` iid uniform draws on `[0, top]` with the extremes pinned to `0` and `top`.
pub fn pinned_uniform<R: rand::Rng + ?Sized>(n: usize, top: f64, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * top).collect();
    let (mut lo, mut hi) = (0, 0);
    for i in 1..n {
        if v[i] < v[lo] {
            lo = i;
        }
        if v[i] > v[hi] {
            hi = i;
        }
    }
    if lo == hi {
        hi = (lo + 1) % n;
    }
    v[lo] = 0.0;
    v[hi] = top;
    v
}

/// Average LP range and average minimal edge range over random spectra.
pub fn reduction_study(n_values: &[usize], samples: usize, seed: u64) -> Result<Vec<ReductionStudyRow>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if let Some(&n) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!("n = {n} below 2")));
    }
    n_values
        .iter()
        .map(|&n| {
            let draws: Vec<(f64, f64)> = (0..samples)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream_rng(seed, stream_id(n as u64, k as u64));
                    let top = (n - 1) as f64;
                    let s = Spectrum::new(pinned_uniform(n, top, &mut rng))?;
                    let t = TargetVector::new(pinned_uniform(n, 1.0, &mut rng))?;
                    let range = lp_max_range_design(&s, &t)?.achieved_range;
                    Ok((range, min_edge_range(&s).0))
                })
                .collect::<Result<_>>()?;
            let m = samples as f64;
            let mean_range = draws.iter().map(|d| d.0).sum::<f64>() / m;
            let mean_min_range = draws.iter().map(|d| d.1).sum::<f64>() / m;
            Ok(ReductionStudyRow {
                n,
                mean_range,
                mean_min_range,
                samples,
                seed,
            })
        })
        .collect()
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(levels: &[f64]) -> Spectrum<f64> {
        Spectrum::from_slice(levels).unwrap()
    }

    fn t(r: &[f64]) -> TargetVector<f64> {
        TargetVector::new(r.to_vec()).unwrap()
    }

    #[test]
    fn nearly_tied_ratios_solve_cleanly() {
        let cases: [(&[f64], &[f64]); 2] = [
            (
                &[2.7702509837037015, 4.928112989167509, 0.0, 8.0, 3.9542966901257532, 3.4201833911438113, 2.9959522747019127, 5.508346958597511, 0.6617993104843798],
                &[0.6259494127893114, 1.0, 0.33427291931341563, 0.45163806702560594, 0.4117990307613598, 0.0, 0.8080135213090308, 0.8080243463261069, 0.14091439186028243],
            ),
            (
                &[3.563254952261909, 0.0, 7.395572139425476, 2.5950576063399753, 1.2541660896057605, 0.6432330612608241, 5.708259684926776, 0.8170587851518939, 9.0, 6.75757497891325],
                &[0.0, 0.08499542351973077, 0.7387379396829201, 0.8464549606897127, 0.16775294692897813, 1.0, 0.8336824143818793, 0.18098406894351515, 0.1809714484639, 0.1990318135498409],
            ),
        ];
        for (levels, ratios) in cases {
            let d = lp_max_range_design(&s(levels), &t(ratios)).unwrap();
            assert_eq!(d.weights.n(), levels.len());
            assert!(d.achieved_range > 0.0);
        }
    }

    #[test]
    fn lp_problem_layout() {
        let p = LpProblem::new(&s(&[0.0, 1.0, 2.0, 5.0]), &t(&[0.0, 0.3, 0.6, 1.0])).unwrap();
        assert_eq!(p.equality_rows.len(), 2 + 7);
        assert_eq!(&p.cost[..4], &[-0.0, -1.0, -2.0, -5.0]);
        assert!(p.cost[4..12].iter().all(|&c| c == 0.0));
        assert_eq!(&p.cost[12..], &[0.0, 1.0, 2.0, 5.0]);
        assert!((p.lower[0] + 0.25).abs() < 1e-15 && (p.upper[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn worst_case_compression() {
        let r = lp_max_range_design(&s(&[0.0, 0.0, 0.0, 3.0]), &t(&[0.0, 1.0, 1.0, 1.0])).unwrap();
        assert!((r.achieved_range - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_level_identity_optimal() {
        let r = lp_max_range_design(&s(&[0.0, 1.0]), &t(&[0.0, 1.0])).unwrap();
        assert!((r.achieved_range - 1.0).abs() < 1e-12);
        assert!((r.weights.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_target_keeps_range() {
        let sp = s(&[0.0, 1.0, 2.0, 3.0]);
        let r = lp_max_range_design(&sp, &sp.target_ratios().unwrap()).unwrap();
        assert!((r.achieved_range - 3.0).abs() < 1e-9);
    }

    #[test]
    fn analytic_examples() {
        let sp = s(&[0.0, 1.0, 2.0]);
        let tv = t(&[0.0, 1.0, 1.0]);
        let r = analytic_design(&sp, &tv).unwrap();
        let e = r.effective.levels();
        assert!(e[0] < e[1] && (e[1] - e[2]).abs() < 1e-9);
        assert!(r.effective.target_ratios().unwrap().max_deviation(&tv) < 1e-7);

        let own = sp.target_ratios().unwrap();
        let r = analytic_design(&sp, &own).unwrap();
        assert!(r.effective.target_ratios().unwrap().max_deviation(&own) < 1e-7);
    }

    #[test]
    fn analytic_scaling_preserves_ratios() {
        let sp = s(&[0.0, 0.4, 1.7, 3.0, 3.2]);
        let tv = t(&[0.0, 0.9, 0.2, 1.0, 0.5]);
        let dir = analytic_direction(&sp, &tv).unwrap();
        for frac in [0.1, 0.5, 1.0] {
            let w = dir.weights(frac * dir.max_scale).unwrap();
            let got = w.apply(&sp).unwrap().target_ratios().unwrap();
            assert!(got.max_deviation(&tv) < 1e-7, "scale fraction {frac}");
        }
        assert!(dir.weights(2.0 * dir.max_scale).is_err());
    }

    #[test]
    fn lp_dominates_analytic() {
        let sp = s(&[0.0, 0.4, 1.7, 3.0, 3.2]);
        let tv = t(&[0.0, 0.9, 0.2, 1.0, 0.5]);
        let a = analytic_design(&sp, &tv).unwrap();
        let l = lp_max_range_design(&sp, &tv).unwrap();
        assert!(l.achieved_range >= a.achieved_range - 1e-8);
    }

    #[test]
    fn standard_form_agrees() {
        for (lv, tr) in [
            (vec![0.0, 0.0, 0.0, 3.0], vec![0.0, 1.0, 1.0, 1.0]),
            (vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]),
            (vec![0.2, 1.5, -0.7, 2.0], vec![0.3, 1.0, 0.0, 0.8]),
        ] {
            let a = lp_max_range_design(&s(&lv), &t(&tr)).unwrap();
            let b = lp_standard_form_design(&s(&lv), &t(&tr)).unwrap();
            assert!((a.achieved_range - b.achieved_range).abs() < 1e-8);
        }
    }

    #[test]
    fn edge_range_examples() {
        let w = s(&[0.0, 0.0, 0.0, 3.0]);
        assert!((edge_range(&w, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((edge_range(&w, 3).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(edge_range(&s(&[0.0, 1.0]), 1).unwrap(), 1.0);
        assert!(matches!(edge_range(&w, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(edge_range(&w, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn min_edge_range_examples() {
        assert_eq!(min_edge_range(&s(&[0.0, 0.0, 0.0, 3.0])), (1.0, 1));
        // Δ_1 = Δ_2 = Δ_3 = 2, tie goes to m = 1
        assert_eq!(min_edge_range(&s(&[0.0, 1.0, 2.0, 3.0])), (2.0, 1));
        assert_eq!(min_edge_range(&s(&[0.0, 2.5])), (2.5, 1));
    }

    #[test]
    fn reduction_study_two_levels_is_exact() {
        let rows = reduction_study(&[2], 50, 3).unwrap();
        assert_eq!(rows[0].mean_min_range, 1.0);
        assert!((rows[0].mean_range - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_study_is_deterministic() {
        let a = reduction_study(&[3, 4], 40, 11).unwrap();
        let b = reduction_study(&[3, 4], 40, 11).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(0.0 <= r.mean_min_range && r.mean_min_range <= r.mean_range + 1e-12);
            assert!(r.mean_range <= (r.n - 1) as f64 + 1e-9);
        }
    }

    #[test]
    fn single_precision_lp() {
        let sp = Spectrum::new(vec![0.0f32, 0.0, 0.0, 3.0]).unwrap();
        let tv = TargetVector::new(vec![0.0f32, 1.0, 1.0, 1.0]).unwrap();
        let r = lp_max_range_design(&sp, &tv).unwrap();
        assert!((r.achieved_range - 1.0).abs() < 1e-4);
    }

    #[test]
    fn slope_fit() {
        assert!((fit_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
    }
}
