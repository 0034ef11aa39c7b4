//! Birkhoff decomposition of bi-stochastic weights into switching schedules.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::scalar::Real;
use crate::schedule::{Segment, SwitchingSchedule};
use crate::weights::BistochasticMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffTerm<T> {
    pub weight: T,
    pub perm: Permutation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffDecomposition<T> {
    pub terms: Vec<BirkhoffTerm<T>>,
}

/// `n² - 2n + 2`, the most terms the greedy decomposition can produce.
pub fn max_terms(n: usize) -> usize {
    n * n + 2 - 2 * n
}

/// `n³ - 3n² + 4n - 2`, the most swaps a schedule built from a decomposition needs.
pub fn max_transpositions(n: usize) -> usize {
    max_terms(n) * (n - 1)
}

impl<T: Real> BirkhoffDecomposition<T> {
    pub fn n(&self) -> usize {
        self.terms.first().map_or(0, |t| t.perm.len())
    }

    pub fn weight_sum(&self) -> T {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `Σ θ_i P_i`.
    pub fn reconstruct(&self) -> DMatrix<T> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for t in &self.terms {
            for j in 0..n {
                m[(j, t.perm.apply(j))] += t.weight;
            }
        }
        m
    }

    /// Largest entrywise deviation of the reconstruction from `r`.
    pub fn residual(&self, r: &BistochasticMatrix<T>) -> T {
        (self.reconstruct() - r.entries())
            .iter()
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Greedy decomposition: peel off the lexicographically first permutation
/// supported on the positive entries, weighted by its smallest entry.
///
/// Each step zeroes at least one entry and stays on a face of the Birkhoff
/// polytope of dimension one lower, which caps the term count at
/// [`max_terms`].
pub fn birkhoff_decompose<T: Real>(r: &BistochasticMatrix<T>) -> Result<BirkhoffDecomposition<T>> {
    let n = r.n();
    let zero = T::zero_tol();
    let mut rem = r.entries().clone();
    rem.iter_mut().for_each(|x| {
        if *x <= zero {
            *x = T::zero();
        }
    });
    if r.sum_deviation() > T::norm_tol() {
        sinkhorn(&mut rem, 50);
    }

    let mut terms = Vec::new();
    loop {
        let mass: T = rem.iter().copied().sum::<T>() / T::from_usize_lossy(n);
        if mass <= T::check_tol() {
            break;
        }
        let Some(assign) = perfect_matching(&rem, zero) else {
            return Err(Error::MatchingFailed {
                remaining: mass.to_f64().unwrap_or(f64::NAN),
            });
        };
        let (mut wi, mut wmin) = (0, T::infinity());
        for (i, &j) in assign.iter().enumerate() {
            if rem[(i, j)] < wmin {
                wmin = rem[(i, j)];
                wi = i;
            }
        }
        for (i, &j) in assign.iter().enumerate() {
            let v = rem[(i, j)] - wmin;
            rem[(i, j)] = if i == wi || v <= zero { T::zero() } else { v };
        }
        terms.push(BirkhoffTerm {
            weight: wmin,
            perm: Permutation::new(assign).expect("matching is a bijection"),
        });
        if terms.len() > max_terms(n) {
            return Err(Error::Invariant(format!(
                "decomposition exceeded {} terms",
                max_terms(n)
            )));
        }
    }
    if terms.is_empty() {
        return Err(Error::MatchingFailed { remaining: 0.0 });
    }
    Ok(BirkhoffDecomposition { terms })
}

fn sinkhorn<T: Real>(m: &mut DMatrix<T>, iters: usize) {
    let n = m.nrows();
    for _ in 0..iters {
        for i in 0..n {
            let s: T = m.row(i).iter().copied().sum();
            if s > T::zero() {
                m.row_mut(i).iter_mut().for_each(|x| *x /= s);
            }
        }
        for j in 0..n {
            let s: T = m.column(j).iter().copied().sum();
            if s > T::zero() {
                m.column_mut(j).iter_mut().for_each(|x| *x /= s);
            }
        }
    }
}

/// Lexicographically smallest perfect matching on the support: each row in
/// turn takes the lowest column that still leaves a perfect matching for the
/// remaining rows (checked with Kuhn's augmenting paths). Returns
/// `assign[row] = col`.
fn perfect_matching<T: Real>(m: &DMatrix<T>, zero: T) -> Option<Vec<usize>> {
    let n = m.nrows();
    let support = |r: usize, c: usize| m[(r, c)] > zero;
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for row in 0..n {
        let choice = (0..n).find(|&c| {
            !used[c] && support(row, c) && {
                used[c] = true;
                let ok = completable(&support, row + 1, &used);
                used[c] = false;
                ok
            }
        })?;
        assign[row] = choice;
        used[choice] = true;
    }
    Some(assign)
}

/// Whether rows `first..n` can be matched into the columns not yet `used`.
fn completable(support: &impl Fn(usize, usize) -> bool, first: usize, used: &[bool]) -> bool {
    let n = used.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    (first..n).all(|row| {
        let mut seen = used.to_vec();
        augment(support, row, &mut seen, &mut col_owner)
    })
}

fn augment(
    support: &impl Fn(usize, usize) -> bool,
    row: usize,
    seen: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for c in 0..seen.len() {
        if !seen[c] && support(row, c) {
            seen[c] = true;
            let free = match col_owner[c] {
                None => true,
                Some(other) => augment(support, other, seen, col_owner),
            };
            if free {
                col_owner[c] = Some(row);
                return true;
            }
        }
    }
    false
}

/// One segment per term, heaviest first; fractions are the normalised weights.
pub fn build_schedule<T: Real>(
    d: &BirkhoffDecomposition<T>,
    total_time: T,
) -> Result<SwitchingSchedule<T>> {
    let total = d.weight_sum();
    let mut terms: Vec<&BirkhoffTerm<T>> = d.terms.iter().collect();
    terms.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap_or(std::cmp::Ordering::Equal));
    let segments = terms
        .into_iter()
        .map(|t| Segment {
            fraction: t.weight / total,
            perm: t.perm.clone(),
        })
        .collect();
    let sched = SwitchingSchedule::new(segments, total_time)?;
    let n = sched.n();
    if n > 1 && sched.transposition_count() > max_transpositions(n) {
        return Err(Error::Invariant(format!(
            "schedule needs {} swaps, bound is {}",
            sched.transposition_count(),
            max_transpositions(n)
        )));
    }
    Ok(sched)
}
