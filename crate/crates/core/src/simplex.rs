//! Dense bounded-variable primal simplex.
//!
//! Solves `min / max  c·x  s.t.  A x = b,  l ≤ x ≤ u` with finite lower bounds
//! and possibly infinite upper bounds. Phase I drives artificial variables out
//! of the basis; artificials that cannot leave mark dependent rows and stay
//! basic, pinned at zero. The entering variable is the lowest eligible index;
//! the leaving row is the largest pivot among the rows binding at the step.
//! The basis is refactored from the original data every few pivots and at the
//! end of each phase.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub cost: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// Equality rows found to be linearly dependent and dropped.
    pub redundant_rows: usize,
}

impl<T: Real> LinearProgram<T> {
    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.cost.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.lower.len().min(self.upper.len()),
            });
        }
        if self.rows.len() != self.rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: self.rhs.len(),
            });
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        for j in 0..n {
            if !self.lower[j].is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "variable {j} needs a finite lower bound"
                )));
            }
            if self.upper[j] < self.lower[j] {
                return Err(Error::Infeasible(format!("variable {j} has empty bounds")));
            }
        }
        Ok(())
    }

    /// Largest `|A x - b|` over the equality rows.
    pub fn residual(&self, x: &[T]) -> T {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| {
                let ax: T = row.iter().zip(x).map(|(a, v)| *a * *v).sum();
                (ax - b).abs()
            })
            .fold(T::zero(), T::max)
    }

    pub fn solve(&self, sense: Sense) -> Result<LpSolution<T>> {
        self.validate()?;
        let mut tab = Tableau::new(self);
        tab.phase_one()?;
        let cost: Vec<T> = match sense {
            Sense::Minimize => self.cost.clone(),
            Sense::Maximize => self.cost.iter().map(|&c| -c).collect(),
        };
        tab.phase_two(&cost)?;
        let x: Vec<T> = tab.x[..self.num_vars()].to_vec();
        let scale = self
            .rhs
            .iter()
            .fold(T::one(), |m, b| m.max(b.abs()));
        let res = self.residual(&x);
        if res > T::weight_tol() * scale {
            return Err(Error::Invariant(format!(
                "simplex solution violates equality rows by {res}"
            )));
        }
        let objective = self.cost.iter().zip(&x).map(|(c, v)| *c * *v).sum();
        Ok(LpSolution {
            x,
            objective,
            iterations: tab.iterations,
            redundant_rows: tab.redundant,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic(usize),
    Lower,
    Upper,
}

struct Tableau<T> {
    /// Original `[A | D]` and `b`, sign-adjusted so the artificial start is feasible.
    a: Vec<Vec<T>>,
    b: Vec<T>,
    /// `B⁻¹ [A | D]`, one row per constraint.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    status: Vec<Status>,
    x: Vec<T>,
    lower: Vec<T>,
    upper: Vec<T>,
    reduced: Vec<T>,
    cost: Vec<T>,
    n_struct: usize,
    iterations: usize,
    since_refactor: usize,
    redundant: usize,
}

const MAX_ITERATIONS: usize = 200_000;
/// Pivots between refactorisations of the basis.
const REFACTOR_EVERY: usize = 32;
/// Clean-up rounds (refactor, reprice, resume) at the end of each phase.
const POLISH_ROUNDS: usize = 8;

impl<T: Real> Tableau<T> {
    fn new(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let total = n + m;
        let mut x = vec![T::zero(); total];
        let mut status = vec![Status::Lower; total];
        x[..n].copy_from_slice(&lp.lower);
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.extend(std::iter::repeat_n(T::zero(), m));
        upper.extend(std::iter::repeat_n(T::infinity(), m));

        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, (row, &rhs)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let ax: T = row.iter().zip(&x[..n]).map(|(c, v)| *c * *v).sum();
            let r = rhs - ax;
            let sign = if r < T::zero() { -T::one() } else { T::one() };
            let mut t: Vec<T> = row.iter().map(|&c| c * sign).collect();
            t.extend(std::iter::repeat_n(T::zero(), m));
            t[n + i] = T::one();
            a.push(t);
            b.push(rhs * sign);
            basis.push(n + i);
            x[n + i] = r.abs();
            status[n + i] = Status::Basic(i);
        }
        Tableau {
            rows: a.clone(),
            a,
            b,
            basis,
            status,
            x,
            lower,
            upper,
            reduced: vec![T::zero(); total],
            cost: vec![T::zero(); total],
            n_struct: n,
            iterations: 0,
            since_refactor: 0,
            redundant: 0,
        }
    }

    fn total(&self) -> usize {
        self.x.len()
    }

    fn price(&mut self) {
        let total = self.total();
        for j in 0..total {
            let mut d = self.cost[j];
            for (row, &b) in self.rows.iter().zip(&self.basis) {
                d -= self.cost[b] * row[j];
            }
            self.reduced[j] = d;
        }
    }

    /// Recomputes `B⁻¹[A | D]` and the basic values from the original data by
    /// Gauss-Jordan elimination with partial pivoting.
    fn refactor(&mut self) {
        let m = self.basis.len();
        let total = self.total();
        let mut bmat: Vec<Vec<T>> = (0..m)
            .map(|i| self.basis.iter().map(|&k| self.a[i][k]).collect())
            .collect();
        let mut rhs: Vec<Vec<T>> = (0..m)
            .map(|i| {
                let mut r = self.a[i].clone();
                r.push(self.b[i]);
                r
            })
            .collect();
        for c in 0..m {
            let p = (c..m)
                .max_by(|&i, &k| bmat[i][c].abs().partial_cmp(&bmat[k][c].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("non-empty column");
            if bmat[p][c] == T::zero() {
                // singular basis: keep the current tableau
                return;
            }
            bmat.swap(c, p);
            rhs.swap(c, p);
            let piv = bmat[c][c];
            for v in bmat[c].iter_mut() {
                *v /= piv;
            }
            for v in rhs[c].iter_mut() {
                *v /= piv;
            }
            let (bp, rp) = (bmat[c].clone(), rhs[c].clone());
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = bmat[i][c];
                if f != T::zero() {
                    for (v, &w) in bmat[i].iter_mut().zip(&bp) {
                        *v -= f * w;
                    }
                    for (v, &w) in rhs[i].iter_mut().zip(&rp) {
                        *v -= f * w;
                    }
                }
            }
        }
        for (i, mut r) in rhs.into_iter().enumerate() {
            let beta = r.pop().expect("rhs column");
            let mut xb = beta;
            for j in 0..total {
                if !matches!(self.status[j], Status::Basic(_)) && self.x[j] != T::zero() {
                    xb -= r[j] * self.x[j];
                }
            }
            let k = self.basis[i];
            self.x[k] = xb;
            self.rows[i] = r;
        }
        self.since_refactor = 0;
    }

    /// Iterates to optimality, then refactors and resumes until the refreshed
    /// reduced costs confirm it.
    fn solve_phase(&mut self) -> Result<()> {
        self.price();
        for _ in 0..POLISH_ROUNDS {
            self.iterate()?;
            self.refactor();
            self.price();
            if self.entering().is_none() {
                break;
            }
        }
        Ok(())
    }

    fn phase_one(&mut self) -> Result<()> {
        let total = self.total();
        self.cost = vec![T::zero(); total];
        for c in self.cost.iter_mut().skip(self.n_struct) {
            *c = T::one();
        }
        self.solve_phase()?;
        let infeas: T = self.x[self.n_struct..].iter().map(|v| v.abs()).sum();
        let scale = T::one() + self.x[..self.n_struct].iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if infeas > T::weight_tol() * scale {
            return Err(Error::Infeasible(format!(
                "phase I ended with artificial mass {infeas}"
            )));
        }
        // artificials are pinned at zero from here on
        for j in self.n_struct..total {
            self.upper[j] = T::zero();
            if !matches!(self.status[j], Status::Basic(_)) {
                self.x[j] = T::zero();
                self.status[j] = Status::Lower;
            }
        }
        // pivot basic artificials out where possible; rows where that fails are dependent
        for r in 0..self.rows.len() {
            let art = self.basis[r];
            if art < self.n_struct {
                continue;
            }
            let pick = (0..self.n_struct)
                .filter(|&k| !matches!(self.status[k], Status::Basic(_)))
                .max_by(|&i, &k| {
                    self.rows[r][i]
                        .abs()
                        .partial_cmp(&self.rows[r][k].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(k.cmp(&i))
                })
                .filter(|&k| self.rows[r][k].abs() > T::pivot_tol());
            match pick {
                Some(k) => {
                    self.x[art] = T::zero();
                    self.pivot(r, k, Status::Lower);
                }
                None => self.redundant += 1,
            }
        }
        self.refactor();
        Ok(())
    }

    fn phase_two(&mut self, cost: &[T]) -> Result<()> {
        let mut full = cost.to_vec();
        full.extend(std::iter::repeat_n(T::zero(), self.total() - cost.len()));
        self.cost = full;
        self.solve_phase()
    }

    fn entering(&self) -> Option<(usize, T)> {
        let tol = T::pivot_tol();
        (0..self.total()).find_map(|j| {
            if self.upper[j] - self.lower[j] <= T::zero() {
                return None;
            }
            match self.status[j] {
                Status::Lower if self.reduced[j] < -tol => Some((j, T::one())),
                Status::Upper if self.reduced[j] > tol => Some((j, -T::one())),
                _ => None,
            }
        })
    }

    fn iterate(&mut self) -> Result<()> {
        let ptol = T::pivot_tol();
        while let Some((j, dir)) = self.entering() {
            self.iterations += 1;
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Invariant("simplex iteration limit reached".into()));
            }
            // first pass: the binding step length
            let mut step = self.upper[j] - self.lower[j];
            let mut limits: Vec<(usize, T, T, Status)> = Vec::new();
            for (i, row) in self.rows.iter().enumerate() {
                let alpha = row[j] * dir;
                let b = self.basis[i];
                let (limit, to) = if alpha > ptol {
                    ((self.x[b] - self.lower[b]) / alpha, Status::Lower)
                } else if alpha < -ptol && self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]) / -alpha, Status::Upper)
                } else {
                    continue;
                };
                let limit = limit.max(T::zero());
                step = step.min(limit);
                limits.push((i, limit, alpha.abs(), to));
            }
            if !step.is_finite() {
                return Err(Error::Unbounded);
            }
            // second pass: among rows binding at that step, the largest pivot,
            // then the smallest basic index
            let tie = T::zero_tol() * (T::one() + step);
            let mut leave: Option<(usize, T, Status)> = None;
            for &(i, limit, mag, to) in &limits {
                if limit > step + tie {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((r, best, _)) => mag > best || (mag == best && self.basis[i] < self.basis[r]),
                };
                if better {
                    leave = Some((i, mag, to));
                }
            }
            let bound_flip = leave.is_none() || (self.upper[j] - self.lower[j]) <= step;
            let delta = step * dir;
            self.x[j] += delta;
            for (row, &b) in self.rows.iter().zip(&self.basis) {
                self.x[b] -= row[j] * delta;
            }
            if bound_flip && leave.is_none() {
                self.status[j] = if dir > T::zero() {
                    self.x[j] = self.upper[j];
                    Status::Upper
                } else {
                    self.x[j] = self.lower[j];
                    Status::Lower
                };
            } else if let Some((r, _, to)) = leave {
                self.pivot(r, j, to);
            }
            self.since_refactor += 1;
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
                self.price();
            }
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, j: usize, leaving_to: Status) {
        let out = self.basis[r];
        self.x[out] = match leaving_to {
            Status::Upper => self.upper[out],
            _ => self.lower[out],
        };
        self.status[out] = leaving_to;
        let p = self.rows[r][j];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != T::zero() {
                for (v, &pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.reduced[j];
        if f != T::zero() {
            for (v, &pv) in self.reduced.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        self.basis[r] = j;
        self.status[j] = Status::Basic(r);
    }
}
