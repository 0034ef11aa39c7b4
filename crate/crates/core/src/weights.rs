//! Bi-stochastic weight matrices and the effective spectra they produce.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::scalar::Real;
use crate::spectrum::Spectrum;

/// Nonnegative `n × n` matrix with unit row and column sums.
///
/// `R[i][j]` is the fraction of the sensing time during which effective level
/// `i` evolves with original eigenvalue `λ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BistochasticMatrix<T: Real> {
    entries: DMatrix<T>,
    tolerance: T,
}

impl<T: Real> BistochasticMatrix<T> {
    /// Validates with the default tolerance and clamps tiny negatives to zero.
    pub fn new(entries: DMatrix<T>) -> Result<Self> {
        Self::with_tolerance(entries, T::weight_tol())
    }

    pub fn with_tolerance(mut entries: DMatrix<T>, tolerance: T) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotBistochastic(format!(
                "matrix is {}x{}, expected square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n = entries.nrows();
        if n == 0 {
            return Err(Error::NotBistochastic("empty matrix".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let x = entries[(i, j)];
                if !x.is_finite() || x < -tolerance {
                    return Err(Error::NotBistochastic(format!("entry ({i},{j}) = {x}")));
                }
                if x < T::zero() {
                    entries[(i, j)] = T::zero();
                }
            }
        }
        let m = BistochasticMatrix { entries, tolerance };
        let dev = m.sum_deviation();
        if dev > tolerance {
            return Err(Error::NotBistochastic(format!(
                "row/column sums deviate from 1 by {dev}"
            )));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotBistochastic("rows have unequal lengths".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        BistochasticMatrix {
            entries: DMatrix::identity(n, n),
            tolerance: T::weight_tol(),
        }
    }

    /// `J / n`, every entry equal.
    pub fn uniform(n: usize) -> Self {
        let v = T::one() / T::from_usize_lossy(n);
        BistochasticMatrix {
            entries: DMatrix::from_element(n, n, v),
            tolerance: T::weight_tol(),
        }
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        let n = p.len();
        let mut entries = DMatrix::zeros(n, n);
        for j in 0..n {
            entries[(j, p.apply(j))] = T::one();
        }
        BistochasticMatrix {
            entries,
            tolerance: T::weight_tol(),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }

    /// Largest `|row sum - 1|` or `|column sum - 1|`.
    pub fn sum_deviation(&self) -> T {
        let n = self.n();
        let mut dev = T::zero();
        for i in 0..n {
            let r: T = (0..n).map(|j| self.entries[(i, j)]).sum();
            let c: T = (0..n).map(|j| self.entries[(j, i)]).sum();
            dev = dev.max((r - T::one()).abs()).max((c - T::one()).abs());
        }
        dev
    }

    /// Effective spectrum `λ_eff = R λ`.
    pub fn apply(&self, s: &Spectrum<T>) -> Result<Spectrum<T>> {
        let n = self.n();
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            });
        }
        let lv = s.levels();
        let eff = (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * lv[j]).sum())
            .collect();
        Ok(Spectrum::new(eff)?.with_label(s.label().to_string()))
    }
}

/// Effective spectrum for the weight matrix `r` acting on `s`.
pub fn apply_weights<T: Real>(r: &BistochasticMatrix<T>, s: &Spectrum<T>) -> Result<Spectrum<T>> {
    r.apply(s)
}

/// Weights `p_jm = (1/Δt) Σ_i δ_i |(U_i)_jm|²` induced by interleaving the
/// free evolution with arbitrary unitaries `U_i` applied for durations `δ_i`.
pub fn general_control_weights<T: Real>(
    unitaries: &[DMatrix<Complex<T>>],
    durations: &[T],
) -> Result<BistochasticMatrix<T>> {
    if unitaries.is_empty() {
        return Err(Error::InvalidArgument("no control unitaries given".into()));
    }
    if unitaries.len() != durations.len() {
        return Err(Error::DimensionMismatch {
            expected: unitaries.len(),
            found: durations.len(),
        });
    }
    if durations.iter().any(|d| !d.is_finite() || *d < T::zero()) {
        return Err(Error::InvalidArgument("durations must be nonnegative".into()));
    }
    let total: T = durations.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::InvalidArgument("durations sum to zero".into()));
    }
    let n = unitaries[0].nrows();
    let mut p = DMatrix::<T>::zeros(n, n);
    for (index, (u, &d)) in unitaries.iter().zip(durations).enumerate() {
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows().max(u.ncols()),
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > T::check_tol() {
            return Err(Error::NotUnitary {
                index,
                deviation: deviation.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        let w = d / total;
        for j in 0..n {
            for m in 0..n {
                p[(j, m)] += w * u[(j, m)].norm_sqr();
            }
        }
    }
    BistochasticMatrix::new(p)
}

/// `max |(U†U - I)_ij|`.
pub fn unitarity_deviation<T: Real>(u: &DMatrix<Complex<T>>) -> T {
    let n = u.nrows();
    let mut dev = T::zero();
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc = acc + u[(k, a)].conj() * u[(k, b)];
            }
            if a == b {
                acc.re -= T::one();
            }
            dev = dev.max(acc.norm());
        }
    }
    dev
}
