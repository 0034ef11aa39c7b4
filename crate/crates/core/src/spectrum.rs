//! Spectra of the generator, target ratio vectors and probe states.
//!
//! A [`Spectrum`] keeps its levels in the order they were given. Level `i`
//! corresponds to basis state `|i>`, and probe amplitudes are indexed the same
//! way, so design operations never reorder levels behind the caller's back.
//! Use [`Spectrum::canonical`] when an ascending copy is needed.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    levels: Vec<T>,
    label: String,
}

impl<T: Real> Spectrum<T> {
    pub fn new(levels: Vec<T>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidSpectrum(format!(
                "need at least 2 levels, got {}",
                levels.len()
            )));
        }
        if let Some(i) = levels.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("level {i} is not finite")));
        }
        Ok(Spectrum {
            levels,
            label: String::new(),
        })
    }

    pub fn from_slice(levels: &[T]) -> Result<Self> {
        Self::new(levels.to_vec())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn min(&self) -> T {
        self.levels.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.levels.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `max - min` of the levels.
    pub fn spectral_range(&self) -> T {
        self.max() - self.min()
    }

    pub fn sum(&self) -> T {
        self.levels.iter().copied().sum()
    }

    pub fn is_canonical(&self) -> bool {
        self.levels.windows(2).all(|w| w[0] <= w[1])
    }

    /// Ascending copy of the spectrum.
    pub fn canonical(&self) -> Self {
        let mut levels = self.levels.clone();
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
        Spectrum {
            levels,
            label: self.label.clone(),
        }
    }

    /// Affine normalisation `t_i = (λ_i - λ_min) / (λ_max - λ_min)`.
    pub fn target_ratios(&self) -> Result<TargetVector<T>> {
        let lo = self.min();
        let range = self.spectral_range();
        if range <= T::zero() {
            return Err(Error::DegenerateRange);
        }
        let mut ratios: Vec<T> = self.levels.iter().map(|&x| (x - lo) / range).collect();
        // pin the extremes exactly so the endpoint invariant holds bit-for-bit
        let hi = self.max();
        for (r, &x) in ratios.iter_mut().zip(&self.levels) {
            if x == lo {
                *r = T::zero();
            } else if x == hi {
                *r = T::one();
            }
        }
        TargetVector::new(ratios)
    }

    /// Spectrum with every level shifted by `offset` and multiplied by `scale`.
    pub fn affine(&self, offset: T, scale: T) -> Result<Self> {
        Ok(Self::new(self.levels.iter().map(|&x| (x + offset) * scale).collect())?
            .with_label(self.label.clone()))
    }
}

/// Desired relative positions of the effective levels within the effective range.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetVector<T> {
    ratios: Vec<T>,
}

impl<T: Real> TargetVector<T> {
    pub fn new(ratios: Vec<T>) -> Result<Self> {
        if ratios.len() < 2 {
            return Err(Error::InvalidTarget(format!(
                "need at least 2 ratios, got {}",
                ratios.len()
            )));
        }
        let tol = T::weight_tol();
        for (i, &r) in ratios.iter().enumerate() {
            if !r.is_finite() || r < -tol || r > T::one() + tol {
                return Err(Error::InvalidTarget(format!("ratio {i} = {r} outside [0, 1]")));
            }
        }
        let lo = ratios.iter().copied().fold(T::infinity(), T::min);
        let hi = ratios.iter().copied().fold(T::neg_infinity(), T::max);
        if lo > tol || hi < T::one() - tol {
            return Err(Error::InvalidTarget(format!(
                "ratios must attain 0 and 1 (min {lo}, max {hi})"
            )));
        }
        let ratios = ratios
            .into_iter()
            .map(|r| r.max(T::zero()).min(T::one()))
            .collect();
        Ok(TargetVector { ratios })
    }

    pub fn ratios(&self) -> &[T] {
        &self.ratios
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// First index holding the minimal ratio; its effective level is the bottom.
    pub fn low_index(&self) -> usize {
        argext(&self.ratios, |a, b| a < b)
    }

    /// First index holding the maximal ratio; its effective level is the top.
    pub fn high_index(&self) -> usize {
        argext(&self.ratios, |a, b| a > b)
    }

    /// Largest absolute deviation between two target vectors.
    pub fn max_deviation(&self, other: &Self) -> T {
        self.ratios
            .iter()
            .zip(&other.ratios)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

fn argext<T: Real>(xs: &[T], better: impl Fn(T, T) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if better(x, xs[best]) {
            best = i;
        }
    }
    best
}

/// Pure probe state given by its amplitudes in the generator eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> ProbeState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidProbe("empty amplitude vector".into()));
        }
        let norm: T = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::norm_tol() * T::lit(10.0) {
            return Err(Error::InvalidProbe(format!("squared norm is {norm}, expected 1")));
        }
        Ok(ProbeState { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidProbe("cannot normalise a zero vector".into()));
        }
        Ok(ProbeState {
            amplitudes: amplitudes.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// Equal superposition of all `n` levels.
    pub fn uniform(n: usize) -> Self {
        let a = T::one() / T::from_usize_lossy(n).sqrt();
        ProbeState {
            amplitudes: vec![Complex::new(a, T::zero()); n],
        }
    }

    /// Haar-random pure state (normalised complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self
    where
        StandardNormal: Distribution<T>,
    {
        loop {
            let v: Vec<Complex<T>> = (0..n)
                .map(|_| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            if let Ok(p) = Self::normalized(v) {
                return p;
            }
        }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex<T>>) -> Self {
        ProbeState { amplitudes }
    }
}
