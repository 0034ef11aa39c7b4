#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use spectralforge::{BistochasticMatrix, Permutation, Spectrum, TargetVector};

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    Permutation::new(map).unwrap()
}

/// Convex mixture of a few random permutation matrices.
pub fn sparse_bistochastic<R: Rng>(n: usize, rng: &mut R) -> BistochasticMatrix {
    let k = rng.random_range(1..=n + 1);
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let mut m = DMatrix::zeros(n, n);
    for wi in w {
        let p = random_permutation(n, rng);
        for j in 0..n {
            m[(j, p.apply(j))] += wi / total;
        }
    }
    BistochasticMatrix::new(m).unwrap()
}

/// Sinkhorn scaling of a strictly positive random matrix (full support).
pub fn dense_bistochastic<R: Rng>(n: usize, rng: &mut R) -> BistochasticMatrix {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() + 0.05);
    for _ in 0..10_000 {
        for i in 0..n {
            let s: f64 = m.row(i).sum();
            m.row_mut(i).scale_mut(1.0 / s);
        }
        for j in 0..n {
            let s: f64 = m.column(j).sum();
            m.column_mut(j).scale_mut(1.0 / s);
        }
        let dev = (0..n).map(|i| (m.row(i).sum() - 1.0).abs()).fold(0.0, f64::max);
        if dev < 1e-15 {
            break;
        }
    }
    BistochasticMatrix::new(m).unwrap()
}

pub fn random_bistochastic<R: Rng>(n: usize, rng: &mut R) -> BistochasticMatrix {
    if rng.random::<bool>() {
        sparse_bistochastic(n, rng)
    } else {
        dense_bistochastic(n, rng)
    }
}

/// Haar unitary from the QR factorisation of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let (q, r) = z.qr().unpack();
    let mut q = q;
    for k in 0..n {
        let d = r[(k, k)];
        let ph = d / d.norm();
        for x in q.column_mut(k).iter_mut() {
            *x *= ph;
        }
    }
    q
}

pub fn random_spectrum<R: Rng>(n: usize, rng: &mut R) -> Spectrum {
    Spectrum::new((0..n).map(|_| rng.random_range(-2.0..3.0)).collect()).unwrap()
}

pub fn random_target<R: Rng>(n: usize, rng: &mut R) -> TargetVector {
    let mut r: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let lo = rng.random_range(0..n);
    let mut hi = rng.random_range(0..n - 1);
    if hi >= lo {
        hi += 1;
    }
    r[lo] = 0.0;
    r[hi] = 1.0;
    TargetVector::new(r).unwrap()
}

/// Composite trapezoid rule on `[a, b]` with `m` panels.
pub fn trapezoid<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, m: usize) -> Complex64 {
    let h = (b - a) / m as f64;
    let mut acc = (f(a) + f(b)) * 0.5;
    for k in 1..m {
        acc += f(a + h * k as f64);
    }
    acc * h
}

pub fn gaussian_pdf(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, m: usize) -> Complex64 {
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + h * k as f64) * w;
    }
    acc * (h / 3.0)
}
