//! Switching schedules and their exact piecewise simulation.
//!
//! Segment `k` runs for `fraction_k · total_time`. During the segment the
//! amplitude that started on level `j` sits on level `perm_k(j)` and so picks
//! up the phase of `λ_{perm_k(j)}`. Each segment is a conjugation: the levels
//! are relabelled by two-level swaps, the system evolves freely, and the swaps
//! are undone, so the net relabelling over the schedule is the identity.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::scalar::Real;
use crate::spectrum::{ProbeState, Spectrum};
use crate::weights::BistochasticMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Segment<T> {
    pub fraction: T,
    pub perm: Permutation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingSchedule<T> {
    segments: Vec<Segment<T>>,
    total_time: T,
}

impl<T: Real> SwitchingSchedule<T> {
    pub fn new(segments: Vec<Segment<T>>, total_time: T) -> Result<Self> {
        if !(total_time > T::zero()) || !total_time.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidSchedule("schedule has no segments".into()))?;
        let n = first.perm.len();
        for (k, seg) in segments.iter().enumerate() {
            if !(seg.fraction > T::zero()) || seg.fraction > T::one() {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k} has fraction {} outside (0, 1]",
                    seg.fraction
                )));
            }
            if seg.perm.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: seg.perm.len(),
                });
            }
        }
        let sum: T = segments.iter().map(|s| s.fraction).sum();
        if (sum - T::one()).abs() > T::norm_tol() {
            return Err(Error::InvalidSchedule(format!("fractions sum to {sum}")));
        }
        Ok(SwitchingSchedule {
            segments,
            total_time,
        })
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn total_time(&self) -> T {
        self.total_time
    }

    pub fn n(&self) -> usize {
        self.segments[0].perm.len()
    }

    /// Weight matrix realised by the schedule: `R[j][perm_k(j)] += fraction_k`.
    pub fn weights(&self) -> Result<BistochasticMatrix<T>> {
        let n = self.n();
        let mut m = DMatrix::<T>::zeros(n, n);
        for seg in &self.segments {
            for j in 0..n {
                m[(j, seg.perm.apply(j))] += seg.fraction;
            }
        }
        BistochasticMatrix::new(m)
    }

    /// Number of two-level switching operations, counted per permutation.
    pub fn transposition_count(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.perm.transpositions().len())
            .sum()
    }
}

fn apply_swaps<T: Real>(state: &mut [Complex<T>], swaps: impl Iterator<Item = (usize, usize)>) {
    for (a, b) in swaps {
        state.swap(a, b);
    }
}

/// Exact final amplitudes after running `sched` with frequency `omega`.
///
/// Each segment is executed literally: swaps move the amplitudes into place,
/// the diagonal propagator `exp(-i ω Δt λ)` acts, and the swaps are undone.
pub fn simulate_schedule<T: Real>(
    s: &Spectrum<T>,
    sched: &SwitchingSchedule<T>,
    omega: T,
    probe: &ProbeState<T>,
) -> Result<ProbeState<T>> {
    let n = s.len();
    if sched.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sched.n(),
        });
    }
    if probe.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: probe.len(),
        });
    }
    let levels = s.levels();
    let mut state = probe.amplitudes().to_vec();
    for seg in sched.segments() {
        let swaps = seg.perm.transpositions();
        // replaying the swaps backwards sends the amplitude on j to slot perm(j)
        apply_swaps(&mut state, swaps.iter().rev().copied());
        let dt = sched.total_time() * seg.fraction;
        for (c, &lam) in state.iter_mut().zip(levels) {
            let phase = -(omega * dt * lam);
            *c = *c * Complex::new(phase.cos(), phase.sin());
        }
        apply_swaps(&mut state, swaps.iter().copied());
    }
    Ok(ProbeState::from_raw(state))
}

/// Free evolution `c_j e^{-i ω t λ_j}` under a given (effective) spectrum.
pub fn free_evolution<T: Real>(
    s: &Spectrum<T>,
    omega: T,
    time: T,
    probe: &ProbeState<T>,
) -> Result<ProbeState<T>> {
    if probe.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: probe.len(),
        });
    }
    let out = probe
        .amplitudes()
        .iter()
        .zip(s.levels())
        .map(|(c, &lam)| {
            let ph = -(omega * time * lam);
            *c * Complex::new(ph.cos(), ph.sin())
        })
        .collect();
    Ok(ProbeState::from_raw(out))
}
