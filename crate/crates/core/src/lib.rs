//! Spectral engineering of a sensing generator by time-weighted level
//! permutations, and Bayesian frequency and phase estimation on the result.
//!
//! The combinatorial layers (spectra, weights, LP design, Birkhoff schedules)
//! are generic over [`scalar::Real`]; the estimation layers work in `f64`.

pub mod bayes_freq;
pub mod bayes_phase;
pub mod birkhoff;
pub mod design;
pub mod error;
pub mod io;
pub mod minimal;
pub mod nelder_mead;
pub mod permutation;
pub mod rng;
pub mod scalar;
pub mod scenarios;
pub mod schedule;
pub mod simplex;
pub mod spectrum;
pub mod weights;

pub use error::{Error, Result};
pub use permutation::Permutation;

pub type Spectrum = spectrum::Spectrum<f64>;
pub type TargetVector = spectrum::TargetVector<f64>;
pub type ProbeState = spectrum::ProbeState<f64>;
pub type BistochasticMatrix = weights::BistochasticMatrix<f64>;
pub type DesignResult = design::DesignResult<f64>;
pub type MinimalDesign = minimal::MinimalDesign<f64>;
pub type BirkhoffDecomposition = birkhoff::BirkhoffDecomposition<f64>;
pub type SwitchingSchedule = schedule::SwitchingSchedule<f64>;
pub type Segment = schedule::Segment<f64>;
pub type LinearProgram = simplex::LinearProgram<f64>;

pub type Spectrum32 = spectrum::Spectrum<f32>;
pub type TargetVector32 = spectrum::TargetVector<f32>;
pub type BistochasticMatrix32 = weights::BistochasticMatrix<f32>;
pub type DesignResult32 = design::DesignResult<f32>;
pub type SwitchingSchedule32 = schedule::SwitchingSchedule<f32>;
