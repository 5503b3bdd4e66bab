//! Exact dynamics of the Jaynes–Cummings (JC) model on a truncated
//! atom ⊗ field Hilbert space.
//!
//! The model couples a two-level atom (ground ∣g⟩, excited ∣e⟩, transition
//! frequency ω_A) to a single quantized field mode of frequency ω,
//!
//! > H = (ω_A/2) r₃ + ω (a†a + ½) + g (a r⁺ + a† r⁻),    (ħ = 1)
//!
//! where r⁺ = ∣e⟩⟨g∣, r⁻ = ∣g⟩⟨e∣, r₃ = ∣e⟩⟨e∣ − ∣g⟩⟨g∣ and a, a† are the
//! field ladder operators. H conserves the excitation number
//! N = a†a + r⁺r⁻, so the dynamics decomposes into uncoupled two-dimensional
//! manifolds Ξ(n) = span{∣e,n⟩, ∣g,n+1⟩} plus the lone ground state ∣g,0⟩.
//! Everything dynamical in this crate is computed from the exact analytic
//! solution on those manifolds; a brute-force eigendecomposition propagator
//! ([`dynamics::evolve_numeric_pure`]) provides an independent cross-check.
//!
//! Conventions, fixed once and tested:
//! - basis ordering is atom-major with ∣e⟩ = index 0, ∣g⟩ = index 1, Fock
//!   index ascending: composite index = atom_index · field_dim + n;
//! - ħ = 1, energies in the same units as ω, public time arguments are the
//!   dimensionless τ = g·t ([`Time::Scaled`]) unless an absolute time is
//!   requested explicitly ([`Time::Absolute`]);
//! - closed-form evolution is reported in the interaction picture (the free
//!   phase e^{−i(n+1)ωt} of each manifold is stripped); Schrödinger-picture
//!   output multiplies those phases back and is what the numeric oracle sees.
//!
//! The crate is `no_std` + `alloc`; float math comes from `libm` when the
//! `std` feature (default-on) is disabled.

#![cfg_attr(all(not(feature = "std"), not(test)), no_std)]

extern crate alloc;

use core::fmt;

pub mod dynamics;
pub mod hilbert;
pub mod measurement;
pub mod model;
pub mod observables;
pub mod protocols;
pub mod states;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use hilbert::{DensityOperator, OperatorMatrix, Space, StateVector};
pub use model::{JCParams, Manifold};
pub use observables::{SpectrumPeaks, TimeSeries};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Result alias for fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// A point in time, either dimensionless (τ = g·t, the unit every plot and
/// test in this crate uses) or absolute (same units as 1/ω).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Time {
    /// Dimensionless τ = g·t. Requires g > 0 to convert.
    Scaled(f64),
    /// Absolute time in units of 1/ω.
    Absolute(f64),
}

impl Time {
    /// Absolute time for coupling `g`. `Scaled` with g = 0 is meaningless.
    pub fn absolute(self, g: f64) -> Result<f64> {
        match self {
            Time::Absolute(t) => Ok(t),
            Time::Scaled(tau) if g > 0.0 => Ok(tau / g),
            Time::Scaled(_) => Err(Error::UnsupportedRegime(
                "scaled time g·t is undefined at g = 0; pass Time::Absolute",
            )),
        }
    }
}

/// Everything that can go wrong in this crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A dimension argument is out of the supported range.
    InvalidDimension { what: &'static str, got: usize, min: usize },
    /// Two objects live on different spaces.
    DimensionMismatch { expected: usize, got: usize, context: &'static str },
    /// An operation needed a specific space layout (e.g. atom ⊗ field).
    WrongSpace { context: &'static str },
    /// A state vector that must be normalized is not (‖·‖₂² deviation shown).
    NotNormalized { norm_sq_error: f64 },
    /// A matrix that must be Hermitian is not (max ∣ρ − ρ†∣ entry shown).
    NotHermitian { max_dev: f64 },
    /// A density operator violates unit trace.
    BadTrace { trace_error: f64 },
    /// A probability distribution does not sum to one.
    BadDistribution { sum_error: f64 },
    /// Parameters outside the regime a closed form is valid in.
    UnsupportedRegime(&'static str),
    /// State support too heavy at the truncation edge for the requested
    /// closed-form operation (mass at field index ≥ N_max − 2 shown).
    TruncationEdge { edge_mass: f64 },
    /// A state constructor cannot represent its target on the given
    /// truncated space (discarded tail mass shown).
    Truncation { tail_mass: f64 },
    /// A measurement outcome with probability below the 1e-12 floor.
    ImpossibleOutcome { probability: f64 },
    /// Invalid physical parameter (frequency, coupling, mean photon number…).
    InvalidParams(&'static str),
    /// A protocol script violated its contract.
    Protocol(&'static str),
    /// A sampling grid is not uniform/ascending where it must be.
    BadGrid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension { what, got, min } => {
                write!(f, "invalid dimension: {what} = {got}, need at least {min}")
            }
            Error::DimensionMismatch { expected, got, context } => {
                write!(f, "dimension mismatch in {context}: expected {expected}, got {got}")
            }
            Error::WrongSpace { context } => write!(f, "wrong space layout for {context}"),
            Error::NotNormalized { norm_sq_error } => {
                write!(f, "state not normalized: |‖ψ‖² − 1| = {norm_sq_error:.3e}")
            }
            Error::NotHermitian { max_dev } => {
                write!(f, "matrix not Hermitian: max |A − A†| = {max_dev:.3e}")
            }
            Error::BadTrace { trace_error } => {
                write!(f, "density operator trace off by {trace_error:.3e}")
            }
            Error::BadDistribution { sum_error } => {
                write!(f, "probability distribution sums off by {sum_error:.3e}")
            }
            Error::UnsupportedRegime(msg) => write!(f, "unsupported regime: {msg}"),
            Error::TruncationEdge { edge_mass } => write!(
                f,
                "state has mass {edge_mass:.3e} within two levels of the truncation edge"
            ),
            Error::Truncation { tail_mass } => {
                write!(f, "truncation inadequate: discarded tail mass {tail_mass:.3e}")
            }
            Error::ImpossibleOutcome { probability } => {
                write!(f, "measurement outcome has probability {probability:.3e} < 1e-12")
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::Protocol(msg) => write!(f, "protocol error: {msg}"),
            Error::BadGrid(msg) => write!(f, "bad sampling grid: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
