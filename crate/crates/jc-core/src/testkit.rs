//! Deterministic pseudo-random generators for tests and cross-validation.
//!
//! Compiled only for this crate's own tests or behind the `testkit` feature,
//! which downstream test suites enable. Everything here is seeded and
//! reproducible — the shipped simulation paths use no randomness at all, and
//! keeping the generator hand-rolled (SplitMix64 + Box–Muller) keeps test
//! outcomes identical across platforms and dependency bumps.

use alloc::vec::Vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::hilbert::{DensityOperator, OperatorMatrix, Space, StateVector};
use crate::C64;

/// SplitMix64: tiny, seedable, full-period 2⁶⁴ stream generator.
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed, spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box–Muller (cached second deviate).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u ∈ (0,1] so the log is finite
        let u = 1.0 - self.uniform();
        let v = self.uniform();
        let r = (-2.0 * u.ln()).sqrt();
        let theta = 2.0 * core::f64::consts::PI * v;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    /// Haar-like random pure state (normalized complex Gaussian vector).
    pub fn random_state(&mut self, space: Space) -> StateVector {
        let amps: Vec<C64> = (0..space.dim()).map(|_| self.complex_normal()).collect();
        StateVector::from_unnormalized(space, amps).expect("gaussian vector has nonzero norm")
    }

    /// Random pure state whose field support stays below `max_field_index`
    /// (exclusive), leaving headroom at the truncation edge.
    pub fn random_state_with_headroom(&mut self, space: Space, max_field_index: usize) -> StateVector {
        let field_dim = space.field_dim().expect("need a field factor");
        assert!(max_field_index <= field_dim);
        let atom_dim = space.dim() / field_dim;
        let mut amps = Vec::with_capacity(space.dim());
        for _ in 0..atom_dim {
            for n in 0..field_dim {
                if n < max_field_index {
                    amps.push(self.complex_normal());
                } else {
                    amps.push(C64::new(0.0, 0.0));
                }
            }
        }
        StateVector::from_unnormalized(space, amps).expect("gaussian vector has nonzero norm")
    }

    /// Dense random complex matrix (entries standard complex normal).
    pub fn random_matrix(&mut self, space: Space) -> OperatorMatrix {
        let d = space.dim();
        let entries: Vec<C64> = (0..d * d).map(|_| self.complex_normal()).collect();
        OperatorMatrix::from_fn(space, |i, j| entries[i * d + j])
    }

    /// Random Hermitian matrix (M + M†)/2.
    pub fn random_hermitian(&mut self, space: Space) -> OperatorMatrix {
        let m = self.random_matrix(space);
        &(&m + &m.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Random full-rank density operator ρ = MM†/Tr(MM†) (Ginibre ensemble).
    pub fn random_density(&mut self, space: Space) -> DensityOperator {
        let m = self.random_matrix(space);
        let mm = &m * &m.adjoint();
        let tr = mm.trace().re;
        let scaled = &mm * C64::new(1.0 / tr, 0.0);
        DensityOperator::new(scaled).expect("MM†/Tr is a valid density operator")
    }
}
