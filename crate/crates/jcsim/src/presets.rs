//! Documented constants from the landmark 1996 cavity-QED experiment that
//! resolved the discrete Rabi frequency comb (Brune et al., ENS). The
//! `spectrum` scenario reports these alongside its own dimensionless
//! results so absolute scales can be attached downstream.

use serde::Serialize;

/// Published parameters of the microwave cavity experiment.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HarochePreset {
    /// Atom–field coupling constant, angular units (rad/s).
    pub coupling_rate: f64,
    /// Vacuum Rabi frequency as measured, Hz.
    pub measured_nu0_hz: f64,
    /// Mean photon numbers of the four reported runs (vacuum plus three
    /// injected coherent fields).
    pub mean_photon_numbers: [f64; 4],
}

/// The published values.
///
/// Note an internal tension of about 8%: the quoted coupling implies
/// ν₀ = 2g/2π ≈ 50.9 kHz, while the measured comb fundamental is ≈ 47 kHz.
/// Only frequency *ratios* (1 : √2 : √3 : …) are therefore asserted against
/// simulation; absolute frequencies are reported as-is for reference.
pub const HAROCHE: HarochePreset = HarochePreset {
    coupling_rate: 1.6e5,
    measured_nu0_hz: 4.7e4,
    mean_photon_numbers: [0.0, 0.40, 0.85, 1.77],
};

impl HarochePreset {
    /// Vacuum Rabi frequency implied by the quoted coupling, Hz: 2g/2π.
    pub fn implied_nu0_hz(&self) -> f64 {
        self.coupling_rate / core::f64::consts::PI
    }
}
