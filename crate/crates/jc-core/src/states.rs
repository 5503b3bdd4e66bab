//! Canonical initial states: Fock, coherent, thermal, and atomic superpositions.
//!
//! Everything that truncates an infinite ladder reports how much probability
//! it dropped. Coherent amplitudes are built by the stable forward recursion
//! c₀ = e^{−∣α∣²/2}, c_{n+1} = c_n · α/√(n+1) and then renormalized on the
//! retained levels; thermal states are geometric mixtures renormalized the
//! same way.

use alloc::vec::Vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::hilbert::{DensityOperator, OperatorMatrix, Space, StateVector};
use crate::{Error, Result, C64};

/// A truncated construction together with the probability mass it dropped.
#[derive(Clone, Debug)]
pub struct Truncated<T> {
    pub value: T,
    /// Pre-renormalization probability that fell beyond N_max.
    pub discarded_mass: f64,
}

/// Tail mass a coherent construction may drop before it is rejected.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

/// Tail mass a thermal construction may drop before it is rejected. Looser
/// than the coherent bound: a thermal state is a diagonal mixture whose
/// retained levels evolve exactly, so the tail only biases ensemble averages
/// (a 10⁻⁴ tail shifts ⟨n⟩-level observables in the fourth digit at worst),
/// whereas a coherent tail distorts amplitude-level interference.
pub const THERMAL_TAIL_TOL: f64 = 1e-4;

/// ∣n⟩ on a field space truncated at `n_max`.
pub fn fock_state(n: usize, n_max: usize) -> Result<StateVector> {
    if n_max < 1 {
        return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
    }
    if n > n_max {
        return Err(Error::InvalidDimension { what: "fock index (needs n ≤ n_max)", got: n, min: 0 });
    }
    Ok(StateVector::basis(Space::field(n_max + 1), n))
}

/// Truncation large enough to hold a coherent state of modulus ∣α∣ with
/// comfortably sub-1e-10 tail: ⌈∣α∣² + 8∣α∣ + 10⌉.
pub fn coherent_default_n_max(alpha_mod: f64) -> usize {
    (alpha_mod * alpha_mod + 8.0 * alpha_mod + 10.0).ceil() as usize
}

/// Coherent state ∣α⟩ truncated at `n_max` and renormalized. Rejects
/// truncations that would drop ≥ 1e-10 of the distribution.
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<Truncated<StateVector>> {
    if n_max < 1 {
        return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
    }
    let fd = n_max + 1;
    let mut amps = Vec::with_capacity(fd);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut retained = 0.0f64;
    for n in 0..fd {
        amps.push(c);
        retained += c.norm_sqr();
        c *= alpha / C64::new(((n as f64) + 1.0).sqrt(), 0.0);
    }
    let discarded = (1.0 - retained).max(0.0);
    if discarded >= COHERENT_TAIL_TOL {
        return Err(Error::Truncation { tail_mass: discarded });
    }
    let value = StateVector::from_unnormalized(Space::field(fd), amps)?;
    Ok(Truncated { value, discarded_mass: discarded })
}

/// Renormalized thermal photon-number distribution with mean `mean_n` before
/// truncation: p_m ∝ (1 − q) qᵐ, q = ⟨n⟩/(1 + ⟨n⟩).
pub fn thermal_distribution(mean_n: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(mean_n.is_finite() && mean_n >= 0.0) {
        return Err(Error::InvalidParams("thermal mean photon number must be ≥ 0"));
    }
    if n_max < 1 {
        return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
    }
    let q = mean_n / (1.0 + mean_n);
    let mut p = Vec::with_capacity(n_max + 1);
    let mut w = 1.0 - q;
    let mut total = 0.0;
    for _ in 0..=n_max {
        p.push(w);
        total += w;
        w *= q;
    }
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}

/// Thermal (geometric) mixture truncated at `n_max` and renormalized.
/// The discarded tail is exactly q^{N_max+1}; truncations dropping ≥ 1e-4
/// are rejected as unrepresentative.
pub fn thermal_state(mean_n: f64, n_max: usize) -> Result<Truncated<DensityOperator>> {
    let p = thermal_distribution(mean_n, n_max)?;
    let q = mean_n / (1.0 + mean_n);
    let discarded = q.powi(n_max as i32 + 1);
    if discarded >= THERMAL_TAIL_TOL {
        return Err(Error::Truncation { tail_mass: discarded });
    }
    let diag: Vec<C64> = p.iter().map(|&v| C64::new(v, 0.0)).collect();
    let rho = OperatorMatrix::from_diag(Space::field(n_max + 1), &diag);
    Ok(Truncated {
        value: DensityOperator::new(rho)?,
        discarded_mass: discarded,
    })
}

/// Exact Poisson weights e^{−μ} μⁿ/n! for n = 0..count−1 (not renormalized).
pub fn poisson_weights(mean: f64, count: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(count);
    let mut p = (-mean).exp();
    for n in 0..count {
        w.push(p);
        p *= mean / ((n as f64) + 1.0);
    }
    w
}

/// Normalized atomic superposition c_e∣e⟩ + c_g∣g⟩ (amplitudes must be
/// normalized within 1e-9).
pub fn atom_state(c_e: C64, c_g: C64) -> Result<StateVector> {
    StateVector::new(Space::atom(), alloc::vec![c_e, c_g])
}

pub fn excited_atom() -> StateVector {
    StateVector::basis(Space::atom(), 0)
}

pub fn ground_atom() -> StateVector {
    StateVector::basis(Space::atom(), 1)
}

/// Which canonical field state to prepare.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldKind {
    Fock(usize),
    Coherent(C64),
    Thermal(f64),
}

/// A field preparation plus its truncation, validated as a pair:
/// Fock states keep one level of emission headroom (n ≤ n_max − 2), and
/// coherent/thermal tails must fall under their tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub n_max: usize,
}

/// A prepared field state: pure or mixed depending on the preparation.
#[derive(Clone, Debug)]
pub enum FieldState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl FieldState {
    /// Uniform density-operator view.
    pub fn density(&self) -> DensityOperator {
        match self {
            FieldState::Pure(psi) => psi.to_density(),
            FieldState::Mixed(rho) => rho.clone(),
        }
    }
}

impl FieldSpec {
    pub fn new(kind: FieldKind, n_max: usize) -> Result<Self> {
        let spec = FieldSpec { kind, n_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FieldKind::Fock(n) => {
                if self.n_max < 2 || n + 2 > self.n_max {
                    return Err(Error::InvalidDimension {
                        what: "fock index (needs n ≤ n_max − 2 for emission headroom)",
                        got: n,
                        min: 0,
                    });
                }
                Ok(())
            }
            FieldKind::Coherent(alpha) => coherent_state(alpha, self.n_max).map(|_| ()),
            FieldKind::Thermal(mean_n) => thermal_state(mean_n, self.n_max).map(|_| ()),
        }
    }

    /// Prepare the field state (pure for Fock/coherent, mixed for thermal).
    pub fn build(&self) -> Result<FieldState> {
        match self.kind {
            FieldKind::Fock(n) => {
                self.validate()?;
                Ok(FieldState::Pure(fock_state(n, self.n_max)?))
            }
            FieldKind::Coherent(alpha) => {
                Ok(FieldState::Pure(coherent_state(alpha, self.n_max)?.value))
            }
            FieldKind::Thermal(mean_n) => {
                Ok(FieldState::Mixed(thermal_state(mean_n, self.n_max)?.value))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{expectation, number_operator};
    use approx::assert_relative_eq;

    #[test]
    fn fock_state_occupies_one_level() {
        let f = fock_state(3, 6).unwrap();
        assert_eq!(f.amplitudes()[3], C64::new(1.0, 0.0));
        assert_eq!(f.norm(), 1.0);
        assert!(fock_state(7, 6).is_err());
        // n = n_max allowed at the operator level (headroom is FieldSpec's rule)
        assert!(fock_state(6, 6).is_ok());
    }

    #[test]
    fn coherent_amplitudes_follow_the_poisson_law() {
        let alpha = C64::new(2.0, 0.0);
        let n_max = coherent_default_n_max(2.0);
        let coh = coherent_state(alpha, n_max).unwrap();
        let pois = poisson_weights(4.0, n_max + 1);
        // populations match the exact Poisson pmf deep into the tail region
        let upto = (4.0 + 8.0 * 2.0) as usize; // ⟨n⟩ + 8√⟨n⟩
        for n in 0..=upto {
            let pop = coh.value.amplitudes()[n].norm_sqr();
            assert!(
                (pop - pois[n]).abs() < 1e-12,
                "n={n}: {} vs {}",
                pop,
                pois[n]
            );
        }
        assert!(coh.discarded_mass < 1e-12);
    }

    #[test]
    fn coherent_mean_photon_number_is_alpha_squared() {
        let alpha = C64::new(1.3, -0.4);
        let asq = alpha.norm_sqr();
        let n_max = coherent_default_n_max(alpha.norm());
        let coh = coherent_state(alpha, n_max).unwrap().value;
        let n_op = number_operator(n_max + 1).unwrap();
        let mean = expectation(&coh.to_density(), &n_op).unwrap().re;
        assert_relative_eq!(mean, asq, max_relative = 1e-10);
    }

    #[test]
    fn coherent_rejects_starved_truncation() {
        let res = coherent_state(C64::new(5.0, 0.0), 20);
        assert!(matches!(res, Err(Error::Truncation { .. })));
    }

    #[test]
    fn coherent_tail_metadata_accounts_for_all_mass() {
        let alpha = C64::new(3.0, 1.0);
        let n_max = coherent_default_n_max(alpha.norm());
        let coh = coherent_state(alpha, n_max).unwrap();
        // retained (pre-renormalization) + discarded = 1
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        let mut retained = 0.0;
        for n in 0..=n_max {
            retained += c.norm_sqr();
            c *= alpha / C64::new(((n as f64) + 1.0).sqrt(), 0.0);
        }
        assert!((retained + coh.discarded_mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_ground_weight_is_one_over_mean_plus_one() {
        // ⟨n⟩ = 10 → P₀ = 1/11 before truncation renormalization
        let n_max = 220;
        let th = thermal_state(10.0, n_max).unwrap();
        let q: f64 = 10.0 / 11.0;
        let renorm = 1.0 - q.powi(n_max as i32 + 1);
        let p0 = th.value.at(0, 0).re;
        assert_relative_eq!(p0, (1.0 / 11.0) / renorm, max_relative = 1e-13);
        assert_relative_eq!(p0, 1.0 / 11.0, max_relative = 1e-8);
        assert_relative_eq!(th.discarded_mass, q.powi(221), max_relative = 1e-12);
    }

    #[test]
    fn truncated_thermal_means_match_frozen_references() {
        // geometric-series oracle values for ⟨n⟩ = 10
        for (n_max, frozen) in [(120usize, 9.998813480924), (220, 9.999999842743)] {
            let p = thermal_distribution(10.0, n_max).unwrap();
            let mean: f64 = p.iter().enumerate().map(|(m, &w)| (m as f64) * w).sum();
            assert_relative_eq!(mean, frozen, max_relative = 1e-10);
        }
        // recovery within 1e-6 needs the deep truncation
        let p = thermal_distribution(10.0, 220).unwrap();
        let mean: f64 = p.iter().enumerate().map(|(m, &w)| (m as f64) * w).sum();
        assert!((mean - 10.0).abs() < 1e-6);
    }

    #[test]
    fn thermal_zero_mean_is_vacuum() {
        let th = thermal_state(0.0, 4).unwrap();
        assert_relative_eq!(th.value.at(0, 0).re, 1.0, max_relative = 1e-15);
        assert_eq!(th.discarded_mass, 0.0);
        assert!(th.value.purity() > 1.0 - 1e-14);
    }

    #[test]
    fn thermal_rejects_unrepresentative_truncation() {
        // ⟨n⟩ = 10 at n_max = 60: tail (10/11)^61 ≈ 3e-3 ≥ 1e-4
        assert!(matches!(thermal_state(10.0, 60), Err(Error::Truncation { .. })));
        // n_max = 120: tail ≈ 9.8e-6 — accepted
        assert!(thermal_state(10.0, 120).is_ok());
    }

    #[test]
    fn thermal_distribution_is_normalized_and_geometric() {
        let p = thermal_distribution(2.5, 80).unwrap();
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let q = 2.5 / 3.5;
        for m in 0..79 {
            assert_relative_eq!(p[m + 1] / p[m], q, max_relative = 1e-12);
        }
    }

    #[test]
    fn atom_state_validates_normalization() {
        let s = atom_state(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        assert_relative_eq!(s.amplitudes()[0].re, 0.6, max_relative = 1e-15);
        assert!(atom_state(C64::new(1.0, 0.0), C64::new(0.5, 0.0)).is_err());
        assert_eq!(excited_atom().amplitudes()[0], C64::new(1.0, 0.0));
        assert_eq!(ground_atom().amplitudes()[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn field_spec_keeps_fock_headroom() {
        assert!(FieldSpec::new(FieldKind::Fock(3), 5).is_ok());
        assert!(FieldSpec::new(FieldKind::Fock(4), 5).is_err());
        assert!(FieldSpec::new(FieldKind::Fock(0), 2).is_ok());
    }

    #[test]
    fn field_spec_builds_each_kind() {
        let fock = FieldSpec::new(FieldKind::Fock(1), 5).unwrap().build().unwrap();
        assert!(matches!(fock, FieldState::Pure(_)));
        let coh = FieldSpec::new(FieldKind::Coherent(C64::new(1.0, 0.0)), 25)
            .unwrap()
            .build()
            .unwrap();
        assert!(matches!(coh, FieldState::Pure(_)));
        let th = FieldSpec::new(FieldKind::Thermal(0.85), 30).unwrap().build().unwrap();
        match th {
            FieldState::Mixed(rho) => assert!((rho.trace() - 1.0).abs() < 1e-12),
            FieldState::Pure(_) => panic!("thermal must be mixed"),
        }
    }

    #[test]
    fn field_spec_rejects_starved_truncations() {
        assert!(FieldSpec::new(FieldKind::Coherent(C64::new(5.0, 0.0)), 30).is_err());
        assert!(FieldSpec::new(FieldKind::Thermal(10.0), 50).is_err());
    }

    #[test]
    fn default_coherent_truncation_has_tiny_tail() {
        for alpha_mod in [0.5f64, 1.0, 2.0, 5.0] {
            let n_max = coherent_default_n_max(alpha_mod);
            let coh = coherent_state(C64::new(alpha_mod, 0.0), n_max).unwrap();
            assert!(coh.discarded_mass < 1e-10, "∣α∣ = {alpha_mod}");
        }
    }
}
