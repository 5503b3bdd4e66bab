//! Multi-atom cavity protocols: atoms cross the resonant cavity one at a
//! time, each interacting for a calibrated pulse area θ = Ω₀t, entangling
//! with the field and — through it — with the atoms that came before.
//!
//! The joint state lives on atom₁ ⊗ atom₂ ⊗ … ⊗ field, atoms ordered by
//! injection with the field factor last. Everything is in the resonant
//! interaction picture, so the "wait" between probes (field alone in the
//! cavity) is exactly the identity and a pulse of area θ rotates each
//! ∣e,n⟩ ↔ ∣g,n+1⟩ pair by the half-angle (θ/2)·√(n+1).
//!
//! Two phase conventions for that rotation are common and physically
//! equivalent up to local phases:
//!
//!   Standard:     [[cos, −i·sin], [−i·sin, cos]]   (bare JC coupling)
//!   RealRotation: [[cos,   −sin], [  sin,  cos]]   (phase-adjusted drive)

use alloc::vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::hilbert::{DensityOperator, Space, StateVector};
use crate::{Error, Result, C64};

/// Cap on atoms in a sequence: the joint space grows as 2^k·(N_max+1).
pub const MAX_SEQUENCE_ATOMS: usize = 4;

/// Cap on the field truncation inside sequences, for the same reason.
pub const MAX_SEQUENCE_FIELD_N: usize = 8;

/// Phase convention of the resonant pulse rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseConvention {
    /// Bare JC coupling: off-diagonal −i·sin.
    Standard,
    /// Real rotation matrix (− sin / + sin), the convention in which the
    /// first generation step reads (∣e,0⟩ + ∣g,1⟩)/√2 with real amplitudes.
    RealRotation,
}

/// Internal atomic state of a probe as it enters the cavity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AtomInit {
    Excited,
    Ground,
    /// c_e∣e⟩ + c_g∣g⟩, normalized on use.
    Superposition { c_e: C64, c_g: C64 },
}

impl AtomInit {
    fn amplitudes(&self) -> Result<[C64; 2]> {
        match *self {
            AtomInit::Excited => Ok([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            AtomInit::Ground => Ok([C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
            AtomInit::Superposition { c_e, c_g } => {
                let atom =
                    StateVector::from_unnormalized(Space::atom(), vec![c_e, c_g])?;
                Ok([atom.amplitudes()[0], atom.amplitudes()[1]])
            }
        }
    }
}

/// One probe crossing: inject the atom, drive a pulse of the given area,
/// then idle. The idle time is validated but contributes nothing in the
/// resonant interaction picture (free field evolution is the identity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceStep {
    pub atom_init: AtomInit,
    /// Vacuum pulse area θ = Ω₀t ≥ 0.
    pub pulse_area: f64,
    /// Idle time after the probe exits (scaled units, informational).
    pub wait_after: f64,
}

impl SequenceStep {
    pub fn excited(pulse_area: f64) -> Self {
        SequenceStep { atom_init: AtomInit::Excited, pulse_area, wait_after: 0.0 }
    }

    pub fn ground(pulse_area: f64) -> Self {
        SequenceStep { atom_init: AtomInit::Ground, pulse_area, wait_after: 0.0 }
    }
}

/// Joint pure state of the probes fired so far plus the field.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiAtomState {
    state: StateVector,
}

impl MultiAtomState {
    /// Empty cavity: no atoms yet, field in the vacuum.
    pub fn vacuum(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
        }
        Ok(MultiAtomState { state: StateVector::basis(Space::field(n_max + 1), 0) })
    }

    pub fn joint(&self) -> &StateVector {
        &self.state
    }

    pub fn num_atoms(&self) -> usize {
        self.state.space().atoms()
    }

    pub fn field_dim(&self) -> usize {
        self.state.space().field_dim().expect("protocol states always carry the field")
    }

    pub fn density(&self) -> DensityOperator {
        self.state.to_density()
    }

    /// Reduced state of atom `i` (injection order).
    pub fn reduced_atom(&self, i: usize) -> Result<DensityOperator> {
        self.density().reduce_keeping(&[i])
    }

    /// Reduced two-atom state, basis ∣eᵢ eⱼ⟩, ∣eᵢ gⱼ⟩, ∣gᵢ eⱼ⟩, ∣gᵢ gⱼ⟩.
    pub fn reduced_pair(&self, i: usize, j: usize) -> Result<DensityOperator> {
        if i >= j {
            return Err(Error::Protocol("reduced_pair wants ascending atom indices"));
        }
        self.density().reduce_keeping(&[i, j])
    }

    /// Reduced field state.
    pub fn reduced_field(&self) -> Result<DensityOperator> {
        self.density().reduce_keeping(&[self.num_atoms()])
    }

    /// P(∣e⟩) for atom `i`.
    pub fn atom_excitation(&self, i: usize) -> Result<f64> {
        Ok(self.reduced_atom(i)?.populations()[0])
    }
}

/// Append a fresh probe in state `amps` = (c_e, c_g) to the joint register:
/// the new atom becomes the last atom factor before the field.
fn inject_atom(state: &StateVector, amps: [C64; 2]) -> Result<StateVector> {
    let atoms = state.space().atoms();
    let fd = state.space().field_dim().expect("protocol states always carry the field");
    let new_space = Space::joint(atoms + 1, fd);
    let cur = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); new_space.dim()];
    for a in 0..(1usize << atoms) {
        for n in 0..fd {
            let amp = cur[a * fd + n];
            // new atom occupies the least-significant atom slot
            out[(a * 2) * fd + n] = amp * amps[0];
            out[(a * 2 + 1) * fd + n] = amp * amps[1];
        }
    }
    StateVector::from_unnormalized(new_space, out)
}

/// Resonant pulse of area θ on atom `atom` (injection order): each pair
/// ∣…e…, n⟩ ↔ ∣…g…, n+1⟩ rotates by the half-angle (θ/2)√(n+1). The edge
/// state ∣…e…, N_max⟩ has no partner and is left untouched (exact for the
/// truncated model); protocol states must keep field support clear of the
/// edge for physical results, which the sequence caps guarantee by sizing.
pub fn apply_pulse(
    state: &MultiAtomState,
    atom: usize,
    area: f64,
    convention: PulseConvention,
) -> Result<MultiAtomState> {
    let k = state.num_atoms();
    if atom >= k {
        return Err(Error::Protocol("pulse addresses an atom that was never injected"));
    }
    if !(area.is_finite() && area >= 0.0) {
        return Err(Error::Protocol("pulse area must be finite and non-negative"));
    }
    let fd = state.field_dim();
    let bit = 1usize << (k - 1 - atom); // injection order: newest atom least significant
    let mut amps = state.joint().amplitudes().to_vec();
    for a in 0..(1usize << k) {
        if a & bit != 0 {
            continue; // enumerate e-sector members of each pair once
        }
        for n in 0..fd - 1 {
            let i = a * fd + n;
            let j = (a | bit) * fd + (n + 1);
            let half = 0.5 * area * ((n as f64) + 1.0).sqrt();
            let (s, c) = half.sin_cos();
            let (ce, cg) = (amps[i], amps[j]);
            let (ce2, cg2) = match convention {
                PulseConvention::Standard => {
                    let is = C64::new(0.0, -s);
                    (c * ce + is * cg, is * ce + c * cg)
                }
                PulseConvention::RealRotation => (c * ce - s * cg, s * ce + c * cg),
            };
            amps[i] = ce2;
            amps[j] = cg2;
        }
    }
    Ok(MultiAtomState { state: StateVector::from_unnormalized(state.joint().space(), amps)? })
}

/// Fire the probe sequence into an initially empty cavity. At most
/// [`MAX_SEQUENCE_ATOMS`] steps and a field truncated at
/// [`MAX_SEQUENCE_FIELD_N`]: the joint dimension is 2^k·(N_max+1).
pub fn run_sequence(
    steps: &[SequenceStep],
    n_max: usize,
    convention: PulseConvention,
) -> Result<MultiAtomState> {
    if steps.len() > MAX_SEQUENCE_ATOMS {
        return Err(Error::Protocol("sequence exceeds the atom cap"));
    }
    if n_max > MAX_SEQUENCE_FIELD_N {
        return Err(Error::Protocol("sequence field truncation exceeds the cap"));
    }
    let mut state = MultiAtomState::vacuum(n_max)?;
    for step in steps {
        if !(step.wait_after.is_finite() && step.wait_after >= 0.0) {
            return Err(Error::Protocol("wait_after must be finite and non-negative"));
        }
        let newest = state.num_atoms(); // the incoming atom's injection index
        let amps = step.atom_init.amplitudes()?;
        let injected = MultiAtomState { state: inject_atom(state.joint(), amps)? };
        state = apply_pulse(&injected, newest, step.pulse_area, convention)?;
        // wait_after: identity in the resonant interaction picture
    }
    Ok(state)
}

/// Result of a single-probe state transfer.
#[derive(Clone, Debug)]
pub struct SwapOutcome {
    /// Joint atom ⊗ field state after the π pulse.
    pub final_state: StateVector,
    /// Overlap with the ideal map ∣ψ⟩_A ∣0⟩ → ∣g⟩ ⊗ (−i c_e∣1⟩ + c_g∣0⟩).
    pub fidelity: f64,
}

/// π-pulse state transfer: an atom carrying c_e∣e⟩ + c_g∣g⟩ writes its state
/// onto the vacuum field qubit {∣0⟩, ∣1⟩} (standard convention, so the
/// transferred amplitude picks up the −i emission phase).
pub fn swap_excitation(atom: &StateVector, n_max: usize) -> Result<SwapOutcome> {
    if atom.space() != Space::atom() {
        return Err(Error::WrongSpace { context: "swap_excitation: need a bare atom state" });
    }
    let step = SequenceStep {
        atom_init: AtomInit::Superposition { c_e: atom.amplitudes()[0], c_g: atom.amplitudes()[1] },
        pulse_area: core::f64::consts::PI,
        wait_after: 0.0,
    };
    let out = run_sequence(&[step], n_max, PulseConvention::Standard)?;
    let fd = n_max + 1;
    let mut target = vec![C64::new(0.0, 0.0); 2 * fd];
    target[fd] = atom.amplitudes()[1]; // ∣g, 0⟩ ← c_g
    target[fd + 1] = C64::new(0.0, -1.0) * atom.amplitudes()[0]; // ∣g, 1⟩ ← −i·c_e
    let target = StateVector::from_unnormalized(Space::atom_field(fd), target)?;
    let fidelity = crate::hilbert::fidelity_pure(out.joint(), &target)?;
    Ok(SwapOutcome { final_state: out.joint().clone(), fidelity })
}

/// Two-probe entanglement generation: a π/2 pulse stores half an excitation
/// in the field, a π pulse maps it onto the second atom. The output is the
/// singlet (∣e₁g₂⟩ − ∣g₁e₂⟩)/√2 with the field back in the vacuum,
/// independent of pulse convention up to local phases.
pub fn epr_sequence(n_max: usize) -> Result<MultiAtomState> {
    epr_sequence_with(n_max, PulseConvention::RealRotation)
}

/// [`epr_sequence`] with an explicit pulse convention.
pub fn epr_sequence_with(n_max: usize, convention: PulseConvention) -> Result<MultiAtomState> {
    let steps = [
        SequenceStep::excited(core::f64::consts::FRAC_PI_2),
        SequenceStep::ground(core::f64::consts::PI),
    ];
    run_sequence(&steps, n_max, convention)
}

/// Best overlap of a two-atom density with the Bell family
/// (∣eg⟩ + e^{iφ}∣ge⟩)/√2, maximized over the relative phase φ:
/// F = ½(ρ_eg,eg + ρ_ge,ge) + ∣ρ_eg,ge∣.
pub fn bell_fidelity(rho_pair: &DensityOperator) -> Result<f64> {
    if rho_pair.space().atoms() != 2 || rho_pair.space().field_dim().is_some() {
        return Err(Error::WrongSpace { context: "bell_fidelity: need a two-atom state" });
    }
    let f = 0.5 * (rho_pair.at(1, 1).re + rho_pair.at(2, 2).re) + rho_pair.at(1, 2).norm();
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::atom_state;
    use core::f64::consts::{FRAC_PI_2, PI};

    const N_MAX: usize = 4;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn swap_writes_the_atomic_qubit_onto_the_field() {
        let atom = atom_state(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let out = swap_excitation(&atom, N_MAX).unwrap();
        assert!(out.fidelity > 1.0 - 1e-10, "fidelity {}", out.fidelity);
        let fd = N_MAX + 1;
        let amps = out.final_state.amplitudes();
        // ∣g,0⟩ keeps c_g, ∣g,1⟩ gains −i·c_e, nothing else populated
        assert!((amps[fd] - c(0.0, 0.8)).norm() < 1e-12);
        assert!((amps[fd + 1] - c(0.0, -0.6)).norm() < 1e-12);
        let rest: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fd && *i != fd + 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!(rest < 1e-24);
    }

    #[test]
    fn double_swap_returns_the_qubit_with_a_sign_flip() {
        // two π pulses: ∣ψ⟩∣0⟩ → ∣g⟩(−i c_e∣1⟩ + c_g∣0⟩) → (−c_e∣e⟩ + c_g∣g⟩)∣0⟩
        let (ce, cg) = (c(0.6, 0.0), c(0.0, 0.8));
        let atom = atom_state(ce, cg).unwrap();
        let once = swap_excitation(&atom, N_MAX).unwrap();
        let state = MultiAtomState { state: once.final_state };
        let twice = apply_pulse(&state, 0, PI, PulseConvention::Standard).unwrap();
        let amps = twice.joint().amplitudes();
        let fd = N_MAX + 1;
        assert!((amps[0] - (-ce)).norm() < 1e-12, "∣e,0⟩ amplitude");
        assert!((amps[fd] - cg).norm() < 1e-12, "∣g,0⟩ amplitude");
        assert!((twice.atom_excitation(0).unwrap() - 0.36).abs() < 1e-12);
    }

    #[test]
    fn half_pulse_splits_the_excitation_with_real_amplitudes() {
        let steps = [SequenceStep::excited(FRAC_PI_2)];
        let state = run_sequence(&steps, N_MAX, PulseConvention::RealRotation).unwrap();
        let fd = N_MAX + 1;
        let amps = state.joint().amplitudes();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0] - c(r, 0.0)).norm() < 1e-12, "∣e,0⟩");
        assert!((amps[fd + 1] - c(r, 0.0)).norm() < 1e-12, "∣g,1⟩");
        let rest: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0 && *i != fd + 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!(rest < 1e-24);
    }

    #[test]
    fn epr_sequence_emits_the_singlet_with_an_empty_cavity() {
        let state = epr_sequence(N_MAX).unwrap();
        assert_eq!(state.num_atoms(), 2);
        let fd = N_MAX + 1;
        let amps = state.joint().amplitudes();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        // ∣e₁ g₂, 0⟩ at A=01 and ∣g₁ e₂, 0⟩ at A=10 with opposite signs
        assert!((amps[fd] - c(r, 0.0)).norm() < 1e-12);
        assert!((amps[2 * fd] - c(-r, 0.0)).norm() < 1e-12);
        let rest: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fd && *i != 2 * fd)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!(rest < 1e-24);

        // field exactly back in the vacuum
        let field = state.reduced_field().unwrap();
        assert!((field.populations()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epr_pair_is_maximally_entangled() {
        for convention in [PulseConvention::RealRotation, PulseConvention::Standard] {
            let state = epr_sequence_with(N_MAX, convention).unwrap();
            let pair = state.reduced_pair(0, 1).unwrap();
            assert!(pair.purity() > 1.0 - 1e-10, "{convention:?}: pure pair");
            let f = bell_fidelity(&pair).unwrap();
            assert!(f > 1.0 - 1e-10, "{convention:?}: Bell fidelity {f}");
            for i in 0..2 {
                let atom = state.reduced_atom(i).unwrap();
                assert!((atom.at(0, 0).re - 0.5).abs() < 1e-10, "atom {i} mixed");
                assert!(atom.at(0, 1).norm() < 1e-10, "atom {i} coherence");
            }
        }
    }

    #[test]
    fn bell_fidelity_scores_product_states_at_one_half() {
        // ∣e g⟩ has half the Bell overlap and no coherence bonus
        let pair = run_sequence(
            &[SequenceStep::excited(0.0), SequenceStep::ground(0.0)],
            N_MAX,
            PulseConvention::Standard,
        )
        .unwrap()
        .reduced_pair(0, 1)
        .unwrap();
        let f = bell_fidelity(&pair).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn later_probes_leave_finished_atoms_alone() {
        let state = epr_sequence(N_MAX).unwrap();
        let pair_before = state.reduced_pair(0, 1).unwrap();
        // a third atom crosses without driving the field
        let steps = [
            SequenceStep::excited(FRAC_PI_2),
            SequenceStep::ground(PI),
            SequenceStep::ground(0.0),
        ];
        let extended = run_sequence(&steps, N_MAX, PulseConvention::RealRotation).unwrap();
        assert_eq!(extended.num_atoms(), 3);
        let pair_after = extended.reduced_pair(0, 1).unwrap();
        let dev = (&pair_after.as_operator() - &pair_before.as_operator()).max_abs();
        assert!(dev < 1e-12, "spectator injection changed the pair: {dev}");

        // driving atom 0 afterwards cannot touch atom 1's reduced state
        let atom1_before = extended.reduced_atom(1).unwrap();
        let driven = apply_pulse(&extended, 0, 1.234, PulseConvention::Standard).unwrap();
        let atom1_after = driven.reduced_atom(1).unwrap();
        let dev = (&atom1_after.as_operator() - &atom1_before.as_operator()).max_abs();
        assert!(dev < 1e-12, "pulse on atom 0 leaked onto atom 1: {dev}");
        assert!((driven.joint().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequence_caps_and_inputs_are_validated() {
        let too_many = vec![SequenceStep::ground(0.0); MAX_SEQUENCE_ATOMS + 1];
        assert!(matches!(
            run_sequence(&too_many, N_MAX, PulseConvention::Standard),
            Err(Error::Protocol(_))
        ));
        assert!(matches!(
            run_sequence(&[], MAX_SEQUENCE_FIELD_N + 1, PulseConvention::Standard),
            Err(Error::Protocol(_))
        ));
        let bad_area = [SequenceStep::excited(-1.0)];
        assert!(matches!(
            run_sequence(&bad_area, N_MAX, PulseConvention::Standard),
            Err(Error::Protocol(_))
        ));
        let empty = run_sequence(&[], N_MAX, PulseConvention::Standard).unwrap();
        assert_eq!(empty.num_atoms(), 0);
        assert!((empty.joint().amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);

        let state = epr_sequence(N_MAX).unwrap();
        assert!(matches!(
            apply_pulse(&state, 2, 1.0, PulseConvention::Standard),
            Err(Error::Protocol(_))
        ));
        assert!(state.reduced_pair(1, 0).is_err());
    }

    #[test]
    fn run_sequence_matches_the_swap_helper() {
        let atom = StateVector::from_unnormalized(
            Space::atom(),
            vec![c(0.28, -0.21), c(0.5, 0.79)],
        )
        .unwrap();
        let direct = swap_excitation(&atom, N_MAX).unwrap();
        let step = SequenceStep {
            atom_init: AtomInit::Superposition {
                c_e: atom.amplitudes()[0],
                c_g: atom.amplitudes()[1],
            },
            pulse_area: PI,
            wait_after: 3.5,
        };
        let via_sequence = run_sequence(&[step], N_MAX, PulseConvention::Standard).unwrap();
        let overlap = via_sequence.joint().inner(&direct.final_state).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        for (a, b) in via_sequence
            .joint()
            .amplitudes()
            .iter()
            .zip(direct.final_state.amplitudes().iter())
        {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn norm_is_preserved_through_long_sequences() {
        let steps = [
            SequenceStep {
                atom_init: AtomInit::Superposition { c_e: c(0.3, 0.4), c_g: c(0.5, -0.2) },
                pulse_area: 1.7,
                wait_after: 0.0,
            },
            SequenceStep::excited(2.9),
            SequenceStep::ground(0.61),
            SequenceStep::excited(4.2),
        ];
        for convention in [PulseConvention::Standard, PulseConvention::RealRotation] {
            let state = run_sequence(&steps, MAX_SEQUENCE_FIELD_N, convention).unwrap();
            assert!((state.joint().norm() - 1.0).abs() < 1e-12, "{convention:?}");
            let field = state.reduced_field().unwrap();
            assert!((field.trace() - 1.0).abs() < 1e-12);
        }
    }
}
