//! Field measurement through a resonant two-level probe.
//!
//! An atom crosses the cavity for a time t and its state is read out on
//! exit; conditioned on the result, the field undergoes one of two Kraus
//! operations. For an initially excited probe:
//!
//!   K_ee = cos(gt·√(N̂+1))              (atom still excited)
//!   K_ge = −i a†·sin(gt·√(N̂+1))/√(N̂+1)  (atom decayed, photon deposited)
//!
//! with K_ee†K_ee + K_ge†K_ge = 𝟙 exactly on the truncated space (the edge
//! entry of K_ee is pinned to 1, matching the stranded state ∣e,N_max⟩).
//! A ground-state probe gives the absorbing family K_gg = cos(gt·√N̂),
//! K_eg = −i a·sin(gt·√N̂)/√N̂, complete with no pinning because absorption
//! moves support down the ladder.


#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::dynamics::{edge_mass_density, evolution_operator, guard_edge};
use crate::hilbert::{DensityOperator, OperatorMatrix};
use crate::model::JCParams;
use crate::{Error, Result, Time};

/// Probabilities below this are treated as impossible outcomes: conditioning
/// on them would amplify rounding noise into a nonsense post-measurement
/// state.
pub const OUTCOME_PROBABILITY_FLOOR: f64 = 1e-12;

/// Atomic readout result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Excited,
    Ground,
}

/// Kraus pair for an initially excited probe atom. Both operators act on the
/// field space alone.
#[derive(Clone, Debug)]
pub struct ChannelPair {
    k_ee: OperatorMatrix,
    k_ge: OperatorMatrix,
    t: f64,
    params: JCParams,
}

/// Kraus pair for an initially ground-state probe (photon absorption).
#[derive(Clone, Debug)]
pub struct GroundChannelPair {
    k_gg: OperatorMatrix,
    k_eg: OperatorMatrix,
    t: f64,
    params: JCParams,
}

/// Build the excited-probe Kraus pair for interaction time `t` on a field
/// truncated at `n_max`. Resonance is required: off resonance the atom-field
/// entanglement no longer factors into this two-operator form.
pub fn kraus_pair(p: JCParams, t: Time, n_max: usize) -> Result<ChannelPair> {
    if !p.is_resonant() {
        return Err(Error::UnsupportedRegime(
            "measurement channels are derived from the resonant propagator",
        ));
    }
    let u = evolution_operator(p, t, n_max)?;
    Ok(ChannelPair {
        k_ee: u.u_ee().clone().with_label("K_ee"),
        k_ge: u.u_ge().clone().with_label("K_ge"),
        t: u.t(),
        params: p,
    })
}

/// Build the ground-probe (absorbing) Kraus pair.
pub fn kraus_pair_ground(p: JCParams, t: Time, n_max: usize) -> Result<GroundChannelPair> {
    if !p.is_resonant() {
        return Err(Error::UnsupportedRegime(
            "measurement channels are derived from the resonant propagator",
        ));
    }
    let u = evolution_operator(p, t, n_max)?;
    Ok(GroundChannelPair {
        k_gg: u.u_gg().clone().with_label("K_gg"),
        k_eg: u.u_eg().clone().with_label("K_eg"),
        t: u.t(),
        params: p,
    })
}

impl ChannelPair {
    /// No-flip operator cos(gt·√(N̂+1)), edge entry pinned to 1.
    pub fn k_ee(&self) -> &OperatorMatrix {
        &self.k_ee
    }

    /// Emission operator −i a†·sin(gt·√(N̂+1))/√(N̂+1).
    pub fn k_ge(&self) -> &OperatorMatrix {
        &self.k_ge
    }

    /// Absolute interaction time.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn params(&self) -> JCParams {
        self.params
    }

    /// ‖K_ee†K_ee + K_ge†K_ge − 𝟙‖_max; zero up to rounding by construction.
    pub fn completeness_dev(&self) -> f64 {
        let sum = &(&self.k_ee.adjoint() * &self.k_ee) + &(&self.k_ge.adjoint() * &self.k_ge);
        let id = OperatorMatrix::identity(self.k_ee.space());
        (&sum - &id).max_abs()
    }

    /// POVM elements (F_e, F_g) = (K_ee†K_ee, K_ge†K_ge) so that
    /// P(outcome) = Tr(F·ρ).
    pub fn povm_elements(&self) -> (OperatorMatrix, OperatorMatrix) {
        (
            (&self.k_ee.adjoint() * &self.k_ee).with_label("F_e"),
            (&self.k_ge.adjoint() * &self.k_ge).with_label("F_g"),
        )
    }

    fn kraus_for(&self, outcome: Outcome) -> &OperatorMatrix {
        match outcome {
            Outcome::Excited => &self.k_ee,
            Outcome::Ground => &self.k_ge,
        }
    }
}

impl GroundChannelPair {
    /// No-flip operator cos(gt·√N̂).
    pub fn k_gg(&self) -> &OperatorMatrix {
        &self.k_gg
    }

    /// Absorption operator −i a·sin(gt·√N̂)/√N̂.
    pub fn k_eg(&self) -> &OperatorMatrix {
        &self.k_eg
    }

    /// Absolute interaction time.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn params(&self) -> JCParams {
        self.params
    }

    /// ‖K_gg†K_gg + K_eg†K_eg − 𝟙‖_max; zero up to rounding with no edge
    /// pinning needed.
    pub fn completeness_dev(&self) -> f64 {
        let sum = &(&self.k_gg.adjoint() * &self.k_gg) + &(&self.k_eg.adjoint() * &self.k_eg);
        let id = OperatorMatrix::identity(self.k_gg.space());
        (&sum - &id).max_abs()
    }
}

fn require_field_space(rho: &DensityOperator, context: &'static str) -> Result<usize> {
    match (rho.space().atoms(), rho.space().field_dim()) {
        (0, Some(fd)) if fd >= 2 => Ok(fd),
        _ => Err(Error::WrongSpace { context }),
    }
}

/// Conditional state update for a recorded readout: returns the renormalized
/// post-measurement field state and the outcome probability Tr(KρK†).
///
/// The input must be a field-space density with negligible support near the
/// truncation edge (population < 1e-10 at n ≥ N_max − 2), since emission can
/// push population one step up the ladder. Outcomes with probability below
/// [`OUTCOME_PROBABILITY_FLOOR`] are rejected.
pub fn selective_update(
    rho_f: &DensityOperator,
    p: JCParams,
    t: Time,
    outcome: Outcome,
) -> Result<(DensityOperator, f64)> {
    let fd = require_field_space(rho_f, "selective_update: need a bare field state")?;
    guard_edge(edge_mass_density(rho_f))?;
    let pair = kraus_pair(p, t, fd - 1)?;
    let k = pair.kraus_for(outcome);
    let mapped = conjugate(k, rho_f);
    let prob = trace_re(&mapped);
    if prob < OUTCOME_PROBABILITY_FLOOR {
        return Err(Error::ImpossibleOutcome { probability: prob });
    }
    let scaled = &mapped * crate::C64::new(1.0 / prob, 0.0);
    Ok((DensityOperator::new(scaled)?, prob))
}

/// Unconditional (readout discarded) channel: ρ ↦ K_ee ρ K_ee† + K_ge ρ K_ge†.
/// Trace-preserving by Kraus completeness; the output is intentionally not
/// renormalized so trace drift stays measurable.
pub fn nonselective_map(rho_f: &DensityOperator, p: JCParams, t: Time) -> Result<DensityOperator> {
    let fd = require_field_space(rho_f, "nonselective_map: need a bare field state")?;
    guard_edge(edge_mass_density(rho_f))?;
    let pair = kraus_pair(p, t, fd - 1)?;
    let sum = &conjugate(&pair.k_ee, rho_f) + &conjugate(&pair.k_ge, rho_f);
    Ok(DensityOperator::from_parts_unchecked(rho_f.space(), sum.data().to_vec()))
}

/// Outcome probabilities (P_excited, P_ground) without state update.
pub fn outcome_probabilities(rho_f: &DensityOperator, p: JCParams, t: Time) -> Result<(f64, f64)> {
    let fd = require_field_space(rho_f, "outcome_probabilities: need a bare field state")?;
    let pair = kraus_pair(p, t, fd - 1)?;
    let (f_e, f_g) = pair.povm_elements();
    let pe = crate::hilbert::expectation(rho_f, &f_e)?.re;
    let pg = crate::hilbert::expectation(rho_f, &f_g)?.re;
    Ok((pe, pg))
}

/// KρK† as a plain matrix.
fn conjugate(k: &OperatorMatrix, rho: &DensityOperator) -> OperatorMatrix {
    let kr = k * &rho.as_operator();
    &kr * &k.adjoint()
}

fn trace_re(m: &OperatorMatrix) -> f64 {
    m.trace().re
}
