//! Model parameters, Hamiltonians, and per-manifold dressed-state analytics.
//!
//! With ħ = 1 the Hamiltonian on atom ⊗ field is
//!
//! H = (ω_A/2) r₃ + ω (a†a + ½) + g (a r⁺ + a† r⁻),
//!
//! which commutes with the excitation number N = a†a + r⁺r⁻. Each N = n + 1
//! sector is the two-dimensional manifold Ξ(n) = span{∣e,n⟩, ∣g,n+1⟩}; the
//! only one-dimensional sectors are ∣g,0⟩ (N = 0) and — on a truncated
//! space — the stranded edge state ∣e,N_max⟩. [`Manifold`] carries the exact
//! diagonalization of one Ξ(n) block: splitting 𝓡ₙ, mixing angle θₙ, and the
//! dressed eigenvectors. The counter-rotating variant (adds g(a†r⁺ + a r⁻))
//! is available for comparing against the excitation-conserving model.


#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::hilbert::{
    atomic_operators, ladder_operators, number_operator, OperatorMatrix, Space,
};
use crate::{Error, Result, C64};

/// Parameters of the model: field frequency ω, atomic splitting ω_A, and
/// coupling g, all angular frequencies with ħ = 1. The detuning δ = ω_A − ω
/// is computed once at construction and stored exactly as the subtraction
/// result, so every later consumer sees the identical value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JCParams {
    omega: f64,
    omega_a: f64,
    g: f64,
    delta: f64,
}

impl JCParams {
    pub fn new(omega: f64, omega_a: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams("field frequency must be finite and positive"));
        }
        if !(omega_a.is_finite() && omega_a > 0.0) {
            return Err(Error::InvalidParams("atomic frequency must be finite and positive"));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParams("coupling must be finite and non-negative"));
        }
        Ok(JCParams { omega, omega_a, g, delta: omega_a - omega })
    }

    /// Resonant parameters (δ = 0 exactly).
    pub fn resonant(omega: f64, g: f64) -> Result<Self> {
        JCParams::new(omega, omega, g)
    }

    /// Parameters at a detuning given in units of the coupling: ω_A = ω + x·g.
    pub fn detuned_by(omega: f64, g: f64, delta_over_g: f64) -> Result<Self> {
        if !delta_over_g.is_finite() {
            return Err(Error::InvalidParams("detuning must be finite"));
        }
        JCParams::new(omega, omega + delta_over_g * g, g)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// δ = ω_A − ω, exactly as stored.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// ∣δ∣ < 10⁻¹² ω counts as resonant.
    pub fn is_resonant(&self) -> bool {
        self.delta.abs() < 1e-12 * self.omega
    }
}

/// Exact diagonalization of one excitation manifold Ξ(n) = {∣e,n⟩, ∣g,n+1⟩}.
///
/// * `omega_n` — vacuum-scaled coupling Ωₙ = 2g√(n+1) (the resonant splitting)
/// * `r_n` — generalized splitting 𝓡ₙ = √(Ωₙ² + δ²)
/// * `theta_n` — mixing angle θₙ ∈ [0, π/2], with tan 2θₙ = −Ωₙ/δ on the
///   branch that makes θₙ continuous and increasing in δ (π/4 at resonance)
/// * `e_plus` / `e_minus` — dressed energies (n+1)ω ± 𝓡ₙ/2
/// * `dressed_plus` = (sin θₙ, cos θₙ), `dressed_minus` = (cos θₙ, −sin θₙ),
///   real coefficients on the ordered basis (∣e,n⟩, ∣g,n+1⟩)
///
/// For g = 0 the manifold is uncoupled; the angle continues the g > 0 limit
/// (θ = π/2 for δ > 0, θ = 0 for δ < 0). When additionally δ = 0 the doublet
/// is degenerate, any basis diagonalizes, and `degenerate` flags that the
/// reported θ = π/4 is pure convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manifold {
    pub n: usize,
    pub omega_n: f64,
    pub r_n: f64,
    pub theta_n: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub dressed_plus: [f64; 2],
    pub dressed_minus: [f64; 2],
    pub degenerate: bool,
    params: JCParams,
}

impl Manifold {
    pub fn params(&self) -> JCParams {
        self.params
    }
}

/// Dressed-state data for manifold n (photon numbers n and n+1).
pub fn manifold(p: JCParams, n: usize) -> Manifold {
    let delta = p.delta;
    let omega_n = 2.0 * p.g * ((n as f64) + 1.0).sqrt();
    let r_n = omega_n.hypot(delta);

    let (sin_t, cos_t, degenerate) = if omega_n == 0.0 {
        // uncoupled manifold: continue the g → 0⁺ limit of the formulas below
        if delta > 0.0 {
            (1.0, 0.0, false)
        } else if delta < 0.0 {
            (0.0, 1.0, false)
        } else {
            (core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2, true)
        }
    } else {
        // 𝓡ₙ − δ loses precision for δ ≫ Ωₙ; use the conjugate form there
        let r_minus_delta = if delta > 0.0 {
            omega_n * omega_n / (r_n + delta)
        } else {
            r_n - delta
        };
        let den = omega_n.hypot(r_minus_delta);
        (omega_n / den, r_minus_delta / den, false)
    };

    let base = ((n as f64) + 1.0) * p.omega;
    Manifold {
        n,
        omega_n,
        r_n,
        theta_n: sin_t.atan2(cos_t),
        e_plus: base + 0.5 * r_n,
        e_minus: base - 0.5 * r_n,
        dressed_plus: [sin_t, cos_t],
        dressed_minus: [cos_t, -sin_t],
        degenerate,
        params: p,
    }
}

/// Uncoupled (g = 0) energies of the Ξ(n) basis states:
/// E_{e,n} = (n+1)ω + δ/2 and E_{g,n+1} = (n+1)ω − δ/2.
pub fn naked_energies(p: JCParams, n: usize) -> (f64, f64) {
    let base = ((n as f64) + 1.0) * p.omega;
    (base + 0.5 * p.delta, base - 0.5 * p.delta)
}

/// Full excitation-conserving Hamiltonian on atom ⊗ field, truncated at
/// N_max = n_max: H = (ω_A/2) r₃ ⊗ I + ω I ⊗ (a†a + ½) + g (r⁺⊗a + r⁻⊗a†).
///
/// The truncation leaves ∣e, N_max⟩ uncoupled (its partner ∣g, N_max+1⟩ is
/// cut off), so H commutes with the truncated excitation number exactly.
pub fn build_jc_hamiltonian(p: JCParams, n_max: usize) -> Result<OperatorMatrix> {
    if n_max < 1 {
        return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
    }
    let field_dim = n_max + 1;
    let (a, a_dag) = ladder_operators(field_dim)?;
    let (r_plus, r_minus, r3) = atomic_operators();
    let id_atom = OperatorMatrix::identity(Space::atom());
    let id_field = OperatorMatrix::identity(Space::field(field_dim));
    let n_op = number_operator(field_dim)?;

    let atom_term = &r3.tensor(&id_field)? * C64::new(0.5 * p.omega_a, 0.0);
    let field_free = &(&n_op + &(&id_field * C64::new(0.5, 0.0))) * C64::new(p.omega, 0.0);
    let field_term = id_atom.tensor(&field_free)?;
    let coupling = &(&r_plus.tensor(&a)? + &r_minus.tensor(&a_dag)?) * C64::new(p.g, 0.0);
    Ok((&(&atom_term + &field_term) + &coupling).with_label("H"))
}

/// Counter-rotating variant: adds g (r⁺⊗a† + r⁻⊗a) to the Hamiltonian above.
/// Does NOT conserve the excitation number; used to quantify where the
/// excitation-conserving model stops being a good approximation.
pub fn build_rabi_hamiltonian(p: JCParams, n_max: usize) -> Result<OperatorMatrix> {
    let h = build_jc_hamiltonian(p, n_max)?;
    let field_dim = n_max + 1;
    let (a, a_dag) = ladder_operators(field_dim)?;
    let (r_plus, r_minus, _) = atomic_operators();
    let counter = &(&r_plus.tensor(&a_dag)? + &r_minus.tensor(&a)?) * C64::new(p.g, 0.0);
    Ok((&h + &counter).with_label("H_full"))
}

/// Excitation number N = r⁺r⁻ ⊗ I + I ⊗ a†a on the composite space.
pub fn excitation_number(n_max: usize) -> Result<OperatorMatrix> {
    if n_max < 1 {
        return Err(Error::InvalidDimension { what: "n_max", got: n_max, min: 1 });
    }
    let field_dim = n_max + 1;
    let (r_plus, r_minus, _) = atomic_operators();
    let id_field = OperatorMatrix::identity(Space::field(field_dim));
    let id_atom = OperatorMatrix::identity(Space::atom());
    let atom_exc = (&r_plus * &r_minus).tensor(&id_field)?;
    let photons = id_atom.tensor(&number_operator(field_dim)?)?;
    Ok((&atom_exc + &photons).with_label("N"))
}

/// The two single-excitation eigenfrequencies at exact resonance, where the
/// coupled system behaves as two shifted normal modes: ω ± g. The mode with
/// frequency ω + g is the symmetric dressed state ∣+, 0⟩ = (∣e,0⟩ + ∣g,1⟩)/√2
/// and ω − g is ∣−, 0⟩ = (∣e,0⟩ − ∣g,1⟩)/√2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalModes {
    pub freq_plus: f64,
    pub freq_minus: f64,
}

impl NormalModes {
    /// Dressed single-excitation states as amplitudes on (∣e,0⟩, ∣g,1⟩):
    /// the ω+g mode first, then the ω−g mode.
    pub fn mode_vectors(&self) -> ([f64; 2], [f64; 2]) {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        ([s, s], [s, -s])
    }
}

/// Normal-mode picture of the single-excitation sector. Only meaningful at
/// resonance; detuned parameters are rejected.
pub fn normal_modes(p: JCParams) -> Result<NormalModes> {
    if !p.is_resonant() {
        return Err(Error::UnsupportedRegime(
            "normal-mode splitting ω ± g requires resonance",
        ));
    }
    Ok(NormalModes { freq_plus: p.omega + p.g, freq_minus: p.omega - p.g })
}

/// Basis bookkeeping for manifold Ξ(n) inside the composite space truncated
/// at N_max: flat indices of ∣e,n⟩ and ∣g,n+1⟩. Rejects manifolds that stick
/// out of the truncated space (n + 1 > N_max).
pub fn manifold_indices(n: usize, n_max: usize) -> Result<(usize, usize)> {
    if n + 1 > n_max {
        return Err(Error::InvalidDimension { what: "manifold n (needs n+1 ≤ n_max)", got: n, min: 0 });
    }
    let field_dim = n_max + 1;
    Ok((n, field_dim + n + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{hermitian_eigen, StateVector};
    use approx::assert_relative_eq;

    const OMEGA: f64 = 1.0;

    #[test]
    fn detuning_is_the_exact_subtraction() {
        let p = JCParams::new(1.0, 1.25, 0.1).unwrap();
        assert_eq!(p.delta(), 1.25 - 1.0);
        assert!(!p.is_resonant());
        assert!(JCParams::resonant(1.0, 0.1).unwrap().is_resonant());
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(JCParams::new(0.0, 1.0, 0.1).is_err());
        assert!(JCParams::new(1.0, -1.0, 0.1).is_err());
        assert!(JCParams::new(1.0, 1.0, -0.1).is_err());
        assert!(JCParams::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn resonant_manifold_sits_at_forty_five_degrees() {
        let p = JCParams::resonant(OMEGA, 0.05).unwrap();
        for n in [0usize, 1, 7] {
            let m = manifold(p, n);
            let expect_omega_n = 2.0 * 0.05 * ((n + 1) as f64).sqrt();
            assert_relative_eq!(m.omega_n, expect_omega_n, max_relative = 1e-15);
            assert_relative_eq!(m.r_n, expect_omega_n, max_relative = 1e-15);
            assert_relative_eq!(m.theta_n, core::f64::consts::FRAC_PI_4, max_relative = 1e-15);
            let s = core::f64::consts::FRAC_1_SQRT_2;
            assert_relative_eq!(m.dressed_plus[0], s, max_relative = 1e-15);
            assert_relative_eq!(m.dressed_plus[1], s, max_relative = 1e-15);
            assert_relative_eq!(m.dressed_minus[0], s, max_relative = 1e-15);
            assert_relative_eq!(m.dressed_minus[1], -s, max_relative = 1e-15);
            assert!(!m.degenerate);
            // splitting at resonance is Ωₙ (up to rounding of the ± offsets)
            assert_relative_eq!(m.e_plus - m.e_minus, expect_omega_n, max_relative = 1e-13);
        }
    }

    #[test]
    fn dressed_doublet_matches_direct_diagonalization() {
        // 2×2 block [[δ/2, Ω/2], [Ω/2, −δ/2]] + (n+1)ω, against the formulas
        let g = 0.07;
        for delta_over_g in [-3.0, -0.5, 0.0, 0.5, 3.0] {
            let p = JCParams::detuned_by(OMEGA, g, delta_over_g).unwrap();
            for n in [0usize, 4] {
                let m = manifold(p, n);
                let mut block = OperatorMatrix::zeros(Space::atom());
                let base = ((n as f64) + 1.0) * OMEGA;
                block.set(0, 0, C64::new(base + 0.5 * p.delta(), 0.0));
                block.set(0, 1, C64::new(0.5 * m.omega_n, 0.0));
                block.set(1, 0, C64::new(0.5 * m.omega_n, 0.0));
                block.set(1, 1, C64::new(base - 0.5 * p.delta(), 0.0));
                let (evals, vecs) = hermitian_eigen(&block).unwrap();
                assert_relative_eq!(evals[0], m.e_minus, max_relative = 1e-12);
                assert_relative_eq!(evals[1], m.e_plus, max_relative = 1e-12);
                // compare eigenvectors up to sign
                let overlap_plus =
                    (vecs.at(0, 1) * m.dressed_plus[0] + vecs.at(1, 1) * m.dressed_plus[1]).norm();
                let overlap_minus =
                    (vecs.at(0, 0) * m.dressed_minus[0] + vecs.at(1, 0) * m.dressed_minus[1]).norm();
                assert!(overlap_plus > 1.0 - 1e-10, "δ/g={delta_over_g}, n={n}");
                assert!(overlap_minus > 1.0 - 1e-10, "δ/g={delta_over_g}, n={n}");
            }
        }
    }

    #[test]
    fn mixing_angle_increases_with_detuning() {
        // weak coupling keeps ω_A physical across the whole ±5Ω₀ sweep
        let g = 0.01;
        let m0 = manifold(JCParams::resonant(OMEGA, g).unwrap(), 0);
        let omega_0 = m0.omega_n;
        let mut prev = -1.0;
        for k in 0..=100 {
            let delta = -5.0 * omega_0 + 10.0 * omega_0 * (k as f64) / 100.0;
            let p = JCParams::new(OMEGA, OMEGA + delta, g).unwrap();
            let m = manifold(p, 0);
            assert!(m.theta_n > prev, "θ must increase along δ");
            assert!((0.0..=core::f64::consts::FRAC_PI_2).contains(&m.theta_n));
            prev = m.theta_n;
        }
    }

    #[test]
    fn far_detuned_dressed_states_become_naked_states() {
        // g small enough that ∣δ∣ = 10³ Ω₀ still leaves ω_A positive
        let g = 1e-4;
        let m0 = manifold(JCParams::resonant(OMEGA, g).unwrap(), 0);
        // δ = +10³ Ω₀: ∣+,0⟩ → ∣e,0⟩ (atom-like), energies → naked energies
        let delta = 1e3 * m0.omega_n;
        let p = JCParams::new(OMEGA, OMEGA + delta, g).unwrap();
        let m = manifold(p, 0);
        assert!(m.dressed_plus[0] > 1.0 - 1e-5);
        let (e_en, e_gn1) = naked_energies(p, 0);
        assert_relative_eq!(m.e_plus, e_en, max_relative = 1e-6);
        assert_relative_eq!(m.e_minus, e_gn1, max_relative = 1e-6);

        // δ = −10³ Ω₀: ∣+,0⟩ → ∣g,1⟩ (field-like)
        let p = JCParams::new(OMEGA, OMEGA - delta, g).unwrap();
        let m = manifold(p, 0);
        assert!(m.dressed_plus[1] > 1.0 - 1e-5);
    }

    #[test]
    fn stable_angle_formula_survives_extreme_detuning() {
        // naive 𝓡−δ cancels catastrophically at δ/Ω ~ 1e8; the conjugate form
        // Ω²/(𝓡+δ) keeps the small component cos θ ≈ Ω/(2δ) to full precision
        let g = 0.1;
        let m0 = manifold(JCParams::resonant(OMEGA, g).unwrap(), 0);
        let delta = 1e8 * m0.omega_n;
        let p = JCParams::new(OMEGA, OMEGA + delta, g).unwrap();
        let m = manifold(p, 0);
        let expected_cos = m0.omega_n / (2.0 * delta);
        assert_relative_eq!(m.dressed_plus[1], expected_cos, max_relative = 1e-9);
        assert!(m.dressed_plus[0] > 1.0 - 1e-15, "the large component is ∣e,n⟩");
        let norm = m.dressed_plus[0] * m.dressed_plus[0] + m.dressed_plus[1] * m.dressed_plus[1];
        assert_relative_eq!(norm, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn uncoupled_manifold_continues_the_weak_coupling_limit() {
        let p_pos = JCParams::new(OMEGA, OMEGA + 0.3, 0.0).unwrap();
        let m = manifold(p_pos, 2);
        assert_eq!(m.dressed_plus, [1.0, 0.0]);
        assert!(!m.degenerate);
        assert_relative_eq!(m.theta_n, core::f64::consts::FRAC_PI_2, max_relative = 1e-15);

        let p_neg = JCParams::new(OMEGA, OMEGA - 0.3, 0.0).unwrap();
        let m = manifold(p_neg, 2);
        assert_eq!(m.dressed_plus, [0.0, 1.0]);
        assert_relative_eq!(m.theta_n, 0.0, epsilon = 1e-15);

        let p_deg = JCParams::new(OMEGA, OMEGA, 0.0).unwrap();
        let m = manifold(p_deg, 2);
        assert!(m.degenerate);
        assert_relative_eq!(m.theta_n, core::f64::consts::FRAC_PI_4, max_relative = 1e-15);
        assert_relative_eq!(m.e_plus, m.e_minus, max_relative = 1e-15);
    }

    #[test]
    fn minimum_dressed_gap_sits_at_resonance() {
        let g = 0.04;
        let mut best = f64::INFINITY;
        let mut best_delta = f64::NAN;
        for k in -50..=50 {
            let delta = 0.002 * (k as f64);
            let p = JCParams::new(OMEGA, OMEGA + delta, g).unwrap();
            let m = manifold(p, 0);
            let gap = m.e_plus - m.e_minus;
            if gap < best {
                best = gap;
                best_delta = delta;
            }
        }
        assert_eq!(best_delta, 0.0);
        assert_relative_eq!(best, 2.0 * g, max_relative = 1e-14); // Ω₀ = 2g
    }

    #[test]
    fn hamiltonian_ground_matrix_element_includes_zero_point() {
        let p = JCParams::new(OMEGA, 1.3, 0.08).unwrap();
        let h = build_jc_hamiltonian(p, 5).unwrap();
        // ⟨g,0∣H∣g,0⟩ = −ω_A/2 + ω/2
        let g0 = 6 + 0; // atom index 1, field 0
        assert_relative_eq!(h.at(g0, g0).re, -0.5 * 1.3 + 0.5 * OMEGA, max_relative = 1e-14);
        // coupling element ⟨e,0∣H∣g,1⟩ = g√1
        assert_relative_eq!(h.at(0, 7).re, 0.08, max_relative = 1e-14);
        // ⟨e,1∣H∣g,2⟩ = g√2
        assert_relative_eq!(h.at(1, 8).re, 0.08 * 2.0f64.sqrt(), max_relative = 1e-14);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn hamiltonian_commutes_with_excitation_number() {
        let p = JCParams::new(OMEGA, 1.2, 0.1).unwrap();
        let n_max = 6;
        let h = build_jc_hamiltonian(p, n_max).unwrap();
        let n_op = excitation_number(n_max).unwrap();
        let comm = &(&h * &n_op) - &(&n_op * &h);
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn jc_block_spectrum_matches_manifold_energies() {
        let p = JCParams::new(OMEGA, 1.15, 0.09).unwrap();
        let n_max = 8;
        let h = build_jc_hamiltonian(p, n_max).unwrap();
        let (evals, _) = hermitian_eigen(&h).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        expected.push(-0.5 * p.delta()); // ⟨g,0∣H∣g,0⟩ = −ω_A/2 + ω/2 = −δ/2
        for n in 0..n_max {
            let m = manifold(p, n);
            expected.push(m.e_plus);
            expected.push(m.e_minus);
        }
        // stranded edge state |e,N_max⟩: (N_max+1)ω + δ/2
        expected.push(((n_max as f64) + 1.0) * OMEGA + 0.5 * p.delta());
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(expected.len(), evals.len());
        for (got, want) in evals.iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn counter_rotating_term_couples_across_excitation_sectors() {
        let p = JCParams::new(OMEGA, 1.0, 0.3).unwrap();
        let h_full = build_rabi_hamiltonian(p, 4).unwrap();
        // ⟨e,1∣H_full∣g,0⟩ = g (the r⁺⊗a† element absent from the conserving model)
        let e1 = 1;
        let g0 = 5;
        assert_relative_eq!(h_full.at(e1, g0).re, 0.3, max_relative = 1e-14);
        let n_op = excitation_number(4).unwrap();
        let comm = &(&h_full * &n_op) - &(&n_op * &h_full);
        assert!(comm.max_abs() > 0.1); // decidedly non-conserving
    }

    #[test]
    fn normal_modes_split_by_twice_the_coupling() {
        let p = JCParams::resonant(OMEGA, 0.02).unwrap();
        let nm = normal_modes(p).unwrap();
        assert_relative_eq!(nm.freq_plus, OMEGA + 0.02, max_relative = 1e-15);
        assert_relative_eq!(nm.freq_minus, OMEGA - 0.02, max_relative = 1e-15);
        // the mode vectors are the resonant dressed pair
        let m = manifold(p, 0);
        let (v_plus, v_minus) = nm.mode_vectors();
        assert_relative_eq!(v_plus[0], m.dressed_plus[0], max_relative = 1e-15);
        assert_relative_eq!(v_minus[1], m.dressed_minus[1], max_relative = 1e-15);

        let detuned = JCParams::new(OMEGA, 1.5, 0.02).unwrap();
        assert!(matches!(normal_modes(detuned), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn single_excitation_eigstates_match_normal_mode_vectors() {
        let p = JCParams::resonant(OMEGA, 0.02).unwrap();
        let h = build_jc_hamiltonian(p, 3).unwrap();
        let nm = normal_modes(p).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        // ∣±,0⟩ on composite indices: e,0 → 0; g,1 → 5 (field_dim 4)
        let space = Space::atom_field(4);
        let mut plus = alloc::vec![C64::new(0.0, 0.0); 8];
        plus[0] = C64::new(s, 0.0);
        plus[5] = C64::new(s, 0.0);
        let plus = StateVector::new(space, plus).unwrap();
        let h_plus = h.apply_state(&plus).unwrap();
        // H∣+,0⟩ = (ω + g)∣+,0⟩ exactly (zero-point included in ω·1)
        for i in 0..8 {
            let want = plus.amplitudes()[i] * C64::new(nm.freq_plus, 0.0);
            assert!((h_plus.amplitudes()[i] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn manifold_indices_respect_truncation() {
        assert_eq!(manifold_indices(0, 5).unwrap(), (0, 7));
        assert_eq!(manifold_indices(4, 5).unwrap(), (4, 11));
        assert!(manifold_indices(5, 5).is_err());
    }
}
