//! Dense complex linear algebra over the truncated atom ⊗ field space.
//!
//! Basis ordering contract (fixed here, relied on everywhere else):
//! the atom factor comes FIRST in every tensor product, with ∣e⟩ = index 0
//! and ∣g⟩ = index 1; Fock indices ascend 0..=N_max. A composite basis state
//! ∣atom, n⟩ therefore sits at flat index `atom_index · field_dim + n`.
//! Multi-atom joint spaces order the atoms by injection, field factor last.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::{Error, Result, C64};

/// Which factor of the canonical atom ⊗ field space a reduction keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    Atom,
    Field,
}

/// Factorized Hilbert-space shape: `atoms` two-level factors followed by an
/// optional truncated field mode of dimension `field_dim = N_max + 1`.
///
/// The canonical single-atom composite is `Space::atom_field(field_dim)`;
/// protocol joint spaces use `Space::joint(k, field_dim)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Space {
    atoms: usize,
    field_dim: Option<usize>,
}

impl Space {
    /// A single two-level atom.
    pub const fn atom() -> Self {
        Space { atoms: 1, field_dim: None }
    }

    /// A lone field mode truncated at Fock index `field_dim - 1`.
    pub fn field(field_dim: usize) -> Self {
        assert!(field_dim >= 1, "field dimension must be positive");
        Space { atoms: 0, field_dim: Some(field_dim) }
    }

    /// The canonical composite ℂ² ⊗ ℂ^field_dim.
    pub fn atom_field(field_dim: usize) -> Self {
        assert!(field_dim >= 1, "field dimension must be positive");
        Space { atoms: 1, field_dim: Some(field_dim) }
    }

    /// `k` atoms sharing one field mode (protocol joint space).
    pub fn joint(atoms: usize, field_dim: usize) -> Self {
        assert!(field_dim >= 1, "field dimension must be positive");
        Space { atoms, field_dim: Some(field_dim) }
    }

    /// Total dimension 2^atoms · field_dim.
    pub fn dim(&self) -> usize {
        (1usize << self.atoms) * self.field_dim.unwrap_or(1)
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn field_dim(&self) -> Option<usize> {
        self.field_dim
    }

    /// Highest retained Fock index, if a field factor is present.
    pub fn n_max(&self) -> Option<usize> {
        self.field_dim.map(|d| d - 1)
    }

    /// Exactly one atom and the field: the space all JC dynamics runs on.
    pub fn is_atom_field(&self) -> bool {
        self.atoms == 1 && self.field_dim.is_some()
    }

    /// Factor dimensions in tensor order: `atoms` copies of 2, then the field.
    pub fn factors(&self) -> Vec<usize> {
        let mut f = vec![2; self.atoms];
        if let Some(d) = self.field_dim {
            f.push(d);
        }
        f
    }

    /// Tensor combination. The atom block must stay in front, so the left
    /// operand may not already contain a field factor.
    pub fn tensor(&self, rhs: &Space) -> Result<Space> {
        if self.field_dim.is_some() || self.atoms == 0 {
            return Err(Error::WrongSpace {
                context: "tensor: left operand must be atoms-only (atom factors come first)",
            });
        }
        Ok(Space { atoms: self.atoms + rhs.atoms, field_dim: rhs.field_dim })
    }
}

// ---------------------------------------------------------------------------
// OperatorMatrix
// ---------------------------------------------------------------------------

/// Dense square complex matrix tagged with the space it acts on.
///
/// Equality compares space and entries; the optional label is ignored.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    space: Space,
    data: Vec<C64>, // row-major, dim × dim
    label: Option<String>,
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.data == other.data
    }
}

impl OperatorMatrix {
    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        OperatorMatrix { space, data: vec![C64::new(0.0, 0.0); d * d], label: None }
    }

    pub fn identity(space: Space) -> Self {
        let mut m = Self::zeros(space);
        for i in 0..space.dim() {
            m.data[i * space.dim() + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(space: Space, f: impl Fn(usize, usize) -> C64) -> Self {
        let d = space.dim();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(f(i, j));
            }
        }
        OperatorMatrix { space, data, label: None }
    }

    /// Diagonal matrix from its entries.
    pub fn from_diag(space: Space, diag: &[C64]) -> Self {
        assert_eq!(diag.len(), space.dim(), "diagonal length must match dimension");
        let mut m = Self::zeros(space);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * space.dim() + i] = v;
        }
        m
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(String::from(label));
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.space);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// ‖·‖_max: largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max ∣A − A†∣ entry; 0 for exactly Hermitian matrices.
    pub fn hermiticity_dev(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let e = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                if e > dev {
                    dev = e;
                }
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_dev() <= tol
    }

    /// Matrix–vector product.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length must match dimension");
        let mut out = vec![C64::new(0.0, 0.0); d];
        for i in 0..d {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        out
    }

    /// Apply to a state vector on the same space.
    pub fn apply_state(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.space != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
                context: "operator application",
            });
        }
        Ok(StateVector { space: self.space, amps: self.apply_vec(&psi.amps) })
    }

    /// Kronecker product; `self`'s factors precede `rhs`'s.
    pub fn tensor(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        let space = self.space.tensor(&rhs.space)?;
        let (da, db) = (self.dim(), rhs.dim());
        let d = da * db;
        let mut out = OperatorMatrix {
            space,
            data: vec![C64::new(0.0, 0.0); d * d],
            label: None,
        };
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.data[i1 * da + j1];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        out.data[(i1 * db + i2) * d + (j1 * db + j2)] =
                            a * rhs.data[i2 * db + j2];
                    }
                }
            }
        }
        Ok(out)
    }
}

impl core::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.space.dim() + j]
    }
}

impl core::ops::Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator addition needs matching spaces");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect();
        OperatorMatrix { space: self.space, data, label: None }
    }
}

impl core::ops::Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator subtraction needs matching spaces");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect();
        OperatorMatrix { space: self.space, data, label: None }
    }
}

impl core::ops::Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator product needs matching spaces");
        let d = self.dim();
        let mut out = OperatorMatrix::zeros(self.space);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }
}

impl core::ops::Mul<C64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, s: C64) -> OperatorMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        OperatorMatrix { space: self.space, data, label: None }
    }
}

impl core::ops::Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self * C64::new(-1.0, 0.0)
    }
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: Space,
    amps: Vec<C64>,
}

impl StateVector {
    /// Build from amplitudes that are already normalized (within 1e-9).
    pub fn new(space: Space, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amps.len(),
                context: "state construction",
            });
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm_sq_error: (n2 - 1.0).abs() });
        }
        let mut sv = StateVector { space, amps };
        sv.normalize();
        Ok(sv)
    }

    /// Raw-amplitude plumbing: normalizes whatever it is given.
    pub fn from_unnormalized(space: Space, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amps.len(),
                context: "state construction",
            });
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if n2 < 1e-24 {
            return Err(Error::NotNormalized { norm_sq_error: 1.0 });
        }
        let mut sv = StateVector { space, amps };
        sv.normalize();
        Ok(sv)
    }

    /// Basis state ∣index⟩.
    pub fn basis(space: Space, index: usize) -> Self {
        assert!(index < space.dim(), "basis index out of range");
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { space, amps }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub(crate) fn from_parts_unchecked(space: Space, amps: Vec<C64>) -> Self {
        StateVector { space, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescale to unit norm. ‖ψ‖₂ = 1 within 1e-12 afterwards.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// ⟨self∣other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
                context: "inner product",
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; `self`'s factors precede `rhs`'s.
    pub fn tensor(&self, rhs: &StateVector) -> Result<StateVector> {
        let space = self.space.tensor(&rhs.space)?;
        let mut amps = Vec::with_capacity(self.amps.len() * rhs.amps.len());
        for a in &self.amps {
            for b in &rhs.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { space, amps })
    }

    /// ∣ψ⟩⟨ψ∣ as a density operator.
    pub fn to_density(&self) -> DensityOperator {
        let d = self.dim();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(self.amps[i] * self.amps[j].conj());
            }
        }
        DensityOperator { space: self.space, data }
    }
}

// ---------------------------------------------------------------------------
// DensityOperator
// ---------------------------------------------------------------------------

/// Hermitian, unit-trace, positive-semidefinite matrix describing a mixed
/// (or reduced) state. Constructors symmetrize and rescale exactly, so the
/// Hermiticity/trace invariants hold to rounding, not just to tolerance;
/// positivity is checked spectrally on demand via [`DensityOperator::min_eigenvalue`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: Space,
    data: Vec<C64>, // row-major
}

impl DensityOperator {
    /// Validate (Hermitian and unit trace within 1e-9) and adopt a matrix,
    /// symmetrizing and rescaling the trace exactly.
    pub fn new(m: OperatorMatrix) -> Result<Self> {
        let dev = m.hermiticity_dev();
        if dev > 1e-9 {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::BadTrace { trace_error: (tr - C64::new(1.0, 0.0)).norm() });
        }
        let d = m.dim();
        let mut data = m.data;
        // exact symmetrization, then exact unit trace
        for i in 0..d {
            for j in (i + 1)..d {
                let avg = (data[i * d + j] + data[j * d + i].conj()) * 0.5;
                data[i * d + j] = avg;
                data[j * d + i] = avg.conj();
            }
            data[i * d + i] = C64::new(data[i * d + i].re, 0.0);
        }
        let tr: f64 = (0..d).map(|i| data[i * d + i].re).sum();
        for v in &mut data {
            *v /= tr;
        }
        Ok(DensityOperator { space: m.space, data })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub(crate) fn from_parts_unchecked(space: Space, data: Vec<C64>) -> Self {
        DensityOperator { space, data }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// View as a plain operator matrix (copies).
    pub fn as_operator(&self) -> OperatorMatrix {
        OperatorMatrix { space: self.space, data: self.data.clone(), label: None }
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    pub fn hermiticity_dev(&self) -> f64 {
        self.as_operator().hermiticity_dev()
    }

    /// Tr(ρ²) ∈ (0, 1]; 1 for pure states.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut p = 0.0;
        for i in 0..d {
            for j in 0..d {
                // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
                p += self.data[i * d + j].norm_sqr();
            }
        }
        p
    }

    /// Diagonal (populations) as real numbers.
    pub fn populations(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).collect()
    }

    /// Smallest eigenvalue; ≥ −1e-10 for any valid density operator.
    pub fn min_eigenvalue(&self) -> f64 {
        let (evals, _) = hermitian_eigen(&self.as_operator())
            .expect("density operators are Hermitian by construction");
        evals[0]
    }

    /// Kronecker product; `self`'s factors precede `rhs`'s.
    pub fn tensor(&self, rhs: &DensityOperator) -> Result<DensityOperator> {
        let op = self.as_operator().tensor(&rhs.as_operator())?;
        Ok(DensityOperator { space: op.space(), data: op.data })
    }

    /// Reduction of the canonical atom ⊗ field state to one factor.
    pub fn partial_trace(&self, keep: Keep) -> Result<DensityOperator> {
        if !self.space.is_atom_field() {
            return Err(Error::WrongSpace { context: "partial_trace: need atom ⊗ field" });
        }
        match keep {
            Keep::Atom => self.reduce_keeping(&[0]),
            Keep::Field => self.reduce_keeping(&[1]),
        }
    }

    /// General reduction: keep the listed tensor factors (ascending indices
    /// into [`Space::factors`]) and trace out the rest.
    pub fn reduce_keeping(&self, keep: &[usize]) -> Result<DensityOperator> {
        let factors = self.space.factors();
        let m = factors.len();
        if keep.is_empty()
            || keep.len() > m
            || keep.windows(2).any(|w| w[0] >= w[1])
            || keep[keep.len() - 1] >= m
        {
            return Err(Error::WrongSpace { context: "reduce_keeping: bad factor list" });
        }
        let keep_field = self.space.field_dim.is_some() && keep.contains(&(m - 1));
        let kept_atoms = keep.len() - usize::from(keep_field);
        let out_space = if keep_field {
            if kept_atoms == 0 {
                Space::field(factors[m - 1])
            } else {
                Space::joint(kept_atoms, factors[m - 1])
            }
        } else {
            Space { atoms: kept_atoms, field_dim: None }
        };

        let traced: Vec<usize> = (0..m).filter(|i| !keep.contains(i)).collect();
        // row-major strides of the full index
        let mut strides = vec![1usize; m];
        for i in (0..m - 1).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&i| factors[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| factors[i]).collect();
        let out_dim: usize = kept_dims.iter().product();
        let tr_dim: usize = traced_dims.iter().product::<usize>().max(1);

        // flat offset of a mixed-radix multi-index over the given factors
        let offset = |multi: usize, dims: &[usize], which: &[usize]| -> usize {
            let mut rem = multi;
            let mut off = 0;
            for k in (0..dims.len()).rev() {
                off += (rem % dims[k]) * strides[which[k]];
                rem /= dims[k];
            }
            off
        };

        let d = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); out_dim * out_dim];
        for bi in 0..out_dim {
            let oi = offset(bi, &kept_dims, keep);
            for bj in 0..out_dim {
                let oj = offset(bj, &kept_dims, keep);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..tr_dim {
                    let ot = offset(t, &traced_dims, &traced);
                    acc += self.data[(oi + ot) * d + (oj + ot)];
                }
                data[bi * out_dim + bj] = acc;
            }
        }
        Ok(DensityOperator { space: out_space, data })
    }
}

// ---------------------------------------------------------------------------
// Canonical operators
// ---------------------------------------------------------------------------

/// Field ladder operators (a, a†) on a space truncated at N_max = field_dim − 1:
/// a∣n⟩ = √n ∣n−1⟩ and a†∣n⟩ = √(n+1) ∣n+1⟩, with a†∣N_max⟩ = 0 (the
/// truncation drops the outgoing row). [a, a†] = 1 holds on every Fock state
/// below the edge.
pub fn ladder_operators(field_dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if field_dim < 2 {
        return Err(Error::InvalidDimension { what: "field_dim", got: field_dim, min: 2 });
    }
    let space = Space::field(field_dim);
    let mut a = OperatorMatrix::zeros(space);
    for n in 1..field_dim {
        a.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    let a_dag = a.adjoint();
    Ok((a.with_label("a"), a_dag.with_label("a†")))
}

/// Photon number operator a†a.
pub fn number_operator(field_dim: usize) -> Result<OperatorMatrix> {
    if field_dim < 2 {
        return Err(Error::InvalidDimension { what: "field_dim", got: field_dim, min: 2 });
    }
    let diag: Vec<C64> = (0..field_dim).map(|n| C64::new(n as f64, 0.0)).collect();
    Ok(OperatorMatrix::from_diag(Space::field(field_dim), &diag).with_label("a†a"))
}

/// Atomic operators (r⁺, r⁻, r₃) on the two-level space:
/// r⁺ = ∣e⟩⟨g∣, r⁻ = ∣g⟩⟨e∣, r₃ = ∣e⟩⟨e∣ − ∣g⟩⟨g∣.
pub fn atomic_operators() -> (OperatorMatrix, OperatorMatrix, OperatorMatrix) {
    let s = Space::atom();
    let mut r_plus = OperatorMatrix::zeros(s);
    r_plus.set(0, 1, C64::new(1.0, 0.0));
    let r_minus = r_plus.adjoint();
    let r3 = OperatorMatrix::from_diag(s, &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
    (
        r_plus.with_label("r⁺"),
        r_minus.with_label("r⁻"),
        r3.with_label("r₃"),
    )
}

/// Tr(ρ O). Real within rounding when O is Hermitian.
pub fn expectation(rho: &DensityOperator, op: &OperatorMatrix) -> Result<C64> {
    if rho.space() != op.space() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: op.dim(),
            context: "expectation",
        });
    }
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            // Tr(ρO) = Σ_ik ρ_ik O_ki
            acc += rho.data[i * d + k] * op.data[k * d + i];
        }
    }
    Ok(acc)
}

/// ⟨ψ∣O∣ψ⟩ for pure states.
pub fn expectation_pure(psi: &StateVector, op: &OperatorMatrix) -> Result<C64> {
    let opsi = op.apply_state(psi)?;
    psi.inner(&opsi)
}

/// ∣⟨ψ∣φ⟩∣² ∈ [0, 1]; insensitive to the global phase of either argument.
pub fn fidelity_pure(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition A = V Λ V† of a Hermitian matrix by cyclic complex
/// Jacobi rotations. Returns ascending eigenvalues and the unitary V with
/// eigenvectors as columns. Quadratically convergent and accurate to
/// ~‖A‖·n·ε, which is what makes it trustworthy as an independent oracle
/// for the analytic propagators.
pub fn hermitian_eigen(m: &OperatorMatrix) -> Result<(Vec<f64>, OperatorMatrix)> {
    let dev = m.hermiticity_dev();
    if dev > 1e-10 {
        return Err(Error::NotHermitian { max_dev: dev });
    }
    let d = m.dim();
    let mut a = m.data.clone();
    let mut v = OperatorMatrix::identity(m.space());

    let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-14 * fro.max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    s += a[i * d + j].norm_sqr();
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..d.saturating_sub(1) {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                let abs_pq = apq.norm();
                if abs_pq == 0.0 {
                    continue;
                }
                let app = a[p * d + p].re;
                let aqq = a[q * d + q].re;
                let phase = apq / abs_pq;
                let tau = (aqq - app) / (2.0 * abs_pq);
                // smaller root of t² + 2τt − 1 = 0, for a rotation ≤ π/4
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);

                // A ← J† A J with J = [[c, s], [−s̄, c]] on columns (p, q)
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = akp * c - akq * s.conj();
                    a[k * d + q] = akp * s + akq * c;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = apk * c - aqk * s;
                    a[q * d + k] = apk * s.conj() + aqk * c;
                }
                for k in 0..d {
                    let vkp = v.data[k * d + p];
                    let vkq = v.data[k * d + q];
                    v.data[k * d + p] = vkp * c - vkq * s.conj();
                    v.data[k * d + q] = vkp * s + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    // sort_unstable_by on f64 keys: eigenvalues of a Hermitian matrix are finite
    order.sort_unstable_by(|&i, &j| {
        a[i * d + i].re.partial_cmp(&a[j * d + j].re).expect("finite eigenvalues")
    });
    let evals: Vec<f64> = order.iter().map(|&i| a[i * d + i].re).collect();
    let mut vecs = OperatorMatrix::zeros(m.space());
    for (col, &src) in order.iter().enumerate() {
        for k in 0..d {
            vecs.data[k * d + col] = v.data[k * d + src];
        }
    }
    Ok((evals, vecs))
}
