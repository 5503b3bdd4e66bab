//! Population dynamics, collapse/revival diagnostics, and spectral analysis.
//!
//! Time grids are dimensionless τ = g·t throughout this module; at resonance
//! every formula collapses onto them (Ωₙt = 2√(n+1)·τ), so the series are
//! coupling-independent. The spectral pipeline reports angular frequencies in
//! units of g — equivalently ordinary frequencies in units of g/2π — so the
//! resonant doublet ladder lands at 2√(n+1): 2, 2√2, 2√3, …

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // Float supplies f64 math in no_std builds
use num_traits::Float;

use crate::hilbert::{DensityOperator, Keep};
use crate::model::JCParams;
use crate::{Error, Result, Time, C64};

const PI: f64 = core::f64::consts::PI;

/// Sampled real-valued signal on a strictly ascending τ = g·t grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: &str) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::BadGrid("times and values must be equal-length and non-empty"));
        }
        if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadGrid("grid and values must be finite"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadGrid("times must be strictly ascending"));
        }
        Ok(TimeSeries { times, values, label: String::from(label) })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid spacing if the grid is uniform within 1e-9 relative; None otherwise.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = self.times[1] - self.times[0];
        let ok = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
        ok.then_some(dt)
    }
}

/// Discrete spectral peaks: ascending frequencies (units of g, see module
/// docs) with non-negative weights scaled so a cosine component Pₙcos(Ωₙτ)
/// in an excitation series recovers weight ≈ Pₙ.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPeaks {
    frequencies: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectrumPeaks {
    pub fn new(frequencies: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if frequencies.len() != weights.len() {
            return Err(Error::BadGrid("frequencies and weights must be equal-length"));
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadGrid("frequencies must be strictly ascending"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::BadGrid("weights must be finite and non-negative"));
        }
        Ok(SpectrumPeaks { frequencies, weights })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Excited- and ground-state populations along a τ = g·t grid, starting from
/// a composite density operator. Exact interaction-picture propagation per
/// sample; only the block-conjugated diagonal is formed, so a sample costs
/// O(N_max) on top of the initial state.
pub fn atomic_probabilities(
    rho0: &DensityOperator,
    p: JCParams,
    times_gt: &[f64],
) -> Result<(TimeSeries, TimeSeries)> {
    if !rho0.space().is_atom_field() {
        return Err(Error::WrongSpace { context: "atomic_probabilities: need atom ⊗ field" });
    }
    let fd = rho0.space().field_dim().expect("composite space has a field");
    validate_grid(times_gt)?;

    let mut pe = Vec::with_capacity(times_gt.len());
    for &tau in times_gt {
        pe.push(excited_population_at(rho0, p, fd, Time::Scaled(tau))?);
    }
    let pg: Vec<f64> = pe.iter().map(|&v| 1.0 - v).collect();
    Ok((
        TimeSeries::new(times_gt.to_vec(), pe, "Pe")?,
        TimeSeries::new(times_gt.to_vec(), pg, "Pg")?,
    ))
}

fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::BadGrid("need at least one sample time"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::BadGrid("grid must be finite"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadGrid("times must be strictly ascending"));
    }
    Ok(())
}

/// P_e(t) = Σ_n ⟨e,n∣ρ(t)∣e,n⟩ without forming the full ρ(t): each manifold
/// contributes the diagonal of a 2×2 conjugation, singletons are invariant.
fn excited_population_at(rho0: &DensityOperator, p: JCParams, fd: usize, t: Time) -> Result<f64> {
    let t_abs = t.absolute(p.g())?;
    let delta = p.delta();
    let mut pe = 0.0f64;
    // stranded edge state ∣e,N_max⟩: population is invariant
    pe += rho0.at(fd - 1, fd - 1).re;
    for n in 0..fd - 1 {
        let omega_n = 2.0 * p.g() * ((n as f64) + 1.0).sqrt();
        let r = omega_n.hypot(delta);
        let (i, j) = (n, fd + n + 1); // ∣e,n⟩, ∣g,n+1⟩
        let ree = rho0.at(i, i).re;
        let rgg = rho0.at(j, j).re;
        if r == 0.0 {
            pe += ree;
            continue;
        }
        let reg = rho0.at(i, j);
        let half = 0.5 * r * t_abs;
        let (s, c) = half.sin_cos();
        let m00 = C64::new(c, -delta / r * s);
        let m01 = C64::new(0.0, -omega_n / r * s);
        // ⟨e,n∣MρM†∣e,n⟩ = ∣m00∣²ρ_ee + ∣m01∣²ρ_gg + 2Re(m00 ρ_eg m01*)
        pe += m00.norm_sqr() * ree
            + m01.norm_sqr() * rgg
            + 2.0 * (m00 * reg * m01.conj()).re;
    }
    Ok(pe)
}

/// Resonant excited-state population for a photon-number mixture with the
/// atom initially excited: P_e(τ) = Σ_n Pₙ cos²(√(n+1)·τ) on τ = g·t.
/// The distribution must sum to 1 within 1e-9 with non-negative entries.
pub fn weighted_excitation(pn: &[f64], p: JCParams, times_gt: &[f64]) -> Result<TimeSeries> {
    if !p.is_resonant() {
        return Err(Error::UnsupportedRegime(
            "weighted excitation sum assumes the resonant cosine law",
        ));
    }
    if pn.is_empty() || pn.iter().any(|&w| !w.is_finite() || w < -1e-12) {
        return Err(Error::BadDistribution { sum_error: 1.0 });
    }
    let total: f64 = pn.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution { sum_error: (total - 1.0).abs() });
    }
    validate_grid(times_gt)?;
    let values: Vec<f64> = times_gt
        .iter()
        .map(|&tau| {
            pn.iter()
                .enumerate()
                .map(|(n, &w)| {
                    let x = (((n as f64) + 1.0).sqrt() * tau).cos();
                    w * x * x
                })
                .sum()
        })
        .collect();
    TimeSeries::new(times_gt.to_vec(), values, "Pe")
}

/// Gaussian collapse envelope of a strong coherent field,
/// ½·[1 + cos(2g∣α∣t)·e^{−g²t²/2}], at absolute time `t`. A good description
/// only for ∣α∣² ≫ 1; no validation is applied.
pub fn collapse_envelope(alpha_mod: f64, g: f64, t: f64) -> f64 {
    let gt = g * t;
    0.5 * (1.0 + (2.0 * alpha_mod * gt).cos() * (-0.5 * gt * gt).exp())
}

/// Revival time estimates, absolute times for coupling `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct RevivalTimes {
    /// Strong-field estimate t_j ≈ j·2π∣α∣/g.
    pub approx: Vec<f64>,
    /// Neighbor-dephasing form t_j = 2πj / (2g(∣α∣ − √(∣α∣² − 1))).
    pub exact: Vec<f64>,
}

/// Predicted revival times t_1..t_j_max. Requires ∣α∣ ≥ 1 (below that the
/// neighbor-frequency form is undefined) and g > 0.
pub fn revival_times(alpha_mod: f64, g: f64, j_max: usize) -> Result<RevivalTimes> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParams("revival times need a positive coupling"));
    }
    if !(alpha_mod.is_finite()) || alpha_mod < 1.0 {
        return Err(Error::UnsupportedRegime("revival estimate needs ∣α∣ ≥ 1"));
    }
    let spacing_approx = 2.0 * PI * alpha_mod / g;
    let gap = 2.0 * (alpha_mod - (alpha_mod * alpha_mod - 1.0).sqrt());
    let spacing_exact = 2.0 * PI / (g * gap);
    let approx = (1..=j_max).map(|j| (j as f64) * spacing_approx).collect();
    let exact = (1..=j_max).map(|j| (j as f64) * spacing_exact).collect();
    Ok(RevivalTimes { approx, exact })
}

/// Photon-number distribution: diagonal of a field density operator, or of
/// the field reduction when handed a composite atom ⊗ field state.
pub fn photon_distribution(rho: &DensityOperator) -> Result<Vec<f64>> {
    let field = if rho.space().is_atom_field() {
        rho.partial_trace(Keep::Field)?
    } else if rho.space().atoms() == 0 && rho.space().field_dim().is_some() {
        rho.clone()
    } else {
        return Err(Error::WrongSpace { context: "photon_distribution: need a field factor" });
    };
    Ok(field.populations())
}

// ---------------------------------------------------------------------------
// Spectral analysis
// ---------------------------------------------------------------------------

/// Fraction of the tallest spectral line below which bins are ignored.
pub const PEAK_THRESHOLD_FRACTION: f64 = 0.05;

/// Discrete spectrum of an excitation series: de-mean, Hann window, DFT,
/// then every local maximum above 5% of the tallest line is refined by
/// three-point parabolic interpolation on log magnitudes. Frequencies come
/// back in units of g (peaks of the resonant ladder sit at 2√(n+1)); weights
/// estimate the Pₙ of the underlying cos(Ωₙτ) components.
///
/// The grid must be uniform. Power-of-two lengths take the fast transform;
/// other lengths fall back to a direct O(N²) evaluation.
pub fn rabi_spectrum(series: &TimeSeries) -> Result<SpectrumPeaks> {
    let n = series.len();
    if n < 16 {
        return Err(Error::BadGrid("spectrum needs at least 16 samples"));
    }
    let dt = series
        .uniform_step()
        .ok_or(Error::BadGrid("spectrum needs a uniform time grid"))?;

    let mean = series.values().iter().sum::<f64>() / (n as f64);
    let mut window_sum = 0.0f64;
    let mut buf: Vec<C64> = (0..n)
        .map(|k| {
            // symmetric Hann window
            let w = 0.5 - 0.5 * (2.0 * PI * (k as f64) / ((n - 1) as f64)).cos();
            window_sum += w;
            C64::new(w * (series.values()[k] - mean), 0.0)
        })
        .collect();
    dft_in_place(&mut buf);

    let half = n / 2;
    let mags: Vec<f64> = buf[..=half].iter().map(|z| z.norm()).collect();
    let tallest = mags[1..].iter().cloned().fold(0.0, f64::max);
    if tallest == 0.0 {
        return SpectrumPeaks::new(Vec::new(), Vec::new());
    }
    let threshold = PEAK_THRESHOLD_FRACTION * tallest;

    let df = 2.0 * PI / ((n as f64) * dt);
    let mut freqs = Vec::new();
    let mut weights = Vec::new();
    for j in 2..half {
        if mags[j] > threshold && mags[j] >= mags[j - 1] && mags[j] >= mags[j + 1] {
            let (offset, peak_mag) = refine_parabolic(mags[j - 1], mags[j], mags[j + 1]);
            freqs.push(((j as f64) + offset) * df);
            weights.push(4.0 * peak_mag / window_sum);
        }
    }
    SpectrumPeaks::new(freqs, weights)
}

/// Three-point parabolic refinement on log magnitudes: sub-bin offset in
/// (−½, ½) and the interpolated peak magnitude.
fn refine_parabolic(left: f64, center: f64, right: f64) -> (f64, f64) {
    if left <= 0.0 || right <= 0.0 {
        return (0.0, center);
    }
    let (a, b, c) = (left.ln(), center.ln(), right.ln());
    let denom = a - 2.0 * b + c;
    if denom == 0.0 {
        return (0.0, center);
    }
    let d = 0.5 * (a - c) / denom;
    let d = d.clamp(-0.5, 0.5);
    (d, (b - 0.25 * (a - c) * d).exp())
}

/// In-place forward DFT: radix-2 Cooley–Tukey when the length is a power of
/// two, direct evaluation otherwise.
fn dft_in_place(buf: &mut [C64]) {
    let n = buf.len();
    if n.is_power_of_two() {
        fft_pow2(buf);
        return;
    }
    let input: Vec<C64> = buf.to_vec();
    for (j, out) in buf.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &x) in input.iter().enumerate() {
            let angle = -2.0 * PI * ((j * k) % n) as f64 / (n as f64);
            acc += x * C64::new(angle.cos(), angle.sin());
        }
        *out = acc;
    }
}

fn fft_pow2(buf: &mut [C64]) {
    let n = buf.len();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * PI / (len as f64);
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // fresh twiddle per butterfly: no phase-accumulation drift
                let w = C64::new((step * k as f64).cos(), (step * k as f64).sin());
                let u = buf[start + k];
                let v = buf[start + k + half] * w;
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}
