//! Configuration: a flat key-value document (TOML), CLI flag overrides, the
//! `JCSIM_NMAX_DEFAULT` environment variable, and per-scenario defaults,
//! merged in that priority order (flags strongest) and validated into a
//! [`ResolvedRun`].

use crate::{Error, Result};
use jc_core::protocols::PulseConvention;
use jc_core::states::coherent_default_n_max;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Environment variable that overrides the per-scenario default truncation
/// (weaker than an explicit `n_max` key or `--n-max` flag).
pub const NMAX_ENV_VAR: &str = "JCSIM_NMAX_DEFAULT";

/// Internal cavity frequency in absolute units. Populations depend only on
/// g·t and δ/g, so the driver pins ω and exposes g and δ/g as the knobs.
pub const OMEGA: f64 = 1.0;

/// The canonical experiments the driver knows how to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Rabi oscillation of ∣e, n⟩ at arbitrary detuning.
    Rabi,
    /// Resonant vacuum Rabi oscillation of ∣e, 0⟩, with first-zero location.
    VacuumRabi,
    /// Collapse of the oscillation for a thermal field.
    CollapseThermal,
    /// Collapse and revival for a coherent field.
    CollapseRevival,
    /// Discrete Rabi frequency comb of a weak coherent field.
    Spectrum,
    /// π-pulse transfer of an atomic superposition onto the field qubit.
    Swap,
    /// Two-atom Bell-pair generation via a π/2 + π pulse sequence.
    Epr,
    /// Rotating-wave validity check against the full two-way-coupling model.
    RwaCheck,
}

impl Scenario {
    /// All scenarios, in CLI documentation order.
    pub const ALL: [Scenario; 8] = [
        Scenario::Rabi,
        Scenario::VacuumRabi,
        Scenario::CollapseThermal,
        Scenario::CollapseRevival,
        Scenario::Spectrum,
        Scenario::Swap,
        Scenario::Epr,
        Scenario::RwaCheck,
    ];

    /// Canonical kebab-case name (as used in config files and the CLI).
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Rabi => "rabi",
            Scenario::VacuumRabi => "vacuum-rabi",
            Scenario::CollapseThermal => "collapse-thermal",
            Scenario::CollapseRevival => "collapse-revival",
            Scenario::Spectrum => "spectrum",
            Scenario::Swap => "swap",
            Scenario::Epr => "epr",
            Scenario::RwaCheck => "rwa-check",
        }
    }

    /// Parse a scenario name.
    pub fn parse(name: &str) -> Result<Scenario> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name)
            .ok_or_else(|| {
                let valid: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!(
                    "unknown scenario {name:?}; valid scenarios: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Series/summary file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Tsv,
}

impl OutputFormat {
    /// Column separator for the tabular writers.
    pub fn separator(self) -> char {
        match self {
            OutputFormat::Csv => ',',
            OutputFormat::Tsv => '\t',
        }
    }

    fn parse(name: &str) -> Result<OutputFormat> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; valid formats: csv, tsv"
            ))),
        }
    }
}

/// Flat configuration document. Every key is optional except `scenario`;
/// unknown keys are rejected. The same shape carries CLI flag overrides
/// (with `scenario` implied by the subcommand).
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario name (`rabi`, `vacuum-rabi`, `collapse-thermal`,
    /// `collapse-revival`, `spectrum`, `swap`, `epr`, `rwa-check`).
    pub scenario: String,
    /// Coupling constant g in absolute units (ω is pinned to 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Atom–cavity detuning in units of g.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Initial photon number for the `rabi` scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Coherent amplitude ∣α∣ for `collapse-revival`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Mean photon number for `collapse-thermal` (thermal) and `spectrum`
    /// (coherent, ∣α∣ = √mean_n).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_n: Option<f64>,
    /// Fock-space truncation N_max.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Time-grid end, in scaled units g·t.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Number of grid samples (≥ 2, endpoints included).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Atomic superposition for `swap`: Re c_e.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_ce_re: Option<f64>,
    /// Atomic superposition for `swap`: Im c_e.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_ce_im: Option<f64>,
    /// Atomic superposition for `swap`: Re c_g.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_cg_re: Option<f64>,
    /// Atomic superposition for `swap`: Im c_g.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_cg_im: Option<f64>,
    /// Pulse convention for `epr` sequences: `"standard"` (−i·sin) or
    /// `"real"` (real rotation).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    /// Coupling-to-frequency ratio for `rwa-check`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_over_omega: Option<f64>,
    /// Custom pulse script for `epr`: vacuum pulse areas, one per probe atom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse_areas: Option<Vec<f64>>,
    /// Custom pulse script for `epr`: initial atom letters (`"e"`/`"g"`),
    /// one per probe atom, same length as `pulse_areas`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence_atoms: Option<Vec<String>>,
    /// Series output path; sidecar files derive from its stem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Output format: `"csv"` (default) or `"tsv"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, [$($field:ident),+ $(,)?]) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl RunConfig {
    /// Empty config for a scenario chosen on the command line.
    pub fn for_scenario(scenario: Scenario) -> RunConfig {
        RunConfig { scenario: scenario.name().to_owned(), ..RunConfig::default() }
    }

    /// Parse a TOML document. Unknown keys and type mismatches are rejected
    /// with the parser's line/column diagnostics.
    pub fn parse_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        if cfg.scenario.is_empty() {
            return Err(Error::Config("config is missing the `scenario` key".into()));
        }
        Ok(cfg)
    }

    /// Serialize back to TOML (round-trip exact: floats use shortest
    /// representations that re-parse to the same bits).
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Overlay `stronger` on top of `self`: any key present in `stronger`
    /// wins. The scenario name is kept from `self` unless `stronger` sets
    /// a non-empty one.
    pub fn merged_with(mut self, stronger: &RunConfig) -> RunConfig {
        if !stronger.scenario.is_empty() {
            self.scenario = stronger.scenario.clone();
        }
        overlay!(self, stronger, [
            g, delta, n, alpha, mean_n, n_max, t_max, samples,
            atom_ce_re, atom_ce_im, atom_cg_re, atom_cg_im,
            convention, g_over_omega, pulse_areas, sequence_atoms, out, format,
        ]);
        self
    }
}

/// One step of a custom probe script: initial atom letter and pulse area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScriptAtom {
    Excited,
    Ground,
}

/// Fully resolved, validated run: every parameter concrete.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    /// Coupling in absolute units (ω = 1).
    pub g: f64,
    /// Detuning in units of g.
    pub delta_over_g: f64,
    /// Initial photon number (`rabi`).
    pub n: usize,
    /// Coherent amplitude (`collapse-revival`).
    pub alpha: f64,
    /// Mean photon number (`collapse-thermal`, `spectrum`).
    pub mean_n: f64,
    /// Fock truncation.
    pub n_max: usize,
    /// Grid end in g·t.
    pub t_max: f64,
    /// Grid length.
    pub samples: usize,
    /// Swap-scenario atomic amplitudes (c_e, c_g), unnormalized as given.
    pub atom: (jc_core::C64, jc_core::C64),
    /// Pulse convention for sequences.
    pub convention: PulseConvention,
    /// g/ω for `rwa-check`.
    pub g_over_omega: f64,
    /// Custom probe script for `epr` (replaces the canonical two-pulse one).
    pub script: Option<Vec<(ScriptAtom, f64)>>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ResolvedRun {
    /// Uniform sample grid 0 ..= t_max in scaled units.
    pub fn time_grid(&self) -> Vec<f64> {
        let m = self.samples;
        (0..m).map(|i| self.t_max * i as f64 / (m - 1) as f64).collect()
    }
}

fn require_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

fn require_positive(name: &str, v: f64) -> Result<f64> {
    require_finite(name, v)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

fn require_nonnegative(name: &str, v: f64) -> Result<f64> {
    require_finite(name, v)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be ≥ 0, got {v}")))
    }
}

/// Read the `JCSIM_NMAX_DEFAULT` override from a captured environment value.
/// `None` means unset; a present-but-invalid value is a configuration error
/// (silently ignoring it would hide typos).
pub fn parse_env_n_max(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(raw) => {
            let parsed: usize = raw.trim().parse().map_err(|_| {
                Error::Config(format!("{NMAX_ENV_VAR} must be a positive integer, got {raw:?}"))
            })?;
            if parsed == 0 {
                return Err(Error::Config(format!("{NMAX_ENV_VAR} must be ≥ 1, got 0")));
            }
            Ok(Some(parsed))
        }
    }
}

/// Per-scenario default truncation, given the already-resolved field
/// parameters.
fn default_n_max(scenario: Scenario, n: usize, alpha: f64, mean_n: f64) -> usize {
    match scenario {
        Scenario::Rabi => (n + 4).max(8),
        Scenario::VacuumRabi => 4,
        Scenario::CollapseThermal => 120,
        Scenario::CollapseRevival => coherent_default_n_max(alpha),
        Scenario::Spectrum => coherent_default_n_max(mean_n.max(0.0).sqrt()),
        Scenario::Swap | Scenario::Epr => 4,
        Scenario::RwaCheck => 30,
    }
}

fn default_grid(scenario: Scenario) -> (f64, usize) {
    match scenario {
        Scenario::Rabi => (20.0, 1001),
        Scenario::VacuumRabi => (10.0, 1001),
        Scenario::CollapseThermal => (50.0, 2001),
        Scenario::CollapseRevival => (50.0, 2001),
        Scenario::Spectrum => (64.0, 4096),
        // Protocol scenarios have no time grid; defaults are placeholders.
        Scenario::Swap | Scenario::Epr => (1.0, 2),
        Scenario::RwaCheck => (20.0, 401),
    }
}

/// Validate and fill defaults. `env_n_max` is the parsed
/// `JCSIM_NMAX_DEFAULT` value, applied only when neither flag nor config
/// set `n_max`.
pub fn resolve(cfg: &RunConfig, env_n_max: Option<usize>) -> Result<ResolvedRun> {
    let scenario = Scenario::parse(&cfg.scenario)?;

    let g = require_positive("g", cfg.g.unwrap_or(0.01))?;
    let delta_over_g = require_finite("delta", cfg.delta.unwrap_or(0.0))?;
    let n = cfg.n.unwrap_or(0);
    let alpha = require_nonnegative("alpha", cfg.alpha.unwrap_or(5.0))?;
    let default_mean = match scenario {
        Scenario::Spectrum => 0.85,
        _ => 10.0,
    };
    let mean_n = require_nonnegative("mean_n", cfg.mean_n.unwrap_or(default_mean))?;

    let n_max = cfg
        .n_max
        .or(env_n_max)
        .unwrap_or_else(|| default_n_max(scenario, n, alpha, mean_n));
    if n_max < 1 {
        return Err(Error::Config("n_max must be ≥ 1".into()));
    }

    let (t_max_default, samples_default) = default_grid(scenario);
    let t_max = require_positive("t_max", cfg.t_max.unwrap_or(t_max_default))?;
    let samples = cfg.samples.unwrap_or(samples_default);
    if samples < 2 {
        return Err(Error::Config(format!("samples must be ≥ 2, got {samples}")));
    }

    let ce = jc_core::C64::new(
        require_finite("atom_ce_re", cfg.atom_ce_re.unwrap_or(1.0))?,
        require_finite("atom_ce_im", cfg.atom_ce_im.unwrap_or(0.0))?,
    );
    let cg = jc_core::C64::new(
        require_finite("atom_cg_re", cfg.atom_cg_re.unwrap_or(0.0))?,
        require_finite("atom_cg_im", cfg.atom_cg_im.unwrap_or(0.0))?,
    );
    if ce.norm_sqr() + cg.norm_sqr() < 1e-24 {
        return Err(Error::Config("atom amplitudes must not both be zero".into()));
    }

    let convention = match cfg.convention.as_deref() {
        None => match scenario {
            // The Bell-pair scenario follows the real-coefficient pulse
            // convention by default; everything else uses the standard
            // −i·sin emission phase.
            Scenario::Epr => PulseConvention::RealRotation,
            _ => PulseConvention::Standard,
        },
        Some("standard") => PulseConvention::Standard,
        Some("real") => PulseConvention::RealRotation,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown convention {other:?}; valid conventions: standard, real"
            )))
        }
    };

    let g_over_omega = require_positive("g_over_omega", cfg.g_over_omega.unwrap_or(1e-3))?;
    if g_over_omega >= 1.0 {
        return Err(Error::Config(format!(
            "g_over_omega must be < 1 (coupling below the cavity frequency), got {g_over_omega}"
        )));
    }

    let script = match (&cfg.pulse_areas, &cfg.sequence_atoms) {
        (None, None) => None,
        (Some(_), None) | (None, Some(_)) => {
            return Err(Error::Config(
                "pulse_areas and sequence_atoms must be given together".into(),
            ))
        }
        (Some(areas), Some(atoms)) => {
            if areas.len() != atoms.len() || areas.is_empty() {
                return Err(Error::Config(format!(
                    "pulse_areas ({}) and sequence_atoms ({}) must have equal nonzero length",
                    areas.len(),
                    atoms.len()
                )));
            }
            let mut steps = Vec::with_capacity(areas.len());
            for (area, letter) in areas.iter().zip(atoms) {
                require_nonnegative("pulse_areas entry", *area)?;
                let atom = match letter.as_str() {
                    "e" => ScriptAtom::Excited,
                    "g" => ScriptAtom::Ground,
                    other => {
                        return Err(Error::Config(format!(
                            "sequence_atoms entries must be \"e\" or \"g\", got {other:?}"
                        )))
                    }
                };
                steps.push((atom, *area));
            }
            Some(steps)
        }
    };
    if script.is_some() && scenario != Scenario::Epr {
        return Err(Error::Config(
            "custom pulse scripts are only supported by the epr scenario".into(),
        ));
    }

    let format = match cfg.format.as_deref() {
        None => OutputFormat::Csv,
        Some(name) => OutputFormat::parse(name)?,
    };

    Ok(ResolvedRun {
        scenario,
        g,
        delta_over_g,
        n,
        alpha,
        mean_n,
        n_max,
        t_max,
        samples,
        atom: (ce, cg),
        convention,
        g_over_omega,
        script,
        out: cfg.out.clone(),
        format,
    })
}
