//! `jcsim` — canonical cavity-QED experiments from the command line.
//!
//! One subcommand per scenario plus `run --config <file>`. Flags override
//! config keys; `JCSIM_NMAX_DEFAULT` overrides the per-scenario default
//! truncation. The JSON summary always goes to stdout; `--out PATH` writes
//! the series table there plus `<stem>.peaks.*` / `<stem>.summary.json`
//! sidecars. Exit codes: 0 ok, 1 I/O error, 2 config error, 3 numeric/
//! regime error.

use clap::{Args, Parser, Subcommand};
use jcsim::config::{self, RunConfig, Scenario};
use jcsim::output::{render_summary, write_artifacts};
use jcsim::{scenario, Error, Result};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "jcsim",
    version,
    about = "Two-level atom / quantized field dynamics: canonical experiments, CSV series, JSON summaries",
    after_help = "Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 numeric/regime error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every scenario; each maps 1:1 onto a config key and
/// overrides it when given.
#[derive(Args, Default)]
struct ScenarioFlags {
    /// Coupling constant g (absolute units; the cavity frequency is 1)
    #[arg(long)]
    g: Option<f64>,
    /// Detuning in units of g
    #[arg(long)]
    delta: Option<f64>,
    /// Initial photon number (rabi)
    #[arg(long)]
    n: Option<usize>,
    /// Coherent amplitude |alpha| (collapse-revival)
    #[arg(long)]
    alpha: Option<f64>,
    /// Mean photon number (collapse-thermal, spectrum)
    #[arg(long)]
    mean_n: Option<f64>,
    /// Fock-space truncation N_max
    #[arg(long)]
    n_max: Option<usize>,
    /// End of the time grid, in g*t
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid samples (endpoints included)
    #[arg(long)]
    samples: Option<usize>,
    /// Re(c_e) of the swap-scenario atom
    #[arg(long)]
    atom_ce_re: Option<f64>,
    /// Im(c_e) of the swap-scenario atom
    #[arg(long)]
    atom_ce_im: Option<f64>,
    /// Re(c_g) of the swap-scenario atom
    #[arg(long)]
    atom_cg_re: Option<f64>,
    /// Im(c_g) of the swap-scenario atom
    #[arg(long)]
    atom_cg_im: Option<f64>,
    /// Pulse convention for epr: "standard" or "real"
    #[arg(long)]
    convention: Option<String>,
    /// Coupling-to-frequency ratio (rwa-check)
    #[arg(long)]
    g_over_omega: Option<f64>,
    /// Series output path; sidecars derive from its stem
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: "csv" or "tsv"
    #[arg(long)]
    format: Option<String>,
}

impl ScenarioFlags {
    /// The flags as a config overlay (keys absent unless the flag was given).
    fn as_overrides(&self) -> RunConfig {
        RunConfig {
            scenario: String::new(),
            g: self.g,
            delta: self.delta,
            n: self.n,
            alpha: self.alpha,
            mean_n: self.mean_n,
            n_max: self.n_max,
            t_max: self.t_max,
            samples: self.samples,
            atom_ce_re: self.atom_ce_re,
            atom_ce_im: self.atom_ce_im,
            atom_cg_re: self.atom_cg_re,
            atom_cg_im: self.atom_cg_im,
            convention: self.convention.clone(),
            g_over_omega: self.g_over_omega,
            pulse_areas: None,
            sequence_atoms: None,
            out: self.out.clone(),
            format: self.format.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rabi oscillation of |e, n> at arbitrary detuning
    Rabi(ScenarioFlags),
    /// Resonant vacuum Rabi oscillation with first-zero location
    VacuumRabi(ScenarioFlags),
    /// Collapse of the oscillation for a thermal field
    CollapseThermal(ScenarioFlags),
    /// Collapse and revival for a coherent field
    CollapseRevival(ScenarioFlags),
    /// Discrete Rabi frequency comb of a weak coherent field
    Spectrum(ScenarioFlags),
    /// Pi-pulse transfer of an atomic superposition onto the field qubit
    Swap(ScenarioFlags),
    /// Two-atom Bell-pair generation (pi/2 then pi pulses)
    Epr(ScenarioFlags),
    /// Rotating-wave validity check against the two-way-coupling model
    RwaCheck(ScenarioFlags),
    /// Run a scenario described by a TOML config file
    Run(RunFlags),
}

#[derive(Args)]
struct RunFlags {
    /// Config file (TOML; flat keys, `scenario` required)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: ScenarioFlags,
}

fn base_config(command: &Command) -> Result<RunConfig> {
    let from_scenario =
        |s: Scenario, flags: &ScenarioFlags| Ok(RunConfig::for_scenario(s).merged_with(&flags.as_overrides()));
    match command {
        Command::Rabi(f) => from_scenario(Scenario::Rabi, f),
        Command::VacuumRabi(f) => from_scenario(Scenario::VacuumRabi, f),
        Command::CollapseThermal(f) => from_scenario(Scenario::CollapseThermal, f),
        Command::CollapseRevival(f) => from_scenario(Scenario::CollapseRevival, f),
        Command::Spectrum(f) => from_scenario(Scenario::Spectrum, f),
        Command::Swap(f) => from_scenario(Scenario::Swap, f),
        Command::Epr(f) => from_scenario(Scenario::Epr, f),
        Command::RwaCheck(f) => from_scenario(Scenario::RwaCheck, f),
        Command::Run(run) => {
            let text = std::fs::read_to_string(&run.config).map_err(Error::Io)?;
            let file_cfg = RunConfig::parse_toml(&text)?;
            Ok(file_cfg.merged_with(&run.overrides.as_overrides()))
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = base_config(&cli.command)?;
    let env_n_max =
        config::parse_env_n_max(std::env::var(config::NMAX_ENV_VAR).ok().as_deref())?;
    let resolved = config::resolve(&cfg, env_n_max)?;
    let artifacts = scenario::execute(&resolved)?;
    print!("{}", render_summary(&artifacts.summary));
    if let Some(series_path) = &resolved.out {
        let written = write_artifacts(&artifacts, series_path, resolved.format)?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() {
    if let Err(err) = real_main() {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
