//! `sr`: seeded-superradiance model runner.

mod commands;
mod config;
mod error;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "sr", version, about = "Seeded superradiance in strong-field-ionized gas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,

    /// Override one value, e.g. `--set medium.pressure_mbar=12`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the seed-driven Bloch equations and write θ(τ_r) and the burst profile.
    SeedPhase {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the pendulum equation for the four gain/absorber regimes.
    Regimes {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate τ_W, τ_D, peak intensity and energy over a pressure list.
    PressureScan {
        #[command(flatten)]
        common: Common,
        /// Pressures in mbar (replaces `scan.pressures`).
        pressures: Vec<f64>,
    },
    /// Fit sech² profiles to measured traces and tabulate τ_FW, τ_W, τ_D.
    Fit {
        #[command(flatten)]
        common: Common,
        /// `time_ps,intensity_arb` CSV files.
        traces: Vec<PathBuf>,
    },
    /// Run the numerical self-checks; exits 3 when any fails.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn prepare(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(common.config.as_deref(), &common.set)?;
    let out = cfg.out_dir(common.out.as_deref());
    io::ensure_dir(&out)?;
    Ok((cfg, out))
}

fn manifest(cfg: &RunConfig, out: &Path, common: &Common, inputs: &[PathBuf]) -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let mut head = format!("# command: {}\n", args.join(" "));
    if let Some(c) = &common.config {
        head.push_str(&format!("# config: {}\n", c.display()));
    }
    for i in inputs {
        head.push_str(&format!("# input: {}\n", i.display()));
    }
    io::write_text(&out.join("run-manifest.toml"), &format!("{head}\n{}", cfg.to_toml()))
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::SeedPhase { common } => {
            let (cfg, out) = prepare(&common)?;
            manifest(&cfg, &out, &common, &[])?;
            commands::seed_phase(&cfg, &out)
        }
        Command::Regimes { common } => {
            let (cfg, out) = prepare(&common)?;
            manifest(&cfg, &out, &common, &[])?;
            commands::regimes(&cfg, &out)
        }
        Command::PressureScan { common, pressures } => {
            let (mut cfg, out) = prepare(&common)?;
            if !pressures.is_empty() {
                cfg.pressures = pressures;
            }
            manifest(&cfg, &out, &common, &[])?;
            let list = cfg.pressures.clone();
            commands::scan(&cfg, &list, &out)
        }
        Command::Fit { common, traces } => {
            if traces.is_empty() {
                return Err(CliError::Usage("fit needs at least one trace file".into()));
            }
            let (cfg, out) = prepare(&common)?;
            manifest(&cfg, &out, &common, &traces)?;
            commands::fit(&cfg, &traces, &out)
        }
        Command::Validate { common } => {
            let (cfg, out) = prepare(&common)?;
            manifest(&cfg, &out, &common, &[])?;
            commands::validate(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
