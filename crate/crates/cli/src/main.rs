mod args;
mod cluster;
mod config;
mod error;
mod output;
mod perturbation;
mod propagator;
mod verify;

use args::{CheckCommand, Cli, Command, KmsCommand, StateArgs};
use clap::Parser;
use config::{pick, pick_flag, ConfigFile};
use error::CliError;
use output::Context;
use propagators::FieldParams;
use std::process::ExitCode;
use std::time::Instant;

/// Field parameters from `--mass` (default 1) and `--beta` (vacuum if absent).
pub(crate) fn state(args: &StateArgs, file: &ConfigFile) -> Result<FieldParams, CliError> {
    state_with_default_beta(args, file, None)
}

fn state_with_default_beta(args: &StateArgs, file: &ConfigFile, beta: Option<f64>) -> Result<FieldParams, CliError> {
    let mass = pick(args.mass, &file.mass).unwrap_or(1.0);
    let params = match pick(args.beta, &file.beta).or(beta) {
        Some(b) => FieldParams::thermal(mass, b),
        None => FieldParams::vacuum(mass),
    };
    params.validate()?;
    Ok(params)
}

/// Thermal commands default to `β = 1`.
fn thermal_default(command: &mut Command, file: &ConfigFile) {
    let state = match command {
        Command::Kms(k) => match &mut k.command {
            KmsCommand::ThermalMass(s) => s,
            KmsCommand::Check(c) => match &mut c.command {
                CheckCommand::Shift(s) => &mut s.state,
                CheckCommand::Reorder(s) => s,
            },
            KmsCommand::Correct(_) => return,
        },
        _ => return,
    };
    if state.beta.is_none() && file.beta.is_none() {
        state.beta = Some(1.0);
    }
}

fn run(mut cli: Cli) -> Result<Option<String>, CliError> {
    let file = ConfigFile::load(cli.global.config.as_deref())?;
    thermal_default(&mut cli.command, &file);
    let ctx = Context {
        output: pick(cli.global.output.clone(), &file.output),
        format: pick(cli.global.format, &file.format),
        tolerance: pick(cli.global.tolerance, &file.tolerance),
        reproducible: pick_flag(cli.global.reproducible, file.reproducible),
        started: Instant::now(),
    };
    if let Some(t) = ctx.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Domain(format!("tolerance must be a positive number, got {t}")));
        }
    }
    match &cli.command {
        Command::Propagator(a) => propagator::run(a, &file, &ctx).map(|_| None),
        Command::Cluster(a) => cluster::run(a, &file, &ctx),
        Command::Kms(a) => perturbation::run(&a.command, &file, &ctx),
        Command::Verify(a) => verify::run(a, &file, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("check failed: {failure}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
