mod args;
mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sepprob::moments::cache;
use sepprob::{ErrorClass, Result};

use args::{Cli, Command, FormulaCommand, HyperCommand, McCommand, TableCommand};
use commands::Outcome;

/// `$HOME/.cache/sepprob` unless `SEPPROB_CACHE_DIR` is set.
fn default_cache_dir() -> Option<PathBuf> {
    if std::env::var_os(cache::CACHE_DIR_ENV).is_some_and(|v| !v.is_empty()) {
        return None;
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("sepprob"))
}

fn dispatch(cli: &Cli) -> Result<(&'static str, Outcome)> {
    let constants = cli.constants.as_deref();
    Ok(match &cli.command {
        Command::Mc(McCommand::Estimate(a)) => ("mc estimate", commands::mc_estimate(a)?),
        Command::Mc(McCommand::Moments(a)) => ("mc moments", commands::mc_moments(a)?),
        Command::Reconstruct(a) => ("reconstruct", commands::reconstruct_cmd(a)?),
        Command::Hyper(HyperCommand::Eval(a)) => ("hyper eval", commands::hyper_eval(a)?),
        Command::Hyper(HyperCommand::Family(a)) => ("hyper family", commands::hyper_family(a)?),
        Command::Formula(FormulaCommand::Eval(a)) => ("formula eval", commands::formula_eval(a)?),
        Command::Formula(FormulaCommand::Fit(a)) => ("formula fit", commands::formula_fit(a)?),
        Command::Recognize(a) => ("recognize", commands::recognize_cmd(a, constants)?),
        Command::Fitline(a) => ("fitline", commands::fitline_cmd(a)?),
        Command::Table(TableCommand::Check(a)) => ("table check", commands::table_check_cmd(a)?),
        Command::Table(TableCommand::Reference(a)) => ("table reference", commands::table_reference_cmd(a)?),
        Command::Verify(a) => ("verify", commands::verify_cmd(a)?),
    })
}

fn run(cli: &Cli) -> Result<i32> {
    let started = manifest::unix_now();
    if let Some(dir) = default_cache_dir() {
        cache::set_cache_dir(Some(dir));
    }
    let (name, mut out) = dispatch(cli)?;
    if let Some(p) = &cli.constants {
        if !out.inputs.contains(p) {
            out.inputs.push(p.clone());
        }
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    manifest::write_manifest(name, args, out.seeds.clone(), &out.inputs, &out.outputs, started)?;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    Ok(out.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Verification => 4,
            })
        }
    }
}
