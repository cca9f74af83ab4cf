//! `rough-stat`: density verdicts, rough convergence tests, limit-set and
//! cluster estimates, boundedness scans, projections and property suites.
//!
//! Exit codes: 0 positive result, 1 negative result, 2 usage or input error,
//! 3 inconclusive.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::CliError;

const THREADS_ENV: &str = "ROUGH_STAT_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match commands::run(&cli.command, &cli.rule.rule()) {
        Ok(o) => o,
        Err(e) => {
            eprint!("{}", e.render());
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::emit(&cli, &outcome) {
        eprint!("{}", CliError::Io(e).render());
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.headline.exit_code())
}
