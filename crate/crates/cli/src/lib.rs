//! The `parafalc` harness: argument parsing, commands and run records.

pub mod args;
pub mod commands;
pub mod envelope;
pub mod error;
pub mod record;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use envelope::Envelope;
use error::Result;
use record::RunRecord;

/// Runs one parsed command and returns its record.
pub fn execute(cli: &Cli) -> Result<RunRecord> {
    let env = Envelope::from_env()?;
    let run = || match &cli.command {
        Command::Analyze(a) => commands::analyze(a, &env),
        Command::Construct(a) => commands::construct(a, &env),
        Command::Verify(a) => commands::verify(a, &env),
        Command::Sweep(a) => commands::sweep(a, &env),
        Command::AuditFourier(a) => commands::audit_fourier(a, &env),
    };
    match cli.command.common().jobs {
        Some(0) => Err(error::config("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| error::config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Parses `parafalc <args..>` and runs it in-process, without emitting.
pub fn run_args(args: &[&str]) -> Result<RunRecord> {
    let argv = std::iter::once("parafalc").chain(args.iter().copied());
    let cli = Cli::try_parse_from(argv).map_err(|e| error::config(e.to_string()))?;
    execute(&cli)
}

/// Full CLI entry point; returns the process exit code.
pub fn run_main(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let common = cli.command.common();
    let outcome = execute(&cli).and_then(|r| {
        r.emit(common.format, common.out.as_deref())?;
        Ok(r.summary.passed)
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("parafalc {}: {e}", cli.command.name());
            2
        }
    }
}

