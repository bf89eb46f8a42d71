mod args;
mod commands;
mod config;
mod spec;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use ctrw_core::CtrwError;

use args::{Cli, Command};

const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NUMERIC: u8 = 70;

fn parse(raw: Vec<OsString>) -> Result<Cli, ExitCode> {
    let mut argv = raw.clone();
    if let (Some(path), Some(at)) = (config::config_path(&raw), config::subcommand_index(&raw)) {
        let command = raw[at].to_string_lossy().into_owned();
        match config::load(&path, &command) {
            Ok(extra) => {
                argv = raw[..=at].to_vec();
                argv.extend(extra);
                argv.extend_from_slice(&raw[at + 1..]);
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                return Err(ExitCode::from(EXIT_USAGE));
            }
        }
    }
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                ExitCode::SUCCESS
            }
            _ => ExitCode::from(EXIT_USAGE),
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<CtrwError>(),
            Some(CtrwError::Numeric(_) | CtrwError::Truncation { .. } | CtrwError::SingularDenominator { .. })
        )
    });
    if numeric {
        EXIT_NUMERIC
    } else {
        EXIT_DOMAIN
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let workers = cli
        .command
        .common()
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {workers} workers: {e}");
            return ExitCode::from(EXIT_DOMAIN);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::ShuffleTest(a) => commands::shuffle_test(a),
        Command::Predict(a) => commands::predict(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {} failed: {e:#}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
