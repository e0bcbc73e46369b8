mod args;
mod commands;
mod config;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn parse() -> Result<Cli, ExitCode> {
    let argv: Vec<String> = std::env::args().collect();
    let handle = |e: clap::Error| {
        let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
        let _ = e.print();
        ExitCode::from(code)
    };
    // the config file must be merged before clap checks required flags
    let Some(path) = config::config_path(&argv) else {
        return Cli::try_parse_from(&argv).map_err(handle);
    };
    let extra = config::config_args(Path::new(&path)).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INPUT)
    })?;
    Cli::try_parse_from(config::merge(&argv, extra)).map_err(handle)
}

fn main() -> ExitCode {
    let cli = match parse() {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_INPUT);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let result = match &cli.command {
        Command::Domains => commands::domains(),
        Command::Mesh(a) => commands::mesh(a),
        Command::Solve(a) => commands::solve(a),
        Command::Study(a) => commands::study(a),
    };
    match result {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
