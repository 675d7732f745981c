//! Command-line front end: adjoint equations, self-adjointness analysis,
//! conserved-vector construction, verification, and simulation.
//!
//! Subcommands: `adjoint`, `selfadjoint`, `conslaws`, `verify`, `simulate`.
//! Exit codes: 0 success, 1 verification failure, 2 input error.

pub mod args;
pub mod manifest;
pub mod reports;

mod commands;

use args::Args;

pub const USAGE: &str = "\
conslaw-forge — nonlinear self-adjointness and conservation laws

USAGE:
    conslaw-forge <command> [args] [--options]

COMMANDS:
    adjoint     <equation-file> [--format plain|latex|json]
    selfadjoint <equation-file> [--format ...] [--ansatz poly|trig|exp|constrained|auto]
    conslaws    <equation-file> [--symmetries t,x,y,z] [--format ...]
    verify      <equation-file> <vectors-file> --mode symbolic|oracle|numeric
                [--seed N] [--samples N] [--config simulation.json]
    simulate    <config-file> [--out DIR] [--balance vectors-file] [--levels N]

Formats default to plain text. The environment variable
CONSLAW_FORGE_THREADS caps study parallelism.

Exit codes: 0 success, 1 verification failure, 2 input error.
";

/// Dispatch a full command line (without the binary name). Returns the
/// process exit code and prints to stdout/stderr.
pub fn run(raw_args: &[String]) -> i32 {
    let Some((command, rest)) = raw_args.split_first() else {
        eprint!("{USAGE}");
        return 2;
    };
    let args = match Args::parse(rest) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let result = match command.as_str() {
        "adjoint" => commands::adjoint::run(&args),
        "selfadjoint" => commands::selfadjoint::run(&args),
        "conslaws" => commands::conslaws::run(&args),
        "verify" => commands::verify::run(&args),
        "simulate" => commands::simulate::run(&args),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            return 0;
        }
        other => {
            eprintln!("error: unknown command `{other}`");
            eprint!("{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            1
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn input<E: std::fmt::Display>(e: E) -> CliError {
        CliError::Input(e.to_string())
    }
}

pub(crate) fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read `{path}`: {e}")))
}
