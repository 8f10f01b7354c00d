//! `lieconserve`: classify first-order evolution equations, verify Lie point
//! symmetries, and build and check conservation laws.
//!
//! Exit codes: 0 success, 1 bad input, 2 negative result or refusal,
//! 3 inconclusive zero test.

mod commands;
mod config;
mod error;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunArgs;
use error::{CliError, Exit};
use report::{error_json, Report};

#[derive(Debug, Parser)]
#[command(
    name = "lieconserve",
    version,
    about = "Symmetries, adjointness and conservation laws of u_t + f = 0"
)]
struct Cli {
    /// `key = value` file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decides self-adjointness and quasi-self-adjointness.
    Classify(RunArgs),
    /// Checks a generator against the determining equations.
    Verify(RunArgs),
    /// Builds a conserved vector, certifies it, and optionally checks it
    /// numerically on an exact pre-shock solution.
    Claw(RunArgs),
}

impl Command {
    fn parts(self) -> (&'static str, RunArgs) {
        match self {
            Command::Classify(a) => ("classify", a),
            Command::Verify(a) => ("verify", a),
            Command::Claw(a) => ("claw", a),
        }
    }
}

fn run(name: &str, args: &RunArgs) -> Result<Report, CliError> {
    match name {
        "classify" => commands::cmd_classify(args),
        "verify" => commands::cmd_verify(args),
        _ => commands::cmd_claw(args),
    }
}

fn write_out(path: &Option<String>, json: &serde_json::Value) -> Result<(), CliError> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(json).expect("reports serialize");
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Input.code() as u8),
            };
        }
    };
    let (name, mut args) = cli.command.parts();
    let exit = match execute(name, &mut args, cli.config) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            let exit = e.exit();
            if let Err(io) = write_out(&args.out, &error_json(name, &e.to_string(), exit)) {
                eprintln!("error: {io}");
            }
            exit
        }
    };
    ExitCode::from(exit.code() as u8)
}

fn execute(name: &str, args: &mut RunArgs, config: Option<PathBuf>) -> Result<Exit, CliError> {
    if let Some(path) = config {
        args.merge_file(&path)?;
    }
    let json_stdout = match args.format.as_deref() {
        None | Some("text") => false,
        Some("json") => true,
        Some(other) => return Err(CliError::Config(format!("unknown format `{other}`; use text or json"))),
    };
    let report = run(name, args)?;
    let json = report.json();
    if json_stdout {
        println!("{}", serde_json::to_string_pretty(&json).expect("reports serialize"));
    } else {
        print!("{}", report.text());
    }
    write_out(&args.out, &json)?;
    Ok(report.exit)
}
