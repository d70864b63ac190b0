use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use adcl::driver::{self, SmtMode, SolveConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "adcl", version, about = "Acceleration driven clause learning for linear CHCs over integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Smt {
    Builtin,
    External,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability; prints sat, unsat or unknown first.
    Solve {
        file: PathBuf,
        /// Wall-clock limit in seconds (0 for none).
        #[arg(long, env = "ADCL_TIMEOUT", default_value_t = 300.0)]
        timeout: f64,
        #[arg(long, env = "ADCL_SEED", default_value_t = 0)]
        seed: u64,
        /// Learned clauses per Luby unit.
        #[arg(long, env = "ADCL_RESTART_SCALE", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        restart_scale: u64,
        #[arg(long, env = "ADCL_NO_RESTARTS")]
        no_restarts: bool,
        #[arg(long, value_enum, env = "ADCL_SMT", default_value = "builtin")]
        smt: Smt,
        /// External solver command line, e.g. "z3 -in".
        #[arg(long, env = "ADCL_SMT_CMD")]
        smt_cmd: Option<String>,
        /// Write the witness of an unsat answer here.
        #[arg(long, env = "ADCL_WITNESS")]
        witness: Option<PathBuf>,
        /// Write one JSON line per transition here.
        #[arg(long, env = "ADCL_LOG")]
        log: Option<PathBuf>,
        /// Answer unknown instead of sat.
        #[arg(long, env = "ADCL_NO_SAT")]
        no_sat: bool,
    },
    /// Add a step counter argument to every predicate.
    Instrument { input: PathBuf, output: PathBuf },
    /// Check a witness; prints valid or invalid.
    CheckWitness { problem: PathBuf, witness: PathBuf },
    /// Add the ground derivation to a witness.
    ExpandWitness {
        problem: PathBuf,
        witness: PathBuf,
        output: PathBuf,
        #[arg(long, env = "ADCL_MAX_STEPS", default_value_t = 10_000_000)]
        max_steps: usize,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve { file, timeout, seed, restart_scale, no_restarts, smt, smt_cmd, witness, log, no_sat } => {
            if !(timeout.is_finite() && timeout >= 0.0) {
                return Err("the timeout must be a non-negative number of seconds".into());
            }
            let config = SolveConfig {
                timeout: (timeout > 0.0).then(|| Duration::from_secs_f64(timeout)),
                seed,
                restart_scale,
                restarts: !no_restarts,
                smt: match smt {
                    Smt::Builtin => SmtMode::Builtin,
                    Smt::External => SmtMode::External,
                },
                smt_cmd,
                claim_sat: !no_sat,
            };
            let text = read(&file)?;
            let sink: Option<Box<dyn Write>> = match &log {
                Some(path) => {
                    let f = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    Some(Box::new(BufWriter::new(f)))
                }
                None => None,
            };
            let report = driver::solve(&text, &config, sink).map_err(|e| e.to_string())?;
            println!("{}", report.verdict);
            for d in &report.diagnostics {
                eprintln!("{d}");
            }
            if let Some(r) = report.reason {
                eprintln!("reason: {r:?}");
            }
            if let (Some(path), Some(w), Some(p)) = (&witness, &report.witness, &report.problem) {
                write(path, &w.write(p))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Instrument { input, output } => {
            let text = driver::instrument(&read(&input)?).map_err(|e| e.to_string())?;
            write(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckWitness { problem, witness } => {
            match driver::check(&read(&problem)?, &read(&witness)?).map_err(|e| e.to_string())? {
                Ok(()) => {
                    println!("valid");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("invalid");
                    eprintln!("{e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::ExpandWitness { problem, witness, output, max_steps } => {
            let text = driver::expand_witness(&read(&problem)?, &read(&witness)?, max_steps).map_err(|e| e.to_string())?;
            write(&output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
