//! What the command line does, minus argument parsing and files.

use std::io::Write;
use std::time::Duration;

use thiserror::Error;

use crate::chc::{instrument_counter, ChcError, Problem};
use crate::engine::{Engine, EngineConfig, EngineStats, UnknownReason, Verdict};
use crate::smt::{ExternalConfig, SolverStack};
use crate::smtlib::{parse_problem, print_problem, Diagnostic, ParseError};
use crate::witness::{check_witness, expand, Witness, WitnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmtMode {
    Builtin,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub timeout: Option<Duration>,
    pub seed: u64,
    pub restart_scale: u64,
    pub restarts: bool,
    pub smt: SmtMode,
    /// Program and arguments of the external solver.
    pub smt_cmd: Option<String>,
    pub claim_sat: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            timeout: Some(Duration::from_secs(300)),
            seed: 0,
            restart_scale: 10,
            restarts: true,
            smt: SmtMode::Builtin,
            smt_cmd: None,
            claim_sat: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Chc(#[from] ChcError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Outcome of a solver run.
pub struct SolveReport {
    /// `sat`, `unsat` or `unknown`.
    pub verdict: &'static str,
    pub reason: Option<UnknownReason>,
    /// Present for `unsat`; already checked.
    pub witness: Option<Witness>,
    /// Present unless the input used an unsupported feature.
    pub problem: Option<Problem>,
    pub stats: EngineStats,
    /// Parser warnings and the reason for an `unknown` on unsupported input.
    pub diagnostics: Vec<String>,
}

fn show(d: &Diagnostic) -> String {
    format!("{}: {:?}: {}", d.span, d.severity, d.message)
}

/// Parses `text`. Unsupported features are `Ok(None)` with a diagnostic;
/// other parse errors are errors.
pub fn parse(text: &str, diagnostics: &mut Vec<String>) -> Result<Option<Problem>, DriverError> {
    match parse_problem(text) {
        Ok((p, d)) => {
            diagnostics.extend(d.items.iter().map(show));
            Ok(Some(p))
        }
        Err(e) if e.is_unsupported() => {
            diagnostics.push(format!("UnsupportedFeature: {e}"));
            Ok(None)
        }
        Err(e) => Err(DriverError::Parse(e)),
    }
}

fn solver(config: &SolveConfig) -> Result<SolverStack, DriverError> {
    match (config.smt, &config.smt_cmd) {
        (SmtMode::Builtin, _) => Ok(SolverStack::new()),
        (SmtMode::External, Some(cmd)) if !cmd.trim().is_empty() => {
            let per_query = config.timeout.unwrap_or(Duration::from_secs(300));
            Ok(SolverStack::with_external(ExternalConfig::from_command_line(cmd, per_query)))
        }
        (SmtMode::External, _) => Err(DriverError::Config("external SMT mode needs a solver command".into())),
    }
}

/// Solves the problem in `text`. An `unsat` is only reported with a
/// witness that passed [`check_witness`]; otherwise the answer is `unknown`.
pub fn solve(text: &str, config: &SolveConfig, log: Option<Box<dyn Write>>) -> Result<SolveReport, DriverError> {
    if config.restart_scale == 0 {
        return Err(DriverError::Config("the restart scale must be at least 1".into()));
    }
    let mut diagnostics = Vec::new();
    let Some(problem) = parse(text, &mut diagnostics)? else {
        return Ok(SolveReport {
            verdict: "unknown",
            reason: None,
            witness: None,
            problem: None,
            stats: EngineStats::default(),
            diagnostics,
        });
    };
    let engine_config = EngineConfig {
        seed: config.seed,
        restarts: config.restarts,
        restart_scale: config.restart_scale,
        timeout: config.timeout,
        claim_sat: config.claim_sat,
        record_transitions: false,
        ..EngineConfig::default()
    };
    let mut engine = Engine::with_solver(&problem, engine_config, solver(config)?);
    if let Some(sink) = log {
        engine.set_log_sink(sink);
    }
    let verdict = engine.run();
    let stats = engine.stats();
    let (verdict, reason, witness) = match verdict {
        Verdict::Unsat(w) => match check_witness(&problem, &w, &mut solver(config)?) {
            Ok(()) => ("unsat", None, Some(w)),
            Err(e) => {
                diagnostics.push(format!("witness rejected by the checker: {e}"));
                ("unknown", Some(UnknownReason::SolverFailure), None)
            }
        },
        Verdict::Sat => ("sat", None, None),
        Verdict::Unknown(r) => ("unknown", Some(r), None),
    };
    Ok(SolveReport { verdict, reason, witness, problem: Some(problem), stats, diagnostics })
}

/// The problem with a step counter added to every predicate, as SMT-LIB.
pub fn instrument(text: &str) -> Result<String, DriverError> {
    let (p, _) = parse_problem(text).map_err(DriverError::Parse)?;
    Ok(print_problem(&instrument_counter(&p)?))
}

/// Parses and checks a witness against the problem in `problem_text`.
pub fn check(problem_text: &str, witness_text: &str) -> Result<Result<(), String>, DriverError> {
    let (p, _) = parse_problem(problem_text).map_err(DriverError::Parse)?;
    let w = Witness::parse(witness_text, &p)?;
    Ok(check_witness(&p, &w, &mut SolverStack::new()))
}

/// Adds the ground derivation to a witness, checks it, and returns the
/// witness text.
pub fn expand_witness(problem_text: &str, witness_text: &str, max_steps: usize) -> Result<String, DriverError> {
    let (p, _) = parse_problem(problem_text).map_err(DriverError::Parse)?;
    let mut w = Witness::parse(witness_text, &p)?;
    w.expanded = Some(expand(&p, &w, max_steps)?);
    check_witness(&p, &w, &mut SolverStack::new())
        .map_err(|e| DriverError::Witness(WitnessError::NotExpandable(format!("expansion rejected: {e}"))))?;
    Ok(w.write(&p))
}
