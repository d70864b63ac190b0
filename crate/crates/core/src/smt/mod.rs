//! Incremental satisfiability checking with models.
//!
//! [`SolverStack`] keeps a stack of assertion frames. Linear queries are
//! decided by a built-in procedure (case splitting over an Omega-test core,
//! exact over big integers); queries with multiplication go to an external
//! SMT-LIB2 process when one is configured and are `Unknown` otherwise.
//! Every model handed out has been checked against the assertions.

mod external;
mod lia;
mod search;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use external::{ExternalConfig, ExternalSolver};
pub use lia::{solve_conjunction, LiaResult};

use crate::formula::{Formula, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmtError {
    #[error("external solver failure: {0}")]
    BackendCrash(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    SatWith(Model),
    Unsat,
    Unknown(String),
}

impl CheckResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CheckResult::SatWith(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, CheckResult::Unsat)
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            CheckResult::SatWith(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmtStats {
    pub checks: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
}

pub struct SolverStack {
    frames: Vec<Vec<Formula>>,
    seed: u64,
    last_model: Option<Model>,
    external: Option<ExternalSolver>,
    stats: SmtStats,
}

impl Default for SolverStack {
    fn default() -> Self {
        SolverStack::new()
    }
}

impl SolverStack {
    /// A stack using only the built-in procedure.
    pub fn new() -> SolverStack {
        SolverStack { frames: Vec::new(), seed: 0, last_model: None, external: None, stats: SmtStats::default() }
    }

    /// A stack that delegates non-linear queries to an external solver.
    pub fn with_external(config: ExternalConfig) -> SolverStack {
        SolverStack { external: Some(ExternalSolver::new(config)), ..SolverStack::new() }
    }

    pub fn has_external(&self) -> bool {
        self.external.is_some()
    }

    pub fn external_config(&self) -> Option<&ExternalConfig> {
        self.external.as_ref().map(|e| e.config())
    }

    /// Opens a new frame holding `psi`.
    pub fn push(&mut self, psi: Formula) {
        self.frames.push(vec![psi]);
    }

    /// Adds `psi` to the top frame, opening one if the stack is empty.
    pub fn assert(&mut self, psi: Formula) {
        match self.frames.last_mut() {
            Some(f) => f.push(psi),
            None => self.frames.push(vec![psi]),
        }
    }

    /// Removes the top frame. Panics on an empty stack.
    pub fn pop(&mut self) -> Vec<Formula> {
        self.frames.pop().expect("pop on empty solver stack")
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Formula> {
        self.frames.iter().flatten()
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stats(&self) -> SmtStats {
        self.stats
    }

    /// The model of the last satisfiable check.
    pub fn last_model(&self) -> Option<&Model> {
        self.last_model.as_ref()
    }

    /// Forgets the last model, so the next check is not guided by it.
    pub fn forget_model(&mut self) {
        self.last_model = None;
    }

    /// Decides the conjunction of all frames.
    pub fn check(&mut self) -> CheckResult {
        let assertions: Vec<Formula> = self.assertions().cloned().collect();
        let conj = Formula::and(assertions.iter().cloned());
        let result = if conj.is_linear() {
            let rng = (self.seed != 0).then(|| ChaCha8Rng::seed_from_u64(self.seed));
            match search::Search::new(&conj, self.last_model.as_ref(), rng).run(&conj) {
                Some(m) => CheckResult::SatWith(m),
                None => CheckResult::Unsat,
            }
        } else {
            match self.external.as_mut() {
                None => CheckResult::Unknown("non-linear query without external solver".into()),
                Some(ext) => ext.check(&assertions).unwrap_or_else(|e| CheckResult::Unknown(e.to_string())),
            }
        };
        let result = match result {
            CheckResult::SatWith(mut m) => {
                m.complete(&conj.vars());
                if conj.eval(&m) == Ok(true) {
                    self.last_model = Some(m.clone());
                    CheckResult::SatWith(m)
                } else {
                    CheckResult::Unknown("model failed validation".into())
                }
            }
            r => r,
        };
        self.stats.checks += 1;
        match &result {
            CheckResult::SatWith(_) => self.stats.sat += 1,
            CheckResult::Unsat => self.stats.unsat += 1,
            CheckResult::Unknown(_) => self.stats.unknown += 1,
        }
        result
    }

    /// Checks `psi` on top of the current frames without keeping it.
    pub fn check_with(&mut self, psi: Formula) -> CheckResult {
        self.push(psi);
        let r = self.check();
        self.pop();
        r
    }

    /// Checks `psi` alone, with the same backends but none of the frames.
    /// The last model is kept.
    pub fn check_alone(&mut self, psi: Formula) -> CheckResult {
        let frames = std::mem::replace(&mut self.frames, vec![vec![psi]]);
        let hint = self.last_model.take();
        let r = self.check();
        self.frames = frames;
        self.last_model = hint;
        r
    }
}

/// One-shot check of `psi` with the built-in procedure.
pub fn check_sat(psi: &Formula) -> CheckResult {
    let mut s = SolverStack::new();
    s.push(psi.clone());
    s.check()
}
