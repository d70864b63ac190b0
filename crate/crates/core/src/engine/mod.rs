//! The ADCL state machine.
//!
//! A state is the clause store (originals plus learned clauses), the trace
//! of sip variants with one blocking set per position plus one, and the
//! language map. [`Engine::run`] applies the rules under a reasonable
//! strategy: Refute when the trace ends in a clause without head, then
//! Covered and Accelerate after every extension, then Step, then Backtrack
//! or Prove. The solver stack holds one frame per trace entry, so a Step
//! only pushes the candidate's condition on top of the trace condition.

mod restart;

pub use restart::{luby, RestartPolicy};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::accel::Accelerator;
use crate::automata::{implicant_key, LangMap};
use crate::chc::{rename_clause, resolve, resolve_with, Clause, ClauseId, Origin, PredApp, Problem, DERIVED_ID};
use crate::formula::{sip_of_renamed, CanonLit, Formula, Literal, Model, Subst, Var};
use crate::smt::{CheckResult, SolverStack};
use crate::witness::{self, GroundStep, LearnedDef, SipStep, Witness, WitnessError};

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Seed for the solver and for shuffling at restarts. 0 keeps the
    /// solver deterministic without randomization.
    pub seed: u64,
    pub restarts: bool,
    /// The unit u of the Luby schedule, in learned clauses.
    pub restart_scale: u64,
    pub timeout: Option<Duration>,
    /// Upper bound on the number of transitions.
    pub max_transitions: Option<u64>,
    /// Longest trace suffix considered by Accelerate and Covered.
    pub max_loop_length: Option<usize>,
    /// Answer sat when Prove is reached without approximation events.
    pub claim_sat: bool,
    /// Polled between transitions; setting it stops the run.
    pub cancel: Option<Arc<AtomicBool>>,
    /// Keep the transitions in memory.
    pub record_transitions: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            seed: 0,
            restarts: true,
            restart_scale: 10,
            timeout: None,
            max_transitions: None,
            max_loop_length: Some(32),
            claim_sat: true,
            cancel: None,
            record_transitions: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnknownReason {
    ProveReachedWithApproximations,
    SatClaimDisabled,
    Timeout,
    SolverFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unsat(Witness),
    Sat,
    Unknown(UnknownReason),
}

impl Verdict {
    /// `sat`, `unsat` or `unknown`.
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Unsat(_) => "unsat",
            Verdict::Sat => "sat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub steps: u64,
    pub accelerations: u64,
    pub covered: u64,
    pub backtracks: u64,
    pub restarts: u64,
    pub learned: u64,
    /// Suffixes whose acceleration was refused.
    pub refused_accelerations: u64,
    /// Models whose sip variant was blocked by a learned clause.
    pub skipped_variants: u64,
    /// Singleton Covered candidates whose strictness could not be shown.
    pub unverified_covered: u64,
    pub inconsistent_accelerations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Init,
    Step,
    Accelerate,
    Covered,
    Backtrack,
    Refute,
    Prove,
    Restart,
}

impl Rule {
    /// One-letter name; `X` for restarts.
    pub fn letter(self) -> char {
        match self {
            Rule::Init => 'I',
            Rule::Step => 'S',
            Rule::Accelerate => 'A',
            Rule::Covered => 'C',
            Rule::Backtrack => 'B',
            Rule::Refute => 'R',
            Rule::Prove => 'P',
            Rule::Restart => 'X',
        }
    }
}

/// One record of the run log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub rule: Rule,
    pub clause: Option<ClauseId>,
    /// Trace length after the transition.
    pub depth: usize,
    /// Verdict of the solver call that enabled the transition, if any.
    pub smt: Option<&'static str>,
}

/// A clause in the trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    /// Store id of the clause.
    pub clause: ClauseId,
    /// Letter of the sip variant: an interned variant id for originals,
    /// the clause itself for learned clauses.
    pub symbol: ClauseId,
    /// The sip, as literals over the store clause's variables.
    pub implicant: Vec<Literal>,
    /// Store variables to trace variables.
    pub vars: BTreeMap<Var, Var>,
    /// The sip variant over trace variables.
    pub renamed: Clause,
    /// Store version when the entry was added.
    pub version: u64,
}

/// A blocked sip variant.
#[derive(Debug, Clone)]
pub struct Blocked {
    pub clause: ClauseId,
    pub symbol: ClauseId,
    /// Over the store clause's variables.
    pub cond: Formula,
}

/// The Step query for a candidate, over trace variables.
#[derive(Debug, Clone)]
pub struct StepQuery {
    pub formula: Formula,
    /// Candidate variables to trace variables.
    pub renaming: BTreeMap<Var, Var>,
}

enum Outcome {
    Done,
    NotApplicable,
}

fn conj(lits: &[Literal]) -> Formula {
    Formula::and(lits.iter().cloned().map(Formula::Lit))
}

fn rename_app(app: &Option<PredApp>, map: &BTreeMap<Var, Var>) -> Option<PredApp> {
    app.as_ref().map(|a| PredApp { pred: a.pred.clone(), args: a.args.iter().map(|v| map[v].clone()).collect() })
}

pub struct Engine {
    problem: Problem,
    config: EngineConfig,
    store: Vec<Clause>,
    counters: BTreeMap<ClauseId, Var>,
    sources: BTreeMap<ClauseId, Vec<SipStep>>,
    next_id: ClauseId,
    trace: Vec<TraceEntry>,
    blocked: Vec<Vec<Blocked>>,
    langs: LangMap,
    smt: SolverStack,
    accel: Accelerator,
    order: Vec<ClauseId>,
    rng: ChaCha8Rng,
    stats: EngineStats,
    approximations: BTreeMap<String, u64>,
    transitions: Vec<Transition>,
    transition_count: u64,
    log: Option<Box<dyn Write>>,
    version: u64,
    pending: bool,
    policy: RestartPolicy,
    learned_since_restart: u64,
    /// Loops the accelerator refused, as (clause, implicant) pairs from the
    /// end of the suffix.
    refused: BTreeSet<Vec<(ClauseId, Vec<CanonLit>)>>,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("trace", &self.trace.iter().map(|e| e.clause).collect::<Vec<_>>())
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

impl Engine {
    /// Init: empty trace, one empty blocking set, built-in solver.
    pub fn new(problem: &Problem, config: EngineConfig) -> Engine {
        Engine::with_solver(problem, config, SolverStack::new())
    }

    /// Like [`Engine::new`] with a given (empty) solver stack, e.g. one
    /// with an external solver for non-linear learned clauses.
    pub fn with_solver(problem: &Problem, config: EngineConfig, mut smt: SolverStack) -> Engine {
        smt.set_seed(config.seed);
        let accel_smt = match smt.external_config() {
            Some(cfg) => SolverStack::with_external(cfg.clone()),
            None => SolverStack::new(),
        };
        let next_id = problem.clauses.iter().map(|c| c.id + 1).max().unwrap_or(0);
        let policy = RestartPolicy::new(config.restart_scale.max(1));
        let mut e = Engine {
            problem: problem.clone(),
            store: problem.clauses.clone(),
            counters: BTreeMap::new(),
            sources: BTreeMap::new(),
            next_id,
            trace: Vec::new(),
            blocked: vec![Vec::new()],
            langs: LangMap::new(),
            smt,
            accel: Accelerator::new(accel_smt),
            order: problem.clauses.iter().map(|c| c.id).collect(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            stats: EngineStats::default(),
            approximations: BTreeMap::new(),
            transitions: Vec::new(),
            transition_count: 0,
            log: None,
            version: 0,
            pending: false,
            policy,
            learned_since_restart: 0,
            refused: BTreeSet::new(),
            config,
        };
        e.record(Rule::Init, None, None);
        e
    }

    /// Writes every transition, including Init, as a JSON line to `sink`.
    pub fn set_log_sink(&mut self, mut sink: Box<dyn Write>) {
        for t in &self.transitions {
            let _ = writeln!(sink, "{}", serde_json::to_string(t).expect("serializable"));
        }
        self.log = Some(sink);
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn blocking(&self) -> &[Vec<Blocked>] {
        &self.blocked
    }

    pub fn stats(&self) -> EngineStats {
        self.stats
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// The recorded transitions as letters, e.g. `I,S,S,A,S,A,S,R`.
    pub fn rule_pattern(&self) -> String {
        self.transitions.iter().map(|t| t.rule.letter().to_string()).collect::<Vec<_>>().join(",")
    }

    /// Approximation events by reason.
    pub fn approximations(&self) -> &BTreeMap<String, u64> {
        &self.approximations
    }

    pub fn approximation_count(&self) -> u64 {
        self.approximations.values().sum()
    }

    pub fn lang_map(&self) -> &LangMap {
        &self.langs
    }

    pub fn store(&self) -> &[Clause] {
        &self.store
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.store.iter().find(|c| c.id == id)
    }

    /// The counter variable of a learned clause.
    pub fn counter(&self, id: ClauseId) -> Option<&Var> {
        self.counters.get(&id)
    }

    /// Current candidate order, learned clauses included.
    pub fn candidate_order(&self) -> &[ClauseId] {
        &self.order
    }

    pub fn learned_ids(&self) -> Vec<ClauseId> {
        self.counters.keys().copied().collect()
    }

    /// The condition of the trace's resolvent, over trace variables.
    pub fn trace_formula(&self) -> Formula {
        Formula::and(self.smt.assertions().cloned())
    }

    fn record(&mut self, rule: Rule, clause: Option<ClauseId>, smt: Option<&'static str>) {
        let t = Transition { rule, clause, depth: self.trace.len(), smt };
        self.transition_count += 1;
        if let Some(log) = self.log.as_mut() {
            let _ = writeln!(log, "{}", serde_json::to_string(&t).expect("serializable"));
        }
        if self.config.record_transitions {
            self.transitions.push(t);
        }
    }

    fn approximation(&mut self, reason: &str) {
        *self.approximations.entry(reason.to_string()).or_default() += 1;
    }

    fn fresh_id(&mut self) -> ClauseId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn top_head(&self) -> Option<&PredApp> {
        self.trace.last().and_then(|e| e.renamed.head.as_ref())
    }

    /// The clause `⊤ ⟹ head` standing for the trace when resolving with a
    /// candidate; resolving keeps the trace variables.
    fn prefix_clause(&self) -> Option<Clause> {
        let e = self.trace.last()?;
        Some(Clause {
            id: DERIVED_ID,
            body: None,
            cond: Formula::top(),
            head: e.renamed.head.clone(),
            origin: Origin::Derived,
        })
    }

    fn renaming_for(&self, c: &Clause) -> Option<BTreeMap<Var, Var>> {
        match self.prefix_clause() {
            None => Some(rename_clause(c).1),
            Some(p) => resolve_with(&p, c).map(|r| r.renaming),
        }
    }

    /// θ(cond(candidate)) ∧ ⋀ ¬θ(cond(π)) over the blocked π that are
    /// variants of the candidate, where θ maps the candidate's body onto
    /// the trace's head. `None` if the candidate does not resolve with the
    /// trace.
    pub fn build_step_smt(&self, candidate: &Clause, blocked: &[Blocked]) -> Option<StepQuery> {
        if self.trace.is_empty() && candidate.body.is_some() {
            return None;
        }
        let renaming = self.renaming_for(candidate)?;
        let theta = Subst::renaming(renaming.iter()).expect("renaming preserves sorts");
        let parts = std::iter::once(theta.apply(&candidate.cond))
            .chain(blocked.iter().filter(|b| b.clause == candidate.id).map(|b| theta.apply(&b.cond).negate()));
        Some(StepQuery { formula: Formula::and(parts), renaming })
    }

    fn candidates(&self) -> Vec<ClauseId> {
        let top = self.top_head().map(|h| h.pred.clone());
        self.order
            .iter()
            .copied()
            .filter(|id| {
                let c = self.clause(*id).expect("ordered clauses are stored");
                match (&top, &c.body) {
                    (None, None) => self.trace.is_empty(),
                    (Some(p), Some(b)) => *p == b.pred,
                    _ => false,
                }
            })
            .collect()
    }

    fn included(&self, a: ClauseId, b: ClauseId) -> bool {
        match (self.langs.language(a), self.langs.language(b)) {
            (Some(la), Some(lb)) => la.included_in(lb),
            _ => false,
        }
    }

    fn entry(&self, clause: &Clause, symbol: ClauseId, implicant: Vec<Literal>, vars: BTreeMap<Var, Var>) -> TraceEntry {
        let theta = Subst::renaming(vars.iter()).expect("renaming preserves sorts");
        let renamed = Clause {
            id: clause.id,
            body: rename_app(&clause.body, &vars),
            cond: theta.apply(&conj(&implicant)),
            head: rename_app(&clause.head, &vars),
            origin: clause.origin.clone(),
        };
        TraceEntry { clause: clause.id, symbol, implicant, vars, renamed, version: self.version }
    }

    /// Step with the first active candidate in the current order.
    pub fn try_step(&mut self) -> bool {
        for id in self.candidates() {
            let c = self.clause(id).expect("candidate is stored").clone();
            let top_blocked = self.blocked.last().expect("one blocking set per position").clone();
            let Some(q) = self.build_step_smt(&c, &top_blocked) else { continue };
            let theta = Subst::renaming(q.renaming.iter()).expect("renaming preserves sorts");
            self.smt.push(q.formula);
            loop {
                match self.smt.check() {
                    CheckResult::SatWith(m) => {
                        let implicant = sip_of_renamed(&c.cond, &theta, &m).expect("model satisfies the candidate");
                        let symbol = if self.counters.contains_key(&id) {
                            id
                        } else {
                            let next = &mut self.next_id;
                            self.langs.variant(id, &implicant, || {
                                *next += 1;
                                *next - 1
                            })
                        };
                        let blocker = self
                            .blocked
                            .last()
                            .expect("one blocking set per position")
                            .iter()
                            .any(|b| b.symbol != symbol && self.langs.is_learned(b.symbol) && self.included(symbol, b.symbol));
                        if blocker {
                            // Redundant with a blocked learned clause, hence
                            // blocked itself: look for another model.
                            self.stats.skipped_variants += 1;
                            self.smt.assert(theta.apply(&conj(&implicant)).negate());
                            self.blocked.last_mut().expect("non-empty").push(Blocked {
                                clause: id,
                                symbol,
                                cond: conj(&implicant),
                            });
                            continue;
                        }
                        self.smt.pop();
                        self.smt.push(theta.apply(&conj(&implicant)));
                        let e = self.entry(&c, symbol, implicant, q.renaming);
                        self.trace.push(e);
                        self.blocked.push(Vec::new());
                        self.stats.steps += 1;
                        self.pending = true;
                        self.record(Rule::Step, Some(id), Some("sat"));
                        return true;
                    }
                    CheckResult::Unsat => {
                        self.smt.pop();
                        break;
                    }
                    CheckResult::Unknown(_) => {
                        self.smt.pop();
                        self.approximation("step: solver unknown");
                        break;
                    }
                }
            }
        }
        false
    }

    /// Pops the last entry and blocks it in the new top set.
    fn bt(&mut self) {
        let e = self.trace.pop().expect("bt on a non-empty trace");
        self.smt.pop();
        self.blocked.pop();
        self.blocked.last_mut().expect("one blocking set per position").push(Blocked {
            clause: e.clause,
            symbol: e.symbol,
            cond: conj(&e.implicant),
        });
    }

    /// Backtrack: all candidates are inactive and the trace does not end
    /// in a query.
    pub fn backtrack(&mut self) {
        let id = self.trace.last().map(|e| e.clause);
        self.bt();
        self.stats.backtracks += 1;
        self.record(Rule::Backtrack, id, Some("unsat"));
    }

    /// Does the learned clause `l` have a ground instance outside the sip
    /// variant of `e`? `None` when this cannot be decided exactly.
    fn strictly_more(&mut self, e: &TraceEntry, l: ClauseId) -> Option<bool> {
        let orig = self.clause(e.clause)?.clone();
        let learned = self.clause(l)?.clone();
        let variant = orig.with_cond(orig.id, conj(&e.implicant));
        if !variant.locals().is_empty() {
            return None;
        }
        let same = |a: &Option<PredApp>, b: &Option<PredApp>| match (a, b) {
            (Some(a), Some(b)) => a.pred == b.pred,
            (None, None) => true,
            _ => false,
        };
        if !same(&orig.body, &learned.body) || !same(&orig.head, &learned.head) {
            return None;
        }
        let mut align = Subst::new();
        let pairs = learned
            .body_args()
            .iter()
            .zip(variant.body_args())
            .chain(learned.head_args().iter().zip(variant.head_args()));
        for (v, w) in pairs {
            align.insert_var(v, w).ok()?;
        }
        match self.smt.check_alone(Formula::and([align.apply(&learned.cond), variant.cond.negate()])) {
            CheckResult::SatWith(_) => Some(true),
            CheckResult::Unsat => Some(false),
            CheckResult::Unknown(_) => None,
        }
    }

    /// Covered: backtracks if a suffix added since the last store change
    /// is redundant, strictly so if it is a single clause.
    pub fn try_covered(&mut self) -> bool {
        let scope = self.trace.iter().rev().take_while(|e| e.version == self.version).count();
        let scope = scope.min(self.config.max_loop_length.unwrap_or(usize::MAX));
        let word: Vec<ClauseId> = self.trace[self.trace.len() - scope..].iter().map(|e| e.symbol).collect();
        // Candidate lengths up to the first covered suffix longer than one.
        let mut candidates = Vec::new();
        for (k, covered) in (1..).zip(self.langs.covered_suffixes(&word)) {
            if covered {
                candidates.push(k);
                if k > 1 {
                    break;
                }
            }
        }
        for k in candidates {
            if k == 1 {
                let e = self.trace.last().expect("scope is non-empty").clone();
                let mut strict = false;
                for l in self.learned_ids() {
                    if l == e.symbol || !self.included(e.symbol, l) {
                        continue;
                    }
                    match self.strictly_more(&e, l) {
                        Some(true) => {
                            strict = true;
                            break;
                        }
                        Some(false) => {}
                        None => self.stats.unverified_covered += 1,
                    }
                }
                if !strict {
                    continue;
                }
            }
            let id = self.trace.last().map(|e| e.clause);
            self.bt();
            self.stats.covered += 1;
            self.record(Rule::Covered, id, None);
            return true;
        }
        false
    }

    /// Accelerate the shortest recursive suffix whose acceleration is not
    /// known to be redundant and keeps the trace consistent.
    pub fn try_accelerate(&mut self) -> bool {
        matches!(self.accelerate(), Outcome::Done)
    }

    fn accelerate(&mut self) -> Outcome {
        let Some(top) = self.top_head().map(|h| h.pred.clone()) else { return Outcome::NotApplicable };
        // Resolvents of the suffixes, extended to the left one entry at a time
        // and only when a suffix is actually handed to the accelerator.
        let mut resolvent: Option<Clause> = None;
        let mut resolved = 0;
        let mut key = Vec::new();
        let longest = self.config.max_loop_length.unwrap_or(usize::MAX).min(self.trace.len());
        for len in 1..=longest {
            let start = self.trace.len() - len;
            let e = &self.trace[start];
            key.push((e.clause, implicant_key(&e.implicant)));
            let recursive = e.renamed.body.as_ref().is_some_and(|b| b.pred == top);
            if !recursive || self.refused.contains(&key) {
                continue;
            }
            let word: Vec<ClauseId> = self.trace[start..].iter().map(|e| e.symbol).collect();
            if self.langs.accel_redundant(&word) {
                continue;
            }
            for e in self.trace[start..self.trace.len() - resolved].iter().rev() {
                let c = self.clause(e.clause).expect("trace clauses are stored");
                let mut first = c.with_cond(c.id, conj(&e.implicant));
                first.origin = c.origin.clone();
                resolvent = Some(match resolvent.take() {
                    None => first,
                    Some(rest) => resolve(&first, &rest),
                });
            }
            resolved = len;
            let source = self.trace[start..].iter().map(|e| e.clause).collect();
            let r = resolvent.as_ref().expect("just set");
            let a = match self.accel.close(r, source) {
                Ok(a) => a,
                Err(_) => {
                    self.stats.refused_accelerations += 1;
                    self.refused.insert(key.clone());
                    continue;
                }
            };
            let mut learned = a.clause.clone();
            learned.id = self.next_id;
            learned.origin = Origin::Learned { source: a.source.clone() };
            // Consistency: swap the suffix's frames for the learned clause.
            let saved: Vec<Vec<Formula>> = (0..len).map(|_| self.smt.pop()).collect();
            let saved_trace = self.trace.split_off(start);
            let vars = self.renaming_for(&learned).expect("recursive suffix resolves with the prefix");
            let theta = Subst::renaming(vars.iter()).expect("renaming preserves sorts");
            self.smt.push(theta.apply(&learned.cond));
            let r = self.smt.check();
            let CheckResult::SatWith(m) = &r else {
                self.smt.pop();
                self.trace.extend(saved_trace);
                for frame in saved.into_iter().rev() {
                    self.smt.push(Formula::and(frame));
                }
                self.stats.inconsistent_accelerations += 1;
                if matches!(r, CheckResult::Unknown(_)) {
                    self.approximation("accelerate: solver unknown");
                }
                return Outcome::NotApplicable;
            };
            let implicant = sip_of_renamed(&learned.cond, &theta, m).expect("model satisfies the learned clause");
            let id = self.fresh_id();
            self.blocked.truncate(start + 1);
            self.version += 1;
            let e = self.entry(&learned, id, implicant, vars);
            self.trace.push(e);
            self.blocked.push(vec![Blocked { clause: id, symbol: id, cond: learned.cond.clone() }]);
            self.langs.register_learned(id, &word).expect("fresh learned id");
            self.sources.insert(
                id,
                saved_trace.iter().map(|e| SipStep { clause: e.clause, sip: e.implicant.clone() }).collect(),
            );
            self.counters.insert(id, a.counter.clone());
            self.store.push(learned);
            self.order.push(id);
            self.stats.accelerations += 1;
            self.stats.learned += 1;
            self.learned_since_restart += 1;
            self.pending = true;
            self.record(Rule::Accelerate, Some(id), Some("sat"));
            return Outcome::Done;
        }
        Outcome::NotApplicable
    }

    /// Clears the trace and blocking sets, reseeds the solver and
    /// shuffles the candidate order. Store and languages are kept.
    pub fn restart(&mut self) {
        self.trace.clear();
        self.blocked = vec![Vec::new()];
        while self.smt.depth() > 0 {
            self.smt.pop();
        }
        let seed = self.rng.gen::<u64>() | 1;
        self.smt.set_seed(seed);
        self.smt.forget_model();
        self.order.shuffle(&mut self.rng);
        self.policy.advance();
        self.learned_since_restart = 0;
        self.pending = false;
        self.stats.restarts += 1;
        self.record(Rule::Restart, None, None);
    }

    fn out_of_budget(&self, deadline: Option<Instant>) -> bool {
        deadline.is_some_and(|d| Instant::now() >= d)
            || self.config.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
            || self.config.max_transitions.is_some_and(|m| self.transition_count >= m)
    }

    /// Applies rules until a verdict is reached.
    pub fn run(&mut self) -> Verdict {
        let deadline = self.config.timeout.map(|t| Instant::now() + t);
        loop {
            if self.out_of_budget(deadline) {
                return Verdict::Unknown(UnknownReason::Timeout);
            }
            if !self.trace.is_empty() && self.top_head().is_none() {
                return match self.refute() {
                    Some(w) => Verdict::Unsat(w),
                    None => Verdict::Unknown(UnknownReason::SolverFailure),
                };
            }
            if self.pending {
                if self.try_covered() {
                    continue;
                }
                if self.try_accelerate() {
                    continue;
                }
                self.pending = false;
            }
            if self.config.restarts && self.learned_since_restart >= self.policy.threshold() {
                self.restart();
                continue;
            }
            if self.try_step() {
                continue;
            }
            if self.trace.is_empty() {
                self.record(Rule::Prove, None, None);
                return if !self.config.claim_sat {
                    Verdict::Unknown(UnknownReason::SatClaimDisabled)
                } else if self.approximation_count() == 0 {
                    Verdict::Sat
                } else {
                    Verdict::Unknown(UnknownReason::ProveReachedWithApproximations)
                };
            }
            self.backtrack();
        }
    }

    fn refute(&mut self) -> Option<Witness> {
        let f = self.trace_formula();
        let model = match self.smt.last_model() {
            Some(m) if f.eval(m) == Ok(true) => m.clone(),
            _ => match self.smt.check() {
                CheckResult::SatWith(m) => m,
                _ => return None,
            },
        };
        let w = self.witness(&model);
        self.record(Rule::Refute, self.trace.last().map(|e| e.clause), None);
        Some(w)
    }

    /// The witness for the current trace under a model of its condition.
    pub fn witness(&self, model: &Model) -> Witness {
        let mut steps = Vec::new();
        let mut models = Vec::new();
        let mut used = BTreeSet::new();
        for e in &self.trace {
            let c = self.clause(e.clause).expect("trace clauses are stored");
            let vars = c.all_vars();
            let mut m: Model = vars.iter().filter_map(|v| Some((v.clone(), model.get(e.vars.get(v)?)?.clone()))).collect();
            m.complete(&vars);
            steps.push(SipStep { clause: e.clause, sip: e.implicant.clone() });
            models.push(m);
            self.collect_learned(e.clause, &mut used);
        }
        let learned = used
            .into_iter()
            .map(|id| LearnedDef {
                id,
                clause: self.clause(id).expect("learned clauses are stored").clone(),
                counter: self.counters[&id].clone(),
                source: self.sources[&id].clone(),
            })
            .collect();
        Witness { learned, steps, models, expanded: None }
    }

    fn collect_learned(&self, id: ClauseId, out: &mut BTreeSet<ClauseId>) {
        if let Some(src) = self.sources.get(&id) {
            if out.insert(id) {
                for s in src {
                    self.collect_learned(s.clause, out);
                }
            }
        }
    }

    /// Replaces learned steps of `w` by ground steps over original clauses.
    pub fn expand_witness(&self, w: &Witness, max_steps: usize) -> Result<Vec<GroundStep>, WitnessError> {
        witness::expand(&self.problem, w, max_steps)
    }
}
