//! Loop acceleration for recursive conjunctive clauses.
//!
//! A clause `F(X) ∧ ψ ⟹ F(Y)` is accelerated when ψ fixes every `Y` as a
//! function θ of `X` with a closed form for θᴺ. The learned clause
//!
//! ```text
//! F(X) ∧ N > 0 ∧ G₀ ∧ G_{N−1} ∧ Y = C(N) ⟹ F(Y)
//! ```
//!
//! has exactly the ground instances of all N-fold unrollings: guards that
//! are affine in the step index are checked at the first and last step,
//! the remaining guards must be inductive. Anything else is refused rather
//! than approximated.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chc::{rename_clause, resolve_seq, Clause, ClauseId, Origin, PredApp, DERIVED_ID};
use crate::formula::{CmpOp, Formula, Literal, Poly, Sort, Subst, Term, Var};
use crate::smt::{CheckResult, SolverStack};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccelError {
    #[error("clause is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("no closed form: {0}")]
    NoClosedForm(String),
    #[error("cannot accelerate: {0}")]
    NotAccelerable(String),
}

/// Right-hand side of an update or definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Update {
    Int(Term),
    Bool(bool),
}

impl Update {
    fn equation(&self, v: &Var) -> Formula {
        match self {
            Update::Int(t) => Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(v), t.clone())),
            Update::Bool(b) => Formula::lit(Literal::BoolLit { var: v.clone(), polarity: *b }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicUpdate {
    /// Body arguments, the variables θ speaks about.
    pub body: Vec<Var>,
    /// θ, aligned with the head arguments.
    pub theta: Vec<Update>,
    pub guard: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedForm {
    /// θ(X) = X.
    Invariant,
    /// θ(X) = X + c.
    AffineCounter(BigInt),
    /// θ(X) = t with t over invariant variables only: constant from step 1 on.
    EventuallyConstant(Update),
    /// θ(X) = X + t with t a non-constant term over invariant variables. The
    /// closed form X + N·t is non-linear.
    Accumulator(Term),
}

impl ClosedForm {
    /// The value after `n` steps, as a term in `x` and `n`. `n` must be at
    /// least 1 for eventually constant variables.
    pub fn int_at(&self, x: &Var, n: &Term) -> Term {
        match self {
            ClosedForm::Invariant => Term::var(x),
            ClosedForm::AffineCounter(c) => Term::var(x).add(&n.scale(c.clone())),
            ClosedForm::Accumulator(d) => Term::var(x).add(&n.mul(d)),
            ClosedForm::EventuallyConstant(Update::Int(t)) => t.clone(),
            ClosedForm::EventuallyConstant(Update::Bool(_)) => panic!("boolean closed form used as a term"),
        }
    }

    pub fn is_linear(&self) -> bool {
        !matches!(self, ClosedForm::Accumulator(_))
    }
}

#[derive(Debug, Clone)]
pub struct AcceleratedClause {
    pub clause: Clause,
    pub counter: Var,
    /// Head values as functions of the body arguments and the counter.
    pub head_forms: Vec<Update>,
    pub closed_forms: Vec<ClosedForm>,
    pub source: Vec<ClauseId>,
    pub exact: bool,
}

/// Solves the equalities of a conjunctive condition for the variables that
/// are not in `known`. Returns the definitions, each over `known` only, and
/// the literals that were not used as definitions, rewritten with them.
pub fn definitions(
    lits: &[Literal],
    known: &BTreeSet<Var>,
) -> (BTreeMap<Var, Update>, Vec<Literal>) {
    let mut defs: BTreeMap<Var, Update> = BTreeMap::new();
    let mut used = vec![false; lits.len()];
    let rewrite = |l: &Literal, defs: &BTreeMap<Var, Update>| -> Formula {
        match l {
            Literal::BoolLit { var, polarity } => match defs.get(var) {
                Some(Update::Bool(b)) => Formula::lit(Literal::BoolConst(b == polarity)),
                _ => Formula::lit(l.clone()),
            },
            Literal::IntCmp { op, lhs, rhs } => {
                let sub = |v: &Var| match defs.get(v) {
                    Some(Update::Int(t)) => Some(t.clone()),
                    _ => None,
                };
                Formula::lit(Literal::cmp(*op, lhs.substitute(&sub), rhs.substitute(&sub)))
            }
            Literal::BoolConst(_) => Formula::lit(l.clone()),
        }
    };
    let mut progress = true;
    while progress {
        progress = false;
        for (k, l) in lits.iter().enumerate() {
            if used[k] {
                continue;
            }
            match l {
                Literal::BoolLit { var, polarity } if !known.contains(var) && !defs.contains_key(var) => {
                    defs.insert(var.clone(), Update::Bool(*polarity));
                    used[k] = true;
                    progress = true;
                }
                Literal::IntCmp { op: CmpOp::Eq, .. } => {
                    let Formula::Lit(Literal::IntCmp { lhs, rhs, .. }) = rewrite(l, &defs) else { continue };
                    let p = lhs.to_poly().sub(&rhs.to_poly());
                    if !p.is_linear() {
                        continue;
                    }
                    let open: Vec<Var> = p.vars().into_iter().filter(|v| !known.contains(v)).collect();
                    let [v] = open.as_slice() else { continue };
                    let c = p.coeff(v);
                    if !(c.is_one() || (-&c).is_one()) {
                        continue;
                    }
                    // c·v + rest = 0  ⟹  v = −rest / c
                    let rest = p.sub(&Poly::var(v).scale(&c));
                    let t = Term::from_poly(&rest.scale(&-c));
                    defs.insert(v.clone(), Update::Int(t));
                    used[k] = true;
                    progress = true;
                }
                _ => {}
            }
        }
    }
    let mut rest = Vec::new();
    for (k, l) in lits.iter().enumerate() {
        if used[k] {
            continue;
        }
        match rewrite(l, &defs) {
            Formula::Lit(Literal::BoolConst(true)) => {}
            Formula::Lit(r) => rest.push(r),
            _ => unreachable!("rewriting a literal yields a literal"),
        }
    }
    (defs, rest)
}

/// Finds θ with `cond ⊨ Y = θ(X)` and the guard over the body arguments.
pub fn extract_update(c: &Clause) -> Result<DeterministicUpdate, AccelError> {
    if !c.is_recursive() {
        return Err(AccelError::NotDeterministic("clause is not recursive".into()));
    }
    let lits = c
        .cond
        .conjuncts()
        .ok_or_else(|| AccelError::NotDeterministic("condition is not conjunctive".into()))?;
    let known: BTreeSet<Var> = c.body_args().iter().cloned().collect();
    let (defs, guard) = definitions(&lits, &known);
    let mut theta = Vec::new();
    for y in c.head_args() {
        match defs.get(y) {
            Some(u) => theta.push(u.clone()),
            None => return Err(AccelError::NotDeterministic(format!("no defining equality for `{y}`"))),
        }
    }
    for g in &guard {
        let mut vs = BTreeSet::new();
        g.collect_vars(&mut vs);
        if let Some(v) = vs.iter().find(|v| !known.contains(v)) {
            return Err(AccelError::NotDeterministic(format!("guard mentions `{v}`")));
        }
    }
    Ok(DeterministicUpdate { body: c.body_args().to_vec(), theta, guard })
}

/// Closed forms of θᴺ, aligned with the body arguments.
pub fn closed_form(u: &DeterministicUpdate) -> Result<Vec<ClosedForm>, AccelError> {
    let invariant: BTreeSet<&Var> = u
        .body
        .iter()
        .zip(&u.theta)
        .filter(|(x, t)| matches!(t, Update::Int(t) if t.as_var() == Some(*x)))
        .map(|(x, _)| x)
        .collect();
    let mut out = Vec::new();
    for (x, t) in u.body.iter().zip(&u.theta) {
        let form = match t {
            Update::Bool(b) => ClosedForm::EventuallyConstant(Update::Bool(*b)),
            Update::Int(_) if invariant.contains(x) => ClosedForm::Invariant,
            Update::Int(t) => {
                let p = t.to_poly();
                let c = p.coeff(x);
                let d = p.sub(&Poly::var(x).scale(&c));
                let over_invariants = d.vars().iter().all(|v| invariant.contains(v));
                if c.is_zero() && over_invariants {
                    ClosedForm::EventuallyConstant(Update::Int(t.clone()))
                } else if c.is_one() && over_invariants {
                    match d.as_constant() {
                        Some(k) => ClosedForm::AffineCounter(k),
                        None => ClosedForm::Accumulator(Term::from_poly(&d)),
                    }
                } else {
                    return Err(AccelError::NoClosedForm(format!("`{x}` is updated to `{t}`")));
                }
            }
        };
        out.push(form);
    }
    Ok(out)
}

/// Accelerates clauses, using its own solver for the inductiveness checks.
pub struct Accelerator {
    smt: SolverStack,
}

impl Default for Accelerator {
    fn default() -> Self {
        Accelerator::new(SolverStack::new())
    }
}

impl Accelerator {
    /// `smt` should be empty; it decides whether non-linear closed forms
    /// are allowed (only with an external solver).
    pub fn new(smt: SolverStack) -> Accelerator {
        Accelerator { smt }
    }

    pub fn allows_non_linear(&self) -> bool {
        self.smt.has_external()
    }

    /// Accelerates the resolvent of a trace suffix.
    pub fn accelerate_suffix(&mut self, suffix: &[Clause]) -> Result<AcceleratedClause, AccelError> {
        let r = resolve_seq(suffix);
        self.accelerate_resolvent(&r.clause, suffix.iter().map(|c| c.id).collect())
    }

    /// Like [`Accelerator::accelerate_suffix`], for a resolvent the caller
    /// already has.
    pub fn accelerate_resolvent(&mut self, r: &Clause, source: Vec<ClauseId>) -> Result<AcceleratedClause, AccelError> {
        let mut a = self.accelerate(r)?;
        a.source = source;
        if let Origin::Learned { source } = &mut a.clause.origin {
            source.clone_from(&a.source);
        }
        Ok(a)
    }

    /// [`Accelerator::accelerate`], falling back to `c` itself with the
    /// counter fixed to 1 when `c` is idempotent (every resolvent of `c`
    /// with itself is an instance of `c`), since then `c` already has the
    /// ground instances of all its unrollings.
    pub fn close(&mut self, c: &Clause, source: Vec<ClauseId>) -> Result<AcceleratedClause, AccelError> {
        match self.accelerate_resolvent(c, source.clone()) {
            Ok(a) => Ok(a),
            Err(e) => {
                if !self.idempotent(c)? {
                    return Err(e);
                }
                let n = Var::int("N");
                let cond = Formula::and([
                    Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(&n), Term::constant(1))),
                    c.cond.clone(),
                ]);
                let learned = Clause::new(DERIVED_ID, c.body.clone(), cond, c.head.clone(), Origin::Learned { source: source.clone() })
                    .map_err(|e| AccelError::NotAccelerable(e.to_string()))?;
                let (clause, map) = rename_clause(&learned);
                Ok(AcceleratedClause {
                    counter: map[&n].clone(),
                    clause,
                    head_forms: Vec::new(),
                    closed_forms: Vec::new(),
                    source,
                    exact: true,
                })
            }
        }
    }

    /// Does resolving `c` with itself only yield instances of `c`?
    fn idempotent(&mut self, c: &Clause) -> Result<bool, AccelError> {
        if !c.is_recursive() || !c.locals().is_empty() {
            return Ok(false);
        }
        let Some(r) = crate::chc::resolve_with(c, c) else { return Ok(false) };
        let mut align = Subst::new();
        for (v, w) in c.body_args().iter().zip(r.clause.body_args()).chain(c.head_args().iter().zip(r.clause.head_args())) {
            if align.insert_var(v, w).is_err() {
                return Ok(false);
            }
        }
        match self.smt.check_with(Formula::and([r.clause.cond.clone(), align.apply(&c.cond).negate()])) {
            CheckResult::Unsat => Ok(true),
            CheckResult::SatWith(_) => Ok(false),
            CheckResult::Unknown(r) => Err(AccelError::NotAccelerable(format!("solver unknown: {r}"))),
        }
    }

    pub fn accelerate(&mut self, c: &Clause) -> Result<AcceleratedClause, AccelError> {
        let u = extract_update(c)?;
        let forms = closed_form(&u)?;
        if forms.iter().any(|f| !f.is_linear()) && !self.allows_non_linear() {
            return Err(AccelError::NotAccelerable("non-linear closed form needs an external solver".into()));
        }
        if u.guard.iter().any(|g| g.ground_value() == Some(false)) {
            return Err(AccelError::NotAccelerable("guard is unsatisfiable".into()));
        }
        let n = Var::int("N");
        let n_term = Term::var(&n);
        let last = n_term.sub(&Term::constant(1));
        let kinds: BTreeMap<&Var, &ClosedForm> = u.body.iter().zip(&forms).collect();
        let mut cond = vec![Formula::lit(Literal::cmp(CmpOp::Gt, n_term.clone(), Term::constant(0)))];
        for g in &u.guard {
            let mut vs = BTreeSet::new();
            g.collect_vars(&mut vs);
            let affine = vs.iter().all(|v| {
                v.sort() == Sort::Int
                    && matches!(
                        kinds.get(v),
                        Some(ClosedForm::Invariant | ClosedForm::AffineCounter(_) | ClosedForm::Accumulator(_))
                    )
            });
            let at_last = |g: &Literal| -> Literal {
                let Literal::IntCmp { op, lhs, rhs } = g else { unreachable!("affine guards are comparisons") };
                let sub = |v: &Var| kinds.get(v).map(|f| f.int_at(v, &last));
                Literal::cmp(*op, lhs.substitute(&sub), rhs.substitute(&sub))
            };
            if affine {
                let gl = at_last(g);
                let moves = gl.canonical_key() != g.canonical_key();
                if !moves || !matches!(g, Literal::IntCmp { op: CmpOp::Ne, .. }) {
                    cond.push(Formula::lit(g.clone()));
                    if moves {
                        cond.push(Formula::lit(gl));
                    }
                    continue;
                }
            }
            // Fall back to induction over one step.
            if !self.inductive(g, &u)? {
                return Err(AccelError::NotAccelerable(format!("guard `{g}` is neither affine nor inductive")));
            }
            cond.push(Formula::lit(g.clone()));
        }
        let head: Vec<Var> = c.head_args().to_vec();
        let mut head_forms = Vec::new();
        for ((x, y), f) in u.body.iter().zip(&head).zip(&forms) {
            let value = match f {
                ClosedForm::EventuallyConstant(v) => v.clone(),
                f => Update::Int(f.int_at(x, &n_term)),
            };
            cond.push(value.equation(y));
            head_forms.push(value);
        }
        let body_app = c.body.clone().expect("recursive clause has a body");
        let head_app = PredApp { pred: body_app.pred.clone(), args: head };
        let learned = Clause::new(
            DERIVED_ID,
            Some(body_app),
            Formula::and(cond),
            Some(head_app),
            Origin::Learned { source: vec![c.id] },
        )
        .map_err(|e| AccelError::NotAccelerable(e.to_string()))?;
        // Fresh variables, so the learned clause shares nothing with the input.
        let (clause, map) = rename_clause(&learned);
        let rename = |v: &Var| map.get(v).map(Term::var);
        let head_forms = head_forms
            .into_iter()
            .map(|h| match h {
                Update::Int(t) => Update::Int(t.substitute(&rename)),
                b => b,
            })
            .collect();
        let forms = forms
            .into_iter()
            .map(|f| match f {
                ClosedForm::EventuallyConstant(Update::Int(t)) => {
                    ClosedForm::EventuallyConstant(Update::Int(t.substitute(&rename)))
                }
                ClosedForm::Accumulator(d) => ClosedForm::Accumulator(d.substitute(&rename)),
                f => f,
            })
            .collect();
        Ok(AcceleratedClause {
            counter: map[&n].clone(),
            clause,
            head_forms,
            closed_forms: forms,
            source: vec![c.id],
            exact: true,
        })
    }

    /// Does `g(X) ∧ X′ = θ(X)` entail `g(X′)`?
    fn inductive(&mut self, g: &Literal, u: &DeterministicUpdate) -> Result<bool, AccelError> {
        let primed: BTreeMap<Var, Var> = u.body.iter().map(|x| (x.clone(), x.rename())).collect();
        let mut parts = vec![Formula::lit(g.clone())];
        for (x, t) in u.body.iter().zip(&u.theta) {
            parts.push(t.equation(&primed[x]));
        }
        let theta = Subst::renaming(primed.iter()).expect("same sorts");
        parts.push(theta.apply_literal(g).negate());
        match self.smt.check_with(Formula::and(parts)) {
            CheckResult::Unsat => Ok(true),
            CheckResult::SatWith(_) => Ok(false),
            CheckResult::Unknown(r) => Err(AccelError::NotAccelerable(format!("solver unknown: {r}"))),
        }
    }
}

/// `c` with its locals projected away, provided each of them is defined by
/// an equality over the arguments.
fn without_locals(c: &Clause) -> Option<Clause> {
    if c.locals().is_empty() {
        return Some(c.clone());
    }
    let known: BTreeSet<Var> = c.body_args().iter().chain(c.head_args()).cloned().collect();
    let (_, rest) = definitions(&c.cond.conjuncts()?, &known);
    let cond = Formula::and(rest.into_iter().map(Formula::lit));
    let projected = Clause { cond, ..c.clone() };
    projected.locals().is_empty().then_some(projected)
}

/// Does `a` with its counter fixed to `n` describe exactly the `n`-fold
/// unrolling of `c`? `a` must have been accelerated from `c`. The forward
/// direction is a plain entailment; for the converse the intermediate
/// states of the unrolling are fixed by the closed forms, and locals of
/// `c` must be defined by equalities. `None` if the solver gives up or a
/// local is not defined.
pub fn unrolling_matches(c: &Clause, a: &AcceleratedClause, n: u64, smt: &mut SolverStack) -> Option<bool> {
    if n == 0 {
        return Some(false);
    }
    let c = &without_locals(c)?;
    let mut acc = c.clone();
    let mut states: Vec<Vec<Var>> = vec![c.head_args().to_vec()];
    for _ in 1..n {
        acc = crate::chc::resolve_with(&acc, c)?.clause;
        states.push(acc.head_args().to_vec());
    }
    let mut align = Subst::new();
    let pairs = a.clause.body_args().iter().zip(acc.body_args()).chain(a.clause.head_args().iter().zip(acc.head_args()));
    for (v, w) in pairs {
        align.insert_var(v, w).ok()?;
    }
    align.insert_term(&a.counter, Term::constant(n)).ok()?;
    let a_cond = align.apply(&a.clause.cond);
    let decide = |smt: &mut SolverStack, f: Formula| match smt.check_with(f) {
        CheckResult::Unsat => Some(true),
        CheckResult::SatWith(_) => Some(false),
        CheckResult::Unknown(_) => None,
    };
    if !decide(smt, Formula::and([acc.cond.clone(), a_cond.negate()]))? {
        return Some(false);
    }
    let mut mid = Subst::new();
    for (k, state) in states.iter().take(states.len() - 1).enumerate() {
        let steps = Term::constant(k as i64 + 1);
        for (i, z) in state.iter().enumerate() {
            let x = &a.clause.body_args()[i];
            let value = match &a.closed_forms[i] {
                ClosedForm::EventuallyConstant(Update::Bool(b)) => {
                    crate::formula::SubstValue::Bool(Formula::lit(Literal::BoolConst(*b)))
                }
                f => crate::formula::SubstValue::Int(align.apply_term(&f.int_at(x, &steps))),
            };
            mid.insert(z, value).ok()?;
        }
    }
    decide(smt, Formula::and([a_cond, mid.apply(&acc.cond).negate()]))
}
