//! Refutation witnesses: the clause sequence of a refutation with the sip
//! of every step, definitions of the learned clauses it uses, a model, and
//! optionally the fully expanded ground derivation over original clauses.
//!
//! The text format is line oriented:
//!
//! ```text
//! adcl-witness v1
//! learned 3 counter N vars ((X1 Int) (N Int) ...) body (Inv X1 X2) head (Inv Y1 Y2) cond (and ...) from ((1 (and ...)))
//! clause 0 sip (and (= Y1 0) (= Y2 5000))
//! clause 3 sip (and ...)
//! model { Y1@0=0 Y2@0=5000 X1@1=0 ... }
//! expanded 2
//! step 0 { Y1=0 Y2=5000 }
//! step 2 { X1=0 X2=5000 }
//! ```
//!
//! `name@k` is the variable `name` of the clause used in step `k`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::accel::{unrolling_matches, Accelerator};
use crate::chc::{rename_clause, resolve_with, Clause, ClauseId, Origin, PredApp, Problem};
use crate::formula::{smt_symbol, CmpOp, Formula, Literal, Model, Sort, Subst, Term, Value, Var};
use crate::smt::{CheckResult, SolverStack};
use crate::smtlib::{parse_formula_named, read_all, unique_names, SExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("malformed witness, line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("witness cannot be expanded: {0}")]
    NotExpandable(String),
}

fn malformed(line: usize, message: impl Into<String>) -> WitnessError {
    WitnessError::Malformed { line, message: message.into() }
}

/// A clause of the store restricted to one of its syntactic implicants,
/// given as literals over the clause's own variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SipStep {
    pub clause: ClauseId,
    pub sip: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnedDef {
    pub id: ClauseId,
    pub clause: Clause,
    pub counter: Var,
    /// The trace suffix the clause was accelerated from.
    pub source: Vec<SipStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundStep {
    pub clause: ClauseId,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub learned: Vec<LearnedDef>,
    pub steps: Vec<SipStep>,
    /// One model per step, over the variables of that step's clause.
    pub models: Vec<Model>,
    pub expanded: Option<Vec<GroundStep>>,
}

fn find_clause<'a>(p: &'a Problem, learned: &'a [LearnedDef], id: ClauseId) -> Option<&'a Clause> {
    p.clause(id).or_else(|| learned.iter().find(|d| d.id == id).map(|d| &d.clause))
}

fn names_of(c: &Clause) -> BTreeMap<Var, String> {
    unique_names(&c.all_vars())
}

fn sip_formula(sip: &[Literal]) -> Formula {
    Formula::and(sip.iter().cloned().map(Formula::Lit))
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Int(k) => k.to_string(),
        Value::Bool(b) => b.to_string(),
    }
}

fn write_model(out: &mut String, entries: impl Iterator<Item = String>) {
    out.push('{');
    for e in entries {
        out.push(' ');
        out.push_str(&e);
    }
    out.push_str(" }\n");
}

impl Witness {
    pub fn clause<'a>(&'a self, p: &'a Problem, id: ClauseId) -> Option<&'a Clause> {
        find_clause(p, &self.learned, id)
    }

    pub fn learned_def(&self, id: ClauseId) -> Option<&LearnedDef> {
        self.learned.iter().find(|d| d.id == id)
    }

    /// Number of resolution steps of the expanded derivation, if present.
    pub fn expanded_resolution_steps(&self) -> Option<usize> {
        self.expanded.as_ref().map(|e| e.len().saturating_sub(1))
    }

    pub fn write(&self, p: &Problem) -> String {
        let mut out = String::from("adcl-witness v1\n");
        for d in &self.learned {
            let names = names_of(&d.clause);
            let name = |v: &Var| smt_symbol(&names[v]);
            let vars: Vec<String> = d.clause.all_vars().iter().map(|v| format!("({} {})", name(v), v.sort())).collect();
            let app = |a: &Option<PredApp>| a.as_ref().map(|a| a.to_smt(&name)).unwrap_or_else(|| "none".into());
            let sources: Vec<String> = d
                .source
                .iter()
                .map(|s| {
                    let c = find_clause(p, &self.learned, s.clause).expect("source clause is known");
                    let names = names_of(c);
                    format!("({} {})", s.clause, sip_formula(&s.sip).to_smt(&|v| smt_symbol(&names[v])))
                })
                .collect();
            writeln!(
                out,
                "learned {} counter {} vars ({}) body {} head {} cond {} from ({})",
                d.id,
                name(&d.counter),
                vars.join(" "),
                app(&d.clause.body),
                app(&d.clause.head),
                d.clause.cond.to_smt(&name),
                sources.join(" ")
            )
            .unwrap();
        }
        let mut model_entries = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            let c = self.clause(p, s.clause).expect("step clause is known");
            let names = names_of(c);
            writeln!(out, "clause {} sip {}", s.clause, sip_formula(&s.sip).to_smt(&|v| smt_symbol(&names[v]))).unwrap();
            for v in c.all_vars() {
                if let Some(val) = self.models.get(k).and_then(|m| m.get(&v)) {
                    model_entries.push(format!("{}@{k}={}", smt_symbol(&names[&v]), value_text(val)));
                }
            }
        }
        out.push_str("model ");
        write_model(&mut out, model_entries.into_iter());
        if let Some(exp) = &self.expanded {
            writeln!(out, "expanded {}", exp.len()).unwrap();
            for g in exp {
                let c = p.clause(g.clause).expect("expanded steps use original clauses");
                let names = names_of(c);
                write!(out, "step {} ", g.clause).unwrap();
                let entries = c
                    .all_vars()
                    .into_iter()
                    .filter_map(|v| g.model.get(&v).map(|val| format!("{}={}", smt_symbol(&names[&v]), value_text(val))))
                    .collect::<Vec<_>>();
                write_model(&mut out, entries.into_iter());
            }
        }
        out
    }

    pub fn parse(text: &str, p: &Problem) -> Result<Witness, WitnessError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "adcl-witness v1")) => {}
            Some((n, _)) => return Err(malformed(n, "expected header `adcl-witness v1`")),
            None => return Err(malformed(1, "empty witness")),
        }
        let mut w = Witness { learned: Vec::new(), steps: Vec::new(), models: Vec::new(), expanded: None };
        let mut model_line = None;
        let mut expanded: Option<(usize, usize)> = None;
        let mut ground = Vec::new();
        for (n, line) in lines {
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            match kw {
                "learned" => {
                    let d = parse_learned(rest, n, p, &w.learned)?;
                    w.learned.push(d);
                }
                "clause" => {
                    let (id, sip) = rest.split_once(" sip ").ok_or_else(|| malformed(n, "expected `clause <id> sip <formula>`"))?;
                    let id: ClauseId = id.trim().parse().map_err(|_| malformed(n, "bad clause id"))?;
                    let c = find_clause(p, &w.learned, id).ok_or_else(|| malformed(n, format!("unknown clause {id}")))?;
                    let sip = parse_sip(sip, c, n)?;
                    w.steps.push(SipStep { clause: id, sip });
                }
                "model" => model_line = Some((n, rest.to_string())),
                "expanded" => {
                    let count = rest.trim().parse().map_err(|_| malformed(n, "bad step count"))?;
                    expanded = Some((n, count));
                }
                "step" => {
                    let (id, body) = rest.split_once(' ').ok_or_else(|| malformed(n, "expected `step <id> { ... }`"))?;
                    let id: ClauseId = id.parse().map_err(|_| malformed(n, "bad clause id"))?;
                    let c = p.clause(id).ok_or_else(|| malformed(n, format!("unknown original clause {id}")))?;
                    let names: BTreeMap<String, Var> = names_of(c).into_iter().map(|(v, s)| (s, v)).collect();
                    let mut model = Model::new();
                    for (name, value) in parse_assignments(body, n)? {
                        let v = names.get(&name).ok_or_else(|| malformed(n, format!("unknown variable `{name}`")))?;
                        model.set(v.clone(), parse_value(&value, v.sort(), n)?);
                    }
                    ground.push(GroundStep { clause: id, model });
                }
                _ => return Err(malformed(n, format!("unknown record `{kw}`"))),
            }
        }
        let (mn, body) = model_line.ok_or_else(|| malformed(0, "missing model"))?;
        w.models = vec![Model::new(); w.steps.len()];
        let step_names: Vec<BTreeMap<String, Var>> = w
            .steps
            .iter()
            .map(|s| names_of(w.clause(p, s.clause).expect("checked above")).into_iter().map(|(v, s)| (s, v)).collect())
            .collect();
        for (name, value) in parse_assignments(&body, mn)? {
            let (var, k) = name.rsplit_once('@').ok_or_else(|| malformed(mn, format!("expected `name@step`, got `{name}`")))?;
            let k: usize = k.parse().map_err(|_| malformed(mn, "bad step index"))?;
            let v = step_names
                .get(k)
                .and_then(|names| names.get(&unquote(var)))
                .ok_or_else(|| malformed(mn, format!("unknown variable `{name}`")))?;
            w.models[k].set(v.clone(), parse_value(&value, v.sort(), mn)?);
        }
        if let Some((n, count)) = expanded {
            if ground.len() != count {
                return Err(malformed(n, format!("expected {count} expanded steps, found {}", ground.len())));
            }
            w.expanded = Some(ground);
        } else if !ground.is_empty() {
            return Err(malformed(0, "`step` records without `expanded` header"));
        }
        Ok(w)
    }
}

fn unquote(s: &str) -> String {
    s.strip_prefix('|').and_then(|s| s.strip_suffix('|')).unwrap_or(s).to_string()
}

/// Splits `{ a=1 b=-2 |c d|=true }` into name/value pairs.
fn parse_assignments(body: &str, line: usize) -> Result<Vec<(String, String)>, WitnessError> {
    let inner = body
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| malformed(line, "expected `{ ... }`"))?;
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in inner.chars() {
        match ch {
            '|' => {
                quoted = !quoted;
                cur.push(ch);
            }
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
        .into_iter()
        .map(|t| {
            let (name, value) = t.rsplit_once('=').ok_or_else(|| malformed(line, format!("expected `name=value`, got `{t}`")))?;
            Ok((unquote_keep_at(name), value.to_string()))
        })
        .collect()
}

/// Removes quotes around the name part of `name` or `|name|@k`.
fn unquote_keep_at(s: &str) -> String {
    match s.rsplit_once('@') {
        Some((n, k)) if n.starts_with('|') => format!("{}@{k}", unquote(n)),
        _ => unquote(s),
    }
}

fn parse_value(text: &str, sort: Sort, line: usize) -> Result<Value, WitnessError> {
    match sort {
        Sort::Int => text.parse::<BigInt>().map(Value::Int).map_err(|_| malformed(line, format!("bad integer `{text}`"))),
        Sort::Bool => match text {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(malformed(line, format!("bad Boolean `{text}`"))),
        },
    }
}

fn parse_sip(text: &str, c: &Clause, line: usize) -> Result<Vec<Literal>, WitnessError> {
    let names: BTreeMap<String, Var> = names_of(c).into_iter().map(|(v, s)| (s, v)).collect();
    let f = parse_formula_named(text.trim(), &names).map_err(|e| malformed(line, e.to_string()))?;
    f.conjuncts().ok_or_else(|| malformed(line, "sip is not a conjunction"))
}

fn parse_learned(rest: &str, line: usize, p: &Problem, earlier: &[LearnedDef]) -> Result<LearnedDef, WitnessError> {
    let items = read_all(rest).map_err(|e| malformed(line, e.message))?;
    let (id, fields) = items.split_first().ok_or_else(|| malformed(line, "empty learned record"))?;
    let id: ClauseId = id.symbol().and_then(|s| s.parse().ok()).ok_or_else(|| malformed(line, "bad learned id"))?;
    if p.clause(id).is_some() || earlier.iter().any(|d| d.id == id) {
        return Err(malformed(line, format!("clause id {id} defined twice")));
    }
    let mut field: BTreeMap<&str, &SExpr> = BTreeMap::new();
    for pair in fields.chunks(2) {
        let [k, v] = pair else { return Err(malformed(line, "odd number of fields")) };
        let k = k.symbol().ok_or_else(|| malformed(line, "field names are symbols"))?;
        field.insert(k, v);
    }
    let get = |k: &str| field.get(k).copied().ok_or_else(|| malformed(line, format!("missing field `{k}`")));
    let slice = |e: &SExpr| &rest[e.span().start..e.span().end];
    let mut names: BTreeMap<String, Var> = BTreeMap::new();
    for decl in get("vars")?.list().ok_or_else(|| malformed(line, "`vars` is a list"))? {
        let [n, s] = decl.list().unwrap_or(&[]) else { return Err(malformed(line, "bad variable declaration")) };
        let sort = match s.symbol() {
            Some("Int") => Sort::Int,
            Some("Bool") => Sort::Bool,
            _ => return Err(malformed(line, "unknown sort")),
        };
        let n = n.symbol().ok_or_else(|| malformed(line, "bad variable name"))?;
        names.insert(n.to_string(), Var::fresh(n, sort));
    }
    let lookup = |e: &SExpr| -> Result<Var, WitnessError> {
        e.symbol()
            .and_then(|s| names.get(s))
            .cloned()
            .ok_or_else(|| malformed(line, format!("undeclared variable `{}`", slice(e))))
    };
    let app = |e: &SExpr| -> Result<Option<PredApp>, WitnessError> {
        if e.is_atom("none") {
            return Ok(None);
        }
        let items = e.list().ok_or_else(|| malformed(line, "bad predicate application"))?;
        let (pred, args) = items.split_first().ok_or_else(|| malformed(line, "empty application"))?;
        let pred = pred.symbol().and_then(|s| p.predicate(s)).ok_or_else(|| malformed(line, "unknown predicate"))?;
        let args = args.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
        PredApp::new(pred.clone(), args).map(Some).map_err(|e| malformed(line, e.to_string()))
    };
    let counter = lookup(get("counter")?)?;
    let body = app(get("body")?)?;
    let head = app(get("head")?)?;
    let cond = parse_formula_named(slice(get("cond")?), &names).map_err(|e| malformed(line, e.to_string()))?;
    let mut source = Vec::new();
    for s in get("from")?.list().ok_or_else(|| malformed(line, "`from` is a list"))? {
        let [sid, sip] = s.list().unwrap_or(&[]) else { return Err(malformed(line, "bad source entry")) };
        let sid: ClauseId = sid.symbol().and_then(|t| t.parse().ok()).ok_or_else(|| malformed(line, "bad source id"))?;
        let c = find_clause(p, earlier, sid).ok_or_else(|| malformed(line, format!("unknown source clause {sid}")))?;
        source.push(SipStep { clause: sid, sip: parse_sip(slice(sip), c, line)? });
    }
    let ids = source.iter().map(|s| s.clause).collect();
    let clause = Clause::new(id, body, cond, head, Origin::Learned { source: ids }).map_err(|e| malformed(line, e.to_string()))?;
    Ok(LearnedDef { id, clause, counter, source })
}

/// Is every literal of `sip` an occurrence in `c`'s condition?
fn is_sip_of(sip: &[Literal], c: &Clause) -> bool {
    let occ: BTreeSet<&Literal> = c.cond.literals().into_iter().collect();
    sip.iter().all(|l| occ.contains(l))
}

fn sip_clause(c: &Clause, sip: &[Literal]) -> Clause {
    let mut v = c.with_cond(c.id, sip_formula(sip));
    v.origin = c.origin.clone();
    v
}

fn solver_like(smt: &SolverStack) -> SolverStack {
    match smt.external_config() {
        Some(cfg) => SolverStack::with_external(cfg.clone()),
        None => SolverStack::new(),
    }
}

/// Resolvent of a sequence with, for each member, the map from its own
/// variables to the variables of the resolvent.
fn chain(seq: &[Clause]) -> Option<(Clause, Vec<BTreeMap<Var, Var>>)> {
    let (first, rest) = seq.split_first()?;
    let (mut acc, m0) = rename_clause(first);
    let mut maps = vec![m0];
    for c in rest {
        let r = resolve_with(&acc, c)?;
        maps.push(r.renaming);
        acc = r.clause;
    }
    Some((acc, maps))
}

/// Largest counter value for which the unrolling is checked in full;
/// larger values are spot checked at 1 and 2.
pub const FULL_UNROLLING_LIMIT: u64 = 64;

/// Checks a witness against the problem:
/// (a) the steps chain into a conditional empty clause,
/// (b) every step's condition holds under its model and consecutive
///     steps agree on the shared arguments,
/// (c) every learned clause is the acceleration of its source and matches
///     the unrolling of the source at the counter values used,
/// (d) an expanded derivation, if present, is a ground derivation over
///     original clauses.
///
/// `smt` decides the queries; it needs an external solver when learned
/// clauses are non-linear.
pub fn check_witness(p: &Problem, w: &Witness, smt: &mut SolverStack) -> Result<(), String> {
    let (first, last) = match (w.steps.first(), w.steps.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err("no steps".into()),
    };
    let clause = |id: ClauseId| w.clause(p, id).ok_or_else(|| format!("unknown clause {id}"));
    if clause(first.clause)?.body.is_some() {
        return Err("first step is not a fact or conditional empty clause".into());
    }
    if clause(last.clause)?.head.is_some() {
        return Err("last step is not a query or conditional empty clause".into());
    }
    if w.models.len() != w.steps.len() {
        return Err("one model per step expected".into());
    }
    for (k, s) in w.steps.iter().enumerate() {
        let c = clause(s.clause)?;
        if !is_sip_of(&s.sip, c) {
            return Err(format!("step {k}: sip is not a set of literals of clause {}", s.clause));
        }
        let m = &w.models[k];
        if let Some(v) = c.all_vars().into_iter().find(|v| !m.contains(v)) {
            return Err(format!("step {k}: no value for `{v}`"));
        }
        if c.cond.eval(m) != Ok(true) || sip_formula(&s.sip).eval(m) != Ok(true) {
            return Err(format!("step {k}: condition of clause {} is false under the model", s.clause));
        }
        if k + 1 < w.steps.len() {
            let next = clause(w.steps[k + 1].clause)?;
            match (&c.head, &next.body) {
                (Some(h), Some(b)) if h.pred == b.pred => {
                    for (x, y) in h.args.iter().zip(&b.args) {
                        if m.get(x) != w.models[k + 1].get(y) {
                            return Err(format!("steps {k} and {}: argument values differ", k + 1));
                        }
                    }
                }
                _ => return Err(format!("steps {k} and {} do not resolve", k + 1)),
            }
        }
    }
    for d in &w.learned {
        check_learned(p, w, d, smt)?;
    }
    if let Some(exp) = &w.expanded {
        check_ground(p, exp)?;
    }
    Ok(())
}

fn check_learned(p: &Problem, w: &Witness, d: &LearnedDef, smt: &mut SolverStack) -> Result<(), String> {
    let earlier: Vec<LearnedDef> = w.learned.iter().take_while(|e| e.id != d.id).cloned().collect();
    let mut sources = Vec::new();
    for s in &d.source {
        let c = find_clause(p, &earlier, s.clause).ok_or_else(|| format!("learned {}: unknown source {}", d.id, s.clause))?;
        if !is_sip_of(&s.sip, c) {
            return Err(format!("learned {}: source sip is not a set of literals of clause {}", d.id, s.clause));
        }
        sources.push(sip_clause(c, &s.sip));
    }
    let mut acc = Accelerator::new(solver_like(smt));
    let resolvent = crate::chc::resolve_seq(&sources).clause;
    let a = acc
        .close(&resolvent, sources.iter().map(|c| c.id).collect())
        .map_err(|e| format!("learned {}: source does not accelerate: {e}", d.id))?;
    // Same condition up to renaming?
    let mut align = Subst::new();
    let pairs = a
        .clause
        .body_args()
        .iter()
        .zip(d.clause.body_args())
        .chain(a.clause.head_args().iter().zip(d.clause.head_args()))
        .chain([(&a.counter, &d.counter)]);
    for (x, y) in pairs {
        align.insert_var(x, y).map_err(|e| format!("learned {}: {e}", d.id))?;
    }
    if a.clause.body_args().len() != d.clause.body_args().len() || a.clause.head_args().len() != d.clause.head_args().len() {
        return Err(format!("learned {}: arity differs from its source", d.id));
    }
    let recomputed = align.apply(&a.clause.cond);
    for f in [
        Formula::and([recomputed.clone(), d.clause.cond.negate()]),
        Formula::and([d.clause.cond.clone(), recomputed.negate()]),
    ] {
        match smt.check_with(f) {
            CheckResult::Unsat => {}
            CheckResult::SatWith(_) => return Err(format!("learned {}: condition differs from the acceleration of its source", d.id)),
            CheckResult::Unknown(r) => return Err(format!("learned {}: solver unknown ({r})", d.id)),
        }
    }
    let mut counts = BTreeSet::new();
    for (k, s) in w.steps.iter().enumerate() {
        if s.clause == d.id {
            let n = w.models[k].int(&d.counter).cloned().unwrap_or_default();
            if n <= BigInt::from(0) {
                return Err(format!("step {k}: counter of learned {} is not positive", d.id));
            }
            match n.to_u64() {
                Some(n) if n <= FULL_UNROLLING_LIMIT => {
                    counts.insert(n);
                }
                _ => {
                    counts.extend([1, 2]);
                }
            }
        }
    }
    for n in counts {
        match unrolling_matches(&resolvent, &a, n, smt) {
            Some(true) => {}
            Some(false) => return Err(format!("learned {}: differs from the {n}-fold unrolling of its source", d.id)),
            None => return Err(format!("learned {}: solver unknown on the {n}-fold unrolling", d.id)),
        }
    }
    Ok(())
}

fn check_ground(p: &Problem, exp: &[GroundStep]) -> Result<(), String> {
    let first = exp.first().ok_or("empty expansion")?;
    let last = exp.last().ok_or("empty expansion")?;
    let clause = |id: ClauseId| p.clause(id).ok_or_else(|| format!("expanded: unknown original clause {id}"));
    if clause(first.clause)?.body.is_some() || clause(last.clause)?.head.is_some() {
        return Err("expanded: derivation does not start with a fact and end with a query".into());
    }
    for (k, g) in exp.iter().enumerate() {
        let c = clause(g.clause)?;
        let mut m = g.model.clone();
        m.complete(&c.all_vars());
        if c.cond.eval(&m) != Ok(true) {
            return Err(format!("expanded step {k}: condition of clause {} is false", g.clause));
        }
        if let Some(next) = exp.get(k + 1) {
            let nc = clause(next.clause)?;
            match (&c.head, &nc.body) {
                (Some(h), Some(b)) if h.pred == b.pred => {
                    for (x, y) in h.args.iter().zip(&b.args) {
                        if g.model.get(x).is_none() || g.model.get(x) != next.model.get(y) {
                            return Err(format!("expanded steps {k} and {}: argument values differ", k + 1));
                        }
                    }
                }
                _ => return Err(format!("expanded steps {k} and {} do not resolve", k + 1)),
            }
        }
    }
    Ok(())
}

fn pin(vars: &[Var], values: &[Value]) -> Formula {
    Formula::and(vars.iter().zip(values).map(|(v, val)| match val {
        Value::Int(k) => Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(v), Term::constant(k.clone()))),
        Value::Bool(b) => Formula::lit(Literal::BoolLit { var: v.clone(), polarity: *b }),
    }))
}

fn values(m: &Model, vars: &[Var]) -> Option<Vec<Value>> {
    vars.iter().map(|v| m.get(v).cloned()).collect()
}

/// Replaces every learned step by the ground steps it stands for and
/// returns the derivation over original clauses. Each unrolled step is
/// found by the solver from the current state; the last state must meet
/// the recorded head. Fails beyond `max_steps` ground steps.
pub fn expand(p: &Problem, w: &Witness, max_steps: usize) -> Result<Vec<GroundStep>, WitnessError> {
    let mut out = Vec::new();
    let mut smt = SolverStack::new();
    for (k, s) in w.steps.iter().enumerate() {
        let m = &w.models[k];
        match w.learned_def(s.clause) {
            Some(d) => expand_learned(p, w, d, m, &mut smt, &mut out, max_steps)?,
            None => {
                if p.clause(s.clause).is_none() {
                    return Err(WitnessError::NotExpandable(format!("unknown clause {}", s.clause)));
                }
                out.push(GroundStep { clause: s.clause, model: m.clone() });
            }
        }
        if out.len() > max_steps {
            return Err(WitnessError::NotExpandable(format!("more than {max_steps} ground steps")));
        }
    }
    Ok(out)
}

fn expand_learned(
    p: &Problem,
    w: &Witness,
    d: &LearnedDef,
    m: &Model,
    smt: &mut SolverStack,
    out: &mut Vec<GroundStep>,
    max_steps: usize,
) -> Result<(), WitnessError> {
    let fail = |msg: String| WitnessError::NotExpandable(format!("learned {}: {msg}", d.id));
    let n = m.int(&d.counter).and_then(|n| n.to_u64()).filter(|n| *n > 0).ok_or_else(|| fail("no positive counter value".into()))?;
    let sources: Vec<Clause> = d
        .source
        .iter()
        .map(|s| w.clause(p, s.clause).map(|c| sip_clause(c, &s.sip)).ok_or_else(|| fail(format!("unknown source {}", s.clause))))
        .collect::<Result<_, _>>()?;
    let (r, maps) = chain(&sources).ok_or_else(|| fail("source does not resolve".into()))?;
    let mut state = values(m, d.clause.body_args()).ok_or_else(|| fail("body arguments have no values".into()))?;
    let target = values(m, d.clause.head_args()).ok_or_else(|| fail("head arguments have no values".into()))?;
    smt.forget_model();
    for k in 0..n {
        let mut query = vec![r.cond.clone(), pin(r.body_args(), &state)];
        if k + 1 == n {
            // Fixes the head where the source is not deterministic.
            query.push(pin(r.head_args(), &target));
        }
        let sigma = match smt.check_with(Formula::and(query)) {
            CheckResult::SatWith(sigma) => sigma,
            _ => return Err(fail("no unrolling step from the reached state".into())),
        };
        for (src, map) in sources.iter().zip(&maps) {
            let mut local = Model::new();
            for v in src.all_vars() {
                if let Some(val) = sigma.get(&map[&v]) {
                    local.set(v, val.clone());
                }
            }
            local.complete(&src.all_vars());
            match w.learned_def(src.id) {
                Some(inner) => expand_learned(p, w, inner, &local, smt, out, max_steps)?,
                None => out.push(GroundStep { clause: src.id, model: local }),
            }
        }
        if out.len() > max_steps {
            return Err(WitnessError::NotExpandable(format!("more than {max_steps} ground steps")));
        }
        state = values(&sigma, r.head_args()).ok_or_else(|| fail("head arguments have no values".into()))?;
    }
    if state != target {
        return Err(fail(format!("{n} unrolled steps do not reach the recorded head")));
    }
    Ok(())
}
