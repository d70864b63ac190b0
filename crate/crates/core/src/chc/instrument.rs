use std::collections::BTreeMap;

use super::{ChcError, Clause, ClauseKind, PredApp, PredicateSymbol, Problem};
use crate::formula::{CmpOp, Formula, Literal, Sort, Term, Var};

/// Names starting with this prefix are reserved for the step counter.
pub const COUNTER_PREFIX: &str = "adcl_c";

/// Adds a trailing step counter to every predicate: facts start it at 1 and
/// rules increment it, so its value at a query is the length of the ground
/// derivation that reached it.
pub fn instrument_counter(p: &Problem) -> Result<Problem, ChcError> {
    for pred in &p.predicates {
        if pred.name().starts_with(COUNTER_PREFIX) {
            return Err(ChcError::ReservedNameClash(pred.name().to_string()));
        }
    }
    for c in &p.clauses {
        if let Some(v) = c.all_vars().iter().find(|v| v.name().starts_with(COUNTER_PREFIX)) {
            return Err(ChcError::ReservedNameClash(v.name().to_string()));
        }
    }
    let preds: BTreeMap<usize, PredicateSymbol> = p
        .predicates
        .iter()
        .map(|q| {
            let mut sorts = q.arg_sorts().to_vec();
            sorts.push(Sort::Int);
            (q.id(), PredicateSymbol::new(q.id(), q.name(), sorts))
        })
        .collect();
    let extend = |app: &PredApp, c: &Var| PredApp {
        pred: preds[&app.pred.id()].clone(),
        args: app.args.iter().cloned().chain([c.clone()]).collect(),
    };
    let mut clauses = Vec::new();
    for c in &p.clauses {
        let cb = Var::int(COUNTER_PREFIX);
        let ch = Var::int(format!("{COUNTER_PREFIX}1"));
        let eq = |lhs: &Var, rhs: Term| Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(lhs), rhs));
        let extra = match c.kind() {
            ClauseKind::Fact => eq(&ch, Term::constant(1)),
            ClauseKind::Rule { .. } => eq(&ch, Term::var(&cb).add(&Term::constant(1))),
            ClauseKind::Query | ClauseKind::ConditionalEmpty => Formula::top(),
        };
        clauses.push(Clause::new(
            c.id,
            c.body.as_ref().map(|b| extend(b, &cb)),
            Formula::and([c.cond.clone(), extra]),
            c.head.as_ref().map(|h| extend(h, &ch)),
            c.origin.clone(),
        )?);
    }
    Ok(Problem::new(preds.into_values().collect(), clauses))
}
