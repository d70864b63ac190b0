//! Linear constrained Horn clauses.
//!
//! A clause is `body ∧ cond ⟹ head` where body and head are optional
//! predicate applications whose arguments are pairwise distinct variables,
//! and no variable is shared between body and head. Anything else the
//! condition mentions is a local variable of the clause.

mod instrument;
mod normalize;
mod resolve;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{smt_symbol, Formula, FormulaError, Sort, Var};

pub use instrument::{instrument_counter, COUNTER_PREFIX};
pub use normalize::{normalize, RawArg, RawAtom, RawClause};
pub use resolve::{rename_clause, resolve, resolve_seq, resolve_with, Resolution, Resolvent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChcError {
    #[error("clause has more than one body atom")]
    NonLinearClause,
    #[error("reserved name `{0}` already used in the problem")]
    ReservedNameClash(String),
    #[error("predicate `{0}` applied to {1} arguments, declared with {2}")]
    ArityMismatch(String, usize, usize),
    #[error("argument {1} of `{0}` has the wrong sort")]
    ArgumentSort(String, usize),
    #[error("malformed clause: {0}")]
    Malformed(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

pub type ClauseId = u64;

/// Id used for intermediate resolvents, which never enter a clause store.
pub const DERIVED_ID: ClauseId = u64::MAX;

#[derive(Debug)]
struct PredData {
    id: usize,
    name: String,
    arg_sorts: Vec<Sort>,
}

#[derive(Clone)]
pub struct PredicateSymbol(Arc<PredData>);

impl PredicateSymbol {
    pub fn new(id: usize, name: impl Into<String>, arg_sorts: Vec<Sort>) -> PredicateSymbol {
        PredicateSymbol(Arc::new(PredData { id, name: name.into(), arg_sorts }))
    }

    pub fn id(&self) -> usize {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arg_sorts(&self) -> &[Sort] {
        &self.0.arg_sorts
    }

    pub fn arity(&self) -> usize {
        self.0.arg_sorts.len()
    }
}

impl PartialEq for PredicateSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for PredicateSymbol {}

impl fmt::Debug for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.name, self.0.arg_sorts.len())
    }
}

impl fmt::Display for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredApp {
    pub pred: PredicateSymbol,
    pub args: Vec<Var>,
}

impl PredApp {
    pub fn new(pred: PredicateSymbol, args: Vec<Var>) -> Result<PredApp, ChcError> {
        if args.len() != pred.arity() {
            return Err(ChcError::ArityMismatch(pred.name().to_string(), args.len(), pred.arity()));
        }
        for (i, (a, s)) in args.iter().zip(pred.arg_sorts()).enumerate() {
            if a.sort() != *s {
                return Err(ChcError::ArgumentSort(pred.name().to_string(), i));
            }
        }
        let distinct: BTreeSet<&Var> = args.iter().collect();
        if distinct.len() != args.len() {
            return Err(ChcError::Malformed(format!("repeated argument in {}", pred.name())));
        }
        Ok(PredApp { pred, args })
    }

    pub fn to_smt(&self, name: &dyn Fn(&Var) -> String) -> String {
        if self.args.is_empty() {
            return smt_symbol(self.pred.name());
        }
        let args: Vec<String> = self.args.iter().map(name).collect();
        format!("({} {})", smt_symbol(self.pred.name()), args.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseKind {
    Fact,
    Rule { recursive: bool },
    Query,
    ConditionalEmpty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Original,
    /// Learned by acceleration of the listed store clauses.
    Learned { source: Vec<ClauseId> },
    /// `parent` with its condition replaced.
    Variant { parent: ClauseId },
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: ClauseId,
    pub body: Option<PredApp>,
    pub cond: Formula,
    pub head: Option<PredApp>,
    pub origin: Origin,
}

impl Clause {
    /// Builds a clause, checking that body and head arguments are disjoint.
    pub fn new(
        id: ClauseId,
        body: Option<PredApp>,
        cond: Formula,
        head: Option<PredApp>,
        origin: Origin,
    ) -> Result<Clause, ChcError> {
        if let (Some(b), Some(h)) = (&body, &head) {
            if b.args.iter().any(|v| h.args.contains(v)) {
                return Err(ChcError::Malformed("body and head share a variable".into()));
            }
        }
        Ok(Clause { id, body, cond, head, origin })
    }

    /// The contradiction `⊥ ⟹ ⊥`.
    pub fn contradiction() -> Clause {
        Clause {
            id: DERIVED_ID,
            body: None,
            cond: Formula::bottom(),
            head: None,
            origin: Origin::Derived,
        }
    }

    pub fn kind(&self) -> ClauseKind {
        match (&self.body, &self.head) {
            (None, Some(_)) => ClauseKind::Fact,
            (Some(b), Some(h)) => ClauseKind::Rule { recursive: b.pred == h.pred },
            (Some(_), None) => ClauseKind::Query,
            (None, None) => ClauseKind::ConditionalEmpty,
        }
    }

    pub fn is_recursive(&self) -> bool {
        matches!(self.kind(), ClauseKind::Rule { recursive: true })
    }

    pub fn is_learned(&self) -> bool {
        matches!(self.origin, Origin::Learned { .. })
    }

    pub fn body_args(&self) -> &[Var] {
        self.body.as_ref().map(|b| b.args.as_slice()).unwrap_or(&[])
    }

    pub fn head_args(&self) -> &[Var] {
        self.head.as_ref().map(|h| h.args.as_slice()).unwrap_or(&[])
    }

    /// Condition variables that are neither body nor head arguments.
    pub fn locals(&self) -> Vec<Var> {
        let args: BTreeSet<&Var> = self.body_args().iter().chain(self.head_args()).collect();
        self.cond.vars().into_iter().filter(|v| !args.contains(v)).collect()
    }

    /// All variables: body args, head args, then locals.
    pub fn all_vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self.body_args().to_vec();
        out.extend(self.head_args().iter().cloned());
        out.extend(self.locals());
        out
    }

    /// Same clause with a new condition and id.
    pub fn with_cond(&self, id: ClauseId, cond: Formula) -> Clause {
        Clause {
            id,
            body: self.body.clone(),
            cond,
            head: self.head.clone(),
            origin: Origin::Variant { parent: self.id },
        }
    }

    pub fn to_smt(&self, name: &dyn Fn(&Var) -> String) -> String {
        let body = self.body.as_ref().map(|b| b.to_smt(name));
        let cond = self.cond.to_smt(name);
        let premise = match body {
            Some(b) if self.cond.is_true() => b,
            Some(b) => format!("(and {b} {cond})"),
            None => cond,
        };
        let head = self.head.as_ref().map(|h| h.to_smt(name)).unwrap_or_else(|| "false".into());
        format!("(=> {premise} {head})")
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_smt(&|v| smt_symbol(v.name())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theory {
    Lia,
    LiaBool,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub predicates: Vec<PredicateSymbol>,
    pub clauses: Vec<Clause>,
    pub theory: Theory,
}

impl Problem {
    pub fn new(predicates: Vec<PredicateSymbol>, clauses: Vec<Clause>) -> Problem {
        let has_bool = predicates.iter().any(|p| p.arg_sorts().contains(&Sort::Bool))
            || clauses
                .iter()
                .any(|c| c.cond.vars().iter().any(|v| v.sort() == Sort::Bool));
        Problem {
            predicates,
            clauses,
            theory: if has_bool { Theory::LiaBool } else { Theory::Lia },
        }
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSymbol> {
        self.predicates.iter().find(|p| p.name() == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{CmpOp, Literal, Term};

    #[test]
    fn classify_covers_the_four_shapes() {
        let p = PredicateSymbol::new(0, "p", vec![Sort::Int]);
        let q = PredicateSymbol::new(1, "q", vec![Sort::Int]);
        let x = Var::int("x");
        let y = Var::int("y");
        let app = |p: &PredicateSymbol, v: &Var| Some(PredApp::new(p.clone(), vec![v.clone()]).unwrap());
        let t = Formula::top();
        let mk = |b, h| Clause::new(0, b, t.clone(), h, Origin::Original).unwrap();
        assert_eq!(mk(None, app(&p, &y)).kind(), ClauseKind::Fact);
        assert_eq!(mk(app(&p, &x), app(&p, &y)).kind(), ClauseKind::Rule { recursive: true });
        assert_eq!(mk(app(&p, &x), app(&q, &y)).kind(), ClauseKind::Rule { recursive: false });
        assert_eq!(mk(app(&p, &x), None).kind(), ClauseKind::Query);
        assert_eq!(mk(None, None).kind(), ClauseKind::ConditionalEmpty);
    }

    #[test]
    fn shared_body_head_variable_is_rejected() {
        let p = PredicateSymbol::new(0, "p", vec![Sort::Int]);
        let x = Var::int("x");
        let app = PredApp::new(p, vec![x.clone()]).unwrap();
        let c = Clause::new(0, Some(app.clone()), Formula::top(), Some(app), Origin::Original);
        assert!(c.is_err());
    }

    #[test]
    fn locals_exclude_arguments() {
        let p = PredicateSymbol::new(0, "p", vec![Sort::Int]);
        let x = Var::int("x");
        let z = Var::int("z");
        let cond = Formula::lit(Literal::cmp(CmpOp::Lt, Term::var(&x), Term::var(&z)));
        let c = Clause::new(0, Some(PredApp::new(p, vec![x]).unwrap()), cond, None, Origin::Original).unwrap();
        assert_eq!(c.locals(), vec![z]);
    }
}
