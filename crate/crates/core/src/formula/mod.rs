//! Quantifier-free formulas over linear integer arithmetic with Booleans.
//!
//! Everything in this module is immutable once built. Terms are kept in a
//! polynomial normal form (constants folded, sums flattened and sorted), so
//! two terms denoting the same polynomial compare equal. Formulas are always
//! in negation normal form: negation only ever appears folded into literals.

mod literal;
mod nnf;
mod raw;
mod sip;
mod subst;
mod term;

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

pub use literal::{smt_symbol, CanonLit, CmpOp, Literal};
pub use nnf::Formula;
pub use raw::{to_nnf, RawFormula, RawTerm};
pub use sip::{sip_of_model, sip_of_renamed};
pub use subst::{apply_subst, Subst, SubstValue};
pub use term::{Monomial, Poly, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("unsupported operator `{0}`")]
    UnsupportedOperator(String),
    #[error("non-linear term `{0}`")]
    NonLinear(String),
    #[error("variable `{0}` is not bound by the model")]
    UnboundVariable(String),
    #[error("model does not satisfy the formula")]
    ModelDoesNotSatisfy,
    #[error("sort mismatch for `{0}`")]
    SortMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
        }
    }
}

static NEXT_VAR_ID: AtomicU64 = AtomicU64::new(0);

struct VarData {
    id: u64,
    name: String,
    sort: Sort,
}

/// A sorted variable. Identity is the numeric id; the name is for display.
#[derive(Clone)]
pub struct Var(Arc<VarData>);

impl Var {
    /// Creates a variable with a globally unique id.
    pub fn fresh(name: impl Into<String>, sort: Sort) -> Var {
        let id = NEXT_VAR_ID.fetch_add(1, Ordering::Relaxed);
        Var(Arc::new(VarData { id, name: name.into(), sort }))
    }

    pub fn int(name: impl Into<String>) -> Var {
        Var::fresh(name, Sort::Int)
    }

    pub fn boolean(name: impl Into<String>) -> Var {
        Var::fresh(name, Sort::Bool)
    }

    /// A fresh variable with the same name and sort.
    pub fn rename(&self) -> Var {
        Var::fresh(self.0.name.clone(), self.0.sort)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.id.cmp(&other.0.id)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.0.name, self.0.id)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }

    pub fn default_for(sort: Sort) -> Value {
        match sort {
            Sort::Int => Value::Int(BigInt::from(0)),
            Sort::Bool => Value::Bool(false),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// An assignment of values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    values: BTreeMap<Var, Value>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    /// Binds `var`. Panics if the value's sort does not match the variable's.
    pub fn set(&mut self, var: Var, value: Value) {
        assert_eq!(var.sort(), value.sort(), "sort mismatch binding {var:?}");
        self.values.insert(var, value);
    }

    pub fn set_int(&mut self, var: &Var, value: impl Into<BigInt>) {
        self.set(var.clone(), Value::Int(value.into()));
    }

    pub fn set_bool(&mut self, var: &Var, value: bool) {
        self.set(var.clone(), Value::Bool(value));
    }

    pub fn get(&self, var: &Var) -> Option<&Value> {
        self.values.get(var)
    }

    pub fn int(&self, var: &Var) -> Option<&BigInt> {
        self.values.get(var).and_then(Value::as_int)
    }

    pub fn bool(&self, var: &Var) -> Option<bool> {
        self.values.get(var).and_then(Value::as_bool)
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.values.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Value)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn remove(&mut self, var: &Var) -> Option<Value> {
        self.values.remove(var)
    }

    /// Binds every variable of `vars` that is still unbound to 0 / false.
    pub fn complete<'a>(&mut self, vars: impl IntoIterator<Item = &'a Var>) {
        for v in vars {
            if !self.values.contains_key(v) {
                self.values.insert(v.clone(), Value::default_for(v.sort()));
            }
        }
    }
}

impl FromIterator<(Var, Value)> for Model {
    fn from_iter<T: IntoIterator<Item = (Var, Value)>>(iter: T) -> Self {
        let mut m = Model::new();
        for (k, v) in iter {
            m.set(k, v);
        }
        m
    }
}

/// Truth value of `psi` under `sigma`.
pub fn eval(psi: &Formula, sigma: &Model) -> Result<bool, FormulaError> {
    psi.eval(sigma)
}
