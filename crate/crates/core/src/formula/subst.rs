use std::collections::BTreeMap;

use super::literal::Literal;
use super::nnf::Formula;
use super::term::Term;
use super::{FormulaError, Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubstValue {
    Int(Term),
    Bool(Formula),
}

/// Simultaneous substitution of terms (Int) and formulas (Bool) for variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, SubstValue>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    /// A renaming `v ↦ w` for each pair; sorts must agree.
    pub fn renaming<'a>(pairs: impl IntoIterator<Item = (&'a Var, &'a Var)>) -> Result<Subst, FormulaError> {
        let mut s = Subst::new();
        for (v, w) in pairs {
            s.insert_var(v, w)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, v: &Var, value: SubstValue) -> Result<(), FormulaError> {
        let ok = matches!(
            (v.sort(), &value),
            (Sort::Int, SubstValue::Int(_)) | (Sort::Bool, SubstValue::Bool(_))
        );
        if !ok {
            return Err(FormulaError::SortMismatch(v.name().to_string()));
        }
        self.map.insert(v.clone(), value);
        Ok(())
    }

    pub fn insert_var(&mut self, v: &Var, w: &Var) -> Result<(), FormulaError> {
        if v.sort() != w.sort() {
            return Err(FormulaError::SortMismatch(v.name().to_string()));
        }
        let value = match w.sort() {
            Sort::Int => SubstValue::Int(Term::var(w)),
            Sort::Bool => SubstValue::Bool(Formula::lit(Literal::BoolLit { var: w.clone(), polarity: true })),
        };
        self.map.insert(v.clone(), value);
        Ok(())
    }

    pub fn insert_term(&mut self, v: &Var, t: Term) -> Result<(), FormulaError> {
        self.insert(v, SubstValue::Int(t))
    }

    pub fn get(&self, v: &Var) -> Option<&SubstValue> {
        self.map.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &SubstValue)> {
        self.map.iter()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.substitute(&|v| match self.map.get(v) {
            Some(SubstValue::Int(r)) => Some(r.clone()),
            _ => None,
        })
    }

    /// Image of a variable as a variable, if the substitution maps it to one
    /// (or leaves it alone).
    pub fn image_var(&self, v: &Var) -> Option<Var> {
        match self.map.get(v) {
            None => Some(v.clone()),
            Some(SubstValue::Int(Term::Var(w))) => Some(w.clone()),
            Some(SubstValue::Bool(Formula::Lit(Literal::BoolLit { var, polarity: true }))) => Some(var.clone()),
            Some(_) => None,
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Formula {
        match l {
            Literal::IntCmp { op, lhs, rhs } => {
                Formula::lit(Literal::cmp(*op, self.apply_term(lhs), self.apply_term(rhs)))
            }
            Literal::BoolLit { var, polarity } => match self.map.get(var) {
                Some(SubstValue::Bool(f)) if *polarity => f.clone(),
                Some(SubstValue::Bool(f)) => f.negate(),
                _ => Formula::lit(l.clone()),
            },
            Literal::BoolConst(_) => Formula::lit(l.clone()),
        }
    }

    pub fn apply(&self, psi: &Formula) -> Formula {
        if self.map.is_empty() {
            return psi.clone();
        }
        psi.map_literals(&mut |l| self.apply_literal(l))
    }
}

/// Simultaneous substitution; sorts were checked when `theta` was built.
pub fn apply_subst(psi: &Formula, theta: &Subst) -> Result<Formula, FormulaError> {
    Ok(theta.apply(psi))
}
