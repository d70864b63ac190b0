use std::collections::BTreeSet;
use std::fmt;

use super::literal::{smt_symbol, Literal};
use super::{FormulaError, Model, Var};

/// Formula in negation normal form. `And`/`Or` never hold an empty list; the
/// constants are `Lit(BoolConst(_))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Lit(Literal::BoolConst(true))
    }

    pub fn bottom() -> Formula {
        Formula::Lit(Literal::BoolConst(false))
    }

    /// Wraps a literal, folding ground comparisons to constants.
    pub fn lit(l: Literal) -> Formula {
        match l.ground_value() {
            Some(b) => Formula::Lit(Literal::BoolConst(b)),
            None => Formula::Lit(l),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::Lit(Literal::BoolConst(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::Lit(Literal::BoolConst(false)))
    }

    /// Conjunction with flattening and constant folding.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => out.extend(inner),
                f if f.is_true() => {}
                f if f.is_false() => return Formula::bottom(),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::top(),
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with flattening and constant folding.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Or(inner) => out.extend(inner),
                f if f.is_false() => {}
                f if f.is_true() => return Formula::top(),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::bottom(),
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::Lit(l) => Formula::lit(l.negate()),
            Formula::And(fs) => Formula::or(fs.iter().map(Formula::negate)),
            Formula::Or(fs) => Formula::and(fs.iter().map(Formula::negate)),
        }
    }

    /// Literal occurrences, left to right.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            Formula::Lit(l) => out.push(l),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_literals(out)),
        }
    }

    /// The literals of a conjunction, or `None` if a disjunction occurs.
    pub fn conjuncts(&self) -> Option<Vec<Literal>> {
        match self {
            Formula::Lit(Literal::BoolConst(true)) => Some(Vec::new()),
            Formula::Lit(l) => Some(vec![l.clone()]),
            Formula::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    out.extend(f.conjuncts()?);
                }
                Some(out)
            }
            Formula::Or(_) => None,
        }
    }

    pub fn is_conjunctive(&self) -> bool {
        self.conjuncts().is_some()
    }

    pub fn is_linear(&self) -> bool {
        self.literals().iter().all(|l| l.is_linear())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in self.literals() {
            l.collect_vars(&mut out);
        }
        out
    }

    pub fn eval(&self, sigma: &Model) -> Result<bool, FormulaError> {
        match self {
            Formula::Lit(l) => l.eval(sigma),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(sigma)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(sigma)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Rebuilds the formula with every literal replaced by `f(literal)`.
    pub fn map_literals(&self, f: &mut dyn FnMut(&Literal) -> Formula) -> Formula {
        match self {
            Formula::Lit(l) => f(l),
            Formula::And(fs) => {
                let parts: Vec<Formula> = fs.iter().map(|g| g.map_literals(f)).collect();
                Formula::and(parts)
            }
            Formula::Or(fs) => {
                let parts: Vec<Formula> = fs.iter().map(|g| g.map_literals(f)).collect();
                Formula::or(parts)
            }
        }
    }

    pub fn to_smt(&self, name: &dyn Fn(&Var) -> String) -> String {
        match self {
            Formula::Lit(l) => l.to_smt(name),
            Formula::And(fs) => {
                let parts: Vec<String> = fs.iter().map(|f| f.to_smt(name)).collect();
                format!("(and {})", parts.join(" "))
            }
            Formula::Or(fs) => {
                let parts: Vec<String> = fs.iter().map(|f| f.to_smt(name)).collect();
                format!("(or {})", parts.join(" "))
            }
        }
    }
}

impl From<Literal> for Formula {
    fn from(l: Literal) -> Formula {
        Formula::lit(l)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_smt(&|v| smt_symbol(v.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{CmpOp, Term};

    #[test]
    fn constructors_flatten_and_fold() {
        let x = Var::int("x");
        let a = Formula::lit(Literal::cmp(CmpOp::Gt, Term::var(&x), Term::constant(0)));
        let b = Formula::lit(Literal::cmp(CmpOp::Lt, Term::var(&x), Term::constant(9)));
        let f = Formula::and([Formula::and([a.clone(), Formula::top()]), b.clone()]);
        assert_eq!(f, Formula::And(vec![a.clone(), b.clone()]));
        assert!(Formula::and([a.clone(), Formula::bottom()]).is_false());
        assert!(Formula::or([a, Formula::top()]).is_true());
        assert!(Formula::and([]).is_true());
        assert!(Formula::lit(Literal::cmp(CmpOp::Lt, Term::constant(1), Term::constant(0))).is_false());
    }
}
