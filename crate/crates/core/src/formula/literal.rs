use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::term::{Poly, Term};
use super::{FormulaError, Model, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    /// The operator with swapped operands: `a op b` iff `b op.flip() a`.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }

    pub fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn smt_name(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "distinct",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    IntCmp { op: CmpOp, lhs: Term, rhs: Term },
    BoolLit { var: Var, polarity: bool },
    BoolConst(bool),
}

/// Canonical key of a literal. Integer comparisons are brought to the shape
/// `p ≤ 0`, `p = 0` or `p ≠ 0` (strict inequalities tightened over the
/// integers); for `=` and `≠` the sign is fixed so the leading coefficient is
/// positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonLit {
    Le(Poly),
    Eq(Poly),
    Ne(Poly),
    Bool(Var, bool),
    Const(bool),
}

impl Literal {
    pub fn cmp(op: CmpOp, lhs: Term, rhs: Term) -> Literal {
        Literal::IntCmp { op, lhs, rhs }
    }

    pub fn negate(&self) -> Literal {
        match self {
            Literal::IntCmp { op, lhs, rhs } => Literal::IntCmp {
                op: op.negate(),
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            },
            Literal::BoolLit { var, polarity } => Literal::BoolLit {
                var: var.clone(),
                polarity: !polarity,
            },
            Literal::BoolConst(b) => Literal::BoolConst(!b),
        }
    }

    pub fn canonical_key(&self) -> CanonLit {
        match self {
            Literal::IntCmp { op, lhs, rhs } => {
                let d = lhs.to_poly().sub(&rhs.to_poly());
                let one = Poly::constant(1);
                let neg = |p: &Poly| p.scale(&BigInt::from(-1));
                let sign_fix = |p: Poly| match p.leading_coeff() {
                    Some(c) if c.is_negative() => neg(&p),
                    _ => p,
                };
                match op {
                    CmpOp::Le => CanonLit::Le(d),
                    CmpOp::Lt => CanonLit::Le(d.add(&one)),
                    CmpOp::Ge => CanonLit::Le(neg(&d)),
                    CmpOp::Gt => CanonLit::Le(neg(&d).add(&one)),
                    CmpOp::Eq => CanonLit::Eq(sign_fix(d)),
                    CmpOp::Ne => CanonLit::Ne(sign_fix(d)),
                }
            }
            Literal::BoolLit { var, polarity } => CanonLit::Bool(var.clone(), *polarity),
            Literal::BoolConst(b) => CanonLit::Const(*b),
        }
    }

    /// Truth value when the literal contains no variables.
    pub fn ground_value(&self) -> Option<bool> {
        match self {
            Literal::IntCmp { op, lhs, rhs } => {
                let d = lhs.to_poly().sub(&rhs.to_poly());
                d.as_constant().map(|c| op.holds(&c, &BigInt::zero()))
            }
            Literal::BoolLit { .. } => None,
            Literal::BoolConst(b) => Some(*b),
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            Literal::IntCmp { lhs, rhs, .. } => lhs.is_linear() && rhs.is_linear(),
            _ => true,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Literal::IntCmp { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Literal::BoolLit { var, .. } => {
                out.insert(var.clone());
            }
            Literal::BoolConst(_) => {}
        }
    }

    pub fn eval(&self, sigma: &Model) -> Result<bool, FormulaError> {
        match self {
            Literal::IntCmp { op, lhs, rhs } => Ok(op.holds(&lhs.eval(sigma)?, &rhs.eval(sigma)?)),
            Literal::BoolLit { var, polarity } => sigma
                .bool(var)
                .map(|b| b == *polarity)
                .ok_or_else(|| FormulaError::UnboundVariable(format!("{var:?}"))),
            Literal::BoolConst(b) => Ok(*b),
        }
    }

    /// SMT-LIB text with variables printed through `name`.
    pub fn to_smt(&self, name: &dyn Fn(&Var) -> String) -> String {
        match self {
            Literal::IntCmp { op: CmpOp::Ne, lhs, rhs } => {
                format!("(not (= {} {}))", lhs.to_smt(name), rhs.to_smt(name))
            }
            Literal::IntCmp { op, lhs, rhs } => {
                format!("({} {} {})", op.smt_name(), lhs.to_smt(name), rhs.to_smt(name))
            }
            Literal::BoolLit { var, polarity: true } => name(var),
            Literal::BoolLit { var, polarity: false } => format!("(not {})", name(var)),
            Literal::BoolConst(b) => b.to_string(),
        }
    }
}

/// Quotes a symbol for SMT-LIB output when it is not a simple symbol.
pub fn smt_symbol(s: &str) -> String {
    let simple = !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

impl Term {
    pub fn to_smt(&self, name: &dyn Fn(&Var) -> String) -> String {
        let num = |c: &BigInt| {
            if c.is_negative() {
                format!("(- {})", -c)
            } else {
                c.to_string()
            }
        };
        match self {
            Term::Const(c) => num(c),
            Term::Var(v) => name(v),
            Term::Sum(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_smt(name)).collect();
                format!("(+ {})", parts.join(" "))
            }
            Term::Scale(k, t) if (-k).is_one() => format!("(- {})", t.to_smt(name)),
            Term::Scale(k, t) => format!("(* {} {})", num(k), t.to_smt(name)),
            Term::Mul(a, b) => format!("(* {} {})", a.to_smt(name), b.to_smt(name)),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_smt(&|v| smt_symbol(v.name())))
    }
}
