use num_bigint::BigInt;

use super::literal::{CmpOp, Literal};
use super::nnf::Formula;
use super::term::Term;
use super::{FormulaError, Model, Var};

/// Integer term as it appears in input, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTerm {
    Const(BigInt),
    Var(Var),
    Add(Vec<RawTerm>),
    /// `(- a)` when it has one operand, `(- a b c)` = a − b − c otherwise.
    Sub(Vec<RawTerm>),
    Mul(Vec<RawTerm>),
    Div(Box<RawTerm>, Box<RawTerm>),
    Mod(Box<RawTerm>, Box<RawTerm>),
    Abs(Box<RawTerm>),
    Ite(Box<RawFormula>, Box<RawTerm>, Box<RawTerm>),
}

/// Quantifier-free formula with arbitrary Boolean connectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawFormula {
    Const(bool),
    Var(Var),
    Cmp(CmpOp, RawTerm, RawTerm),
    Distinct(Vec<RawTerm>),
    Not(Box<RawFormula>),
    And(Vec<RawFormula>),
    Or(Vec<RawFormula>),
    Implies(Box<RawFormula>, Box<RawFormula>),
    Iff(Box<RawFormula>, Box<RawFormula>),
    Xor(Box<RawFormula>, Box<RawFormula>),
    Ite(Box<RawFormula>, Box<RawFormula>, Box<RawFormula>),
}

impl RawTerm {
    pub fn from_term(t: &Term) -> RawTerm {
        match t {
            Term::Const(c) => RawTerm::Const(c.clone()),
            Term::Var(v) => RawTerm::Var(v.clone()),
            Term::Sum(ts) => RawTerm::Add(ts.iter().map(RawTerm::from_term).collect()),
            Term::Scale(k, t) => RawTerm::Mul(vec![RawTerm::Const(k.clone()), RawTerm::from_term(t)]),
            Term::Mul(a, b) => RawTerm::Mul(vec![RawTerm::from_term(a), RawTerm::from_term(b)]),
        }
    }

    /// Direct evaluation, used as a reference semantics in tests.
    pub fn eval(&self, sigma: &Model) -> Result<BigInt, FormulaError> {
        use num_integer::Integer;
        use num_traits::{Signed, Zero};
        Ok(match self {
            RawTerm::Const(c) => c.clone(),
            RawTerm::Var(v) => sigma
                .int(v)
                .cloned()
                .ok_or_else(|| FormulaError::UnboundVariable(format!("{v:?}")))?,
            RawTerm::Add(ts) => {
                let mut acc = BigInt::zero();
                for t in ts {
                    acc += t.eval(sigma)?;
                }
                acc
            }
            RawTerm::Sub(ts) => {
                let first = ts[0].eval(sigma)?;
                if ts.len() == 1 {
                    -first
                } else {
                    let mut acc = first;
                    for t in &ts[1..] {
                        acc -= t.eval(sigma)?;
                    }
                    acc
                }
            }
            RawTerm::Mul(ts) => {
                let mut acc = BigInt::from(1);
                for t in ts {
                    acc *= t.eval(sigma)?;
                }
                acc
            }
            RawTerm::Div(a, b) => {
                let (a, b) = (a.eval(sigma)?, b.eval(sigma)?);
                if b.is_zero() {
                    return Err(FormulaError::UnsupportedOperator("div".into()));
                }
                // SMT-LIB div rounds so that the remainder is non-negative.
                let r = a.mod_floor(&b.abs());
                (a - r) / b
            }
            RawTerm::Mod(a, b) => {
                let (a, b) = (a.eval(sigma)?, b.eval(sigma)?);
                if b.is_zero() {
                    return Err(FormulaError::UnsupportedOperator("mod".into()));
                }
                a.mod_floor(&b.abs())
            }
            RawTerm::Abs(t) => t.eval(sigma)?.abs(),
            RawTerm::Ite(c, a, b) => {
                if c.eval(sigma)? {
                    a.eval(sigma)?
                } else {
                    b.eval(sigma)?
                }
            }
        })
    }
}

impl RawFormula {
    /// Embeds an NNF formula.
    pub fn from_nnf(f: &Formula) -> RawFormula {
        match f {
            Formula::Lit(Literal::IntCmp { op, lhs, rhs }) => {
                RawFormula::Cmp(*op, RawTerm::from_term(lhs), RawTerm::from_term(rhs))
            }
            Formula::Lit(Literal::BoolLit { var, polarity: true }) => RawFormula::Var(var.clone()),
            Formula::Lit(Literal::BoolLit { var, polarity: false }) => {
                RawFormula::Not(Box::new(RawFormula::Var(var.clone())))
            }
            Formula::Lit(Literal::BoolConst(b)) => RawFormula::Const(*b),
            Formula::And(fs) => RawFormula::And(fs.iter().map(RawFormula::from_nnf).collect()),
            Formula::Or(fs) => RawFormula::Or(fs.iter().map(RawFormula::from_nnf).collect()),
        }
    }

    /// Direct evaluation, used as a reference semantics in tests.
    pub fn eval(&self, sigma: &Model) -> Result<bool, FormulaError> {
        Ok(match self {
            RawFormula::Const(b) => *b,
            RawFormula::Var(v) => sigma
                .bool(v)
                .ok_or_else(|| FormulaError::UnboundVariable(format!("{v:?}")))?,
            RawFormula::Cmp(op, a, b) => op.holds(&a.eval(sigma)?, &b.eval(sigma)?),
            RawFormula::Distinct(ts) => {
                let vals = ts.iter().map(|t| t.eval(sigma)).collect::<Result<Vec<_>, _>>()?;
                (0..vals.len()).all(|i| (i + 1..vals.len()).all(|j| vals[i] != vals[j]))
            }
            RawFormula::Not(f) => !f.eval(sigma)?,
            RawFormula::And(fs) => {
                let mut r = true;
                for f in fs {
                    r &= f.eval(sigma)?;
                }
                r
            }
            RawFormula::Or(fs) => {
                let mut r = false;
                for f in fs {
                    r |= f.eval(sigma)?;
                }
                r
            }
            RawFormula::Implies(a, b) => !a.eval(sigma)? || b.eval(sigma)?,
            RawFormula::Iff(a, b) => a.eval(sigma)? == b.eval(sigma)?,
            RawFormula::Xor(a, b) => a.eval(sigma)? != b.eval(sigma)?,
            RawFormula::Ite(c, a, b) => {
                if c.eval(sigma)? {
                    a.eval(sigma)?
                } else {
                    b.eval(sigma)?
                }
            }
        })
    }
}

/// Converts to negation normal form. Term-level `ite` and `abs` are lifted
/// into case splits; `div` and `mod` are rejected.
pub fn to_nnf(raw: &RawFormula) -> Result<Formula, FormulaError> {
    nnf(raw, true)
}

fn nnf(f: &RawFormula, pos: bool) -> Result<Formula, FormulaError> {
    Ok(match f {
        RawFormula::Const(b) => {
            if *b == pos {
                Formula::top()
            } else {
                Formula::bottom()
            }
        }
        RawFormula::Var(v) => Formula::lit(Literal::BoolLit { var: v.clone(), polarity: pos }),
        RawFormula::Cmp(op, a, b) => {
            let op = if pos { *op } else { op.negate() };
            cmp_cases(op, a, b)?
        }
        RawFormula::Distinct(ts) => {
            let mut parts = Vec::new();
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    let op = if pos { CmpOp::Ne } else { CmpOp::Eq };
                    parts.push(cmp_cases(op, &ts[i], &ts[j])?);
                }
            }
            if pos {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        RawFormula::Not(g) => nnf(g, !pos)?,
        RawFormula::And(fs) => {
            let parts = fs.iter().map(|g| nnf(g, pos)).collect::<Result<Vec<_>, _>>()?;
            if pos {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        RawFormula::Or(fs) => {
            let parts = fs.iter().map(|g| nnf(g, pos)).collect::<Result<Vec<_>, _>>()?;
            if pos {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        RawFormula::Implies(a, b) => {
            if pos {
                Formula::or([nnf(a, false)?, nnf(b, true)?])
            } else {
                Formula::and([nnf(a, true)?, nnf(b, false)?])
            }
        }
        RawFormula::Iff(a, b) => iff(a, b, pos)?,
        RawFormula::Xor(a, b) => iff(a, b, !pos)?,
        RawFormula::Ite(c, a, b) => Formula::or([
            Formula::and([nnf(c, true)?, nnf(a, pos)?]),
            Formula::and([nnf(c, false)?, nnf(b, pos)?]),
        ]),
    })
}

fn iff(a: &RawFormula, b: &RawFormula, pos: bool) -> Result<Formula, FormulaError> {
    Ok(Formula::or([
        Formula::and([nnf(a, true)?, nnf(b, pos)?]),
        Formula::and([nnf(a, false)?, nnf(b, !pos)?]),
    ]))
}

fn cmp_cases(op: CmpOp, a: &RawTerm, b: &RawTerm) -> Result<Formula, FormulaError> {
    let ca = term_cases(a)?;
    let cb = term_cases(b)?;
    let mut disj = Vec::new();
    for (ga, ta) in &ca {
        for (gb, tb) in &cb {
            disj.push(Formula::and([
                ga.clone(),
                gb.clone(),
                Formula::lit(Literal::cmp(op, ta.clone(), tb.clone())),
            ]));
        }
    }
    Ok(Formula::or(disj))
}

/// Splits a term into mutually exclusive, exhaustive cases (guard, term).
fn term_cases(t: &RawTerm) -> Result<Vec<(Formula, Term)>, FormulaError> {
    Ok(match t {
        RawTerm::Const(c) => vec![(Formula::top(), Term::Const(c.clone()))],
        RawTerm::Var(v) => vec![(Formula::top(), Term::var(v))],
        RawTerm::Add(ts) => combine(ts, |acc, t| Ok(acc.add(t)))?,
        RawTerm::Sub(ts) if ts.len() == 1 => term_cases(&ts[0])?
            .into_iter()
            .map(|(g, t)| (g, t.scale(-1)))
            .collect(),
        RawTerm::Sub(ts) => {
            let mut cases = term_cases(&ts[0])?;
            for rest in &ts[1..] {
                cases = product(cases, term_cases(rest)?, |a, b| Ok(a.sub(b)))?;
            }
            cases
        }
        RawTerm::Mul(ts) => combine(ts, |acc, t| Ok(acc.mul(t)))?,
        RawTerm::Div(..) => return Err(FormulaError::UnsupportedOperator("div".into())),
        RawTerm::Mod(..) => return Err(FormulaError::UnsupportedOperator("mod".into())),
        RawTerm::Abs(inner) => {
            let mut out = Vec::new();
            for (g, t) in term_cases(inner)? {
                let nonneg = Formula::lit(Literal::cmp(CmpOp::Ge, t.clone(), Term::constant(0)));
                out.push((Formula::and([g.clone(), nonneg.clone()]), t.clone()));
                out.push((Formula::and([g, nonneg.negate()]), t.scale(-1)));
            }
            out.retain(|(g, _)| !g.is_false());
            out
        }
        RawTerm::Ite(c, a, b) => {
            let pos = nnf(c, true)?;
            let neg = nnf(c, false)?;
            let mut out = Vec::new();
            for (g, t) in term_cases(a)? {
                out.push((Formula::and([pos.clone(), g]), t));
            }
            for (g, t) in term_cases(b)? {
                out.push((Formula::and([neg.clone(), g]), t));
            }
            out.retain(|(g, _)| !g.is_false());
            out
        }
    })
}

type Cases = Vec<(Formula, Term)>;

fn product(
    a: Cases,
    b: Cases,
    f: impl Fn(&Term, &Term) -> Result<Term, FormulaError>,
) -> Result<Cases, FormulaError> {
    let mut out = Vec::new();
    for (ga, ta) in &a {
        for (gb, tb) in &b {
            let g = Formula::and([ga.clone(), gb.clone()]);
            if !g.is_false() {
                out.push((g, f(ta, tb)?));
            }
        }
    }
    Ok(out)
}

fn combine(
    ts: &[RawTerm],
    f: impl Fn(&Term, &Term) -> Result<Term, FormulaError> + Copy,
) -> Result<Cases, FormulaError> {
    let mut iter = ts.iter();
    let mut cases = match iter.next() {
        Some(t) => term_cases(t)?,
        None => return Err(FormulaError::UnsupportedOperator("empty application".into())),
    };
    for t in iter {
        cases = product(cases, term_cases(t)?, f)?;
    }
    Ok(cases)
}
