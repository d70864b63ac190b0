use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{FormulaError, Model, Var};

/// A product of variables, sorted by id. The empty monomial is the constant 1.
pub type Monomial = Vec<Var>;

/// Polynomial with integer coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c.into());
        p
    }

    pub fn var(v: &Var) -> Poly {
        let mut p = Poly::zero();
        p.add_term(vec![v.clone()], BigInt::one());
        p
    }

    fn add_term(&mut self, mono: Monomial, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Monomial = m1.iter().chain(m2.iter()).cloned().collect();
                m.sort();
                p.add_term(m, c1 * c2);
            }
        }
        p
    }

    pub fn constant_part(&self) -> BigInt {
        self.terms.get(&Vec::new()).cloned().unwrap_or_default()
    }

    /// Returns the constant if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.terms.keys().all(|m| m.is_empty()) {
            Some(self.constant_part())
        } else {
            None
        }
    }

    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|m| m.len() <= 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of the linear monomial `v`.
    pub fn coeff(&self, v: &Var) -> BigInt {
        self.terms
            .get(std::slice::from_ref(v))
            .cloned()
            .unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().cloned()).collect()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.iter().find(|(m, _)| !m.is_empty()).map(|(_, c)| c)
    }

    pub fn eval(&self, sigma: &Model) -> Result<BigInt, FormulaError> {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for v in m {
                let val = sigma
                    .int(v)
                    .ok_or_else(|| FormulaError::UnboundVariable(format!("{v:?}")))?;
                prod *= val;
            }
            acc += prod;
        }
        Ok(acc)
    }
}

/// Integer-sorted term. Always kept normalized: build terms through the
/// constructors on this type, which route through [`Poly`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(BigInt),
    Var(Var),
    Sum(Vec<Term>),
    Scale(BigInt, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn constant(c: impl Into<BigInt>) -> Term {
        Term::Const(c.into())
    }

    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn from_poly(p: &Poly) -> Term {
        let mut parts = Vec::new();
        let mut constant = None;
        for (m, c) in &p.terms {
            if m.is_empty() {
                constant = Some(c.clone());
                continue;
            }
            let mut it = m.iter();
            let mut prod = Term::Var(it.next().expect("non-empty monomial").clone());
            for v in it {
                prod = Term::Mul(Box::new(prod), Box::new(Term::Var(v.clone())));
            }
            if c.is_one() {
                parts.push(prod);
            } else {
                parts.push(Term::Scale(c.clone(), Box::new(prod)));
            }
        }
        if let Some(c) = constant {
            parts.push(Term::Const(c));
        }
        match parts.len() {
            0 => Term::Const(BigInt::zero()),
            1 => parts.pop().unwrap(),
            _ => Term::Sum(parts),
        }
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            Term::Const(c) => Poly::constant(c.clone()),
            Term::Var(v) => Poly::var(v),
            Term::Sum(ts) => ts.iter().fold(Poly::zero(), |acc, t| acc.add(&t.to_poly())),
            Term::Scale(k, t) => t.to_poly().scale(k),
            Term::Mul(a, b) => a.to_poly().mul(&b.to_poly()),
        }
    }

    pub fn add(&self, other: &Term) -> Term {
        Term::from_poly(&self.to_poly().add(&other.to_poly()))
    }

    pub fn sub(&self, other: &Term) -> Term {
        Term::from_poly(&self.to_poly().sub(&other.to_poly()))
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Term {
        Term::from_poly(&self.to_poly().scale(&k.into()))
    }

    pub fn mul(&self, other: &Term) -> Term {
        Term::from_poly(&self.to_poly().mul(&other.to_poly()))
    }

    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        let p = terms
            .into_iter()
            .fold(Poly::zero(), |acc, t| acc.add(&t.to_poly()));
        Term::from_poly(&p)
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) => true,
            Term::Sum(ts) => ts.iter().all(Term::is_linear),
            Term::Scale(_, t) => t.is_linear(),
            Term::Mul(..) => false,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Sum(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::Scale(_, t) => t.collect_vars(out),
            Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn eval(&self, sigma: &Model) -> Result<BigInt, FormulaError> {
        match self {
            Term::Const(c) => Ok(c.clone()),
            Term::Var(v) => sigma
                .int(v)
                .cloned()
                .ok_or_else(|| FormulaError::UnboundVariable(format!("{v:?}"))),
            Term::Sum(ts) => ts.iter().try_fold(BigInt::zero(), |acc, t| Ok(acc + t.eval(sigma)?)),
            Term::Scale(k, t) => Ok(k * t.eval(sigma)?),
            Term::Mul(a, b) => Ok(a.eval(sigma)? * b.eval(sigma)?),
        }
    }

    /// Replaces variables by terms (simultaneously) and renormalizes.
    pub fn substitute(&self, f: &dyn Fn(&Var) -> Option<Term>) -> Term {
        fn go(t: &Term, f: &dyn Fn(&Var) -> Option<Term>) -> Poly {
            match t {
                Term::Const(c) => Poly::constant(c.clone()),
                Term::Var(v) => match f(v) {
                    Some(r) => r.to_poly(),
                    None => Poly::var(v),
                },
                Term::Sum(ts) => ts.iter().fold(Poly::zero(), |acc, t| acc.add(&go(t, f))),
                Term::Scale(k, t) => go(t, f).scale(k),
                Term::Mul(a, b) => go(a, f).mul(&go(b, f)),
            }
        }
        Term::from_poly(&go(self, f))
    }
}

impl From<&Var> for Term {
    fn from(v: &Var) -> Term {
        Term::var(v)
    }
}

impl From<i64> for Term {
    fn from(c: i64) -> Term {
        Term::constant(c)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    match (i, t) {
                        (0, t) => write!(f, "{t}")?,
                        (_, Term::Const(c)) if c.is_negative() => write!(f, " - {}", -c)?,
                        (_, Term::Scale(k, inner)) if k.is_negative() => {
                            if (-k).is_one() {
                                write!(f, " - {inner}")?
                            } else {
                                write!(f, " - {}*{inner}", -k)?
                            }
                        }
                        (_, t) => write!(f, " + {t}")?,
                    }
                }
                Ok(())
            }
            Term::Scale(k, t) => {
                if (-k).is_one() {
                    write!(f, "-{t}")
                } else {
                    write!(f, "{k}*{t}")
                }
            }
            Term::Mul(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_fold_and_sums_flatten() {
        let x = Var::int("x");
        let t = Term::sum([Term::var(&x), Term::constant(2), Term::var(&x).scale(-1), Term::constant(3)]);
        assert_eq!(t, Term::constant(5));
        let u = Term::var(&x).add(&Term::constant(1)).add(&Term::constant(-1));
        assert_eq!(u, Term::var(&x));
    }

    #[test]
    fn normal_form_is_canonical() {
        let x = Var::int("x");
        let y = Var::int("y");
        let a = Term::var(&x).add(&Term::var(&y)).scale(2);
        let b = Term::var(&y).scale(2).add(&Term::var(&x).scale(2));
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2*x + 2*y");
    }

    #[test]
    fn products_stay_products() {
        let n = Var::int("n");
        let y = Var::int("y");
        let t = Term::var(&n).mul(&Term::var(&y));
        assert!(!t.is_linear());
        assert!(matches!(t, Term::Mul(..)));
        let mut m = Model::new();
        m.set_int(&n, 3);
        m.set_int(&y, -4);
        assert_eq!(t.eval(&m).unwrap(), BigInt::from(-12));
    }
}
