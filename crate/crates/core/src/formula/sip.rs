use super::literal::Literal;
use super::nnf::Formula;
use super::subst::Subst;
use super::{FormulaError, Model};

/// Syntactic implicant projection: the conjunction of the literal occurrences
/// of `psi` that `sigma` satisfies, each kept once, in order of first
/// occurrence.
pub fn sip_of_model(psi: &Formula, sigma: &Model) -> Result<Formula, FormulaError> {
    let lits = sip_of_renamed(psi, &Subst::new(), sigma)?;
    Ok(Formula::and(lits.into_iter().map(Formula::Lit)))
}

/// Like [`sip_of_model`], but `sigma` speaks about `theta(psi)`. The returned
/// literals are occurrences of `psi` itself (not renamed).
pub fn sip_of_renamed(psi: &Formula, theta: &Subst, sigma: &Model) -> Result<Vec<Literal>, FormulaError> {
    if !theta.apply(psi).eval(sigma)? {
        return Err(FormulaError::ModelDoesNotSatisfy);
    }
    let mut out: Vec<Literal> = Vec::new();
    for l in psi.literals() {
        if matches!(l, Literal::BoolConst(true)) || out.contains(l) {
            continue;
        }
        if theta.apply_literal(l).eval(sigma)? {
            out.push(l.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{CmpOp, Term, Var};

    #[test]
    fn sip_keeps_all_satisfied_occurrences() {
        let x = Var::int("X");
        let gt0 = Formula::lit(Literal::cmp(CmpOp::Gt, Term::var(&x), Term::constant(0)));
        let gt1 = Formula::lit(Literal::cmp(CmpOp::Gt, Term::var(&x), Term::constant(1)));
        let psi = Formula::and([gt0, gt1]);
        let mut m = Model::new();
        m.set_int(&x, 2);
        assert_eq!(sip_of_model(&psi, &m).unwrap(), psi);
        m.set_int(&x, 1);
        assert_eq!(sip_of_model(&psi, &m), Err(FormulaError::ModelDoesNotSatisfy));
    }

    #[test]
    fn sip_picks_the_satisfied_disjunct() {
        let x = Var::int("X");
        let lt = Formula::lit(Literal::cmp(CmpOp::Lt, Term::var(&x), Term::constant(5)));
        let ge = lt.negate();
        let eq = Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(&x), Term::constant(7)));
        let psi = Formula::or([lt.clone(), Formula::and([ge.clone(), eq.clone()])]);
        let mut m = Model::new();
        m.set_int(&x, 0);
        assert_eq!(sip_of_model(&psi, &m).unwrap(), lt);
        m.set_int(&x, 7);
        assert_eq!(sip_of_model(&psi, &m).unwrap(), Formula::and([ge, eq]));
    }
}
