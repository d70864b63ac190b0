use std::collections::BTreeSet;

use super::{ChcError, Clause, ClauseId, Origin, PredApp, PredicateSymbol};
use crate::formula::{to_nnf, CmpOp, RawFormula, RawTerm, Sort, Var};

#[derive(Debug, Clone)]
pub enum RawArg {
    Int(RawTerm),
    Bool(RawFormula),
}

#[derive(Debug, Clone)]
pub struct RawAtom {
    pub pred: PredicateSymbol,
    pub args: Vec<RawArg>,
}

/// A clause as written: predicate arguments may be arbitrary terms and the
/// same variable may occur in several argument positions.
#[derive(Debug, Clone)]
pub struct RawClause {
    pub body: Vec<RawAtom>,
    pub cond: RawFormula,
    pub head: Option<RawAtom>,
}

fn arg_var(arg: &RawArg) -> Option<&Var> {
    match arg {
        RawArg::Int(RawTerm::Var(v)) => Some(v),
        RawArg::Bool(RawFormula::Var(v)) => Some(v),
        _ => None,
    }
}

fn equation(v: &Var, arg: &RawArg) -> RawFormula {
    match arg {
        RawArg::Int(t) => RawFormula::Cmp(CmpOp::Eq, RawTerm::Var(v.clone()), t.clone()),
        RawArg::Bool(f) => RawFormula::Iff(Box::new(RawFormula::Var(v.clone())), Box::new(f.clone())),
    }
}

/// Brings a clause into the normal form: distinct variable arguments,
/// disjoint body and head arguments, equations for everything else.
pub fn normalize(raw: &RawClause, id: ClauseId) -> Result<Clause, ChcError> {
    if raw.body.len() > 1 {
        return Err(ChcError::NonLinearClause);
    }
    let mut used: BTreeSet<Var> = BTreeSet::new();
    let mut eqs = Vec::new();
    let mut place = |atom: &RawAtom, prefix: &str| -> Result<PredApp, ChcError> {
        if atom.args.len() != atom.pred.arity() {
            return Err(ChcError::ArityMismatch(
                atom.pred.name().to_string(),
                atom.args.len(),
                atom.pred.arity(),
            ));
        }
        let mut vars = Vec::new();
        for (i, (arg, sort)) in atom.args.iter().zip(atom.pred.arg_sorts()).enumerate() {
            let matches_sort = matches!((arg, sort), (RawArg::Int(_), Sort::Int) | (RawArg::Bool(_), Sort::Bool));
            if !matches_sort {
                return Err(ChcError::ArgumentSort(atom.pred.name().to_string(), i));
            }
            match arg_var(arg) {
                Some(v) if !used.contains(v) => {
                    used.insert(v.clone());
                    vars.push(v.clone());
                }
                _ => {
                    let v = Var::fresh(format!("{prefix}{}", i + 1), *sort);
                    eqs.push(equation(&v, arg));
                    used.insert(v.clone());
                    vars.push(v);
                }
            }
        }
        PredApp::new(atom.pred.clone(), vars)
    };
    let body = raw.body.first().map(|a| place(a, "X")).transpose()?;
    let head = raw.head.as_ref().map(|a| place(a, "Y")).transpose()?;
    let mut conj = vec![raw.cond.clone()];
    conj.extend(eqs);
    let cond = to_nnf(&RawFormula::And(conj))?;
    Clause::new(id, body, cond, head, Origin::Original)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_fact_gets_equations() {
        let inv = PredicateSymbol::new(0, "Inv", vec![Sort::Int, Sort::Int]);
        let raw = RawClause {
            body: vec![],
            cond: RawFormula::Const(true),
            head: Some(RawAtom {
                pred: inv,
                args: vec![RawArg::Int(RawTerm::Const(0.into())), RawArg::Int(RawTerm::Const(5000.into()))],
            }),
        };
        let c = normalize(&raw, 0).unwrap();
        assert_eq!(c.to_string(), "(=> (and (= Y1 0) (= Y2 5000)) (Inv Y1 Y2))");
    }

    #[test]
    fn duplicate_arguments_are_split() {
        let inv = PredicateSymbol::new(0, "Inv", vec![Sort::Int, Sort::Int]);
        let x = Var::int("X");
        let raw = RawClause {
            body: vec![RawAtom {
                pred: inv,
                args: vec![RawArg::Int(RawTerm::Var(x.clone())), RawArg::Int(RawTerm::Var(x))],
            }],
            cond: RawFormula::Const(true),
            head: None,
        };
        let c = normalize(&raw, 0).unwrap();
        assert_eq!(c.to_string(), "(=> (and (Inv X X2) (= X2 X)) false)");
    }

    #[test]
    fn two_body_atoms_are_rejected() {
        let p = PredicateSymbol::new(0, "p", vec![]);
        let atom = RawAtom { pred: p, args: vec![] };
        let raw = RawClause { body: vec![atom.clone(), atom], cond: RawFormula::Const(true), head: None };
        assert_eq!(normalize(&raw, 0).unwrap_err(), ChcError::NonLinearClause);
    }
}
