#![allow(dead_code)]

pub mod fuzz;
pub mod lang;

use adcl::formula::{CmpOp, Formula, Literal, Model, Term, Var};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const OPS: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

pub fn random_term(rng: &mut ChaCha8Rng, ints: &[Var]) -> Term {
    let mut t = Term::constant(rng.gen_range(-6..=6));
    for v in ints {
        if rng.gen_bool(0.6) {
            t = t.add(&Term::var(v).scale(rng.gen_range(-3..=3)));
        }
    }
    t
}

pub fn random_literal(rng: &mut ChaCha8Rng, ints: &[Var], bools: &[Var]) -> Literal {
    if !bools.is_empty() && rng.gen_bool(0.2) {
        let v = &bools[rng.gen_range(0..bools.len())];
        return Literal::BoolLit { var: v.clone(), polarity: rng.gen_bool(0.5) };
    }
    let op = OPS[rng.gen_range(0..OPS.len())];
    Literal::cmp(op, random_term(rng, ints), Term::constant(rng.gen_range(-8..=8)))
}

pub fn random_formula(rng: &mut ChaCha8Rng, ints: &[Var], bools: &[Var], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::lit(random_literal(rng, ints, bools));
    }
    let n = rng.gen_range(2..=3);
    let parts: Vec<Formula> = (0..n).map(|_| random_formula(rng, ints, bools, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        Formula::and(parts)
    } else {
        Formula::or(parts)
    }
}

/// `lo ≤ v ≤ hi` for every integer variable.
pub fn box_constraint(ints: &[Var], lo: i64, hi: i64) -> Formula {
    Formula::and(ints.iter().flat_map(|v| {
        [
            Formula::lit(Literal::cmp(CmpOp::Ge, Term::var(v), Term::constant(lo))),
            Formula::lit(Literal::cmp(CmpOp::Le, Term::var(v), Term::constant(hi))),
        ]
    }))
}

/// Exhaustive search for a model of `f` with integers in `[lo, hi]`.
pub fn box_model(f: &Formula, ints: &[Var], bools: &[Var], lo: i64, hi: i64) -> Option<Model> {
    let mut m = Model::new();
    fn go(f: &Formula, ints: &[Var], bools: &[Var], lo: i64, hi: i64, m: &mut Model) -> bool {
        if let Some((b, rest)) = bools.split_first() {
            for val in [false, true] {
                m.set_bool(b, val);
                if go(f, ints, rest, lo, hi, m) {
                    return true;
                }
            }
            return false;
        }
        if let Some((v, rest)) = ints.split_first() {
            for val in lo..=hi {
                m.set_int(v, val);
                if go(f, rest, bools, lo, hi, m) {
                    return true;
                }
            }
            return false;
        }
        f.eval(m).unwrap()
    }
    go(f, ints, bools, lo, hi, &mut m).then_some(m)
}

use adcl::chc::{Clause, Origin, PredApp, PredicateSymbol};
use adcl::formula::Sort;

/// A recursive conjunctive clause `F(X) ∧ guard ∧ Y = θ(X) ⟹ F(Y)` from
/// the supported class: invariants, counters, resets (to constants or to
/// terms over invariants) and Boolean resets.
pub fn random_loop(rng: &mut ChaCha8Rng) -> Clause {
    let n_int = rng.gen_range(1..=3);
    let has_bool = rng.gen_bool(0.3);
    let mut sorts = vec![Sort::Int; n_int];
    if has_bool {
        sorts.push(Sort::Bool);
    }
    let pred = PredicateSymbol::new(0, "F", sorts.clone());
    let xs: Vec<Var> = sorts.iter().enumerate().map(|(i, s)| Var::fresh(format!("X{i}"), *s)).collect();
    let ys: Vec<Var> = sorts.iter().enumerate().map(|(i, s)| Var::fresh(format!("Y{i}"), *s)).collect();
    let ints = &xs[..n_int];
    // Decide the shape per integer variable first, so resets can refer to
    // invariants.
    let shapes: Vec<u32> = (0..n_int).map(|_| rng.gen_range(0..4)).collect();
    let invariants: Vec<Var> = ints.iter().zip(&shapes).filter(|(_, s)| **s == 0).map(|(x, _)| x.clone()).collect();
    let mut defs = Vec::new();
    let mut guards = Vec::new();
    for (i, x) in ints.iter().enumerate() {
        let rhs = match shapes[i] {
            0 => Term::var(x),
            1 | 2 => {
                let mut c = rng.gen_range(-3..=3);
                if c == 0 {
                    c = 1;
                }
                Term::var(x).add(&Term::constant(c))
            }
            _ => {
                let mut t = Term::constant(rng.gen_range(-5..=5));
                if let Some(v) = invariants.first() {
                    if rng.gen_bool(0.5) {
                        t = t.add(&Term::var(v).scale(rng.gen_range(-2..=2)));
                    }
                }
                t
            }
        };
        defs.push(Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(&ys[i]), rhs)));
    }
    if has_bool {
        let b = &ys[n_int];
        defs.push(Formula::lit(Literal::BoolLit { var: b.clone(), polarity: rng.gen_bool(0.5) }));
        if rng.gen_bool(0.5) {
            guards.push(Formula::lit(Literal::BoolLit { var: xs[n_int].clone(), polarity: rng.gen_bool(0.5) }));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let op = OPS[rng.gen_range(0..OPS.len())];
        guards.push(Formula::lit(Literal::cmp(op, random_term(rng, ints), Term::constant(rng.gen_range(-8..=8)))));
    }
    Clause::new(
        0,
        Some(PredApp::new(pred.clone(), xs).unwrap()),
        Formula::and(guards.into_iter().chain(defs)),
        Some(PredApp::new(pred, ys).unwrap()),
        Origin::Original,
    )
    .unwrap()
}

use adcl::accel::{AcceleratedClause, ClosedForm, Update};
use adcl::chc::resolve_with;
use adcl::formula::{Subst, SubstValue};
use adcl::smt::check_sat;

/// Is `a` with its counter fixed to `n` equivalent to the `n`-fold
/// unrolling of `c`? Both directions are decided by the solver; the
/// intermediate states of the unrolling are instantiated with the closed
/// forms for the converse direction.
pub fn unrolling_matches(c: &Clause, a: &AcceleratedClause, n: i64) -> bool {
    let mut acc = c.clone();
    let mut states: Vec<Vec<Var>> = vec![c.head_args().to_vec()];
    for _ in 1..n {
        acc = resolve_with(&acc, c).unwrap().clause;
        states.push(acc.head_args().to_vec());
    }
    let mut align = Subst::new();
    for (v, w) in a.clause.body_args().iter().zip(acc.body_args()) {
        align.insert_var(v, w).unwrap();
    }
    for (v, w) in a.clause.head_args().iter().zip(acc.head_args()) {
        align.insert_var(v, w).unwrap();
    }
    align.insert_term(&a.counter, Term::constant(n)).unwrap();
    let a_cond = align.apply(&a.clause.cond);
    if !check_sat(&Formula::and([acc.cond.clone(), a_cond.negate()])).is_unsat() {
        return false;
    }
    let mut mid = Subst::new();
    for (k, state) in states.iter().take(states.len() - 1).enumerate() {
        let steps = Term::constant(k as i64 + 1);
        for (i, z) in state.iter().enumerate() {
            let x = &a.clause.body_args()[i];
            let value = match &a.closed_forms[i] {
                ClosedForm::EventuallyConstant(Update::Bool(b)) => SubstValue::Bool(Formula::lit(Literal::BoolConst(*b))),
                f => SubstValue::Int(align.apply_term(&f.int_at(x, &steps))),
            };
            mid.insert(z, value).unwrap();
        }
    }
    check_sat(&Formula::and([a_cond, mid.apply(&acc.cond).negate()])).is_unsat()
}
