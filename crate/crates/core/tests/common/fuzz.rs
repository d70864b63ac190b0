//! Small random CHC problems whose predicates only hold for arguments in a
//! box, so ground reachability is decided by breadth-first search.

use std::collections::{BTreeMap, VecDeque};

use adcl::chc::{Clause, ClauseId, Origin, PredApp, PredicateSymbol, Problem};
use adcl::formula::{CmpOp, Formula, Literal, Model, Sort, Term, Var};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{box_constraint, random_formula};

pub const LO: i64 = 0;
pub const HI: i64 = 3;

/// A guard/update condition over body and head arguments. Updates are
/// mostly deterministic so that some loops accelerate.
fn rule_condition(rng: &mut ChaCha8Rng, xs: &[Var], ys: &[Var]) -> Formula {
    let mut parts = Vec::new();
    if rng.gen_bool(0.6) {
        for (i, y) in ys.iter().enumerate() {
            let x = &xs[i % xs.len()];
            let rhs = match rng.gen_range(0..4) {
                0 => Term::var(x),
                1 => Term::var(x).add(&Term::constant(rng.gen_range(-1..=1))),
                2 => Term::constant(rng.gen_range(LO..=HI)),
                _ => Term::var(x).add(&Term::constant(1)),
            };
            parts.push(Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(y), rhs)));
        }
        if rng.gen_bool(0.7) {
            parts.push(random_formula(rng, xs, &[], 1));
        }
    } else {
        let all: Vec<Var> = xs.iter().chain(ys).cloned().collect();
        parts.push(random_formula(rng, &all, &[], 2));
    }
    parts.push(box_constraint(ys, LO, HI));
    Formula::and(parts)
}

fn args(p: &PredicateSymbol, prefix: &str) -> Vec<Var> {
    (0..p.arity()).map(|i| Var::int(format!("{prefix}{}", i + 1))).collect()
}

pub fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let n_preds = rng.gen_range(1..=2);
    let preds: Vec<PredicateSymbol> =
        (0..n_preds).map(|i| PredicateSymbol::new(i, format!("P{i}"), vec![Sort::Int; rng.gen_range(1..=2)])).collect();
    let mut clauses = Vec::new();
    let pick = |rng: &mut ChaCha8Rng| preds[rng.gen_range(0..preds.len())].clone();
    let app = |p: &PredicateSymbol, vs: &[Var]| Some(PredApp::new(p.clone(), vs.to_vec()).unwrap());
    for _ in 0..rng.gen_range(1..=2) {
        let p = pick(rng);
        let ys = args(&p, "Y");
        let cond = Formula::and([random_formula(rng, &ys, &[], 1), box_constraint(&ys, LO, HI)]);
        clauses.push((None, cond, app(&p, &ys)));
    }
    for _ in 0..rng.gen_range(1..=3) {
        let (p, q) = (pick(rng), pick(rng));
        let (xs, ys) = (args(&p, "X"), args(&q, "Y"));
        let cond = rule_condition(rng, &xs, &ys);
        clauses.push((app(&p, &xs), cond, app(&q, &ys)));
    }
    for _ in 0..rng.gen_range(1..=2) {
        let p = pick(rng);
        let xs = args(&p, "X");
        clauses.push((app(&p, &xs), random_formula(rng, &xs, &[], 1), None));
    }
    let clauses = clauses
        .into_iter()
        .enumerate()
        .map(|(i, (b, c, h))| Clause::new(i as ClauseId, b, c, h, Origin::Original).unwrap())
        .collect();
    Problem::new(preds, clauses)
}

fn states(arity: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|s| (LO..=HI).map(move |v| [s.clone(), vec![v]].concat())).collect();
    }
    out
}

fn holds(c: &Clause, body: &[i64], head: &[i64]) -> bool {
    let mut m = Model::new();
    for (v, k) in c.body_args().iter().zip(body).chain(c.head_args().iter().zip(head)) {
        m.set_int(v, *k);
    }
    // Locals range over the box as well; generated clauses have none.
    m.complete(&c.all_vars());
    c.cond.eval(&m).unwrap()
}

/// Length in clauses of a shortest ground refutation, if there is one.
/// Sound for problems whose heads are confined to the box and whose
/// clauses have no locals.
pub fn shortest_refutation(p: &Problem) -> Option<usize> {
    assert!(p.clauses.iter().all(|c| c.locals().is_empty()));
    let mut dist: BTreeMap<(usize, Vec<i64>), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut best: Option<usize> = None;
    for c in &p.clauses {
        if c.body.is_some() {
            continue;
        }
        match &c.head {
            None => {
                if holds(c, &[], &[]) {
                    best = Some(1);
                }
            }
            Some(h) => {
                for s in states(h.args.len()) {
                    let key = (h.pred.id(), s.clone());
                    if holds(c, &[], &s) && !dist.contains_key(&key) {
                        dist.insert(key.clone(), 1);
                        queue.push_back(key);
                    }
                }
            }
        }
    }
    while let Some((pred, s)) = queue.pop_front() {
        let d = dist[&(pred, s.clone())];
        if best.is_some_and(|b| b <= d + 1) {
            continue;
        }
        for c in &p.clauses {
            let Some(b) = &c.body else { continue };
            if b.pred.id() != pred {
                continue;
            }
            match &c.head {
                None => {
                    if holds(c, &s, &[]) {
                        best = Some(best.map_or(d + 1, |b| b.min(d + 1)));
                    }
                }
                Some(h) => {
                    for t in states(h.args.len()) {
                        let key = (h.pred.id(), t.clone());
                        if !dist.contains_key(&key) && holds(c, &s, &t) {
                            dist.insert(key.clone(), d + 1);
                            queue.push_back(key);
                        }
                    }
                }
            }
        }
    }
    best
}
