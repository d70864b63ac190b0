use std::collections::BTreeMap;

use super::{Clause, Origin, PredApp, DERIVED_ID};
use crate::formula::{Formula, Subst, Var};

/// A resolvent together with the renaming that was applied to the second
/// operand (each of its variables mapped to the variable in the resolvent).
#[derive(Debug, Clone)]
pub struct Resolution {
    pub clause: Clause,
    pub renaming: BTreeMap<Var, Var>,
}

#[derive(Debug, Clone)]
pub struct Resolvent {
    pub clause: Clause,
    /// Number of clauses folded into the resolvent; learned clauses count once.
    pub step_count: usize,
}

fn rename_app(app: &Option<PredApp>, map: &BTreeMap<Var, Var>) -> Option<PredApp> {
    app.as_ref().map(|a| PredApp {
        pred: a.pred.clone(),
        args: a.args.iter().map(|v| map[v].clone()).collect(),
    })
}

fn apply_map(c: &Clause, map: &BTreeMap<Var, Var>) -> Clause {
    let theta = Subst::renaming(map.iter()).expect("renaming preserves sorts");
    Clause {
        id: c.id,
        body: rename_app(&c.body, map),
        cond: theta.apply(&c.cond),
        head: rename_app(&c.head, map),
        origin: c.origin.clone(),
    }
}

/// A copy of `c` with every variable replaced by a fresh one of the same name.
pub fn rename_clause(c: &Clause) -> (Clause, BTreeMap<Var, Var>) {
    let map: BTreeMap<Var, Var> = c.all_vars().into_iter().map(|v| (v.clone(), v.rename())).collect();
    (apply_map(c, &map), map)
}

/// Resolves the head of `phi` with the body of `phi2`, keeping the variables
/// of `phi` and renaming `phi2` apart. `None` if the predicates differ.
pub fn resolve_with(phi: &Clause, phi2: &Clause) -> Option<Resolution> {
    let head = phi.head.as_ref()?;
    let body = phi2.body.as_ref()?;
    if head.pred != body.pred {
        return None;
    }
    let mut map = BTreeMap::new();
    for (b, h) in body.args.iter().zip(&head.args) {
        map.insert(b.clone(), h.clone());
    }
    for v in phi2.all_vars() {
        map.entry(v.clone()).or_insert_with(|| v.rename());
    }
    debug_assert!({
        let images: std::collections::BTreeSet<&Var> = map.values().collect();
        images.len() == map.len()
    });
    let renamed = apply_map(phi2, &map);
    let clause = Clause {
        id: DERIVED_ID,
        body: phi.body.clone(),
        cond: Formula::and([phi.cond.clone(), renamed.cond]),
        head: renamed.head,
        origin: Origin::Derived,
    };
    Some(Resolution { clause, renaming: map })
}

/// `res(phi, phi2)`, or `⊥ ⟹ ⊥` when the predicates do not match.
pub fn resolve(phi: &Clause, phi2: &Clause) -> Clause {
    match resolve_with(phi, phi2) {
        Some(r) => r.clause,
        None => Clause::contradiction(),
    }
}

/// Left fold of [`resolve`]. Panics on an empty sequence.
pub fn resolve_seq(seq: &[Clause]) -> Resolvent {
    let (first, rest) = seq.split_first().expect("resolve_seq on an empty sequence");
    let clause = rest.iter().fold(first.clone(), |acc, c| resolve(&acc, c));
    Resolvent { clause, step_count: seq.len() }
}
