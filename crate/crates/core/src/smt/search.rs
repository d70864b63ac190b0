//! Model-guided case splitting over NNF formulas. The theory core decides
//! the committed conjunction; only disjunctions the current model violates
//! are split, so most checks never branch at all.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::lia::{solve_conjunction, LiaResult};
use crate::formula::{CmpOp, Formula, Literal, Model, Value, Var};

pub(crate) struct Search<'a> {
    vars: Vec<Var>,
    hint: Option<&'a Model>,
    rng: Option<ChaCha8Rng>,
}

#[derive(Clone, Default)]
struct Branch {
    ints: Vec<Literal>,
    bools: BTreeMap<Var, bool>,
    ors: Vec<Vec<Formula>>,
}

impl Branch {
    /// Commits `f`; returns false on an immediate propositional conflict.
    fn add(&mut self, f: Formula) -> bool {
        match f {
            Formula::And(parts) => parts.into_iter().all(|p| self.add(p)),
            Formula::Or(parts) => {
                self.ors.push(parts);
                true
            }
            Formula::Lit(Literal::BoolConst(b)) => b,
            Formula::Lit(Literal::BoolLit { var, polarity }) => match self.bools.insert(var, polarity) {
                Some(old) => old == polarity,
                None => true,
            },
            Formula::Lit(Literal::IntCmp { op: CmpOp::Ne, lhs, rhs }) => {
                self.ors.push(vec![
                    Formula::lit(Literal::cmp(CmpOp::Lt, lhs.clone(), rhs.clone())),
                    Formula::lit(Literal::cmp(CmpOp::Gt, lhs, rhs)),
                ]);
                true
            }
            Formula::Lit(l) => {
                self.ints.push(l);
                true
            }
        }
    }
}

impl<'a> Search<'a> {
    pub(crate) fn new(f: &Formula, hint: Option<&'a Model>, rng: Option<ChaCha8Rng>) -> Search<'a> {
        Search { vars: f.vars().into_iter().collect(), hint, rng }
    }

    /// A model of `f` over all its variables, or `None` if it is unsatisfiable.
    pub(crate) fn run(&mut self, f: &Formula) -> Option<Model> {
        let mut root = Branch::default();
        if !root.add(f.clone()) {
            return None;
        }
        self.search(root, self.hint.cloned())
    }

    fn search(&mut self, b: Branch, guide: Option<Model>) -> Option<Model> {
        let LiaResult::Sat(ints) = solve_conjunction(&b.ints, guide.as_ref(), self.rng.clone()) else {
            return None;
        };
        let mut model = ints;
        for (v, p) in &b.bools {
            model.set_bool(v, *p);
        }
        for v in &self.vars {
            if !model.contains(v) {
                let val = guide
                    .as_ref()
                    .and_then(|g| g.get(v).cloned())
                    .unwrap_or_else(|| Value::default_for(v.sort()));
                model.set(v.clone(), val);
            }
        }
        let violated = b.ors.iter().position(|parts| {
            !parts.iter().any(|p| p.eval(&model).expect("model binds every variable"))
        });
        let Some(i) = violated else {
            return Some(model);
        };
        let mut order: Vec<usize> = (0..b.ors[i].len()).collect();
        if let Some(rng) = self.rng.as_mut() {
            order.shuffle(rng);
        }
        for k in order {
            let mut child = b.clone();
            let parts = child.ors.swap_remove(i);
            if !child.add(parts[k].clone()) {
                continue;
            }
            if let Some(m) = self.search(child, Some(model.clone())) {
                return Some(m);
            }
        }
        None
    }
}
