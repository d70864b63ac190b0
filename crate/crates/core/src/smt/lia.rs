//! Exact satisfiability of conjunctions of linear integer constraints, by
//! the Omega test: equality elimination, Fourier–Motzkin projection with
//! dark and grey shadows, and back-substitution for models.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{CmpOp, Literal, Model, Term, Var};

type Idx = usize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Lin {
    coeffs: BTreeMap<Idx, BigInt>,
    c: BigInt,
}

impl Lin {
    fn constant(c: BigInt) -> Lin {
        Lin { coeffs: BTreeMap::new(), c }
    }

    fn coeff(&self, x: Idx) -> BigInt {
        self.coeffs.get(&x).cloned().unwrap_or_default()
    }

    fn scale(&self, k: &BigInt) -> Lin {
        if k.is_zero() {
            return Lin::constant(BigInt::zero());
        }
        Lin {
            coeffs: self.coeffs.iter().map(|(i, a)| (*i, a * k)).collect(),
            c: &self.c * k,
        }
    }

    fn add(&self, other: &Lin) -> Lin {
        let mut coeffs = self.coeffs.clone();
        for (i, a) in &other.coeffs {
            let e = coeffs.entry(*i).or_insert_with(BigInt::zero);
            *e += a;
            if e.is_zero() {
                coeffs.remove(i);
            }
        }
        Lin { coeffs, c: &self.c + &other.c }
    }

    /// Replaces `x` by `expr`.
    fn substitute(&self, x: Idx, expr: &Lin) -> Lin {
        match self.coeffs.get(&x) {
            None => self.clone(),
            Some(a) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&x);
                rest.add(&expr.scale(a))
            }
        }
    }

    fn eval(&self, m: &BTreeMap<Idx, BigInt>) -> BigInt {
        let mut acc = self.c.clone();
        for (i, a) in &self.coeffs {
            acc += a * &m[i];
        }
        acc
    }

    fn gcd(&self) -> BigInt {
        self.coeffs.values().fold(BigInt::zero(), |g, a| g.gcd(a))
    }
}

/// Value preferences for otherwise free choices.
struct Pref {
    hint: BTreeMap<Idx, BigInt>,
    rng: Option<ChaCha8Rng>,
}

impl Pref {
    fn choose(&mut self, x: Idx, lo: Option<&BigInt>, hi: Option<&BigInt>) -> BigInt {
        let inside = |v: &BigInt| lo.map_or(true, |l| v >= l) && hi.map_or(true, |h| v <= h);
        if let Some(h) = self.hint.get(&x) {
            if inside(h) {
                return h.clone();
            }
        }
        if let Some(rng) = self.rng.as_mut() {
            let spread = BigInt::from(rng.gen_range(0..8u32));
            return match (lo, hi) {
                (Some(l), Some(h)) => {
                    let width = (h - l).to_u32().unwrap_or(u32::MAX);
                    let pick = BigInt::from(rng.gen_range(0..=width.min(8)));
                    if rng.gen_bool(0.5) {
                        l + pick
                    } else {
                        h - pick
                    }
                }
                (Some(l), None) => l + spread,
                (None, Some(h)) => h - spread,
                (None, None) => spread - BigInt::from(4),
            };
        }
        let zero = BigInt::zero();
        match (lo, hi) {
            (Some(l), _) if l > &zero => l.clone(),
            (_, Some(h)) if h < &zero => h.clone(),
            _ => zero,
        }
    }
}

struct Omega {
    pref: Pref,
    next: Idx,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

impl Omega {
    fn fresh(&mut self) -> Idx {
        let x = self.next;
        self.next += 1;
        x
    }

    /// Assigns preferred values to the variables of `l` that are still free.
    fn fill(&mut self, l: &Lin, m: &mut BTreeMap<Idx, BigInt>) {
        for x in l.coeffs.keys() {
            if !m.contains_key(x) {
                let v = self.pref.choose(*x, None, None);
                m.insert(*x, v);
            }
        }
    }

    fn solve(&mut self, mut eqs: Vec<Lin>, mut geqs: Vec<Lin>) -> Option<BTreeMap<Idx, BigInt>> {
        loop {
            // Normalize equalities.
            let mut next_eqs = Vec::new();
            for e in eqs {
                let g = e.gcd();
                if g.is_zero() {
                    if !e.c.is_zero() {
                        return None;
                    }
                    continue;
                }
                if !(&e.c % &g).is_zero() {
                    return None;
                }
                let e = if g.is_one() {
                    e
                } else {
                    Lin {
                        coeffs: e.coeffs.iter().map(|(i, a)| (*i, a / &g)).collect(),
                        c: &e.c / &g,
                    }
                };
                next_eqs.push(e);
            }
            eqs = next_eqs;
            if let Some(e) = eqs.pop() {
                return self.eliminate_equality(e, eqs, geqs);
            }

            // Normalize inequalities, keeping the tightest constant per
            // coefficient vector and spotting opposite pairs.
            let mut best: BTreeMap<BTreeMap<Idx, BigInt>, BigInt> = BTreeMap::new();
            for l in geqs {
                let g = l.gcd();
                if g.is_zero() {
                    if l.c.is_negative() {
                        return None;
                    }
                    continue;
                }
                let (coeffs, c) = if g.is_one() {
                    (l.coeffs, l.c)
                } else {
                    (l.coeffs.iter().map(|(i, a)| (*i, a / &g)).collect(), l.c.div_floor(&g))
                };
                match best.get_mut(&coeffs) {
                    Some(old) if *old <= c => {}
                    Some(old) => *old = c,
                    None => {
                        best.insert(coeffs, c);
                    }
                }
            }
            let mut found_eq = None;
            for (coeffs, c) in &best {
                let neg: BTreeMap<Idx, BigInt> = coeffs.iter().map(|(i, a)| (*i, -a)).collect();
                if let Some(c2) = best.get(&neg) {
                    let s = c + c2;
                    if s.is_negative() {
                        return None;
                    }
                    if s.is_zero() && found_eq.is_none() {
                        found_eq = Some(Lin { coeffs: coeffs.clone(), c: c.clone() });
                    }
                }
            }
            geqs = best.into_iter().map(|(coeffs, c)| Lin { coeffs, c }).collect();
            if let Some(e) = found_eq {
                eqs = vec![e];
                continue;
            }
            if geqs.is_empty() {
                return Some(BTreeMap::new());
            }
            return self.eliminate_inequalities(geqs);
        }
    }

    fn eliminate_equality(&mut self, e: Lin, eqs: Vec<Lin>, geqs: Vec<Lin>) -> Option<BTreeMap<Idx, BigInt>> {
        let (k, ak) = e
            .coeffs
            .iter()
            .min_by(|(i, a), (j, b)| a.abs().cmp(&b.abs()).then(i.cmp(j)))
            .map(|(i, a)| (*i, a.clone()))
            .expect("non-trivial equality");
        let (expr, rest_eqs) = if ak.abs().is_one() {
            // x_k = -(rest)/a_k
            let mut rest = e.clone();
            rest.coeffs.remove(&k);
            (rest.scale(&(-&ak)), eqs)
        } else {
            // x_k = t - Σ floor(a_i/a) x_i - floor(c/a) with a = |a_k|.
            let (e, a) = if ak.is_negative() { (e.scale(&BigInt::from(-1)), -ak) } else { (e, ak) };
            let t = self.fresh();
            let mut expr = Lin::constant(-e.c.div_floor(&a));
            expr.coeffs.insert(t, BigInt::one());
            for (i, ai) in &e.coeffs {
                if *i != k {
                    let q = ai.div_floor(&a);
                    if !q.is_zero() {
                        expr.coeffs.insert(*i, -q);
                    }
                }
            }
            let mut all = eqs;
            all.push(e);
            (expr, all)
        };
        let eqs2: Vec<Lin> = rest_eqs.iter().map(|l| l.substitute(k, &expr)).collect();
        let geqs2: Vec<Lin> = geqs.iter().map(|l| l.substitute(k, &expr)).collect();
        let mut m = self.solve(eqs2, geqs2)?;
        self.fill(&expr, &mut m);
        let v = expr.eval(&m);
        m.insert(k, v);
        Some(m)
    }

    fn eliminate_inequalities(&mut self, geqs: Vec<Lin>) -> Option<BTreeMap<Idx, BigInt>> {
        let mut stats: BTreeMap<Idx, (usize, usize, bool, bool)> = BTreeMap::new();
        for l in &geqs {
            for (i, a) in &l.coeffs {
                let s = stats.entry(*i).or_insert((0, 0, true, true));
                if a.is_positive() {
                    s.0 += 1;
                    s.2 &= a.is_one();
                } else {
                    s.1 += 1;
                    s.3 &= (-a).is_one();
                }
            }
        }
        let one_sided = stats.iter().find(|(_, s)| s.0 == 0 || s.1 == 0).map(|(i, _)| *i);
        let exact = stats
            .iter()
            .filter(|(_, s)| s.2 || s.3)
            .min_by_key(|(i, s)| (s.0 * s.1, **i))
            .map(|(i, _)| *i);
        let any = stats.iter().min_by_key(|(i, s)| (s.0 * s.1, **i)).map(|(i, _)| *i).expect("variables");
        let (x, is_exact) = match (one_sided, exact) {
            (Some(x), _) => (x, true),
            (None, Some(x)) => (x, true),
            (None, None) => (any, false),
        };
        let (with_x, rest): (Vec<Lin>, Vec<Lin>) = geqs.iter().cloned().partition(|l| l.coeffs.contains_key(&x));
        let lowers: Vec<&Lin> = with_x.iter().filter(|l| l.coeff(x).is_positive()).collect();
        let uppers: Vec<&Lin> = with_x.iter().filter(|l| l.coeff(x).is_negative()).collect();
        let combine = |dark: bool| -> Vec<Lin> {
            let mut out = rest.clone();
            for lo in &lowers {
                let a = lo.coeff(x);
                let mut l = (*lo).clone();
                l.coeffs.remove(&x);
                for up in &uppers {
                    let b = -up.coeff(x);
                    let mut u = (*up).clone();
                    u.coeffs.remove(&x);
                    let mut comb = u.scale(&a).add(&l.scale(&b));
                    if dark {
                        comb.c -= (&a - 1) * (&b - 1);
                    }
                    out.push(comb);
                }
            }
            out
        };
        if is_exact {
            let mut m = self.solve(Vec::new(), combine(false))?;
            self.pick(x, &with_x, &mut m);
            return Some(m);
        }
        if let Some(mut m) = self.solve(Vec::new(), combine(true)) {
            self.pick(x, &with_x, &mut m);
            return Some(m);
        }
        self.solve(Vec::new(), combine(false))?;
        let max_upper = uppers.iter().map(|u| -u.coeff(x)).max().expect("upper bounds");
        for lo in &lowers {
            let a = lo.coeff(x);
            let limit = (&a * &max_upper - &a - &max_upper).div_floor(&max_upper);
            let mut i = BigInt::zero();
            while i <= limit {
                let mut eq = (*lo).clone();
                eq.c -= &i;
                if let Some(m) = self.solve(vec![eq], geqs.clone()) {
                    return Some(m);
                }
                i += 1;
            }
        }
        None
    }

    /// Chooses a value for `x` within the bounds its constraints impose.
    fn pick(&mut self, x: Idx, with_x: &[Lin], m: &mut BTreeMap<Idx, BigInt>) {
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for l in with_x {
            let mut rest = l.clone();
            let a = rest.coeffs.remove(&x).expect("constraint mentions x");
            self.fill(&rest, m);
            let r = rest.eval(m);
            if a.is_positive() {
                let b = ceil_div(&-r, &a);
                lo = Some(lo.map_or(b.clone(), |o| o.max(b)));
            } else {
                let b = r.div_floor(&-a);
                hi = Some(hi.map_or(b.clone(), |o| o.min(b)));
            }
        }
        let v = self.pref.choose(x, lo.as_ref(), hi.as_ref());
        debug_assert!(lo.as_ref().map_or(true, |l| &v >= l) && hi.as_ref().map_or(true, |h| &v <= h));
        m.insert(x, v);
    }
}

/// Outcome of a conjunction check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiaResult {
    Sat(Model),
    Unsat,
}

/// Decides a conjunction of linear integer comparisons (no `≠`). The model
/// binds every variable of `lits`; values follow `hint` where possible, then
/// prefer 0 (seed 0) or a seed-dependent choice.
pub fn solve_conjunction(lits: &[Literal], hint: Option<&Model>, rng: Option<ChaCha8Rng>) -> LiaResult {
    match hint {
        Some(h) => solve_near_hint(lits, h, rng),
        None => solve_plain(lits, None, rng),
    }
}

/// Repairs `hint` locally. The literals it violates are solved together
/// with a neighbourhood that doubles in radius; the variables the
/// neighbourhood shares with the rest stay at their hinted values. A
/// neighbourhood without solutions refutes the whole conjunction, so
/// unsatisfiable cores near the violation are found without touching the
/// rest.
fn solve_near_hint(lits: &[Literal], h: &Model, rng: Option<ChaCha8Rng>) -> LiaResult {
    let vars_of: Vec<BTreeSet<Var>> = lits
        .iter()
        .map(|l| {
            let mut vs = BTreeSet::new();
            l.collect_vars(&mut vs);
            vs
        })
        .collect();
    let mut inside: Vec<bool> = lits
        .iter()
        .zip(&vars_of)
        .map(|(l, vs)| !(vs.iter().all(|v| h.int(v).is_some()) && matches!(l.eval(h), Ok(true))))
        .collect();
    let keep_hint = |vars: &BTreeSet<Var>| {
        let mut m = Model::new();
        for v in vars {
            m.set_int(v, h.int(v).expect("hinted").clone());
        }
        m
    };
    if !inside.contains(&true) {
        return LiaResult::Sat(keep_hint(&vars_of.iter().flatten().cloned().collect()));
    }
    let mut radius = 1;
    loop {
        let local: Vec<Literal> = lits.iter().zip(&inside).filter(|(_, i)| **i).map(|(l, _)| l.clone()).collect();
        if local.len() == lits.len() {
            return solve_plain(lits, Some(h), rng);
        }
        let LiaResult::Sat(_) = solve_plain(&local, Some(h), rng.clone()) else { return LiaResult::Unsat };
        let local_vars: BTreeSet<Var> =
            vars_of.iter().zip(&inside).filter(|(_, i)| **i).flat_map(|(vs, _)| vs.iter().cloned()).collect();
        let outside_vars: BTreeSet<Var> =
            vars_of.iter().zip(&inside).filter(|(_, i)| !**i).flat_map(|(vs, _)| vs.iter().cloned()).collect();
        let mut pinned = local;
        for v in local_vars.intersection(&outside_vars) {
            pinned.push(Literal::cmp(CmpOp::Eq, Term::var(v), Term::constant(h.int(v).expect("hinted").clone())));
        }
        if let LiaResult::Sat(m) = solve_plain(&pinned, Some(h), rng.clone()) {
            let mut model = keep_hint(&outside_vars);
            for (v, val) in m.iter() {
                model.set(v.clone(), val.clone());
            }
            return LiaResult::Sat(model);
        }
        for _ in 0..radius {
            let reach: BTreeSet<&Var> =
                vars_of.iter().zip(&inside).filter(|(_, i)| **i).flat_map(|(vs, _)| vs.iter()).collect();
            for (k, vs) in vars_of.iter().enumerate() {
                if !inside[k] && vs.iter().any(|v| reach.contains(v)) {
                    inside[k] = true;
                }
            }
        }
        radius *= 2;
    }
}

fn solve_plain(lits: &[Literal], hint: Option<&Model>, rng: Option<ChaCha8Rng>) -> LiaResult {
    let mut index: BTreeMap<Var, Idx> = BTreeMap::new();
    let mut vars: Vec<Var> = Vec::new();
    let mut eqs = Vec::new();
    let mut geqs = Vec::new();
    for l in lits {
        let Literal::IntCmp { op, lhs, rhs } = l else {
            panic!("solve_conjunction expects integer comparisons");
        };
        let p = lhs.to_poly().sub(&rhs.to_poly());
        let mut lin = Lin::constant(BigInt::zero());
        for (mono, c) in p.terms() {
            match mono.as_slice() {
                [] => lin.c = c.clone(),
                [v] => {
                    let i = *index.entry(v.clone()).or_insert_with(|| {
                        vars.push(v.clone());
                        vars.len() - 1
                    });
                    lin.coeffs.insert(i, c.clone());
                }
                _ => panic!("solve_conjunction expects linear constraints"),
            }
        }
        let neg = lin.scale(&BigInt::from(-1));
        match op {
            CmpOp::Eq => eqs.push(lin),
            CmpOp::Ge => geqs.push(lin),
            CmpOp::Gt => geqs.push(lin.add(&Lin::constant(BigInt::from(-1)))),
            CmpOp::Le => geqs.push(neg),
            CmpOp::Lt => geqs.push(neg.add(&Lin::constant(BigInt::from(-1)))),
            CmpOp::Ne => panic!("solve_conjunction does not handle disequalities"),
        }
    }
    let hint_map: BTreeMap<Idx, BigInt> = match hint {
        Some(h) => vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| h.int(v).map(|val| (i, val.clone())))
            .collect(),
        None => BTreeMap::new(),
    };
    let n = vars.len();
    let mut omega = Omega { pref: Pref { hint: hint_map, rng }, next: n };
    match omega.solve(eqs, geqs) {
        None => LiaResult::Unsat,
        Some(mut m) => {
            let mut model = Model::new();
            for (i, v) in vars.iter().enumerate() {
                if !m.contains_key(&i) {
                    let val = omega.pref.choose(i, None, None);
                    m.insert(i, val);
                }
                model.set_int(v, m[&i].clone());
            }
            LiaResult::Sat(model)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(op: CmpOp, lhs: Term, rhs: i64) -> Literal {
        Literal::cmp(op, lhs, Term::constant(rhs))
    }

    #[test]
    fn empty_integer_interval_is_unsat() {
        let x = Var::int("x");
        let r = solve_conjunction(
            &[lit(CmpOp::Gt, Term::var(&x), 0), lit(CmpOp::Lt, Term::var(&x), 1)],
            None,
            None,
        );
        assert_eq!(r, LiaResult::Unsat);
    }

    #[test]
    fn parity_needs_integer_reasoning() {
        // 2x + 4y = 3 has rational but no integer solutions.
        let x = Var::int("x");
        let y = Var::int("y");
        let t = Term::var(&x).scale(2).add(&Term::var(&y).scale(4));
        assert_eq!(solve_conjunction(&[lit(CmpOp::Eq, t, 3)], None, None), LiaResult::Unsat);
        // 3 ≤ 2x ≤ 3 likewise.
        let t = Term::var(&x).scale(2);
        let r = solve_conjunction(&[lit(CmpOp::Ge, t.clone(), 3), lit(CmpOp::Le, t, 3)], None, None);
        assert_eq!(r, LiaResult::Unsat);
    }

    #[test]
    fn grey_shadow_case() {
        // 27 ≤ 11x + 13y ≤ 45, −10 ≤ 7x − 9y ≤ 4 (Pugh's example) has no integer point.
        let x = Var::int("x");
        let y = Var::int("y");
        let a = Term::var(&x).scale(11).add(&Term::var(&y).scale(13));
        let b = Term::var(&x).scale(7).sub(&Term::var(&y).scale(9));
        let lits = [
            lit(CmpOp::Ge, a.clone(), 27),
            lit(CmpOp::Le, a, 45),
            lit(CmpOp::Ge, b.clone(), -10),
            lit(CmpOp::Le, b, 4),
        ];
        assert_eq!(solve_conjunction(&lits, None, None), LiaResult::Unsat);
    }

    #[test]
    fn models_satisfy_and_follow_hints() {
        let x = Var::int("x");
        let y = Var::int("y");
        let lits = [
            lit(CmpOp::Ge, Term::var(&x), 1),
            lit(CmpOp::Le, Term::var(&x), 5000),
            lit(CmpOp::Eq, Term::var(&y).sub(&Term::var(&x)), 3),
        ];
        let LiaResult::Sat(m) = solve_conjunction(&lits, None, None) else { panic!() };
        assert!(lits.iter().all(|l| l.eval(&m).unwrap()));
        assert_eq!(m.int(&x), Some(&BigInt::from(1)));
        let mut hint = Model::new();
        hint.set_int(&x, 4000);
        let LiaResult::Sat(m) = solve_conjunction(&lits, Some(&hint), None) else { panic!() };
        assert_eq!(m.int(&x), Some(&BigInt::from(4000)));
        assert_eq!(m.int(&y), Some(&BigInt::from(4003)));
    }
}
