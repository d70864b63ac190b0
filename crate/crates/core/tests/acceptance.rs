//! The acceptance checks, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line with its measurements.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use adcl::accel::{Accelerator, ClosedForm, Update};
use adcl::automata::implicant_key;
use adcl::chc::{Problem, COUNTER_PREFIX};
use adcl::driver::{self, SolveConfig};
use adcl::engine::{Blocked, Engine, EngineConfig, RestartPolicy, Rule, Verdict};
use adcl::formula::{sip_of_model, sip_of_renamed, CmpOp, Formula, Literal, Model, Subst, Term, Var};
use adcl::smt::{check_sat, CheckResult, SolverStack};
use adcl::smtlib::{parse_formula_named, parse_problem};
use adcl::witness::{check_witness, Witness};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EX1: &str = include_str!("data/ex1.smt2");
const EX1_SAT: &str = include_str!("data/ex1_sat.smt2");

fn load(src: &str) -> Problem {
    parse_problem(src).unwrap().0
}

fn golden() -> EngineConfig {
    EngineConfig { restarts: false, seed: 0, ..EngineConfig::default() }
}

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn equivalent(a: &Formula, b: &Formula) -> bool {
    check_sat(&Formula::and([a.clone(), b.negate()])).is_unsat()
        && check_sat(&Formula::and([b.clone(), a.negate()])).is_unsat()
}

#[test]
fn criterion_01_running_example_golden_run() {
    let p = load(EX1);
    let start = Instant::now();
    let mut e = Engine::new(&p, golden());
    let v = e.run();
    let elapsed = start.elapsed();
    let Verdict::Unsat(w) = v else { return report(1, false, format!("verdict {}", v.word())) };
    let learned = w.steps.iter().filter(|s| w.learned_def(s.clause).is_some()).count();
    let checked = check_witness(&p, &w, &mut SolverStack::new());
    let ok = elapsed < Duration::from_secs(1)
        && w.steps.len() == 4
        && learned == 2
        && e.rule_pattern() == "I,S,S,A,S,A,S,R"
        && checked.is_ok();
    report(1, ok, format!("unsat in {elapsed:?}, chain {} clauses ({learned} learned), log {}", w.steps.len(), e.rule_pattern()));
}

#[test]
fn criterion_02_instrumented_running_example_counts_10001_steps() {
    let start = Instant::now();
    let text = driver::instrument(EX1).unwrap();
    let config = SolveConfig { restarts: false, ..SolveConfig::default() };
    let r = driver::solve(&text, &config, None).unwrap();
    let elapsed = start.elapsed();
    let (Some(w), Some(p)) = (&r.witness, &r.problem) else { return report(2, false, format!("verdict {}", r.verdict)) };
    let query = w.steps.last().unwrap();
    let c = w.clause(p, query.clause).unwrap();
    let counter = c.body_args().iter().find(|v| v.name().starts_with(COUNTER_PREFIX)).unwrap();
    let value = w.models.last().unwrap().int(counter).cloned();
    let ok = value == Some(BigInt::from(10001)) && elapsed < Duration::from_secs(2);
    report(2, ok, format!("query counter {value:?} in {elapsed:?}"));
}

#[test]
fn criterion_03_sat_variant_is_proved() {
    let p = load(EX1_SAT);
    let start = Instant::now();
    let mut e = Engine::new(&p, golden());
    let v = e.run();
    let elapsed = start.elapsed();
    let backtracks = e.transitions().iter().filter(|t| t.rule == Rule::Backtrack).count();
    let proved = e.transitions().last().map(|t| t.rule) == Some(Rule::Prove);
    let ok = v == Verdict::Sat
        && proved
        && e.approximation_count() == 0
        && backtracks == 3
        && elapsed < Duration::from_secs(1);
    report(
        3,
        ok,
        format!("{} in {elapsed:?}, {backtracks} backtracks, {} approximation events, log {}", v.word(), e.approximation_count(), e.rule_pattern()),
    );
}

/// The sip variant of the running example's rule under given arguments.
fn rule_variant(p: &Problem, values: [i64; 4]) -> adcl::chc::Clause {
    let rule = &p.clauses[1];
    let mut m = Model::new();
    for (v, k) in rule.body_args().iter().chain(rule.head_args()).zip(values) {
        m.set_int(v, k);
    }
    rule.with_cond(10, sip_of_model(&rule.cond, &m).unwrap())
}

fn matches_golden(a: &adcl::accel::AcceleratedClause, expected: &str, heads: [i64; 2]) -> bool {
    let (x, y) = (a.clause.body_args(), a.clause.head_args());
    let env: BTreeMap<String, Var> = [("X1", &x[0]), ("X2", &x[1]), ("Y1", &y[0]), ("Y2", &y[1]), ("N", &a.counter)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    let n = Term::var(&a.counter);
    let forms = vec![
        Update::Int(Term::var(&x[0]).add(&n.scale(heads[0]))),
        Update::Int(Term::var(&x[1]).add(&n.scale(heads[1]))),
    ];
    let forms = forms
        .into_iter()
        .map(|u| match u {
            Update::Int(t) => Update::Int(Term::from_poly(&t.to_poly())),
            b => b,
        })
        .collect::<Vec<_>>();
    let normal = |us: &[Update]| -> Vec<Update> {
        us.iter()
            .map(|u| match u {
                Update::Int(t) => Update::Int(Term::from_poly(&t.to_poly())),
                b => b.clone(),
            })
            .collect()
    };
    equivalent(&a.clause.cond, &parse_formula_named(expected, &env).unwrap()) && normal(&a.head_forms) == forms
}

#[test]
fn criterion_04_acceleration_golden_values() {
    let p = load(EX1);
    let mut acc = Accelerator::default();
    let first = acc.accelerate(&rule_variant(&p, [0, 5000, 1, 5000])).unwrap();
    let second = acc.accelerate(&rule_variant(&p, [5000, 5000, 5001, 5001])).unwrap();
    let ok1 = matches_golden(&first, "(and (> N 0) (< (+ X1 N) 5001) (= Y1 (+ X1 N)) (= Y2 X2))", [1, 0]);
    let ok2 = matches_golden(&second, "(and (> N 0) (>= X1 5000) (= Y1 (+ X1 N)) (= Y2 (+ X2 N)))", [1, 1]);
    report(4, ok1 && ok2, format!("first loop {ok1}, second loop {ok2}"));
}

#[test]
fn criterion_05_acceleration_matches_unrollings() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut acc = Accelerator::default();
    let (mut done, mut refused, mut failures) = (0, 0, Vec::new());
    while done < 100 && done + refused < 5000 {
        let c = common::random_loop(&mut rng);
        let Ok(a) = acc.accelerate(&c) else {
            refused += 1;
            continue;
        };
        for n in 1..=3 {
            if !common::unrolling_matches(&c, &a, n) {
                failures.push(format!("n = {n}: {c}"));
            }
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    let ok = done == 100 && failures.is_empty() && elapsed < Duration::from_secs(60);
    report(5, ok, format!("{done} clauses x 3 unrollings, {} failures, {refused} refused, {elapsed:?} {failures:?}", failures.len()));
}

#[test]
fn criterion_06_step_query_of_the_worked_example() {
    let p = load(EX1);
    let rule = p.clauses[1].clone();
    let mut e = Engine::new(&p, golden());
    assert!(e.try_step() && e.try_step());
    let psi1 = e.trace()[1].clone();
    assert!(e.try_accelerate());
    let blocked = [Blocked { clause: rule.id, symbol: psi1.symbol, cond: Formula::and(psi1.implicant.iter().cloned().map(Formula::Lit)) }];
    let q = e.build_step_smt(&rule, &blocked).unwrap();
    let query = Formula::and([e.trace_formula(), q.formula.clone()]);
    let fact = &e.trace()[0].renamed;
    let learned = &e.trace()[1];
    let counter = learned.vars[e.counter(learned.clause).unwrap()].clone();
    let rv = |name: &str| q.renaming[rule.all_vars().iter().find(|v| v.name() == name).unwrap()].clone();
    let env: BTreeMap<String, Var> = [
        ("X1", fact.head_args()[0].clone()),
        ("X2", fact.head_args()[1].clone()),
        ("N", counter),
        ("X1p", learned.renamed.head_args()[0].clone()),
        ("X2p", learned.renamed.head_args()[1].clone()),
        ("Y1", rv("Y1")),
        ("Y2", rv("Y2")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    // The simplified formula, plus the head equation of the normalized rule.
    let simplified = parse_formula_named(
        "(and (= X1 0) (= X2 5000) (= N 5000) (= X1p 5000) (= X2p 5000) (= Y2 5001) (= Y1 (+ X1p 1)))",
        &env,
    )
    .unwrap();
    let same = equivalent(&query, &simplified);
    let CheckResult::SatWith(m) = check_sat(&query) else { return report(6, false, "no model".into()) };
    let theta = Subst::renaming(q.renaming.iter()).unwrap();
    let sip = sip_of_renamed(&rule.cond, &theta, &m).unwrap();
    let var = |name: &str| rule.all_vars().into_iter().find(|v| v.name() == name).unwrap();
    let psi2 = [
        Literal::cmp(CmpOp::Ge, Term::var(&var("X1")), Term::constant(5000)),
        Literal::cmp(CmpOp::Eq, Term::var(&var("Y2")), Term::var(&var("X2")).add(&Term::constant(1))),
        Literal::cmp(CmpOp::Eq, Term::var(&var("Y1")), Term::var(&var("X1")).add(&Term::constant(1))),
    ];
    let exact = implicant_key(&sip) == implicant_key(&psi2);
    let y2 = m.int(&rv("Y2")).cloned();
    report(6, same && exact, format!("equivalent {same}, implicant matches {exact}, Y2 = {y2:?}"));
}

#[test]
fn criterion_07_solver_agrees_with_box_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ints: Vec<Var> = (0..3).map(|i| Var::int(format!("v{i}"))).collect();
    let bools = vec![Var::boolean("b")];
    let (mut sat, mut unsat, mut discrepancies) = (0, 0, Vec::new());
    for k in 0..500 {
        let f = Formula::and([common::random_formula(&mut rng, &ints, &bools, 3), common::box_constraint(&ints, -8, 8)]);
        let oracle = common::box_model(&f, &ints, &bools, -8, 8);
        match (check_sat(&f), oracle) {
            (CheckResult::SatWith(m), Some(_)) if f.eval(&m) == Ok(true) => sat += 1,
            (CheckResult::Unsat, None) => unsat += 1,
            (r, o) => discrepancies.push(format!("#{k}: solver {r:?}, oracle {}", o.is_some())),
        }
    }
    report(7, discrepancies.is_empty(), format!("{sat} sat, {unsat} unsat, discrepancies {discrepancies:?}"));
}

#[test]
fn criterion_08_automata_agree_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut queries, mut discrepancies) = (0, Vec::new());
    for round in 0..200 {
        let cfg = common::lang::random_config(&mut rng);
        let ids: Vec<u64> = cfg.res.keys().copied().collect();
        for _ in 0..4 {
            let max = if rng.gen_bool(0.5) { 1 } else { 3 };
            let w = common::lang::random_word(&mut rng, &ids, max);
            let (redundant, covered) = cfg.oracle(&w, 6);
            queries += 1;
            if cfg.map.accel_redundant(&w) != redundant || cfg.map.covered_check(&w) != covered {
                discrepancies.push(format!("round {round}, word {w:?}"));
            }
        }
    }
    report(8, discrepancies.is_empty(), format!("200 configurations, {queries} words, discrepancies {discrepancies:?}"));
}

#[test]
fn criterion_09_and_11_soundness_fuzz_with_checked_witnesses() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut unsat, mut sat, mut unknown) = (0, 0, 0);
    let (mut unsound, mut bad_witnesses, mut missed) = (Vec::new(), Vec::new(), Vec::new());
    for round in 0..300u64 {
        let p = common::fuzz::random_problem(&mut rng);
        let oracle = common::fuzz::shortest_refutation(&p);
        let config = EngineConfig { max_transitions: Some(200), seed: round, ..EngineConfig::default() };
        let mut e = Engine::new(&p, config);
        let v = e.run();
        match &v {
            Verdict::Unsat(w) => {
                unsat += 1;
                if oracle.is_none() {
                    unsound.push(format!("round {round}: false unsat"));
                }
                let mut w = w.clone();
                let checked = e
                    .expand_witness(&w, 100_000)
                    .map_err(|err| err.to_string())
                    .and_then(|g| {
                        w.expanded = Some(g);
                        check_witness(&p, &w, &mut SolverStack::new())
                    });
                if let Err(err) = checked {
                    bad_witnesses.push(format!("round {round}: {err}"));
                }
            }
            Verdict::Sat => {
                sat += 1;
                if oracle.is_some() {
                    unsound.push(format!("round {round}: false sat"));
                }
            }
            Verdict::Unknown(_) => unknown += 1,
        }
        if oracle.is_some_and(|n| n <= 6) && !matches!(v, Verdict::Unsat(_)) {
            missed.push(round);
        }
    }
    let elapsed = start.elapsed();
    report(
        9,
        unsound.is_empty(),
        format!("{unsat} unsat, {sat} sat, {unknown} unknown in {elapsed:?}; unsound {unsound:?}; short refutations missed: {}", missed.len()),
    );
    report(11, bad_witnesses.is_empty(), format!("{unsat} fuzz witnesses expanded and checked, failures {bad_witnesses:?}"));
}

#[test]
fn criterion_10_luby_schedule() {
    let schedule = RestartPolicy::new(10).schedule(8);
    report(10, schedule == [10, 10, 20, 10, 10, 20, 40, 10], format!("{schedule:?}"));
}

#[test]
fn criterion_11_running_example_expands_to_10001_steps() {
    let p = load(EX1);
    let mut e = Engine::new(&p, golden());
    let Verdict::Unsat(mut w) = e.run() else { return report(11, false, "no refutation".into()) };
    let start = Instant::now();
    let ground = e.expand_witness(&w, 100_000).unwrap();
    w.expanded = Some(ground);
    let text = w.write(&p);
    let back = Witness::parse(&text, &p).unwrap();
    let checked = check_witness(&p, &back, &mut SolverStack::new());
    let steps = back.expanded_resolution_steps();
    let ok = checked.is_ok() && steps == Some(10001);
    report(11, ok, format!("expanded derivation with {steps:?} resolution steps, check {checked:?}, {:?}", start.elapsed()));
}

#[test]
fn criterion_closed_forms_are_reported() {
    // Guards the golden closed-form classes used above.
    let p = load(EX1);
    let a = Accelerator::default().accelerate(&rule_variant(&p, [5000, 5000, 5001, 5001])).unwrap();
    let one = BigInt::from(1);
    assert_eq!(a.closed_forms, vec![ClosedForm::AffineCounter(one.clone()), ClosedForm::AffineCounter(one)]);
}
