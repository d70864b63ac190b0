use adcl::chc::{instrument_counter, ChcError, ClauseKind, COUNTER_PREFIX};
use adcl::smtlib::{parse_problem, print_problem, print_smt2, ParseErrorKind};
use adcl::formula::{CmpOp, Formula, Literal, Term, Var};

const EX1: &str = include_str!("data/ex1.smt2");
const EX1_SAT: &str = include_str!("data/ex1_sat.smt2");
const DIV: &str = include_str!("data/div.smt2");

#[test]
fn running_example_parses_into_three_clauses() {
    let (p, diags) = parse_problem(EX1).unwrap();
    assert!(!diags.has_errors());
    let kinds: Vec<ClauseKind> = p.clauses.iter().map(|c| c.kind()).collect();
    assert_eq!(kinds, [ClauseKind::Fact, ClauseKind::Rule { recursive: true }, ClauseKind::Query]);
    assert_eq!(p.predicates.len(), 1);
    let (q, _) = parse_problem(EX1_SAT).unwrap();
    assert_eq!(q.clauses[2].kind(), ClauseKind::Query);
}

#[test]
fn fact_arguments_become_equations() {
    let (p, _) = parse_problem(EX1).unwrap();
    assert_eq!(p.clauses[0].to_string(), "(=> (and (= Y1 0) (= Y2 5000)) (Inv Y1 Y2))");
}

#[test]
fn empty_script_gives_empty_problem() {
    let (p, _) = parse_problem("(set-logic HORN)\n(check-sat)\n").unwrap();
    assert!(p.clauses.is_empty());
    assert!(p.predicates.is_empty());
}

#[test]
fn unsupported_features_are_reported_with_positions() {
    let err = parse_problem(DIV).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnsupportedFeature("mod".into()));
    assert!(err.span.line > 1);
    let two_bodies = "(set-logic HORN)(declare-fun P (Int) Bool)\
        (assert (forall ((x Int) (y Int)) (=> (and (P x) (P y)) (P (+ x y)))))";
    let err = parse_problem(two_bodies).unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::UnsupportedFeature("multiple-body-atoms".into()));
    let nonlinear = "(set-logic HORN)(declare-fun P (Int) Bool)\
        (assert (forall ((x Int) (y Int)) (=> (and (P x) (= y (* x x))) (P y))))";
    assert!(parse_problem(nonlinear).unwrap_err().is_unsupported());
    let syntax = parse_problem("(assert (forall ((x Int)) (P x))").unwrap_err();
    assert_eq!(syntax.kind, ParseErrorKind::Syntax);
}

#[test]
fn printed_problems_parse_back_to_the_same_text() {
    for src in [EX1, EX1_SAT] {
        let (p, _) = parse_problem(src).unwrap();
        let once = print_problem(&p);
        let (q, _) = parse_problem(&once).unwrap();
        assert_eq!(print_problem(&q), once);
    }
}

#[test]
fn printing_formulas_declares_their_variables() {
    let x1 = Var::int("X1");
    let n = Var::int("N");
    let f = Formula::and([
        Formula::lit(Literal::cmp(CmpOp::Lt, Term::var(&x1), Term::constant(5000))),
        Formula::lit(Literal::cmp(CmpOp::Gt, Term::var(&n), Term::constant(0))),
    ]);
    let text = print_smt2(&f, &[]);
    assert!(text.contains("(declare-fun X1 () Int)"));
    assert!(text.contains("(declare-fun N () Int)"));
    assert!(text.contains("(assert (and (< X1 5000) (> N 0)))"));
    // Clashing names are disambiguated.
    let other = Var::int("X1");
    let g = Formula::lit(Literal::cmp(CmpOp::Eq, Term::var(&x1), Term::var(&other)));
    assert!(print_smt2(&g, &[]).contains("(= X1 X1_2)"));
}

#[test]
fn instrumentation_adds_a_step_counter() {
    let (p, _) = parse_problem(EX1).unwrap();
    let q = instrument_counter(&p).unwrap();
    assert_eq!(q.predicates[0].arity(), 3);
    let fact = q.clauses[0].to_string();
    assert!(fact.contains(&format!("(= {COUNTER_PREFIX}1 1)")), "{fact}");
    let rule = q.clauses[1].to_string();
    assert!(rule.contains(&format!("(= {COUNTER_PREFIX}1 (+ {COUNTER_PREFIX} 1))")), "{rule}");
    // The result is a valid script again.
    let (r, _) = parse_problem(&print_problem(&q)).unwrap();
    assert_eq!(r.clauses.len(), 3);
    // Instrumenting twice clashes with the reserved name.
    assert!(matches!(instrument_counter(&q), Err(ChcError::ReservedNameClash(_))));
}

#[test]
fn facts_only_problem_gets_only_initial_counters() {
    let src = "(set-logic HORN)(declare-fun P (Int) Bool)(assert (P 3))(assert (forall ((x Int)) (=> (> x 5) (P x))))";
    let (p, _) = parse_problem(src).unwrap();
    let q = instrument_counter(&p).unwrap();
    for c in &q.clauses {
        assert_eq!(c.kind(), ClauseKind::Fact);
        assert!(c.to_string().contains(&format!("(= {COUNTER_PREFIX}1 1)")));
    }
}
