use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adcl::chc::COUNTER_PREFIX;
use adcl::smtlib::parse_problem;
use adcl::witness::Witness;
use num_bigint::BigInt;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn adcl(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_adcl"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn first_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).lines().next().unwrap_or_default().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn running_example_is_unsat_with_a_valid_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let ex1 = data("ex1.smt2");
    let o = adcl(&["solve", path(&ex1), "--witness", path(&w), "--no-restarts"], &[]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "unsat");
    let text = std::fs::read_to_string(&w).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("clause ")).count(), 4);
    let o = adcl(&["check-witness", path(&ex1), path(&w)], &[]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "valid");
}

#[test]
fn sat_variant_is_sat_unless_sat_claims_are_off() {
    let f = data("ex1_sat.smt2");
    assert_eq!(first_line(&adcl(&["solve", path(&f)], &[])), "sat");
    assert_eq!(first_line(&adcl(&["solve", path(&f), "--no-sat"], &[])), "unknown");
    assert_eq!(first_line(&adcl(&["solve", path(&f)], &[("ADCL_NO_SAT", "true")])), "unknown");
}

#[test]
fn unsupported_input_is_unknown_with_a_diagnostic() {
    let o = adcl(&["solve", path(&data("div.smt2"))], &[]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "unknown");
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnsupportedFeature"));
}

#[test]
fn parse_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.smt2");
    std::fs::write(&f, "(set-logic HORN)\n(assert (forall ((X Int)) (=> (P X) false))").unwrap();
    let o = adcl(&["solve", path(&f)], &[]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_configurations_exit_nonzero() {
    let ex1 = data("ex1.smt2");
    assert!(!adcl(&["solve", path(&ex1), "--smt", "external"], &[]).status.success());
    assert!(!adcl(&["solve", path(&ex1), "--restart-scale", "0"], &[]).status.success());
    assert!(!adcl(&["solve", path(&ex1)], &[("ADCL_SEED", "minus one")]).status.success());
}

#[test]
fn instrumented_running_example_counts_10001_steps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.smt2");
    let w = dir.path().join("w.txt");
    assert!(adcl(&["instrument", path(&data("ex1.smt2")), path(&inst)], &[]).status.success());
    let o = adcl(&["solve", path(&inst), "--witness", path(&w)], &[]);
    assert_eq!(first_line(&o), "unsat");
    let (p, _) = parse_problem(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let witness = Witness::parse(&std::fs::read_to_string(&w).unwrap(), &p).unwrap();
    let query = witness.steps.last().unwrap();
    let c = witness.clause(&p, query.clause).unwrap();
    let counter = c.body_args().iter().find(|v| v.name().starts_with(COUNTER_PREFIX)).unwrap();
    assert_eq!(witness.models.last().unwrap().int(counter), Some(&BigInt::from(10001)));
}

#[test]
fn tampered_witnesses_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = data("ex1.smt2");
    let w = dir.path().join("w.txt");
    adcl(&["solve", path(&ex1), "--witness", path(&w), "--no-restarts"], &[]);
    let text = std::fs::read_to_string(&w).unwrap();
    for (from, to) in [("X2@3=10000", "X2@3=4999"), ("N@1=5000", "N@1=0")] {
        assert!(text.contains(from));
        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, text.replace(from, to)).unwrap();
        let o = adcl(&["check-witness", path(&ex1), path(&bad)], &[]);
        assert!(!o.status.success(), "{to} accepted");
        assert_eq!(first_line(&o), "invalid");
    }
    let garbage = dir.path().join("garbage.txt");
    std::fs::write(&garbage, "not a witness").unwrap();
    assert!(!adcl(&["check-witness", path(&ex1), path(&garbage)], &[]).status.success());
}

#[test]
fn expanded_witness_has_10001_resolution_steps() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = data("ex1.smt2");
    let (w, e) = (dir.path().join("w.txt"), dir.path().join("e.txt"));
    adcl(&["solve", path(&ex1), "--witness", path(&w)], &[]);
    assert!(adcl(&["expand-witness", path(&ex1), path(&w), path(&e)], &[]).status.success());
    let (p, _) = parse_problem(&std::fs::read_to_string(&ex1).unwrap()).unwrap();
    let expanded = Witness::parse(&std::fs::read_to_string(&e).unwrap(), &p).unwrap();
    assert_eq!(expanded.expanded_resolution_steps(), Some(10001));
    assert_eq!(first_line(&adcl(&["check-witness", path(&ex1), path(&e)], &[])), "valid");
    let o = adcl(&["expand-witness", path(&ex1), path(&w), path(&e), "--max-steps", "100"], &[]);
    assert!(!o.status.success());
}

#[test]
fn same_seed_gives_identical_logs_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = data("ex1.smt2");
    let run = |k: &str| {
        let (w, l) = (dir.path().join(format!("w{k}")), dir.path().join(format!("l{k}")));
        let o = adcl(&["solve", path(&ex1), "--seed", "7", "--restart-scale", "1", "--witness", path(&w), "--log", path(&l)], &[]);
        assert_eq!(first_line(&o), "unsat");
        (std::fs::read(&w).unwrap(), std::fs::read(&l).unwrap())
    };
    let (a, b) = (run("a"), run("b"));
    assert!(!a.1.is_empty());
    assert_eq!(a, b);
}
