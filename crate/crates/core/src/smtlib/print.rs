use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::chc::{Clause, Problem};
use crate::formula::{smt_symbol, Formula, Var};

/// Assigns each variable a distinct printable name, keeping the original
/// name where possible and appending `_2`, `_3`, … otherwise.
pub fn unique_names<'a>(vars: impl IntoIterator<Item = &'a Var>) -> BTreeMap<Var, String> {
    let mut taken = BTreeSet::new();
    let mut out = BTreeMap::new();
    for v in vars {
        if out.contains_key(v) {
            continue;
        }
        let mut name = v.name().to_string();
        let mut k = 2;
        while taken.contains(&name) {
            name = format!("{}_{k}", v.name());
            k += 1;
        }
        taken.insert(name.clone());
        out.insert(v.clone(), name);
    }
    out
}

/// A script declaring `decls` and asserting `psi`.
pub fn print_smt2(psi: &Formula, decls: &[Var]) -> String {
    let mut all: Vec<Var> = decls.to_vec();
    all.extend(psi.vars());
    let names = unique_names(&all);
    let mut out = String::new();
    for (v, n) in &names {
        writeln!(out, "(declare-fun {} () {})", smt_symbol(n), v.sort()).unwrap();
    }
    let name = |v: &Var| smt_symbol(&names[v]);
    writeln!(out, "(assert {})", psi.to_smt(&name)).unwrap();
    out
}

/// The clause as a universally quantified implication.
pub fn print_clause(c: &Clause) -> String {
    let vars = c.all_vars();
    let names = unique_names(&vars);
    let name = |v: &Var| smt_symbol(&names[v]);
    let body = c.to_smt(&name);
    if vars.is_empty() {
        return body;
    }
    let binders: Vec<String> = vars.iter().map(|v| format!("({} {})", name(v), v.sort())).collect();
    format!("(forall ({}) {})", binders.join(" "), body)
}

/// A complete HORN script for the problem.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::from("(set-logic HORN)\n");
    for pred in &p.predicates {
        let sorts: Vec<String> = pred.arg_sorts().iter().map(|s| s.to_string()).collect();
        writeln!(out, "(declare-fun {} ({}) Bool)", smt_symbol(pred.name()), sorts.join(" ")).unwrap();
    }
    for c in &p.clauses {
        writeln!(out, "(assert {})", print_clause(c)).unwrap();
    }
    out.push_str("(check-sat)\n");
    out
}
