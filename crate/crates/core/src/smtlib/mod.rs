//! Reading and writing SMT-LIB2 HORN scripts.

mod parse;
mod print;
mod sexpr;

pub use parse::{
    parse_formula, parse_formula_named, parse_problem, parse_term, Diagnostic, ParseDiagnostics, ParseError, ParseErrorKind, Severity,
};
pub use print::{print_clause, print_problem, print_smt2, unique_names};
pub use sexpr::{read_all, SExpr, SourceSpan};
