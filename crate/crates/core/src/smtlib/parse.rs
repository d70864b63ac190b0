use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::sexpr::{read_all, SExpr, SourceSpan};
use crate::chc::{normalize, ChcError, Problem, PredicateSymbol, RawArg, RawAtom, RawClause};
use crate::formula::{to_nnf, CmpOp, Formula, FormulaError, RawFormula, RawTerm, Sort, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnsupportedFeature(String),
    InvalidClause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn syntax(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError { kind: ParseErrorKind::Syntax, span, message: message.into() }
    }

    fn unsupported(span: SourceSpan, feature: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::UnsupportedFeature(feature.to_string()),
            span,
            message: format!("unsupported feature: {feature}"),
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self.kind, ParseErrorKind::UnsupportedFeature(_))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub items: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    pub fn has_errors(&self) -> bool {
        self.items.iter().any(|d| d.severity == Severity::Error)
    }

    fn warn(&mut self, span: SourceSpan, message: impl Into<String>) {
        self.items.push(Diagnostic { severity: Severity::Warning, span, message: message.into() });
    }
}

/// Intermediate expression: theory terms and formulas, plus the clause
/// structure (predicate atoms under conjunction, implication and negation).
#[derive(Debug, Clone)]
enum E {
    Int(RawTerm),
    Bool(RawFormula),
    Atom(RawAtom),
    And(Vec<E>),
    Implies(Box<E>, Box<E>),
    Not(Box<E>),
}

struct Macro {
    params: Vec<(String, Sort)>,
    body: SExpr,
}

#[derive(Default)]
struct Ctx {
    preds: Vec<PredicateSymbol>,
    macros: BTreeMap<String, Macro>,
}

type Env = Vec<(String, E)>;

fn lookup<'a>(env: &'a Env, name: &str) -> Option<&'a E> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, e)| e)
}

fn formula_error(span: SourceSpan, e: FormulaError) -> ParseError {
    match e {
        FormulaError::UnsupportedOperator(op) => ParseError::unsupported(span, &op),
        FormulaError::NonLinear(_) => ParseError::unsupported(span, "non-linear arithmetic"),
        other => ParseError::syntax(span, other.to_string()),
    }
}

fn parse_sort(e: &SExpr) -> Result<Sort, ParseError> {
    match e.symbol() {
        Some("Int") => Ok(Sort::Int),
        Some("Bool") => Ok(Sort::Bool),
        Some(other) => Err(ParseError::unsupported(e.span(), &format!("sort {other}"))),
        None => Err(ParseError::unsupported(e.span(), "parametric sort")),
    }
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

impl Ctx {
    fn pred(&self, name: &str) -> Option<&PredicateSymbol> {
        self.preds.iter().find(|p| p.name() == name)
    }

    fn as_term(&self, e: E, span: SourceSpan) -> Result<RawTerm, ParseError> {
        match e {
            E::Int(t) => Ok(t),
            _ => Err(ParseError::syntax(span, "expected an Int term")),
        }
    }

    fn as_form(&self, e: E, span: SourceSpan) -> Result<RawFormula, ParseError> {
        match e {
            E::Bool(f) => Ok(f),
            E::Int(_) => Err(ParseError::syntax(span, "expected a Bool formula")),
            _ => Err(ParseError::unsupported(span, "predicate atom inside a theory formula")),
        }
    }

    fn bind_vars(&self, bindings: &SExpr, env: &mut Env) -> Result<Vec<Var>, ParseError> {
        let list = bindings
            .list()
            .ok_or_else(|| ParseError::syntax(bindings.span(), "expected a variable list"))?;
        let mut vars = Vec::new();
        for b in list {
            let pair = b.list().filter(|p| p.len() == 2);
            let (name, sort) = match pair {
                Some(p) => (
                    p[0].symbol().ok_or_else(|| ParseError::syntax(p[0].span(), "expected a symbol"))?,
                    parse_sort(&p[1])?,
                ),
                None => return Err(ParseError::syntax(b.span(), "expected (name sort)")),
            };
            let v = Var::fresh(name, sort);
            let e = match sort {
                Sort::Int => E::Int(RawTerm::Var(v.clone())),
                Sort::Bool => E::Bool(RawFormula::Var(v.clone())),
            };
            env.push((name.to_string(), e));
            vars.push(v);
        }
        Ok(vars)
    }

    fn conv(&self, e: &SExpr, env: &mut Env) -> Result<E, ParseError> {
        let span = e.span();
        match e {
            SExpr::Str { .. } => Err(ParseError::syntax(span, "unexpected string literal")),
            SExpr::Atom { text, quoted, .. } => {
                if !quoted {
                    if is_numeral(text) {
                        let n: BigInt = text.parse().expect("numeral");
                        return Ok(E::Int(RawTerm::Const(n)));
                    }
                    if text == "true" || text == "false" {
                        return Ok(E::Bool(RawFormula::Const(text == "true")));
                    }
                    if text.contains('.') && text.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(ParseError::unsupported(span, "real numbers"));
                    }
                    if text.starts_with('#') {
                        return Err(ParseError::unsupported(span, "bit-vector literals"));
                    }
                }
                if let Some(b) = lookup(env, text) {
                    return Ok(b.clone());
                }
                if let Some(p) = self.pred(text) {
                    if p.arity() == 0 {
                        return Ok(E::Atom(RawAtom { pred: p.clone(), args: vec![] }));
                    }
                }
                if self.macros.contains_key(text.as_str()) {
                    return self.expand_macro(text, &[], span, env);
                }
                Err(ParseError::syntax(span, format!("unknown symbol `{text}`")))
            }
            SExpr::List { items, .. } => {
                let head = match items.first() {
                    None => return Err(ParseError::syntax(span, "empty application")),
                    Some(h) => h,
                };
                let name = match head {
                    SExpr::Atom { text, .. } => text.as_str(),
                    _ => return Err(ParseError::unsupported(head.span(), "indexed or higher-order application")),
                };
                let args = &items[1..];
                self.conv_app(name, args, span, env)
            }
        }
    }

    fn expand_macro(&self, name: &str, args: &[SExpr], span: SourceSpan, env: &mut Env) -> Result<E, ParseError> {
        let m = &self.macros[name];
        if m.params.len() != args.len() {
            return Err(ParseError::syntax(span, format!("`{name}` expects {} arguments", m.params.len())));
        }
        let mut inner: Env = Vec::new();
        for ((p, sort), a) in m.params.iter().zip(args) {
            let v = self.conv(a, env)?;
            let ok = matches!((sort, &v), (Sort::Int, E::Int(_)) | (Sort::Bool, E::Bool(_)));
            if !ok {
                return Err(ParseError::syntax(a.span(), format!("argument `{p}` of `{name}` has the wrong sort")));
            }
            inner.push((p.clone(), v));
        }
        self.conv(&m.body, &mut inner)
    }

    fn terms(&self, args: &[SExpr], env: &mut Env) -> Result<Vec<RawTerm>, ParseError> {
        args.iter()
            .map(|a| {
                let e = self.conv(a, env)?;
                self.as_term(e, a.span())
            })
            .collect()
    }

    fn forms(&self, args: &[SExpr], env: &mut Env) -> Result<Vec<RawFormula>, ParseError> {
        args.iter()
            .map(|a| {
                let e = self.conv(a, env)?;
                self.as_form(e, a.span())
            })
            .collect()
    }

    fn conv_app(&self, name: &str, args: &[SExpr], span: SourceSpan, env: &mut Env) -> Result<E, ParseError> {
        let need = |n: usize| -> Result<(), ParseError> {
            if args.len() < n {
                Err(ParseError::syntax(span, format!("`{name}` needs at least {n} arguments")))
            } else {
                Ok(())
            }
        };
        let exact = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                Err(ParseError::syntax(span, format!("`{name}` takes {n} arguments")))
            } else {
                Ok(())
            }
        };
        if let Some(b) = lookup(env, name) {
            if !args.is_empty() {
                return Err(ParseError::syntax(span, format!("`{name}` is not a function")));
            }
            return Ok(b.clone());
        }
        match name {
            "let" => {
                exact(2)?;
                let bindings = args[0]
                    .list()
                    .ok_or_else(|| ParseError::syntax(args[0].span(), "expected let bindings"))?;
                let mut bound = Vec::new();
                for b in bindings {
                    let pair = b
                        .list()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| ParseError::syntax(b.span(), "expected (name expr)"))?;
                    let n = pair[0]
                        .symbol()
                        .ok_or_else(|| ParseError::syntax(pair[0].span(), "expected a symbol"))?;
                    bound.push((n.to_string(), self.conv(&pair[1], env)?));
                }
                let depth = env.len();
                env.extend(bound);
                let r = self.conv(&args[1], env);
                env.truncate(depth);
                r
            }
            "!" => {
                need(1)?;
                self.conv(&args[0], env)
            }
            "forall" | "exists" => Err(ParseError::unsupported(span, "quantifier-alternation")),
            "and" => {
                let parts = args.iter().map(|a| self.conv(a, env)).collect::<Result<Vec<_>, _>>()?;
                if parts.iter().all(|p| matches!(p, E::Bool(_))) {
                    let fs = parts.into_iter().map(|p| match p {
                        E::Bool(f) => f,
                        _ => unreachable!(),
                    });
                    Ok(E::Bool(RawFormula::And(fs.collect())))
                } else if let Some(i) = parts.iter().position(|p| matches!(p, E::Int(_))) {
                    Err(ParseError::syntax(args[i].span(), "expected a Bool formula"))
                } else {
                    Ok(E::And(parts))
                }
            }
            "=>" => {
                need(2)?;
                let mut parts = args.iter().map(|a| self.conv(a, env)).collect::<Result<Vec<_>, _>>()?;
                let mut acc = parts.pop().expect("two arguments");
                while let Some(p) = parts.pop() {
                    acc = match (p, acc) {
                        (E::Bool(a), E::Bool(b)) => E::Bool(RawFormula::Implies(Box::new(a), Box::new(b))),
                        (E::Int(_), _) | (_, E::Int(_)) => {
                            return Err(ParseError::syntax(span, "expected Bool operands"));
                        }
                        (a, b) => E::Implies(Box::new(a), Box::new(b)),
                    };
                }
                Ok(acc)
            }
            "not" => {
                exact(1)?;
                match self.conv(&args[0], env)? {
                    E::Bool(f) => Ok(E::Bool(RawFormula::Not(Box::new(f)))),
                    E::Int(_) => Err(ParseError::syntax(span, "expected a Bool operand")),
                    other => Ok(E::Not(Box::new(other))),
                }
            }
            "or" => Ok(E::Bool(RawFormula::Or(self.forms(args, env)?))),
            "xor" => {
                need(2)?;
                let fs = self.forms(args, env)?;
                let mut it = fs.into_iter();
                let first = it.next().expect("two arguments");
                Ok(E::Bool(it.fold(first, |a, b| RawFormula::Xor(Box::new(a), Box::new(b)))))
            }
            "=" | "distinct" => {
                need(2)?;
                let parts = args.iter().map(|a| self.conv(a, env)).collect::<Result<Vec<_>, _>>()?;
                if parts.iter().all(|p| matches!(p, E::Int(_))) {
                    let ts: Vec<RawTerm> = parts
                        .into_iter()
                        .map(|p| match p {
                            E::Int(t) => t,
                            _ => unreachable!(),
                        })
                        .collect();
                    if name == "distinct" {
                        return Ok(E::Bool(RawFormula::Distinct(ts)));
                    }
                    let chain = ts
                        .windows(2)
                        .map(|w| RawFormula::Cmp(CmpOp::Eq, w[0].clone(), w[1].clone()))
                        .collect();
                    return Ok(E::Bool(RawFormula::And(chain)));
                }
                let mut fs = Vec::new();
                for (p, a) in parts.into_iter().zip(args) {
                    fs.push(self.as_form(p, a.span())?);
                }
                let pairs: Vec<RawFormula> = if name == "=" {
                    fs.windows(2)
                        .map(|w| RawFormula::Iff(Box::new(w[0].clone()), Box::new(w[1].clone())))
                        .collect()
                } else {
                    let mut out = Vec::new();
                    for i in 0..fs.len() {
                        for j in i + 1..fs.len() {
                            out.push(RawFormula::Xor(Box::new(fs[i].clone()), Box::new(fs[j].clone())));
                        }
                    }
                    out
                };
                Ok(E::Bool(RawFormula::And(pairs)))
            }
            "ite" => {
                exact(3)?;
                let c = self.conv(&args[0], env)?;
                let c = self.as_form(c, args[0].span())?;
                let a = self.conv(&args[1], env)?;
                let b = self.conv(&args[2], env)?;
                match (a, b) {
                    (E::Int(a), E::Int(b)) => Ok(E::Int(RawTerm::Ite(Box::new(c), Box::new(a), Box::new(b)))),
                    (E::Bool(a), E::Bool(b)) => {
                        Ok(E::Bool(RawFormula::Ite(Box::new(c), Box::new(a), Box::new(b))))
                    }
                    _ => Err(ParseError::unsupported(span, "ite over predicate atoms or mixed sorts")),
                }
            }
            "<" | "<=" | ">" | ">=" => {
                need(2)?;
                let op = match name {
                    "<" => CmpOp::Lt,
                    "<=" => CmpOp::Le,
                    ">" => CmpOp::Gt,
                    _ => CmpOp::Ge,
                };
                let ts = self.terms(args, env)?;
                let chain: Vec<RawFormula> =
                    ts.windows(2).map(|w| RawFormula::Cmp(op, w[0].clone(), w[1].clone())).collect();
                Ok(E::Bool(if chain.len() == 1 {
                    chain.into_iter().next().unwrap()
                } else {
                    RawFormula::And(chain)
                }))
            }
            "+" => {
                need(1)?;
                Ok(E::Int(RawTerm::Add(self.terms(args, env)?)))
            }
            "-" => {
                need(1)?;
                Ok(E::Int(RawTerm::Sub(self.terms(args, env)?)))
            }
            "*" => {
                need(1)?;
                Ok(E::Int(RawTerm::Mul(self.terms(args, env)?)))
            }
            "div" | "mod" => {
                exact(2)?;
                Err(ParseError::unsupported(span, name))
            }
            "abs" => {
                exact(1)?;
                let mut ts = self.terms(args, env)?;
                Ok(E::Int(RawTerm::Abs(Box::new(ts.remove(0)))))
            }
            _ => {
                if let Some(p) = self.pred(name) {
                    if args.len() != p.arity() {
                        return Err(ParseError::syntax(
                            span,
                            format!("`{name}` applied to {} arguments, declared with {}", args.len(), p.arity()),
                        ));
                    }
                    let mut raw_args = Vec::new();
                    for (a, sort) in args.iter().zip(p.arg_sorts()) {
                        let e = self.conv(a, env)?;
                        raw_args.push(match sort {
                            Sort::Int => RawArg::Int(self.as_term(e, a.span())?),
                            Sort::Bool => RawArg::Bool(self.as_form(e, a.span())?),
                        });
                    }
                    return Ok(E::Atom(RawAtom { pred: p.clone(), args: raw_args }));
                }
                if self.macros.contains_key(name) {
                    return self.expand_macro(name, args, span, env);
                }
                Err(ParseError::syntax(span, format!("unknown function `{name}`")))
            }
        }
    }

    /// Splits an assertion body into premises and an optional head atom.
    fn split_clause(&self, e: E, premise: &mut Vec<E>, span: SourceSpan) -> Result<Option<RawAtom>, ParseError> {
        match e {
            E::Implies(p, c) => {
                premise.push(*p);
                self.split_clause(*c, premise, span)
            }
            E::Atom(a) => Ok(Some(a)),
            E::Bool(RawFormula::Implies(p, c)) => {
                premise.push(E::Bool(*p));
                self.split_clause(E::Bool(*c), premise, span)
            }
            E::Bool(RawFormula::Const(false)) => Ok(None),
            E::Bool(f) => {
                premise.push(E::Bool(RawFormula::Not(Box::new(f))));
                Ok(None)
            }
            E::Not(p) => {
                premise.push(*p);
                Ok(None)
            }
            E::And(_) => Err(ParseError::unsupported(span, "conjunctive clause head")),
            E::Int(_) => Err(ParseError::syntax(span, "expected a Bool formula")),
        }
    }

    fn flatten_premise(
        &self,
        e: E,
        atoms: &mut Vec<RawAtom>,
        theory: &mut Vec<RawFormula>,
        span: SourceSpan,
    ) -> Result<(), ParseError> {
        match e {
            E::And(es) => {
                for e in es {
                    self.flatten_premise(e, atoms, theory, span)?;
                }
                Ok(())
            }
            E::Atom(a) => {
                atoms.push(a);
                Ok(())
            }
            E::Bool(f) => {
                theory.push(f);
                Ok(())
            }
            E::Int(_) => Err(ParseError::syntax(span, "expected a Bool formula")),
            E::Implies(..) | E::Not(_) => Err(ParseError::unsupported(span, "negated predicate atom in clause body")),
        }
    }

    fn assertion(&self, body: &SExpr) -> Result<RawClause, ParseError> {
        let span = body.span();
        let mut env: Env = Vec::new();
        let mut e = body;
        while e.head() == Some("!") {
            e = &e.list().unwrap()[1];
        }
        let mut premise = Vec::new();
        let head = match e.head() {
            Some("forall") => {
                let items = e.list().unwrap();
                if items.len() != 3 {
                    return Err(ParseError::syntax(span, "malformed forall"));
                }
                self.bind_vars(&items[1], &mut env)?;
                let inner = self.conv(&items[2], &mut env)?;
                self.split_clause(inner, &mut premise, span)?
            }
            Some("not") if e.list().unwrap().get(1).and_then(SExpr::head) == Some("exists") => {
                let ex = &e.list().unwrap()[1];
                let items = ex.list().unwrap();
                if items.len() != 3 {
                    return Err(ParseError::syntax(span, "malformed exists"));
                }
                self.bind_vars(&items[1], &mut env)?;
                premise.push(self.conv(&items[2], &mut env)?);
                None
            }
            _ => {
                let inner = self.conv(e, &mut env)?;
                self.split_clause(inner, &mut premise, span)?
            }
        };
        let mut atoms = Vec::new();
        let mut theory = Vec::new();
        for p in premise {
            self.flatten_premise(p, &mut atoms, &mut theory, span)?;
        }
        if atoms.len() > 1 {
            return Err(ParseError::unsupported(span, "multiple-body-atoms"));
        }
        Ok(RawClause { body: atoms, cond: RawFormula::And(theory), head })
    }
}

fn clause_error(span: SourceSpan, e: ChcError) -> ParseError {
    match e {
        ChcError::Formula(f) => formula_error(span, f),
        ChcError::NonLinearClause => ParseError::unsupported(span, "multiple-body-atoms"),
        other => ParseError { kind: ParseErrorKind::InvalidClause, span, message: other.to_string() },
    }
}

/// Parses a CHC-COMP style HORN script.
pub fn parse_problem(text: &str) -> Result<(Problem, ParseDiagnostics), ParseError> {
    let exprs = read_all(text).map_err(|e| ParseError::syntax(e.span, e.message))?;
    let mut ctx = Ctx::default();
    let mut diags = ParseDiagnostics::default();
    let mut clauses = Vec::new();
    for cmd in &exprs {
        let span = cmd.span();
        let items = cmd
            .list()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| ParseError::syntax(span, "expected a command"))?;
        let name = cmd.head().ok_or_else(|| ParseError::syntax(span, "expected a command name"))?;
        match name {
            "set-logic" => {
                if items.get(1).and_then(SExpr::symbol) != Some("HORN") {
                    diags.warn(span, "logic is not HORN; reading the script as HORN anyway");
                }
            }
            "set-info" | "set-option" | "get-info" | "echo" | "get-model" | "get-proof" | "exit" => {}
            "declare-fun" => {
                if items.len() != 4 {
                    return Err(ParseError::syntax(span, "malformed declare-fun"));
                }
                let pname = items[1].symbol().ok_or_else(|| ParseError::syntax(items[1].span(), "expected a name"))?;
                let sorts = items[2]
                    .list()
                    .ok_or_else(|| ParseError::syntax(items[2].span(), "expected a sort list"))?
                    .iter()
                    .map(parse_sort)
                    .collect::<Result<Vec<_>, _>>()?;
                if !items[3].is_atom("Bool") {
                    return Err(ParseError::unsupported(span, "uninterpreted functions"));
                }
                if ctx.pred(pname).is_some() {
                    return Err(ParseError::syntax(span, format!("`{pname}` declared twice")));
                }
                let id = ctx.preds.len();
                ctx.preds.push(PredicateSymbol::new(id, pname, sorts));
            }
            "declare-const" => return Err(ParseError::unsupported(span, "declare-const")),
            "define-fun" => {
                if items.len() != 5 {
                    return Err(ParseError::syntax(span, "malformed define-fun"));
                }
                let fname = items[1].symbol().ok_or_else(|| ParseError::syntax(items[1].span(), "expected a name"))?;
                let mut params = Vec::new();
                for p in items[2].list().ok_or_else(|| ParseError::syntax(items[2].span(), "expected parameters"))? {
                    let pair = p
                        .list()
                        .filter(|l| l.len() == 2)
                        .ok_or_else(|| ParseError::syntax(p.span(), "expected (name sort)"))?;
                    let n = pair[0].symbol().ok_or_else(|| ParseError::syntax(pair[0].span(), "expected a name"))?;
                    params.push((n.to_string(), parse_sort(&pair[1])?));
                }
                parse_sort(&items[3])?;
                ctx.macros.insert(fname.to_string(), Macro { params, body: items[4].clone() });
            }
            "define-fun-rec" | "define-funs-rec" | "declare-sort" | "define-sort" | "declare-datatypes"
            | "declare-datatype" => return Err(ParseError::unsupported(span, name)),
            "assert" => {
                if items.len() != 2 {
                    return Err(ParseError::syntax(span, "malformed assert"));
                }
                let raw = ctx.assertion(&items[1])?;
                let id = clauses.len() as u64;
                let clause = normalize(&raw, id).map_err(|e| clause_error(span, e))?;
                if !clause.cond.is_linear() {
                    return Err(ParseError::unsupported(span, "non-linear arithmetic"));
                }
                clauses.push(clause);
            }
            "check-sat" => break,
            other => return Err(ParseError::syntax(span, format!("unknown command `{other}`"))),
        }
    }
    Ok((Problem::new(ctx.preds, clauses), diags))
}

fn env_of(vars: &[Var]) -> Env {
    env_named(vars.iter().map(|v| (v.name(), v)))
}

fn env_named<'a>(vars: impl Iterator<Item = (&'a str, &'a Var)>) -> Env {
    vars.map(|(name, v)| {
            let e = match v.sort() {
                Sort::Int => E::Int(RawTerm::Var(v.clone())),
                Sort::Bool => E::Bool(RawFormula::Var(v.clone())),
            };
            (name.to_string(), e)
        })
        .collect()
}

/// Parses a single formula whose free symbols are the names of `vars`.
/// Non-linear products are accepted here.
pub fn parse_formula(text: &str, vars: &[Var]) -> Result<Formula, ParseError> {
    formula_in_env(text, env_of(vars))
}

/// Like [`parse_formula`], with explicit names for the variables.
pub fn parse_formula_named(text: &str, names: &BTreeMap<String, Var>) -> Result<Formula, ParseError> {
    formula_in_env(text, env_named(names.iter().map(|(n, v)| (n.as_str(), v))))
}

fn formula_in_env(text: &str, mut env: Env) -> Result<Formula, ParseError> {
    let exprs = read_all(text).map_err(|e| ParseError::syntax(e.span, e.message))?;
    let [e] = exprs.as_slice() else {
        return Err(ParseError::syntax(SourceSpan::default(), "expected exactly one formula"));
    };
    let ctx = Ctx::default();
    let conv = ctx.conv(e, &mut env)?;
    let f = ctx.as_form(conv, e.span())?;
    to_nnf(&f).map_err(|err| formula_error(e.span(), err))
}

/// Parses a single Int term whose free symbols are the names of `vars`.
pub fn parse_term(text: &str, vars: &[Var]) -> Result<Term, ParseError> {
    let exprs = read_all(text).map_err(|e| ParseError::syntax(e.span, e.message))?;
    let [e] = exprs.as_slice() else {
        return Err(ParseError::syntax(SourceSpan::default(), "expected exactly one term"));
    };
    let ctx = Ctx::default();
    let mut env = env_of(vars);
    let conv = ctx.conv(e, &mut env)?;
    let raw = ctx.as_term(conv, e.span())?;
    // Route through a comparison so ite/abs lifting applies; plain terms
    // come back unchanged.
    let probe = Var::int("__term");
    let f = to_nnf(&RawFormula::Cmp(CmpOp::Eq, RawTerm::Var(probe.clone()), raw))
        .map_err(|err| formula_error(e.span(), err))?;
    match f {
        Formula::Lit(crate::formula::Literal::IntCmp { lhs, rhs, .. }) if lhs == Term::var(&probe) => Ok(rhs),
        _ => Err(ParseError::unsupported(e.span(), "conditional term")),
    }
}
