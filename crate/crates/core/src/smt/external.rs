use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use super::{CheckResult, SmtError};
use crate::formula::{smt_symbol, Formula, Model, Sort, Value, Var};
use crate::smtlib::{read_all, unique_names, SExpr};

/// How to reach an external SMT-LIB2 solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalConfig {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    /// Soft limit per query.
    pub timeout: Duration,
}

impl ExternalConfig {
    /// Splits a command line on whitespace.
    pub fn from_command_line(cmd: &str, timeout: Duration) -> ExternalConfig {
        ExternalConfig { command: cmd.split_whitespace().map(str::to_string).collect(), timeout }
    }
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A solver process spoken to over stdin/stdout. Spawned lazily and
/// respawned after a timeout or crash.
pub struct ExternalSolver {
    config: ExternalConfig,
    process: Option<Process>,
}

impl ExternalSolver {
    pub fn new(config: ExternalConfig) -> ExternalSolver {
        ExternalSolver { config, process: None }
    }

    pub fn config(&self) -> &ExternalConfig {
        &self.config
    }

    fn spawn(&mut self) -> Result<&mut Process, SmtError> {
        if self.process.is_none() {
            let (prog, args) = self
                .config
                .command
                .split_first()
                .ok_or_else(|| SmtError::BackendCrash("empty solver command".into()))?;
            let mut child = Command::new(prog)
                .args(args)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::null())
                .spawn()
                .map_err(|e| SmtError::BackendCrash(format!("cannot start `{prog}`: {e}")))?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = child.stdout.take().expect("piped stdout");
            let (tx, rx) = channel();
            thread::spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let Ok(line) = line else { break };
                    if tx.send(line).is_err() {
                        break;
                    }
                }
            });
            let mut p = Process { child, stdin, lines: rx };
            send(&mut p, "(set-option :produce-models true)\n(set-logic QF_NIA)\n")?;
            self.process = Some(p);
        }
        Ok(self.process.as_mut().expect("spawned"))
    }

    /// Checks the conjunction of `assertions` inside a push/pop scope.
    pub fn check(&mut self, assertions: &[Formula]) -> Result<CheckResult, SmtError> {
        let r = self.check_inner(assertions);
        if matches!(r, Err(_) | Ok(CheckResult::Unknown(_))) {
            // The process may be mid-answer; start afresh next time.
            self.process = None;
        }
        r
    }

    fn check_inner(&mut self, assertions: &[Formula]) -> Result<CheckResult, SmtError> {
        let vars: Vec<Var> = assertions.iter().flat_map(|f| f.vars()).collect();
        let names = unique_names(&vars);
        let name = |v: &Var| smt_symbol(&names[v]);
        let mut script = String::from("(push 1)\n");
        for (v, n) in &names {
            script.push_str(&format!("(declare-fun {} () {})\n", smt_symbol(n), v.sort()));
        }
        for f in assertions {
            script.push_str(&format!("(assert {})\n", f.to_smt(&name)));
        }
        script.push_str("(check-sat)\n");
        let deadline = Instant::now() + self.config.timeout;
        let p = self.spawn()?;
        send(p, &script)?;
        let answer = loop {
            let line = recv(p, deadline)?;
            match line.as_deref().map(str::trim) {
                None => return Ok(CheckResult::Unknown("timeout".into())),
                Some("") => continue,
                Some(s) => break s.to_string(),
            }
        };
        let result = match answer.as_str() {
            "unsat" => CheckResult::Unsat,
            "unknown" => CheckResult::Unknown("external solver answered unknown".into()),
            "sat" => {
                send(p, "(get-model)\n")?;
                let mut text = String::new();
                let mut depth = 0i64;
                let mut opened = false;
                while !opened || depth > 0 {
                    let Some(line) = recv(p, deadline)? else {
                        return Ok(CheckResult::Unknown("timeout".into()));
                    };
                    for c in line.chars() {
                        match c {
                            '(' => {
                                depth += 1;
                                opened = true;
                            }
                            ')' => depth -= 1,
                            _ => {}
                        }
                    }
                    text.push_str(&line);
                    text.push('\n');
                }
                let by_name: BTreeMap<&str, &Var> = names.iter().map(|(v, n)| (n.as_str(), v)).collect();
                CheckResult::SatWith(parse_model(&text, &by_name)?)
            }
            other => return Err(SmtError::BackendCrash(format!("unexpected solver output `{other}`"))),
        };
        send(p, "(pop 1)\n")?;
        Ok(result)
    }
}

fn send(p: &mut Process, text: &str) -> Result<(), SmtError> {
    p.stdin
        .write_all(text.as_bytes())
        .and_then(|_| p.stdin.flush())
        .map_err(|e| SmtError::BackendCrash(format!("solver pipe closed: {e}")))
}

/// Next output line, `None` on timeout.
fn recv(p: &mut Process, deadline: Instant) -> Result<Option<String>, SmtError> {
    let left = deadline.saturating_duration_since(Instant::now());
    match p.lines.recv_timeout(left) {
        Ok(l) => Ok(Some(l)),
        Err(RecvTimeoutError::Timeout) => Ok(None),
        Err(RecvTimeoutError::Disconnected) => Err(SmtError::BackendCrash("solver exited".into())),
    }
}

fn parse_model(text: &str, by_name: &BTreeMap<&str, &Var>) -> Result<Model, SmtError> {
    let bad = |m: &str| SmtError::BackendCrash(format!("malformed model: {m}"));
    let exprs = read_all(text).map_err(|e| bad(&e.message))?;
    let mut model = Model::new();
    let mut stack: Vec<&SExpr> = exprs.iter().collect();
    while let Some(e) = stack.pop() {
        let Some(items) = e.list() else { continue };
        if e.head() != Some("define-fun") {
            stack.extend(items.iter());
            continue;
        }
        let [_, name, _, _, value] = items else {
            return Err(bad("define-fun arity"));
        };
        let Some(var) = name.symbol().and_then(|n| by_name.get(n)) else { continue };
        let val = match var.sort() {
            Sort::Bool => match value.symbol() {
                Some("true") => Value::Bool(true),
                Some("false") => Value::Bool(false),
                _ => return Err(bad("boolean value")),
            },
            Sort::Int => Value::Int(int_value(value).ok_or_else(|| bad("integer value"))?),
        };
        model.set((*var).clone(), val);
    }
    model.complete(by_name.values().copied());
    Ok(model)
}

fn int_value(e: &SExpr) -> Option<BigInt> {
    if let Some(s) = e.symbol() {
        return s.parse().ok();
    }
    match e.list()? {
        [op, x] if op.is_atom("-") => int_value(x).map(|v| -v),
        _ => None,
    }
}
