//! The constant-policy problem: is there D ⊆ C with val^D > p? Decided by
//! enumerating every D with one of three valuers, or by handing the rewritten
//! value expression to an SMT solver.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::{subsets, IdSet};
use crate::mdp::{compile_mdp, evaluate_policy, PositionalPolicy};
use crate::net::Sdpn;
use crate::rational::{self, Rational};
use crate::rewrite::{rewrite_rewards, value_via_rewrite, Factor, ValueExpression};
use crate::semantics::{exact_value, RunBudget};

/// Brute force refuses more controllable transitions than this by default.
pub const DEFAULT_CONTROL_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Valuer {
    Enumeration,
    Rewrite,
    Mdp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub decision: bool,
    /// A deactivation set with value above the threshold, when one exists.
    pub witness: Option<IdSet>,
    /// Brute force: the best value over all D. SMT: the witness value.
    pub value: Option<Rational>,
}

/// val^D for every D ⊆ C, in binary-counter order over C.
pub fn all_values(net: &Sdpn, valuer: Valuer) -> Result<Vec<(IdSet, Rational)>> {
    all_values_capped(net, valuer, DEFAULT_CONTROL_CAP)
}

pub fn all_values_capped(net: &Sdpn, valuer: Valuer, cap: usize) -> Result<Vec<(IdSet, Rational)>> {
    let c = net.controllable();
    if c.len() > cap {
        return Err(Error::CapExceeded(c.len(), cap));
    }
    let all: Vec<IdSet> = subsets(c).collect();
    let values: Vec<Rational> = match valuer {
        Valuer::Enumeration => {
            all.par_iter().map(|d| exact_value(net, d, RunBudget::default())).collect::<Result<_>>()?
        }
        Valuer::Rewrite => {
            let expr = ValueExpression::new(net, &rewrite_rewards(net)?.transition_reward);
            all.par_iter().map(|d| expr.evaluate(d)).collect()
        }
        Valuer::Mdp => {
            let mdp = compile_mdp(net)?;
            all.par_iter().map(|d| evaluate_policy(&mdp, &PositionalPolicy::constant(&mdp, d))).collect()
        }
    };
    Ok(all.into_iter().zip(values).collect())
}

/// First maximiser in binary-counter order.
pub fn best(values: &[(IdSet, Rational)]) -> (IdSet, Rational) {
    let mut b = &values[0];
    for x in &values[1..] {
        if x.1 > b.1 {
            b = x;
        }
    }
    b.clone()
}

pub fn brute_force(net: &Sdpn, valuer: Valuer, p: &Rational) -> Result<SolveResult> {
    let values = all_values(net, valuer)?;
    let (d, v) = best(&values);
    let decision = &v > p;
    Ok(SolveResult { decision, witness: decision.then_some(d), value: Some(v) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStyle {
    /// Int variables constrained to 0/1.
    Int01,
    Bool,
}

#[derive(Clone, Debug)]
pub struct SmtScript {
    pub text: String,
    /// (transition, symbol) per controllable transition.
    pub variables: Vec<(usize, String)>,
}

fn real(r: &Rational) -> String {
    let mag = |n: &num_bigint::BigInt| format!("{}.0", n.magnitude());
    let body = if r.is_integer() {
        mag(r.numer())
    } else {
        format!("(/ {} {})", mag(r.numer()), mag(r.denom()))
    };
    if *r < rational::zero() {
        format!("(- {body})")
    } else {
        body
    }
}

fn symbol(name: &str) -> String {
    format!("|x_{}|", name.replace(['|', '\\'], "_"))
}

/// SMT-LIB2 script asserting that the value expression exceeds `p`. Each
/// controllable t gets an indicator x_t, 1 when t stays active. A term whose
/// cell denominator vanishes contributes 0.
pub fn emit_smtlib(net: &Sdpn, expr: &ValueExpression, p: &Rational, style: VarStyle) -> SmtScript {
    let mut text = String::new();
    let logic = match style {
        VarStyle::Int01 => "QF_NIRA",
        VarStyle::Bool => "QF_NRA",
    };
    text.push_str(&format!("(set-logic {logic})\n"));
    let variables: Vec<(usize, String)> =
        net.controllable().iter().map(|t| (t, symbol(net.transition_name(t)))).collect();
    for (_, v) in &variables {
        match style {
            VarStyle::Int01 => {
                text.push_str(&format!("(declare-const {v} Int)\n(assert (or (= {v} 0) (= {v} 1)))\n"));
            }
            VarStyle::Bool => text.push_str(&format!("(declare-const {v} Bool)\n")),
        }
    }
    let ind = |t: usize| -> String {
        let v = symbol(net.transition_name(t));
        match style {
            VarStyle::Int01 => format!("(to_real {v})"),
            VarStyle::Bool => format!("(ite {v} 1.0 0.0)"),
        }
    };
    let weighted = |t: usize, rate: &Rational, ctrl: bool| -> String {
        match (ctrl, rate == &rational::one()) {
            (false, _) => real(rate),
            (true, true) => ind(t),
            (true, false) => format!("(* {} {})", real(rate), ind(t)),
        }
    };
    let factor = |f: &Factor| -> (String, String) {
        let (_, rate, ctrl) = f.cell.iter().find(|(u, _, _)| *u == f.transition).unwrap();
        let den: Vec<String> = f.cell.iter().map(|(u, r, c)| weighted(*u, r, *c)).collect();
        let den = if den.len() == 1 { den[0].clone() } else { format!("(+ {})", den.join(" ")) };
        (format!("(/ {} {den})", weighted(f.transition, rate, *ctrl)), den)
    };
    let mut terms = Vec::new();
    for t in &expr.terms {
        if t.factors.is_empty() {
            terms.push(real(&t.coefficient));
            continue;
        }
        let (nums, dens): (Vec<_>, Vec<_>) = t.factors.iter().map(factor).unzip();
        let guard: Vec<String> = dens.iter().map(|d| format!("(= {d} 0.0)")).collect();
        let guard = if guard.len() == 1 { guard[0].clone() } else { format!("(or {})", guard.join(" ")) };
        terms.push(format!("(ite {guard} 0.0 (* {} {}))", real(&t.coefficient), nums.join(" ")));
    }
    let total = match terms.len() {
        0 => "0.0".to_string(),
        1 => terms.pop().unwrap(),
        _ => format!("(+ {})", terms.join("\n    ")),
    };
    text.push_str(&format!("(assert (> {total}\n  {}))\n(check-sat)\n(get-model)\n", real(p)));
    SmtScript { text, variables }
}

#[derive(Clone, Debug)]
pub struct SmtOptions {
    pub solver: String,
    pub args: Vec<String>,
    pub timeout: Duration,
    pub style: VarStyle,
}

impl Default for SmtOptions {
    /// The solver command comes from `SDPN_SMT_SOLVER`, falling back to z3.
    fn default() -> Self {
        SmtOptions {
            solver: std::env::var("SDPN_SMT_SOLVER").unwrap_or_else(|_| "z3".into()),
            args: Vec::new(),
            timeout: Duration::from_secs(60),
            style: VarStyle::Int01,
        }
    }
}

pub fn solver_available(opts: &SmtOptions) -> bool {
    Command::new(&opts.solver)
        .arg("-version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok()
}

/// Run `<solver> <args> <file>` and return its standard output.
fn run_solver(script: &str, opts: &SmtOptions) -> Result<String> {
    let mut file = tempfile::Builder::new().suffix(".smt2").tempfile()?;
    file.write_all(script.as_bytes())?;
    file.flush()?;
    let mut child = Command::new(&opts.solver)
        .args(&opts.args)
        .arg(file.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::SolverUnavailable(format!("{}: {e}", opts.solver)))?;
    let mut stdout = child.stdout.take().expect("piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let start = Instant::now();
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if start.elapsed() >= opts.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::SolverTimeout(opts.timeout.as_millis() as u64));
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    Ok(reader.join().expect("reader thread")?)
}

fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            '|' => {
                chars.next();
                let mut sym = String::new();
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                    sym.push(c);
                }
                out.push(sym);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    sym.push(c);
                    chars.next();
                }
                out.push(sym);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmtAnswer {
    Sat(Vec<(String, bool)>),
    Unsat,
}

/// Parses `sat` plus a model of `define-fun`s, or `unsat`. Symbols come back
/// without bars; `true`/`1` mean active.
pub fn parse_solver_output(out: &str) -> Result<SmtAnswer> {
    let bad = || Error::SolverOutputUnparseable(out.chars().take(200).collect());
    let toks = tokens(out);
    match toks.first().map(String::as_str) {
        Some("unsat") => return Ok(SmtAnswer::Unsat),
        Some("sat") => {}
        _ => return Err(bad()),
    }
    let mut model = Vec::new();
    let mut i = 1;
    while i < toks.len() {
        // define-fun name ( ) sort value; solver-internal functions with
        // arguments or compound bodies are skipped.
        let constant = toks[i] == "define-fun"
            && toks.get(i + 2).map(String::as_str) == Some("(")
            && toks.get(i + 3).map(String::as_str) == Some(")");
        if constant {
            let name = toks.get(i + 1).ok_or_else(bad)?.clone();
            let value = toks.get(i + 5).ok_or_else(bad)?;
            let active = match value.as_str() {
                "true" | "1" => Some(true),
                "false" | "0" => Some(false),
                _ => None,
            };
            if let Some(active) = active {
                model.push((name, active));
            }
            i += 6;
        } else {
            i += 1;
        }
    }
    Ok(SmtAnswer::Sat(model))
}

/// Rewrite, encode, solve, decode and re-check the witness exactly.
pub fn solve_smt(net: &Sdpn, p: &Rational, opts: &SmtOptions) -> Result<SolveResult> {
    let tr = rewrite_rewards(net)?.transition_reward;
    let expr = ValueExpression::new(net, &tr);
    let script = emit_smtlib(net, &expr, p, opts.style);
    let out = run_solver(&script.text, opts)?;
    match parse_solver_output(&out)? {
        SmtAnswer::Unsat => Ok(SolveResult { decision: false, witness: None, value: None }),
        SmtAnswer::Sat(model) => {
            let mut d = net.empty_transitions();
            for (t, sym) in &script.variables {
                let bare = sym.trim_matches('|');
                if model.iter().any(|(n, active)| n == bare && !active) {
                    d.insert(*t);
                }
            }
            let v = value_via_rewrite(net, &tr, &d)?;
            if &v <= p {
                return Err(Error::WitnessVerificationFailed(format!(
                    "{} has value {} which does not exceed {}",
                    net.show_transitions(&d),
                    rational::show(&v),
                    rational::show(p)
                )));
            }
            Ok(SolveResult { decision: true, witness: Some(d), value: Some(v) })
        }
    }
}
