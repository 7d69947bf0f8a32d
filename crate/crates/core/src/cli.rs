//! The `sdpn` command line. `run` takes the full argument vector and returns
//! the exit code together with what would go to stdout and stderr, so the
//! binary is a thin wrapper and tests can drive it in-process.
//!
//! Exit codes: 0 on success or a "yes" decision, 1 on a "no" decision, 2 on
//! any error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bayes::{d_map, d_pr, BayesNet};
use crate::bench::{self, BenchConfig, Family};
use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::mdp::{best_constant_policy_via_mdp, compile_mdp_with_cap, optimal_positional_policy_with, OptimiseOptions};
use crate::net::{classify, Sdpn, DEFAULT_STATE_CAP};
use crate::rational::{self, Rational};
use crate::reductions::{bn_to_safc, safc_to_bn, sat_to_fcon, CnfFormula, DEFAULT_PARENT_CAP};
use crate::rewrite::{rewrite_rewards, transition_reward_json, value_via_rewrite, ValueExpression};
use crate::semantics::{exact_value, fcon_value, simulate, RunBudget};
use crate::solve::{brute_force, emit_smtlib, solve_smt, SmtOptions, Valuer, VarStyle};

#[derive(Parser, Debug)]
#[command(name = "sdpn", version, about = "Stochastic decision Petri nets: values, policies, reductions")]
struct Cli {
    /// Structured JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct NetArg {
    #[arg(long)]
    net: PathBuf,
}

#[derive(Args, Debug)]
struct DeactivateArg {
    /// Comma-separated controllable transitions to switch off.
    #[arg(long, short = 'd', value_delimiter = ',')]
    deactivate: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural and behavioural net properties.
    Classify {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Monte Carlo estimate of the value of a constant policy.
    Simulate {
        #[command(flatten)]
        net: NetArg,
        #[command(flatten)]
        d: DeactivateArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
        #[arg(long, default_value_t = 10_000)]
        step_cap: usize,
    },
    /// Exact value of a constant policy.
    Value {
        #[command(flatten)]
        net: NetArg,
        #[command(flatten)]
        d: DeactivateArg,
        #[arg(long, value_enum, default_value_t = ValueMethod::Enumeration)]
        method: ValueMethod,
    },
    /// Compile to the MDP over (marking, seen places); `--json` dumps it.
    CompileMdp {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Optimal positional policy against the best constant one.
    Optimal {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        #[arg(long, default_value_t = 100_000)]
        horizon: usize,
    },
    /// Rewrite place rewards into transition rewards.
    Rewrite {
        #[command(flatten)]
        net: NetArg,
        /// Include every level R[k].
        #[arg(long)]
        dump_levels: bool,
    },
    /// Is there a deactivation set with value above the threshold?
    Solve {
        #[command(flatten)]
        net: NetArg,
        #[arg(long)]
        threshold: String,
        #[arg(long, value_enum, default_value_t = SolveMethod::Brute)]
        method: SolveMethod,
        /// How brute force values each deactivation set.
        #[arg(long, value_enum, default_value_t = ValuerArg::Rewrite)]
        valuer: ValuerArg,
        #[arg(long, value_enum, default_value_t = SmtVars::Int)]
        smt_vars: SmtVars,
        #[arg(long, default_value_t = 60_000)]
        timeout_ms: u64,
        /// Solver command; defaults to $SDPN_SMT_SOLVER or z3.
        #[arg(long)]
        solver: Option<String>,
        /// Also write the SMT-LIB2 script here ("-" for the report).
        #[arg(long)]
        emit_smt: Option<PathBuf>,
    },
    /// Polynomial reductions between nets, Bayesian networks and 3-SAT.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Exact D-PR and D-MAP queries on a Bayesian network.
    #[command(subcommand)]
    BnInfer(BnInfer),
    /// Time rewriting, brute force and SMT on the benchmark families; CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "N1,N2,N3")]
        family: Vec<String>,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Instances per (family, n).
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long, default_value_t = bench::DEFAULT_DENOMINATOR)]
        denominator: i64,
        #[arg(long)]
        smt: bool,
        #[arg(long, default_value_t = 60_000)]
        timeout_ms: u64,
        /// Print the aggregate table instead of per-instance rows.
        #[arg(long)]
        aggregate: bool,
        /// Run instances concurrently (timings become unreliable).
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Reduce {
    /// D-MAP with binary root MAP variables to a SAFC policy problem.
    Bn2safc {
        #[arg(long)]
        bn: PathBuf,
        #[arg(long, default_value = "")]
        evidence: String,
        #[arg(long, value_delimiter = ',')]
        map: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SAFC policy problem to D-MAP.
    Safc2bn {
        #[command(flatten)]
        net: NetArg,
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PARENT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = usize::MAX)]
        k: usize,
        #[arg(long, default_value_t = usize::MAX)]
        l: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// 3-CNF (DIMACS) to a free-choice occurrence net.
    Sat2fcon {
        #[arg(long)]
        cnf: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write the generated net or BN here instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the reduction certificate here.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BnInfer {
    /// P(E = e) > p?
    Pr {
        #[arg(long)]
        bn: PathBuf,
        #[arg(long, default_value = "")]
        evidence: String,
        #[arg(long)]
        threshold: String,
    },
    /// Some assignment f of the MAP variables with P(E = e | F = f) > p?
    Map {
        #[arg(long)]
        bn: PathBuf,
        #[arg(long, default_value = "")]
        evidence: String,
        #[arg(long, value_delimiter = ',')]
        map: Vec<String>,
        #[arg(long)]
        threshold: String,
        /// Maximise P(F = f, E = e) instead of the conditional.
        #[arg(long)]
        joint: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ValueMethod {
    Enumeration,
    Fcon,
    Rewrite,
    Mdp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveMethod {
    Brute,
    Smt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ValuerArg {
    Enumeration,
    Rewrite,
    Mdp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SmtVars {
    Int,
    Bool,
}

/// What a command run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exact rational plus its six-place decimal.
pub fn rational_json(r: &Rational) -> Value {
    json!({"exact": rational::show(r), "decimal": rational::decimal6(r)})
}

fn rational_text(r: &Rational) -> String {
    format!("{} ({})", rational::show(r), rational::decimal6(r))
}

struct Report {
    json: Value,
    text: String,
    /// None for commands without a decision.
    decision: Option<bool>,
}

impl Report {
    fn plain(json: Value, text: String) -> Report {
        Report { json, text, decision: None }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let as_json = cli.json;
    match execute(cli.command) {
        Ok(r) => {
            let mut stdout = if as_json {
                serde_json::to_string_pretty(&r.json).expect("serialisable report")
            } else {
                r.text
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            let code = if r.decision == Some(false) { 1 } else { 0 };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn load_net(a: &NetArg) -> Result<Sdpn> {
    Sdpn::load(&a.net)
}

fn deactivation(net: &Sdpn, d: &DeactivateArg) -> Result<IdSet> {
    let ids: Vec<&str> = d.deactivate.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    net.deactivation(&ids)
}

fn parse_evidence(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("evidence item {kv} is not var=value")))
        })
        .collect()
}

fn bn_evidence(bn: &BayesNet, s: &str) -> Result<Vec<(usize, usize)>> {
    let pairs = parse_evidence(s)?;
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    bn.evidence(&refs)
}

fn map_vars(bn: &BayesNet, names: &[String]) -> Result<Vec<usize>> {
    let refs: Vec<&str> = names.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    bn.variables(&refs)
}

fn emit(out: &OutArgs, artifact: String, cert: Value, summary: Value, text: String) -> Result<Report> {
    if let Some(path) = &out.cert {
        std::fs::write(path, serde_json::to_string_pretty(&cert)? + "\n")?;
    }
    match &out.out {
        Some(path) => {
            std::fs::write(path, artifact + "\n")?;
            Ok(Report::plain(json!({"summary": summary, "cert": cert}), text))
        }
        None => {
            let parsed: Value = serde_json::from_str(&artifact)?;
            Ok(Report::plain(json!({"summary": summary, "cert": cert, "output": parsed}), artifact))
        }
    }
}

fn execute(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Classify { net, state_cap } => {
            let net = load_net(&net)?;
            let c = classify(&net, state_cap)?;
            let max_len = match c.max_run_length {
                Some(n) => json!(n),
                None => json!("unbounded"),
            };
            let json = json!({
                "ordinary": c.ordinary,
                "safe": c.safe,
                "acyclic": c.acyclic,
                "free_choice": c.free_choice,
                "occurrence": c.occurrence,
                "backward_conflict_free": c.backward_conflict_free,
                "self_conflict_free": c.self_conflict_free,
                "initial_no_predecessors": c.initial_no_predecessors,
                "safc": c.is_safc(),
                "reachable_markings": c.reachable_markings,
                "max_run_length": max_len,
            });
            let mut text = String::new();
            for (k, v) in json.as_object().unwrap() {
                text.push_str(&format!("{k}: {v}\n"));
            }
            let text = text.replace('"', "");
            Ok(Report::plain(json, text))
        }
        Command::Simulate { net, d, seed, runs, step_cap } => {
            let net = load_net(&net)?;
            let d = deactivation(&net, &d)?;
            let s = simulate(&net, &d, seed, runs, step_cap)?;
            let json = json!({
                "deactivate": net.transition_names(&d),
                "seed": seed,
                "runs": runs,
                "mean": rational_json(&s.mean),
                "std_error": format!("{:.6}", s.std_error),
            });
            let text = format!(
                "D = {}\nruns: {runs} (seed {seed})\nmean: {}\nstd error: {:.6}\n",
                net.show_transitions(&d),
                rational_text(&s.mean),
                s.std_error
            );
            Ok(Report::plain(json, text))
        }
        Command::Value { net, d, method } => {
            let net = load_net(&net)?;
            let d = deactivation(&net, &d)?;
            let v = match method {
                ValueMethod::Enumeration => exact_value(&net, &d, RunBudget::default())?,
                ValueMethod::Fcon => fcon_value(&net, &d)?,
                ValueMethod::Rewrite => value_via_rewrite(&net, &rewrite_rewards(&net)?.transition_reward, &d)?,
                ValueMethod::Mdp => {
                    let mdp = crate::mdp::compile_mdp(&net)?;
                    crate::mdp::evaluate_policy(&mdp, &crate::mdp::PositionalPolicy::constant(&mdp, &d))
                }
            };
            let json = json!({"deactivate": net.transition_names(&d), "value": rational_json(&v)});
            Ok(Report::plain(json, format!("D = {}\nvalue: {}\n", net.show_transitions(&d), rational_text(&v))))
        }
        Command::CompileMdp { net, state_cap } => {
            let net = load_net(&net)?;
            let mdp = compile_mdp_with_cap(&net, state_cap)?;
            let actions: usize = mdp.actions.iter().map(Vec::len).sum();
            let text = format!(
                "states: {}\nactions: {actions}\nacyclic modulo self-loops: {}\n",
                mdp.num_states(),
                mdp.is_acyclic_modulo_self_loops()
            );
            Ok(Report::plain(mdp.to_json(&net), text))
        }
        Command::Optimal { net, state_cap, horizon } => {
            let net = load_net(&net)?;
            let mdp = compile_mdp_with_cap(&net, state_cap)?;
            let (pi, v) = optimal_positional_policy_with(&mdp, OptimiseOptions { horizon })?;
            let (d, vc) = best_constant_policy_via_mdp(&mdp);
            let policy: Vec<Value> = (0..mdp.num_states())
                .map(|s| json!({"state": s, "deactivate": net.transition_names(pi.deactivation(&mdp, s))}))
                .collect();
            let json = json!({
                "states": mdp.num_states(),
                "positional": {"value": rational_json(&v), "policy": policy},
                "constant": {"deactivate": net.transition_names(&d), "value": rational_json(&vc)},
            });
            let text = format!(
                "states: {}\noptimal positional value: {}\n  at the initial state deactivate {}\nbest constant policy: D = {} with value {}\n",
                mdp.num_states(),
                rational_text(&v),
                net.show_transitions(pi.deactivation(&mdp, crate::mdp::Mdp::INITIAL)),
                net.show_transitions(&d),
                rational_text(&vc)
            );
            Ok(Report::plain(json, text))
        }
        Command::Rewrite { net, dump_levels } => {
            let net = load_net(&net)?;
            let rw = rewrite_rewards(&net)?;
            let expr = ValueExpression::new(&net, &rw.transition_reward);
            let json = if dump_levels {
                let mut j = rw.to_json(&net);
                j["expression"] = json!(expr.to_string());
                j
            } else {
                json!({
                    "transition_reward": transition_reward_json(&net, &rw.transition_reward),
                    "support_sizes": rw.support_sizes(),
                    "expression": expr.to_string(),
                })
            };
            let mut text = String::new();
            if dump_levels {
                for (k, lvl) in rw.levels.iter().enumerate().rev() {
                    text.push_str(&format!("R[{k}]\n"));
                    for (u, v, x) in lvl.sorted() {
                        text.push_str(&format!(
                            "  {} {} : {}\n",
                            net.show_places(u),
                            net.show_transitions(v),
                            rational::show(x)
                        ));
                    }
                }
            }
            text.push_str("[R]\n");
            for (t, x) in rw.transition_reward.sorted() {
                text.push_str(&format!("  {} : {}\n", net.show_transitions(t), rational::show(x)));
            }
            text.push_str(&format!("value = {expr}\n"));
            Ok(Report::plain(json, text))
        }
        Command::Solve { net, threshold, method, valuer, smt_vars, timeout_ms, solver, emit_smt } => {
            let net = load_net(&net)?;
            let p = rational::parse(&threshold)?;
            let style = match smt_vars {
                SmtVars::Int => VarStyle::Int01,
                SmtVars::Bool => VarStyle::Bool,
            };
            let mut script_text = None;
            if let Some(path) = &emit_smt {
                let expr = ValueExpression::new(&net, &rewrite_rewards(&net)?.transition_reward);
                let script = emit_smtlib(&net, &expr, &p, style);
                if path.as_os_str() == "-" {
                    script_text = Some(script.text);
                } else {
                    std::fs::write(path, script.text)?;
                }
            }
            let r = match method {
                SolveMethod::Brute => {
                    let valuer = match valuer {
                        ValuerArg::Enumeration => Valuer::Enumeration,
                        ValuerArg::Rewrite => Valuer::Rewrite,
                        ValuerArg::Mdp => Valuer::Mdp,
                    };
                    brute_force(&net, valuer, &p)?
                }
                SolveMethod::Smt => {
                    let mut opts = SmtOptions { timeout: Duration::from_millis(timeout_ms), style, ..SmtOptions::default() };
                    if let Some(s) = solver {
                        opts.solver = s;
                    }
                    solve_smt(&net, &p, &opts)?
                }
            };
            let mut json = json!({
                "decision": if r.decision { "yes" } else { "no" },
                "threshold": rational_json(&p),
                "witness": r.witness.as_ref().map(|w| json!(net.transition_names(w))),
                "value": r.value.as_ref().map(rational_json),
            });
            let mut text = format!("{}\n", if r.decision { "yes" } else { "no" });
            if let Some(w) = &r.witness {
                text.push_str(&format!("witness: D = {}\n", net.show_transitions(w)));
            }
            if let Some(v) = &r.value {
                let label = if r.witness.is_some() || matches!(method, SolveMethod::Smt) { "value" } else { "best value" };
                text.push_str(&format!("{label}: {}\n", rational_text(v)));
            }
            if let Some(s) = script_text {
                json["smt"] = json!(s);
                text.push_str(&s);
            }
            Ok(Report { json, text, decision: Some(r.decision) })
        }
        Command::Reduce(Reduce::Bn2safc { bn, evidence, map, out }) => {
            let bn = BayesNet::load(&bn)?;
            let e = bn_evidence(&bn, &evidence)?;
            let f = map_vars(&bn, &map)?;
            let r = bn_to_safc(&bn, &e, &f)?;
            let summary = json!({
                "places": r.net.num_places(),
                "transitions": r.net.num_transitions(),
                "controllable": r.net.transition_names(r.net.controllable()),
            });
            let text = format!("net with {} places and {} transitions\n", r.net.num_places(), r.net.num_transitions());
            emit(&out, r.net.to_json(), serde_json::to_value(&r.cert)?, summary, text)
        }
        Command::Reduce(Reduce::Safc2bn { net, threshold, cap, k, l, out }) => {
            let net = load_net(&net)?;
            let r = safc_to_bn(&net, k, l, cap)?;
            let names = |ids: &[usize]| ids.iter().map(|&i| r.bn.node(i).id.clone()).collect::<Vec<_>>();
            let evidence: Vec<Value> = r
                .query
                .evidence
                .iter()
                .map(|&(i, v)| json!({"variable": r.bn.node(i).id, "value": r.bn.node(i).domain[v]}))
                .collect();
            let mut summary = json!({
                "nodes": r.bn.len(),
                "map": names(&r.query.map_vars),
                "evidence": evidence,
            });
            let mut text = format!("Bayesian network with {} nodes\n", r.bn.len());
            if let Some(t) = threshold {
                let p = rational::parse(&t)?;
                let q = r.psi.apply(&p);
                summary["threshold"] = rational_json(&q);
                text.push_str(&format!("threshold: {}\n", rational_text(&q)));
            }
            emit(&out, r.bn.to_json(), serde_json::to_value(&r.cert)?, summary, text)
        }
        Command::Reduce(Reduce::Sat2fcon { cnf, out }) => {
            let phi = CnfFormula::parse_dimacs(&std::fs::read_to_string(&cnf)?)?;
            let r = sat_to_fcon(&phi)?;
            let summary = json!({
                "variables": phi.num_vars,
                "clauses": phi.clauses.len(),
                "threshold": rational_json(&r.threshold),
            });
            let text = format!(
                "net with {} places and {} transitions\nthreshold: {}\n",
                r.net.num_places(),
                r.net.num_transitions(),
                rational::show(&r.threshold)
            );
            emit(&out, r.net.to_json(), serde_json::to_value(&r.cert)?, summary, text)
        }
        Command::BnInfer(BnInfer::Pr { bn, evidence, threshold }) => {
            let bn = BayesNet::load(&bn)?;
            let e = bn_evidence(&bn, &evidence)?;
            let p = rational::parse(&threshold)?;
            let (yes, q) = d_pr(&bn, &e, &p);
            let json = json!({
                "decision": if yes { "yes" } else { "no" },
                "probability": rational_json(&q),
                "threshold": rational_json(&p),
            });
            let text = format!("{}\nP(e) = {}\n", if yes { "yes" } else { "no" }, rational_text(&q));
            Ok(Report { json, text, decision: Some(yes) })
        }
        Command::BnInfer(BnInfer::Map { bn, evidence, map, threshold, joint }) => {
            let bn = BayesNet::load(&bn)?;
            let e = bn_evidence(&bn, &evidence)?;
            let f = map_vars(&bn, &map)?;
            let p = rational::parse(&threshold)?;
            let r = d_map(&bn, &f, &e, &p, !joint)?;
            let assignment: serde_json::Map<String, Value> = f
                .iter()
                .zip(&r.assignment)
                .map(|(&i, &v)| (bn.node(i).id.clone(), json!(bn.node(i).domain[v])))
                .collect();
            let shown: Vec<String> = assignment.iter().map(|(k, v)| format!("{k}={}", v.as_str().unwrap())).collect();
            let json = json!({
                "decision": if r.decision { "yes" } else { "no" },
                "assignment": assignment,
                "probability": rational_json(&r.probability),
                "threshold": rational_json(&p),
            });
            let text = format!(
                "{}\nf: {}\nprobability: {}\n",
                if r.decision { "yes" } else { "no" },
                shown.join(", "),
                rational_text(&r.probability)
            );
            Ok(Report { json, text, decision: Some(r.decision) })
        }
        Command::Bench {
            family,
            n_min,
            n_max,
            seeds,
            seed_base,
            repetitions,
            denominator,
            smt,
            timeout_ms,
            aggregate,
            parallel,
            out,
        } => {
            let mut cfgs = Vec::new();
            for f in &family {
                let fam: Family = f.parse()?;
                for n in n_min.max(1)..=n_max {
                    for s in 0..seeds {
                        cfgs.push(BenchConfig { family: fam, n, seed: seed_base + s, denominator, repetitions });
                    }
                }
            }
            let opts = smt.then(|| SmtOptions { timeout: Duration::from_millis(timeout_ms), ..SmtOptions::default() });
            let records = if parallel {
                let chunks: Vec<_> = cfgs
                    .par_iter()
                    .map(|c| bench::run_bench(std::slice::from_ref(c), opts.as_ref()))
                    .collect::<Result<_>>()?;
                chunks.into_iter().flatten().collect()
            } else {
                bench::run_bench(&cfgs, opts.as_ref())?
            };
            let mut buf = Vec::new();
            if aggregate {
                bench::write_aggregate_csv(&bench::aggregate(&records), &mut buf)?;
            } else {
                bench::write_csv(&records, &mut buf)?;
            }
            let csv = String::from_utf8(buf).expect("csv output is utf-8");
            let skipped = records.iter().any(|r| r.smt_skipped);
            let mut text = csv.clone();
            if let Some(path) = &out {
                std::fs::write(path, &csv)?;
                text = format!("{} instances written to {}\n", records.len(), path.display());
            }
            if skipped {
                text.push_str("# SMT solver unavailable; smt_ms left empty\n");
            }
            let json = json!({
                "csv": csv,
                "instances": records.len(),
                "smt_skipped": skipped,
                "solver": opts.map(|o| o.solver),
            });
            Ok(Report::plain(json, text))
        }
    }
}
