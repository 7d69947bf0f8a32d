mod common;

use std::os::unix::fs::PermissionsExt;
use std::path::PathBuf;
use std::time::Duration;

use sdpn::bench::{gen_family, Family};
use sdpn::fixtures;
use sdpn::rational::{int, ratio};
use sdpn::rewrite::{rewrite_rewards, value_via_rewrite, ValueExpression};
use sdpn::solve::{
    all_values, brute_force, emit_smtlib, parse_solver_output, solve_smt, solver_available, SmtAnswer, SmtOptions,
    Valuer, VarStyle,
};
use sdpn::{Error, Rational, Sdpn};

fn instances() -> Vec<(Sdpn, Rational)> {
    let mut v = vec![(fixtures::goal(), ratio(7, 10)), (fixtures::goal(), ratio(3, 4)), (fixtures::goal(), ratio(1, 2))];
    for seed in 0..10u64 {
        let fam = [Family::N1, Family::N2, Family::N3][seed as usize % 3];
        let inst = gen_family(fam, 1 + seed as usize % 6, seed, 1_000_000).unwrap();
        v.push((inst.net, inst.threshold));
    }
    v
}

#[test]
fn goal_decisions() {
    let net = fixtures::goal();
    for valuer in [Valuer::Enumeration, Valuer::Rewrite, Valuer::Mdp] {
        let yes = brute_force(&net, valuer, &ratio(7, 10)).unwrap();
        assert!(yes.decision);
        assert_eq!(yes.witness, Some(net.deactivation(&["t6"]).unwrap()));
        assert_eq!(yes.value, Some(ratio(3, 4)));
        let no = brute_force(&net, valuer, &ratio(3, 4)).unwrap();
        assert!(!no.decision && no.witness.is_none());
    }
}

#[test]
fn valuers_agree_everywhere() {
    for (net, _) in instances() {
        let a = all_values(&net, Valuer::Enumeration).unwrap();
        assert_eq!(a, all_values(&net, Valuer::Rewrite).unwrap());
        assert_eq!(a, all_values(&net, Valuer::Mdp).unwrap());
        for (d, v) in &a {
            assert_eq!(v, &common::oracle_value(&net, d));
        }
    }
}

#[test]
fn strictness_at_the_maximum() {
    for (net, _) in instances() {
        let best = brute_force(&net, Valuer::Rewrite, &int(-1000)).unwrap().value.unwrap();
        assert!(!brute_force(&net, Valuer::Rewrite, &best).unwrap().decision);
    }
}

#[test]
fn witnesses_are_sound() {
    for (net, p) in instances() {
        let r = brute_force(&net, Valuer::Rewrite, &p).unwrap();
        if let Some(w) = r.witness {
            assert!(common::oracle_value(&net, &w) > p);
        } else {
            assert!(common::all_d(&net).iter().all(|d| common::oracle_value(&net, d) <= p));
        }
    }
}

#[test]
fn control_cap() {
    let net = gen_family(Family::N1, 3, 0, 100).unwrap().net;
    assert!(matches!(sdpn::solve::all_values_capped(&net, Valuer::Rewrite, 2), Err(Error::CapExceeded(3, 2))));
}

#[test]
fn smt_script_shape() {
    let net = fixtures::goal();
    let expr = ValueExpression::new(&net, &rewrite_rewards(&net).unwrap().transition_reward);
    let s = emit_smtlib(&net, &expr, &ratio(7, 10), VarStyle::Int01);
    assert!(s.text.starts_with("(set-logic QF_NIRA)"));
    assert!(s.text.contains("(declare-const |x_t1| Int)"));
    assert!(s.text.contains("(ite (or"), "denominators are guarded");
    assert!(s.text.contains("(/ 7.0 10.0)"));
    assert!(s.text.trim_end().ends_with("(check-sat)\n(get-model)"));
    assert_eq!(s.variables.len(), 3);
    let b = emit_smtlib(&net, &expr, &ratio(-1, 3), VarStyle::Bool);
    assert!(b.text.contains("(declare-const |x_t5| Bool)"));
    assert!(b.text.contains("(- (/ 1.0 3.0))"));
    assert!(!b.text.contains("Int"));
}

#[test]
fn solver_output_parsing() {
    let out = "sat\n(\n  (define-fun x_t6 () Int\n    0)\n  (define-fun |x_t1| () Bool true)\n  (define-fun /0 ((x!0 Real) (x!1 Real)) Real (ite (= x!0 1.0) 1.0 0.0))\n)\n";
    assert_eq!(
        parse_solver_output(out).unwrap(),
        SmtAnswer::Sat(vec![("x_t6".to_string(), false), ("x_t1".to_string(), true)])
    );
    assert_eq!(parse_solver_output("unsat\n").unwrap(), SmtAnswer::Unsat);
    assert!(matches!(parse_solver_output("unknown\n"), Err(Error::SolverOutputUnparseable(_))));
    assert!(matches!(parse_solver_output(""), Err(Error::SolverOutputUnparseable(_))));
}

fn fake_solver(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path.to_string_lossy().into_owned()
}

fn opts(solver: String, ms: u64) -> SmtOptions {
    SmtOptions { solver, args: vec![], timeout: Duration::from_millis(ms), style: VarStyle::Int01 }
}

#[test]
fn missing_solver() {
    let o = opts("/nonexistent/solver-binary".into(), 1000);
    assert!(!solver_available(&o));
    assert!(matches!(solve_smt(&fixtures::goal(), &ratio(7, 10), &o), Err(Error::SolverUnavailable(_))));
}

#[test]
fn slow_solver_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = opts(fake_solver(&dir, "slow", "sleep 5; echo unsat"), 200);
    assert!(matches!(solve_smt(&fixtures::goal(), &ratio(7, 10), &o), Err(Error::SolverTimeout(200))));
}

#[test]
fn lying_solver_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    // Everything active gives 5/8, which does not beat 7/10.
    let body = "echo sat; echo '((define-fun x_t1 () Int 1) (define-fun x_t5 () Int 1) (define-fun x_t6 () Int 1))'";
    let o = opts(fake_solver(&dir, "liar", body), 5000);
    assert!(matches!(solve_smt(&fixtures::goal(), &ratio(7, 10), &o), Err(Error::WitnessVerificationFailed(_))));
    let junk = opts(fake_solver(&dir, "junk", "echo hello"), 5000);
    assert!(matches!(solve_smt(&fixtures::goal(), &ratio(7, 10), &junk), Err(Error::SolverOutputUnparseable(_))));
}

#[test]
fn external_solver_agrees_with_brute_force() {
    let o = SmtOptions::default();
    if !solver_available(&o) {
        eprintln!("skipped: no SMT solver `{}`", o.solver);
        return;
    }
    for style in [VarStyle::Int01, VarStyle::Bool] {
        let o = SmtOptions { style, ..SmtOptions::default() };
        for (net, p) in instances() {
            let brute = brute_force(&net, Valuer::Rewrite, &p).unwrap();
            let smt = solve_smt(&net, &p, &o).unwrap();
            assert_eq!(smt.decision, brute.decision);
            if let Some(w) = smt.witness {
                let tr = rewrite_rewards(&net).unwrap().transition_reward;
                assert!(value_via_rewrite(&net, &tr, &w).unwrap() > p);
                assert_eq!(smt.value, Some(common::oracle_value(&net, &w)));
            }
        }
    }
}
