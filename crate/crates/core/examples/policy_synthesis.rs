//! Decides whether some deactivation set of GOAL beats a threshold, by brute
//! force with three different valuations and, if a solver is installed,
//! through SMT.

use sdpn::fixtures;
use sdpn::rational::{ratio, show};
use sdpn::rewrite::{rewrite_rewards, ValueExpression};
use sdpn::solve::{brute_force, emit_smtlib, solve_smt, solver_available, SmtOptions, Valuer, VarStyle};

fn main() -> sdpn::Result<()> {
    let net = fixtures::goal();
    for p in [ratio(7, 10), ratio(3, 4)] {
        for valuer in [Valuer::Enumeration, Valuer::Rewrite, Valuer::Mdp] {
            let r = brute_force(&net, valuer, &p)?;
            let w = r.witness.map(|w| net.show_transitions(&w)).unwrap_or("-".into());
            println!("p={} {valuer:?}: decision={} witness={w} best={}", show(&p), r.decision, show(&r.value.unwrap()));
        }
    }

    let expr = ValueExpression::new(&net, &rewrite_rewards(&net)?.transition_reward);
    println!("{}", emit_smtlib(&net, &expr, &ratio(7, 10), VarStyle::Int01).text);
    let opts = SmtOptions::default();
    if solver_available(&opts) {
        let r = solve_smt(&net, &ratio(7, 10), &opts)?;
        println!("{}: decision={} witness={:?}", opts.solver, r.decision, r.witness.map(|w| net.show_transitions(&w)));
    } else {
        println!("no SMT solver `{}` found; set SDPN_SMT_SOLVER", opts.solver);
    }
    Ok(())
}
