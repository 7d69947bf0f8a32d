//! Rewrites the place rewards of the GOAL net into rewards on
//! configurations, level by level, and evaluates the resulting expression.

use sdpn::fixtures;
use sdpn::rational::show;
use sdpn::rewrite::{rewrite_rewards, ValueExpression};

fn main() -> sdpn::Result<()> {
    let net = fixtures::goal();
    let rw = rewrite_rewards(&net)?;
    for (i, cell) in rw.cells.iter().enumerate() {
        println!("C{} = {}", i + 1, net.show_transitions(&cell.transitions));
    }
    for (k, level) in rw.levels.iter().enumerate().rev() {
        println!("R[{k}]");
        for (u, v, x) in level.sorted() {
            println!("  ({}, {}) -> {}", net.show_places(u), net.show_transitions(v), show(x));
        }
    }
    println!("[R]");
    for (tau, x) in rw.transition_reward.sorted() {
        println!("  {} -> {}", net.show_transitions(tau), show(x));
    }
    let expr = ValueExpression::new(&net, &rw.transition_reward);
    println!("val = {expr}");
    for d in [vec![], vec!["t6"], vec!["t1", "t5", "t6"]] {
        let set = net.deactivation(&d)?;
        println!("D = {} -> {}", net.show_transitions(&set), show(&expr.evaluate(&set)));
    }
    Ok(())
}
