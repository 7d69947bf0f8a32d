//! TWOGOAL pays only if both goals are reached. A constant policy gets one
//! half at best; a policy that sees which goal is already done gets both.

use sdpn::fixtures;
use sdpn::mdp::{best_constant_policy_via_mdp, compile_mdp, optimal_positional_policy};
use sdpn::rational::show;

fn main() -> sdpn::Result<()> {
    let net = fixtures::twogoal();
    let mdp = compile_mdp(&net)?;
    println!("{} MDP states", mdp.num_states());
    let (pi, v) = optimal_positional_policy(&mdp)?;
    println!("optimal positional value {}", show(&v));
    for (s, state) in mdp.states.iter().enumerate() {
        let d = pi.deactivation(&mdp, s);
        if !d.is_empty() {
            let marked = state.marking.support();
            println!(
                "  at m={} Q={} deactivate {}",
                net.show_places(&marked),
                net.show_places(&state.seen),
                net.show_transitions(d)
            );
        }
    }
    let (d, vc) = best_constant_policy_via_mdp(&mdp);
    println!("best constant policy D={} with value {}", net.show_transitions(&d), show(&vc));
    Ok(())
}
