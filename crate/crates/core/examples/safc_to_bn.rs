//! Encodes GOAL as a Bayesian network whose reward node, conditioned on the
//! policy inputs, has probability ψ(val^D).

use sdpn::fixtures;
use sdpn::idset::subsets;
use sdpn::rational::show;
use sdpn::reductions::{safc_to_bn, DEFAULT_PARENT_CAP};
use sdpn::semantics::{exact_value, RunBudget};

fn main() -> sdpn::Result<()> {
    let net = fixtures::goal();
    let r = safc_to_bn(&net, usize::MAX, usize::MAX, DEFAULT_PARENT_CAP)?;
    let names: Vec<&str> = r.bn.nodes().iter().map(|n| n.id.as_str()).collect();
    println!("{} nodes: {}", names.len(), names.join(" "));
    for d in subsets(net.controllable()) {
        let f = r.assignment(&d);
        let fixed: Vec<_> = r.query.map_vars.iter().copied().zip(f.iter().copied()).collect();
        let both: Vec<_> = fixed.iter().chain(&r.query.evidence).copied().collect();
        let p = r.bn.probability(&both) / r.bn.probability(&fixed);
        let v = exact_value(&net, &d, RunBudget::default())?;
        println!("D={:12} P(rew=1|f) = {:6} ψ(val) = {}", net.show_transitions(&d), show(&p), show(&r.psi.apply(&v)));
    }
    Ok(())
}
