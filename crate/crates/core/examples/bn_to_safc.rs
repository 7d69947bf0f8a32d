//! Turns a MAP query with a uniform binary input into a policy problem on a
//! safe acyclic free-choice net and checks both sides give the same numbers.

use sdpn::bayes::BayesNet;
use sdpn::net::{classify, DEFAULT_STATE_CAP};
use sdpn::rational::{int, ratio, show};
use sdpn::reductions::bn_to_safc;
use sdpn::semantics::{exact_value, RunBudget};

fn main() -> sdpn::Result<()> {
    let bin = || vec!["0".to_string(), "1".to_string()];
    // A uniform input f and a noisy "x follows f" channel, observed as x=1.
    let bn = BayesNet::builder()
        .node("f", bin(), &[], vec![vec![ratio(1, 2), ratio(1, 2)]])
        .node("g", bin(), &[], vec![vec![ratio(1, 5), ratio(4, 5)]])
        .node("x", bin(), &["f", "g"], vec![
            vec![ratio(9, 10), ratio(1, 10)],
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(1, 4), ratio(3, 4)],
            vec![int(0), int(1)],
        ])
        .build()?;
    let e = bn.evidence(&[("x", "1")])?;
    let f = bn.variables(&["f"])?;
    let r = bn_to_safc(&bn, &e, &f)?;
    println!("{}", r.net);
    println!("safc: {}", classify(&r.net, DEFAULT_STATE_CAP)?.is_safc());
    for v in 0..2 {
        let fixed = [(f[0], v)];
        let both: Vec<_> = fixed.iter().chain(&e).copied().collect();
        let pbn = bn.probability(&both) / bn.probability(&fixed);
        let d = r.deactivation(&[v]);
        let pnet = exact_value(&r.net, &d, RunBudget::default())?;
        println!("f={v}: P(x=1|f) = {}, val^{} = {}", show(&pbn), r.net.show_transitions(&d), show(&pnet));
    }
    Ok(())
}
