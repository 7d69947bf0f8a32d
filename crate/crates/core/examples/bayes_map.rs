//! Exact inference on the four-variable network: a joint probability, the
//! evidence probability and the MAP query for a given c=0, d=1.

use sdpn::bayes::{d_map, d_pr};
use sdpn::fixtures;
use sdpn::rational::{ratio, show};

fn main() -> sdpn::Result<()> {
    let bn = fixtures::abcd();
    println!("P(a=0,b=1,c=0,d=0) = {}", show(&bn.joint_probability(&[0, 1, 0, 0])));
    let e = bn.evidence(&[("c", "0"), ("d", "1")])?;
    let (_, pe) = d_pr(&bn, &e, &ratio(1, 3));
    println!("P(c=0,d=1) = {}", show(&pe));
    let a = bn.variables(&["a"])?;
    for v in ["0", "1"] {
        let fixed = bn.evidence(&[("a", v)])?;
        let both: Vec<_> = fixed.iter().chain(&e).copied().collect();
        println!("P(c=0,d=1 | a={v}) = {}", show(&(bn.probability(&both) / bn.probability(&fixed))));
    }
    let r = d_map(&bn, &a, &e, &ratio(1, 3), true)?;
    println!("MAP a={} with {} > 1/3: {}", bn.node(a[0]).domain[r.assignment[0]], show(&r.probability), r.decision);
    Ok(())
}
