//! The small reference models used throughout the tests and examples.

use crate::bayes::BayesNet;
use crate::net::{NetBuilder, Sdpn};
use crate::rational::{int, ratio};

/// Seven places, six transitions and three cells. Reaching one of the goal
/// places p5, p6 pays 1, reaching both or reaching p7 does not.
pub fn goal() -> Sdpn {
    NetBuilder::new()
        .places(["p1", "p2", "p3", "p4", "p5", "p6", "p7"])
        .transition("t1", &["p1"], &["p5"], int(1))
        .transition("t2", &["p1"], &["p3"], int(1))
        .transition("t3", &["p2"], &["p4"], int(1))
        .transition("t4", &["p2"], &[], int(1))
        .transition("t5", &["p3", "p4"], &["p5", "p6"], int(1))
        .transition("t6", &["p3", "p4"], &["p6", "p7"], int(1))
        .initial(&["p1", "p2"])
        .controllable(&["t1", "t5", "t6"])
        .reward(&["p5"], int(1))
        .reward(&["p6"], int(1))
        .reward(&["p5", "p6"], int(-1))
        .reward(&["p5", "p7"], int(-1))
        .reward(&["p6", "p7"], int(-1))
        .reward(&["p5", "p6", "p7"], int(1))
        .build()
        .expect("fixture is valid")
}

/// Two goals p4, p5 that pay only together. A positional policy reaches both
/// surely; every constant policy manages at most one half.
pub fn twogoal() -> Sdpn {
    NetBuilder::new()
        .places(["p1", "p2", "p3", "p4", "p5"])
        .transition("t1", &["p1", "p2"], &["p4"], int(1))
        .transition("t2", &["p1", "p2"], &["p5"], int(1))
        .transition("t3", &["p4"], &["p2"], int(1))
        .transition("t4", &["p5"], &["p2"], int(1))
        .transition("t5", &["p3", "p2"], &["p4"], int(1))
        .transition("t6", &["p3", "p2"], &["p5"], int(1))
        .initial(&["p1", "p2", "p3"])
        .controllable(&["t1", "t2"])
        .reward(&["p4", "p5"], int(1))
        .build()
        .expect("fixture is valid")
}

/// Four binary variables: a and b are roots, c depends on a, d on a and b.
///
/// Only part of the conditional tables is pinned down by the reference
/// numbers (joint P(a=0,b=1,c=0,d=0) = 1/54 and the MAP query on c, d
/// given a). The row P(d | a=0, b=0) is free; it is set to (3/4, 1/4),
/// which keeps a=1 the unique maximiser of that query.
pub fn abcd() -> BayesNet {
    let bin = || vec!["0".to_string(), "1".to_string()];
    BayesNet::builder()
        .node("a", bin(), &[], vec![vec![ratio(1, 3), ratio(2, 3)]])
        .node("b", bin(), &[], vec![vec![ratio(1, 2), ratio(1, 2)]])
        .node("c", bin(), &["a"], vec![vec![ratio(2, 3), ratio(1, 3)], vec![ratio(3, 4), ratio(1, 4)]])
        .node(
            "d",
            bin(),
            &["a", "b"],
            vec![
                vec![ratio(3, 4), ratio(1, 4)],
                vec![ratio(1, 6), ratio(5, 6)],
                vec![ratio(1, 4), ratio(3, 4)],
                vec![ratio(2, 3), ratio(1, 3)],
            ],
        )
        .build()
        .expect("fixture is valid")
}
