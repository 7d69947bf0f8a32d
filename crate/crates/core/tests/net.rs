mod common;

use proptest::prelude::*;
use sdpn::bench::{family_net, gen_family, Family};
use sdpn::fixtures;
use sdpn::net::{classify, compute_cells, order_cells, DEFAULT_STATE_CAP};
use sdpn::rational::{int, ratio};
use sdpn::semantics::{enumerate_runs, RunBudget};
use sdpn::{Error, NetBuilder, Sdpn};

#[test]
fn data_files_match_fixtures() {
    assert_eq!(Sdpn::load(common::data("goal.json")).unwrap(), fixtures::goal());
    assert_eq!(Sdpn::load(common::data("twogoal.json")).unwrap(), fixtures::twogoal());
}

#[test]
fn json_round_trip() {
    for net in [fixtures::goal(), fixtures::twogoal(), gen_family(Family::N3, 3, 4, 1000).unwrap().net] {
        let text = net.to_json();
        let back = Sdpn::from_json(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn json_format_counts_and_lists() {
    let counts = r#"{"places":["a","b"],"transitions":[{"id":"t","pre":{"a":2},"post":{"b":1},"rate":"3/2"}],
        "initial":{"a":2},"controllable":["t"],"rewards":[{"places":["b"],"value":"-1/3"}]}"#;
    let lists = r#"{"places":["a","b"],"transitions":[{"id":"t","pre":["a","a"],"post":["b"],"rate":"3/2"}],
        "initial":["a","a"],"controllable":["t"],"rewards":[{"places":["b"],"value":"-1/3"}]}"#;
    let a = Sdpn::from_json(counts).unwrap();
    assert_eq!(a, Sdpn::from_json(lists).unwrap());
    assert_eq!(a.transition(0).pre, vec![(0, 2)]);
    assert_eq!(a.initial().0, vec![2, 0]);
    assert_eq!(a.rate(0), &ratio(3, 2));
    assert_eq!(a.rewards().get(&a.place_set(&["b"]).unwrap()), ratio(-1, 3));
    // Integer rates are accepted too.
    let int_rate = counts.replace(r#""rate":"3/2""#, r#""rate":4"#);
    assert_eq!(Sdpn::from_json(&int_rate).unwrap().rate(0), &int(4));
}

#[test]
fn json_rejects_unknown_fields() {
    let bad = r#"{"places":[],"transitions":[],"colour":"red"}"#;
    assert!(matches!(Sdpn::from_json(bad), Err(Error::Json(_))));
    let bad_t = r#"{"places":["a"],"transitions":[{"id":"t","pre":{},"post":{},"weight":1}]}"#;
    assert!(matches!(Sdpn::from_json(bad_t), Err(Error::Json(_))));
}

#[test]
fn builder_validation() {
    let dup = NetBuilder::new().places(["p", "p"]).build();
    assert!(matches!(dup, Err(Error::InvalidNet(_))));
    let unknown = NetBuilder::new().place("p").transition("t", &["q"], &[], int(1)).build();
    assert!(matches!(unknown, Err(Error::InvalidNet(_))));
    let zero_rate = NetBuilder::new().place("p").transition("t", &["p"], &[], int(0)).build();
    assert!(matches!(zero_rate, Err(Error::InvalidNet(_))));
    let not_t = NetBuilder::new().place("p").controllable(&["t"]).build();
    assert!(matches!(not_t, Err(Error::InvalidNet(_))));
    let twin = NetBuilder::new()
        .place("p")
        .transition("t", &["p"], &[], int(1))
        .transition("u", &["p"], &[], int(2))
        .build();
    assert!(matches!(twin, Err(Error::InvalidNet(_))));
}

#[test]
fn deactivation_must_be_controllable() {
    let net = fixtures::goal();
    assert!(net.deactivation(&["t1", "t6"]).is_ok());
    assert!(matches!(net.deactivation(&["t2"]), Err(Error::NotControllable(_))));
    assert!(net.deactivation(&["t9"]).is_err());
}

#[test]
fn goal_classification() {
    let c = classify(&fixtures::goal(), DEFAULT_STATE_CAP).unwrap();
    assert!(c.safe && c.acyclic && c.free_choice && c.ordinary);
    assert!(!c.occurrence, "p5 and p6 have two producers each");
    assert!(c.initial_no_predecessors);
    assert_eq!(c.max_run_length, Some(3));
    let goal = fixtures::goal();
    for p in ["p5", "p6"] {
        assert_eq!(goal.producers(goal.place_index(p).unwrap()).count(), 2);
    }
}

#[test]
fn twogoal_is_cyclic() {
    let net = fixtures::twogoal();
    let c = classify(&net, DEFAULT_STATE_CAP).unwrap();
    assert!(!c.acyclic);
    assert!(!c.occurrence);
    assert!(matches!(order_cells(&net), Err(Error::CyclicNet)));
}

#[test]
fn cells_of_goal() {
    let net = fixtures::goal();
    let cells = order_cells(&net).unwrap();
    let shown: Vec<String> = cells.iter().map(|c| net.show_transitions(&c.transitions)).collect();
    assert_eq!(shown, ["{t1,t2}", "{t3,t4}", "{t5,t6}"]);
    assert_eq!(compute_cells(&net).len(), 3);
}

#[test]
fn unsafe_and_unbounded_nets() {
    let unsafe_net = NetBuilder::new()
        .places(["a", "b"])
        .transition("t", &["a"], &["b", "b"], int(1))
        .initial(&["a"])
        .build()
        .unwrap();
    let c = classify(&unsafe_net, DEFAULT_STATE_CAP).unwrap();
    assert!(!c.safe && !c.ordinary && !c.occurrence);

    let pump = NetBuilder::new()
        .places(["a", "b"])
        .transition("t", &["a"], &["a", "b"], int(1))
        .initial(&["a"])
        .build()
        .unwrap();
    assert!(matches!(classify(&pump, 100), Err(Error::BudgetExceeded(100))));
}

#[test]
fn family_shapes() {
    let r = |n: usize| vec![int(1); n];
    let n1 = family_net(Family::N1, 3, &r(3)).unwrap();
    assert_eq!((n1.num_places(), n1.num_transitions()), (6, 6));
    assert!(classify(&n1, DEFAULT_STATE_CAP).unwrap().occurrence);

    let a = family_net(Family::N1, 1, &r(1)).unwrap();
    let b = family_net(Family::N2, 1, &r(1)).unwrap();
    assert_eq!(a, b);

    let n2 = family_net(Family::N2, 4, &r(4)).unwrap();
    assert_eq!((n2.num_places(), n2.num_transitions()), (5, 8));
    assert!(classify(&n2, DEFAULT_STATE_CAP).unwrap().occurrence);

    let n3 = family_net(Family::N3, 2, &r(2)).unwrap();
    assert_eq!((n3.num_places(), n3.num_transitions()), (4, 4));
    let c = classify(&n3, DEFAULT_STATE_CAP).unwrap();
    assert!(c.is_safc() && !c.occurrence);
    assert_eq!(n3.producers(n3.place_index("p3").unwrap()).count(), 2);

    for net in [&n1, &n2, &n3] {
        let even: Vec<String> = (1..=net.num_transitions() / 2).map(|k| format!("t{}", 2 * k)).collect();
        let even: Vec<&str> = even.iter().map(String::as_str).collect();
        assert_eq!(net.controllable(), &net.transition_set(&even).unwrap());
        assert!((0..net.num_transitions()).all(|t| net.rate(t) == &int(1)));
    }
}

fn random_net() -> impl Strategy<Value = Sdpn> {
    let np = 4usize;
    let arc = proptest::collection::vec(0..np, 0..3);
    (proptest::collection::vec((arc.clone(), arc), 1..5), proptest::collection::vec(0..np, 1..3)).prop_filter_map(
        "valid",
        move |(ts, init)| {
            let names: Vec<String> = (0..np).map(|p| format!("p{p}")).collect();
            let mut b = NetBuilder::new().places(names.clone());
            for (i, (pre, post)) in ts.iter().enumerate() {
                let pre: Vec<&str> = pre.iter().map(|&p| names[p].as_str()).collect();
                let post: Vec<&str> = post.iter().map(|&p| names[p].as_str()).collect();
                b = b.transition(format!("t{i}"), &pre, &post, int(1));
            }
            let init: Vec<&str> = init.iter().map(|&p| names[p].as_str()).collect();
            b.initial(&init).build().ok()
        },
    )
}

proptest! {
    #[test]
    fn classification_implications(net in random_net()) {
        if let Ok(c) = classify(&net, 2000) {
            prop_assert!(!c.occurrence || (c.safe && c.acyclic));
            prop_assert!(!c.safe || c.ordinary);
            if let Some(len) = c.max_run_length {
                let none = net.empty_transitions();
                if let Ok(runs) = enumerate_runs(&net, &none, RunBudget { max_runs: 20_000, max_length: 100 }) {
                    prop_assert!(runs.iter().all(|r| r.transitions.len() <= len));
                    prop_assert!(runs.iter().any(|r| r.transitions.len() == len));
                }
            }
        }
    }
}
