mod common;

use proptest::prelude::*;
use sdpn::bench::{family_net, gen_family, Family};
use sdpn::fixtures;
use sdpn::mdp::{compile_mdp, evaluate_policy, PositionalPolicy};
use sdpn::rational::{int, show};
use sdpn::rewrite::{rewrite_rewards, value_via_rewrite, ValueExpression};
use sdpn::{Error, IdSet, NetBuilder, Rational, RewardFn, Sdpn};

fn level(net: &Sdpn, rw: &sdpn::rewrite::Rewriting, k: usize) -> Vec<(String, String, String)> {
    rw.levels[k]
        .sorted()
        .into_iter()
        .map(|(u, v, x)| (net.show_places(u), net.show_transitions(v), show(x)))
        .collect()
}

fn entries(xs: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
    let mut v: Vec<_> = xs.iter().map(|&(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect();
    v.sort();
    v
}

fn sorted(mut v: Vec<(String, String, String)>) -> Vec<(String, String, String)> {
    v.sort();
    v
}

#[test]
fn goal_levels_match_published_tables() {
    let net = fixtures::goal();
    let rw = rewrite_rewards(&net).unwrap();
    assert_eq!(rw.levels.len(), 4);
    assert_eq!(
        sorted(level(&net, &rw, 2)),
        entries(&[("{p5}", "{}", "1"), ("{p3,p4}", "{t5}", "1"), ("{p3,p4,p5}", "{t6}", "-1")])
    );
    assert_eq!(
        sorted(level(&net, &rw, 1)),
        entries(&[("{p5}", "{}", "1"), ("{p2,p3}", "{t3,t5}", "1"), ("{p2,p3,p5}", "{t3,t6}", "-1")])
    );
    assert_eq!(sorted(level(&net, &rw, 0)), entries(&[("{p1}", "{t1}", "1"), ("{p1,p2}", "{t2,t3,t5}", "1")]));
    let tr: Vec<(String, String)> =
        rw.transition_reward.sorted().into_iter().map(|(t, x)| (net.show_transitions(t), show(x))).collect();
    let mut want = vec![("{t1}".to_string(), "1".to_string()), ("{t2,t3,t5}".to_string(), "1".to_string())];
    want.sort();
    let mut got = tr;
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn top_level_is_the_place_reward() {
    let net = fixtures::goal();
    let rw = rewrite_rewards(&net).unwrap();
    let top = &rw.levels[3];
    assert_eq!(top.len(), net.rewards().len());
    for (q, x) in net.rewards().iter() {
        assert_eq!(&top.get(q, &net.empty_transitions()), x);
    }
}

#[test]
fn goal_expression() {
    let net = fixtures::goal();
    let rw = rewrite_rewards(&net).unwrap();
    let expr = ValueExpression::new(&net, &rw.transition_reward);
    for d in common::all_d(&net) {
        assert_eq!(expr.evaluate(&d), common::oracle_value(&net, &d));
    }
    // Cell {t3,t4} has no controllable transition and folds into 1/2.
    let text = expr.to_string();
    assert!(text.contains("1/2") && !text.contains("x_t3") && !text.contains("x_t4"), "{text}");
}

#[test]
fn preconditions() {
    assert!(matches!(rewrite_rewards(&fixtures::twogoal()), Err(Error::NotSafc(_))));
    let loopback = NetBuilder::new()
        .places(["a", "b"])
        .transition("t", &["b"], &["a"], int(1))
        .initial(&["a"])
        .build()
        .unwrap();
    assert!(matches!(rewrite_rewards(&loopback), Err(Error::AssumptionViolated(_))));
}

/// Place rewards over every visited set equal the transition rewards over
/// configurations inside the run.
fn check_consistency(net: &Sdpn) {
    let rw = rewrite_rewards(net).unwrap();
    for d in common::all_d(net) {
        for run in common::oracle_runs(net, &d) {
            let lhs = common::payoff(net.rewards(), &run.seen);
            let fired = IdSet::from_iter(net.num_transitions(), run.transitions.iter().copied());
            let rhs: Rational =
                rw.transition_reward.sorted().into_iter().filter(|(t, _)| t.is_subset(&fired)).map(|(_, x)| x.clone()).sum();
            assert_eq!(lhs, rhs, "run {:?}", run.transitions);
        }
    }
}

#[test]
fn consistency_on_fixtures() {
    check_consistency(&fixtures::goal());
    for fam in [Family::N1, Family::N2, Family::N3] {
        for n in 1..=4 {
            check_consistency(&gen_family(fam, n, 3, 1000).unwrap().net);
        }
    }
}

#[test]
fn empty_rewards_rewrite_to_nothing() {
    let net = fixtures::goal().with_rewards(RewardFn::new());
    let rw = rewrite_rewards(&net).unwrap();
    assert!(rw.transition_reward.is_empty());
    assert!(rw.levels.iter().all(|l| l.is_empty()));
}

#[test]
fn reward_on_initial_places_is_a_constant() {
    let net = NetBuilder::new()
        .places(["a", "b"])
        .transition("t", &["a"], &["b"], int(1))
        .initial(&["a"])
        .reward(&["a"], int(5))
        .reward::<&str>(&[], int(1))
        .build()
        .unwrap();
    let rw = rewrite_rewards(&net).unwrap();
    assert_eq!(rw.transition_reward.get(&net.empty_transitions()), int(6));
}

fn with_random_rewards(net: Sdpn, entries: &[(u32, i64)]) -> Sdpn {
    let np = net.num_places();
    let mut r = RewardFn::new();
    for &(mask, v) in entries {
        r.add(IdSet::from_iter(np, (0..np).filter(|p| mask >> (p % 32) & 1 == 1)), int(v));
    }
    net.with_rewards(r)
}

fn safc_instance() -> impl Strategy<Value = Sdpn> {
    let rewards = proptest::collection::vec((any::<u32>(), -3i64..=3), 0..5);
    (0usize..4, 1usize..=3, rewards).prop_map(|(kind, n, rewards)| {
        let base = match kind {
            0 => family_net(Family::N1, n, &vec![int(1); n]).unwrap(),
            1 => family_net(Family::N2, n, &vec![int(1); n]).unwrap(),
            2 => family_net(Family::N3, n, &vec![int(1); n]).unwrap(),
            _ => fixtures::goal(),
        };
        with_random_rewards(base, &rewards)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn three_valuations_agree(net in safc_instance()) {
        let rw = rewrite_rewards(&net).unwrap();
        let mdp = compile_mdp(&net).unwrap();
        for d in common::all_d(&net) {
            let a = common::oracle_value(&net, &d);
            let b = value_via_rewrite(&net, &rw.transition_reward, &d).unwrap();
            let c = evaluate_policy(&mdp, &PositionalPolicy::constant(&mdp, &d));
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&a, &c);
        }
    }

    #[test]
    fn random_rewards_stay_consistent(net in safc_instance()) {
        check_consistency(&net);
        let rw = rewrite_rewards(&net).unwrap();
        let m0 = net.initial().support();
        // [R](V) collects R[0](U, V) over U ⊆ m0.
        for (u, _, _) in rw.levels[0].sorted() {
            prop_assert!(u.is_subset(&m0));
        }
    }
}
