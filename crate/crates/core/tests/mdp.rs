mod common;

use num_traits::{One, Zero};
use sdpn::bench::{gen_family, Family};
use sdpn::fixtures;
use sdpn::mdp::{
    best_constant_policy_via_mdp, compile_mdp, compile_mdp_with_cap, evaluate_policy, optimal_positional_policy,
    Mdp, PositionalPolicy,
};
use sdpn::rational::{int, ratio, to_f64};
use sdpn::semantics::{exact_value, RunBudget};
use sdpn::{Error, NetBuilder, Rational, RewardFn, Sdpn};

/// Plain floating-point value iteration over the compiled tables.
fn value_iteration(mdp: &Mdp, iterations: usize) -> f64 {
    let mut v = vec![0.0; mdp.num_states()];
    for _ in 0..iterations {
        v = (0..mdp.num_states())
            .map(|s| {
                mdp.actions[s]
                    .iter()
                    .map(|a| a.outcomes.iter().map(|o| to_f64(&o.probability) * (to_f64(&o.reward) + v[o.target])).sum())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
    }
    v[Mdp::INITIAL]
}

fn fixture_nets() -> Vec<(String, Sdpn)> {
    let mut v = vec![("GOAL".to_string(), fixtures::goal()), ("TWOGOAL".to_string(), fixtures::twogoal())];
    for fam in [Family::N1, Family::N2, Family::N3] {
        for n in 1..=3 {
            v.push((format!("{fam}({n})"), gen_family(fam, n, 11, 1000).unwrap().net));
        }
    }
    v
}

#[test]
fn state_count_matches_independent_exploration() {
    for (name, net) in fixture_nets() {
        assert_eq!(compile_mdp(&net).unwrap().num_states(), common::oracle_mdp_states(&net), "{name}");
    }
}

#[test]
fn twogoal_state_count() {
    // Sixteen distinct (marking, seen) pairs; see the README for the
    // relation to the published count.
    assert_eq!(compile_mdp(&fixtures::twogoal()).unwrap().num_states(), 16);
}

#[test]
fn rows_are_distributions() {
    for (_, net) in fixture_nets() {
        let mdp = compile_mdp(&net).unwrap();
        for (s, acts) in mdp.actions.iter().enumerate() {
            assert!(!acts.is_empty());
            for a in acts {
                let total: Rational = a.outcomes.iter().map(|o| o.probability.clone()).sum();
                assert!(total.is_one());
                for o in &a.outcomes {
                    let (from, to) = (&mdp.states[s], &mdp.states[o.target]);
                    assert_eq!(to.seen, from.seen.union(&from.marking.support()));
                }
            }
        }
    }
}

#[test]
fn dead_states_loop() {
    let net = fixtures::goal();
    let mdp = compile_mdp(&net).unwrap();
    for (s, st) in mdp.states.iter().enumerate() {
        if net.enabled(&st.marking).is_empty() {
            assert_eq!(mdp.actions[s].len(), 1);
            let o = &mdp.actions[s][0].outcomes;
            assert_eq!(o.len(), 1);
            let succ = &mdp.states[o[0].target];
            assert_eq!(succ.marking, st.marking);
            if st.marking.support().is_subset(&st.seen) {
                assert_eq!(o[0].target, s);
                assert!(o[0].reward.is_zero());
            }
        }
    }
}

#[test]
fn constant_policies_agree_with_run_semantics() {
    for (name, net) in fixture_nets() {
        let mdp = compile_mdp(&net).unwrap();
        for d in common::all_d(&net) {
            let via_mdp = evaluate_policy(&mdp, &PositionalPolicy::constant(&mdp, &d));
            let via_runs = exact_value(&net, &d, RunBudget::default()).unwrap();
            assert_eq!(via_mdp, via_runs, "{name} D={}", net.show_transitions(&d));
        }
    }
}

#[test]
fn twogoal_constant_policies() {
    let net = fixtures::twogoal();
    let mdp = compile_mdp(&net).unwrap();
    let eval = |ids: &[&str]| evaluate_policy(&mdp, &PositionalPolicy::constant(&mdp, &net.deactivation(ids).unwrap()));
    assert_eq!(eval(&["t1", "t2"]), int(0));
    assert_eq!(eval(&["t1"]), ratio(1, 2));
    assert_eq!(eval(&["t2"]), ratio(1, 2));
    assert_eq!(eval(&[]), ratio(1, 2));
}

#[test]
fn twogoal_positional_gap() {
    let net = fixtures::twogoal();
    let mdp = compile_mdp(&net).unwrap();
    let (pi, v) = optimal_positional_policy(&mdp).unwrap();
    assert_eq!(v, int(1));
    assert_eq!(evaluate_policy(&mdp, &pi), int(1));
    assert!((value_iteration(&mdp, 200) - 1.0).abs() < 1e-9);
    assert_eq!(pi.deactivation(&mdp, Mdp::INITIAL), &net.deactivation(&["t1", "t2"]).unwrap());
    let (d, vc) = best_constant_policy_via_mdp(&mdp);
    assert_eq!(vc, ratio(1, 2));
    // ∅, {t1} and {t2} tie at 1/2; the first in subset order wins.
    assert!(d.is_empty());
}

#[test]
fn goal_optimum_is_constant() {
    let net = fixtures::goal();
    let mdp = compile_mdp(&net).unwrap();
    let (_, v) = optimal_positional_policy(&mdp).unwrap();
    assert_eq!(v, ratio(3, 4));
    assert!((value_iteration(&mdp, 50) - 0.75).abs() < 1e-12);
    let (d, vc) = best_constant_policy_via_mdp(&mdp);
    assert_eq!((d, vc), (net.deactivation(&["t6"]).unwrap(), ratio(3, 4)));
}

#[test]
fn positional_dominates_constant() {
    for (name, net) in fixture_nets() {
        let mdp = compile_mdp(&net).unwrap();
        let (_, v) = optimal_positional_policy(&mdp).unwrap();
        let (_, vc) = best_constant_policy_via_mdp(&mdp);
        assert!(v >= vc, "{name}");
        assert!((value_iteration(&mdp, 100) - to_f64(&v)).abs() < 1e-9, "{name}");
    }
}

#[test]
fn no_rewards_no_value() {
    for (_, net) in fixture_nets() {
        let net = net.with_rewards(RewardFn::new());
        let mdp = compile_mdp(&net).unwrap();
        assert!(optimal_positional_policy(&mdp).unwrap().1.is_zero());
        let pi = PositionalPolicy { choice: mdp.actions.iter().map(|a| a.len() - 1).collect() };
        assert!(evaluate_policy(&mdp, &pi).is_zero());
    }
}

#[test]
fn trivial_nets() {
    let empty = NetBuilder::new().build().unwrap();
    let mdp = compile_mdp(&empty).unwrap();
    assert_eq!(mdp.num_states(), 1);
    assert_eq!(mdp.actions[0][0].outcomes[0].target, 0);

    // One marked place, no transitions: (m0, ∅) then (m0, {p}) forever.
    let still = NetBuilder::new().place("p").initial(&["p"]).reward(&["p"], int(1)).build().unwrap();
    let mdp = compile_mdp(&still).unwrap();
    assert_eq!(mdp.num_states(), 2);
    assert_eq!(optimal_positional_policy(&mdp).unwrap().1, int(1));

    let bad = NetBuilder::new().place("p").reward::<&str>(&[], int(1)).build().unwrap();
    assert!(matches!(compile_mdp(&bad), Err(Error::EmptyInitialMarking)));
}

#[test]
fn budget_is_explicit() {
    let net = gen_family(Family::N1, 4, 0, 1000).unwrap().net;
    assert!(matches!(compile_mdp_with_cap(&net, 10), Err(Error::BudgetExceeded(10))));
}

#[test]
fn reward_increments_stop_once_seen_set_is_stable() {
    let net = fixtures::goal();
    let mdp = compile_mdp(&net).unwrap();
    for (s, acts) in mdp.actions.iter().enumerate() {
        let st = &mdp.states[s];
        if !st.seen.is_empty() && st.marking.support().is_subset(&st.seen) {
            for a in acts {
                assert!(a.outcomes.iter().all(|o| o.reward.is_zero()));
            }
        }
    }
}

#[test]
fn json_dump_is_complete() {
    let net = fixtures::twogoal();
    let mdp = compile_mdp(&net).unwrap();
    let j = mdp.to_json(&net);
    assert_eq!(j["states"].as_array().unwrap().len(), 16);
    assert_eq!(j["initial"], 0);
}
