mod common;

use num_traits::{One, Zero};
use sdpn::bench::{gen_family, Family};
use sdpn::fixtures;
use sdpn::rational::{int, ratio, to_f64};
use sdpn::semantics::{enumerate_runs, exact_value, fcon_value, psi, simulate, step_distribution, RunBudget, Step};
use sdpn::{Error, NetBuilder, Rational};

#[test]
fn goal_values_against_oracle() {
    let net = fixtures::goal();
    for d in common::all_d(&net) {
        assert_eq!(exact_value(&net, &d, RunBudget::default()).unwrap(), common::oracle_value(&net, &d));
    }
    let d = net.deactivation(&["t6"]).unwrap();
    assert_eq!(exact_value(&net, &d, RunBudget::default()).unwrap(), ratio(3, 4));
    assert_eq!(exact_value(&net, &net.empty_transitions(), RunBudget::default()).unwrap(), ratio(5, 8));
}

#[test]
fn run_probabilities_sum_to_one() {
    for net in [fixtures::goal(), gen_family(Family::N3, 3, 2, 100).unwrap().net] {
        for d in common::all_d(&net) {
            let runs = enumerate_runs(&net, &d, RunBudget::default()).unwrap();
            let total: Rational = runs.iter().map(|r| r.probability.clone()).sum();
            assert!(total.is_one());
            assert_eq!(runs.len(), common::oracle_runs(&net, &d).len());
        }
    }
}

#[test]
fn fcon_closed_form_matches_enumeration() {
    for fam in [Family::N1, Family::N2] {
        for n in 1..=6 {
            let net = gen_family(fam, n, n as u64, 1_000_000).unwrap().net;
            for d in common::all_d(&net) {
                assert_eq!(
                    fcon_value(&net, &d).unwrap(),
                    exact_value(&net, &d, RunBudget::default()).unwrap(),
                    "{fam} n={n} D={}",
                    net.show_transitions(&d)
                );
            }
        }
    }
}

#[test]
fn fcon_rejects_non_occurrence_nets() {
    let net = fixtures::goal();
    assert!(matches!(fcon_value(&net, &net.empty_transitions()), Err(Error::NotOccurrenceNet)));
}

#[test]
fn dead_marking_is_an_idle_step() {
    let net = fixtures::goal();
    let m = net.fire(&net.fire(net.initial(), 0), 3);
    let dist = step_distribution(&net, &m, &net.empty_transitions());
    assert_eq!(dist, vec![(Step::Idle, Rational::one())]);
    let dist = step_distribution(&net, net.initial(), &net.deactivation(&["t1"]).unwrap());
    let total: Rational = dist.iter().map(|(_, p)| p.clone()).sum();
    assert!(total.is_one());
    assert_eq!(dist.len(), 3);
}

#[test]
fn rates_weight_the_race() {
    let net = NetBuilder::new()
        .places(["a", "b", "c"])
        .transition("fast", &["a"], &["b"], int(3))
        .transition("slow", &["a"], &["c"], int(1))
        .initial(&["a"])
        .reward(&["b"], int(1))
        .build()
        .unwrap();
    assert_eq!(exact_value(&net, &net.empty_transitions(), RunBudget::default()).unwrap(), ratio(3, 4));
}

#[test]
fn empty_reward_sets_pay_from_the_start() {
    let net = NetBuilder::new().place("a").reward::<&str>(&[], int(2)).initial(&["a"]).build().unwrap();
    assert_eq!(exact_value(&net, &net.empty_transitions(), RunBudget::default()).unwrap(), int(2));
}

#[test]
fn run_budget_is_enforced() {
    let net = fixtures::twogoal();
    let r = exact_value(&net, &net.empty_transitions(), RunBudget { max_runs: 2, max_length: 100 });
    assert!(matches!(r, Err(Error::BudgetExceeded(_))));
}

#[test]
fn simulation_converges() {
    let net = fixtures::goal();
    let (lo, hi) = net.rewards().bounds();
    let width = to_f64(&(hi - lo));
    for d in common::all_d(&net) {
        let exact = to_f64(&exact_value(&net, &d, RunBudget::default()).unwrap());
        let runs = 20_000;
        let s = simulate(&net, &d, 7, runs, 100).unwrap();
        assert!((to_f64(&s.mean) - exact).abs() <= 4.0 * width / (runs as f64).sqrt());
    }
}

#[test]
fn simulation_is_reproducible_across_thread_counts() {
    let net = fixtures::goal();
    let d = net.deactivation(&["t6"]).unwrap();
    let a = simulate(&net, &d, 42, 5000, 100).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| simulate(&net, &d, 42, 5000, 100).unwrap());
    assert_eq!(a.mean, b.mean);
    assert_ne!(a.mean, simulate(&net, &d, 43, 5000, 100).unwrap().mean);
}

#[test]
fn simulation_step_cap() {
    let net = NetBuilder::new().place("a").transition("t", &["a"], &["a"], int(1)).initial(&["a"]).build().unwrap();
    assert!(matches!(simulate(&net, &net.empty_transitions(), 1, 10, 50), Err(Error::StepCapExceeded(50))));
}

#[test]
fn psi_is_strictly_monotone() {
    let net = fixtures::goal();
    let t = psi(net.rewards());
    assert!(!t.is_degenerate());
    assert_eq!((t.v_min.clone(), t.v_max.clone()), (int(-3), int(3)));
    let values: Vec<Rational> =
        common::all_d(&net).iter().map(|d| exact_value(&net, d, RunBudget::default()).unwrap()).collect();
    for a in &values {
        for b in &values {
            assert_eq!(a > b, t.apply(a) > t.apply(b));
        }
        assert_eq!(&t.invert(&t.apply(a)), a);
    }
    let flat = psi(&sdpn::RewardFn::new());
    assert!(flat.is_degenerate());
    assert!(flat.apply(&int(5)).is_zero());
}
