//! Oracles written straight from the definitions, sharing nothing with the
//! library beyond reading a net's fields.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use num_traits::Zero;
use sdpn::bayes::BayesNet;
use sdpn::rational::{self, Rational};
use sdpn::reductions::CnfFormula;
use sdpn::{IdSet, RewardFn, Sdpn};

fn enabled(net: &Sdpn, m: &[u32]) -> Vec<usize> {
    net.transitions()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.pre.iter().all(|&(p, k)| m[p] >= k))
        .map(|(i, _)| i)
        .collect()
}

fn fire(net: &Sdpn, m: &[u32], t: usize) -> Vec<u32> {
    let mut m = m.to_vec();
    for &(p, k) in &net.transitions()[t].pre {
        m[p] -= k;
    }
    for &(p, k) in &net.transitions()[t].post {
        m[p] += k;
    }
    m
}

pub fn payoff(rewards: &RewardFn, seen: &[bool]) -> Rational {
    rewards.iter().filter(|(q, _)| q.iter().all(|p| seen[p])).map(|(_, v)| v.clone()).sum()
}

/// One maximal firing sequence: transitions, probability, places marked.
pub struct OracleRun {
    pub transitions: Vec<usize>,
    pub probability: Rational,
    pub seen: Vec<bool>,
}

/// All maximal runs under D by recursion over firing sequences. Acyclic nets
/// only; recursion depth is capped as a guard.
pub fn oracle_runs(net: &Sdpn, d: &IdSet) -> Vec<OracleRun> {
    fn go(net: &Sdpn, d: &IdSet, m: Vec<u32>, seen: Vec<bool>, trace: Vec<usize>, prob: Rational, out: &mut Vec<OracleRun>) {
        assert!(trace.len() < 200, "oracle only handles terminating nets");
        let act: Vec<usize> = enabled(net, &m).into_iter().filter(|t| !d.contains(*t)).collect();
        if act.is_empty() {
            out.push(OracleRun { transitions: trace, probability: prob, seen });
            return;
        }
        let total: Rational = act.iter().map(|&t| net.transitions()[t].rate.clone()).sum();
        for &t in &act {
            let m2 = fire(net, &m, t);
            let mut seen2 = seen.clone();
            for (p, &k) in m2.iter().enumerate() {
                if k > 0 {
                    seen2[p] = true;
                }
            }
            let mut tr = trace.clone();
            tr.push(t);
            go(net, d, m2, seen2, tr, &prob * &net.transitions()[t].rate / &total, out);
        }
    }
    let m0 = net.initial().0.clone();
    let seen: Vec<bool> = m0.iter().map(|&k| k > 0).collect();
    let mut out = Vec::new();
    go(net, d, m0, seen, vec![], rational::one(), &mut out);
    out
}

pub fn oracle_value(net: &Sdpn, d: &IdSet) -> Rational {
    oracle_runs(net, d).iter().map(|r| &r.probability * payoff(net.rewards(), &r.seen)).sum()
}

/// Number of (marking, seen) pairs reachable in the MDP: from (m, Q) every
/// action D moves to (m', Q ∪ supp m) for each active t, or to (m, Q ∪ supp m)
/// when nothing is active.
pub fn oracle_mdp_states(net: &Sdpn) -> usize {
    type S = (Vec<u32>, Vec<bool>);
    let np = net.num_places();
    let start: S = (net.initial().0.clone(), vec![false; np]);
    let mut seen: HashSet<S> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some((m, q)) = queue.pop_front() {
        let mut q2 = q.clone();
        for p in 0..np {
            q2[p] |= m[p] > 0;
        }
        let en = enabled(net, &m);
        let ctrl: Vec<usize> = en.iter().copied().filter(|&t| net.controllable().contains(t)).collect();
        let mut next = Vec::new();
        for mask in 0..1u64 << ctrl.len() {
            let off: Vec<usize> = (0..ctrl.len()).filter(|b| mask >> b & 1 == 1).map(|b| ctrl[b]).collect();
            let act: Vec<usize> = en.iter().copied().filter(|t| !off.contains(t)).collect();
            if act.is_empty() {
                next.push((m.clone(), q2.clone()));
            }
            for t in act {
                next.push((fire(net, &m, t), q2.clone()));
            }
        }
        for s in next {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen.len()
}

/// P(fixed) by summing the full joint over every assignment.
pub fn oracle_bn_probability(bn: &BayesNet, fixed: &[(usize, usize)]) -> Rational {
    let n = bn.len();
    let sizes: Vec<usize> = bn.nodes().iter().map(|x| x.domain.len()).collect();
    let total: usize = sizes.iter().product();
    let mut sum = Rational::zero();
    for mut code in 0..total {
        let mut vals = vec![0; n];
        for i in (0..n).rev() {
            vals[i] = code % sizes[i];
            code /= sizes[i];
        }
        if fixed.iter().any(|&(i, v)| vals[i] != v) {
            continue;
        }
        let mut prod = rational::one();
        for (i, node) in bn.nodes().iter().enumerate() {
            let mut row = 0;
            for &p in &node.parents {
                row = row * sizes[p] + vals[p];
            }
            prod *= &node.cpt[row][vals[i]];
        }
        sum += prod;
    }
    sum
}

pub fn oracle_sat(phi: &CnfFormula) -> bool {
    (0..1u64 << phi.num_vars).any(|mask| {
        phi.clauses.iter().all(|c| c.iter().any(|&(x, pos)| (mask >> x & 1 == 1) == pos))
    })
}

/// Every subset of the controllable transitions, smallest index bit first.
pub fn all_d(net: &Sdpn) -> Vec<IdSet> {
    let c = net.controllable().to_vec();
    (0..1u64 << c.len())
        .map(|mask| IdSet::from_iter(net.num_transitions(), (0..c.len()).filter(|b| mask >> b & 1 == 1).map(|b| c[b])))
        .collect()
}

pub fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}
