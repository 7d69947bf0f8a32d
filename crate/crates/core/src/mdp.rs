//! Compilation of a net into a finite MDP over (marking, places seen so far),
//! with actions the deactivation sets. Positional policies on this MDP are
//! exactly the history-aware policies of the net that look at the current
//! marking and the places already collected.

use std::collections::HashMap;

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::idset::{subsets, IdSet};
use crate::net::{Marking, Sdpn, DEFAULT_STATE_CAP};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MdpState {
    pub marking: Marking,
    /// Q: places marked in some earlier marking.
    pub seen: IdSet,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub target: usize,
    pub probability: Rational,
    pub reward: Rational,
}

#[derive(Clone, Debug)]
pub struct Action {
    /// Canonical representative: the deactivated transitions that are
    /// actually enabled in the state. Every D ⊆ C with the same intersection
    /// behaves identically.
    pub deactivated: IdSet,
    pub outcomes: Vec<Outcome>,
}

#[derive(Clone, Debug)]
pub struct Mdp {
    pub states: Vec<MdpState>,
    /// Actions per state in binary-counter order over the enabled
    /// controllable transitions; index 0 deactivates nothing.
    pub actions: Vec<Vec<Action>>,
    /// Enabled controllable transitions per state.
    pub choice: Vec<IdSet>,
    controllable: IdSet,
}

impl Mdp {
    pub const INITIAL: usize = 0;

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn controllable(&self) -> &IdSet {
        &self.controllable
    }

    /// The action at state `s` that corresponds to deactivating `d`.
    pub fn action_for(&self, s: usize, d: &IdSet) -> usize {
        let eff = d.intersection(&self.choice[s]);
        self.actions[s].iter().position(|a| a.deactivated == eff).expect("every restriction of d is an action")
    }

    pub fn is_acyclic_modulo_self_loops(&self) -> bool {
        let g = self.graph(|s| (0..self.actions[s].len()).collect());
        tarjan_scc(&g).iter().all(|c| c.len() == 1)
    }

    fn graph(&self, pick: impl Fn(usize) -> Vec<usize>) -> DiGraph<(), (), usize> {
        let mut g = DiGraph::with_capacity(self.states.len(), 0);
        for _ in 0..self.states.len() {
            g.add_node(());
        }
        for s in 0..self.states.len() {
            for a in pick(s) {
                for o in &self.actions[s][a].outcomes {
                    if o.target != s {
                        g.update_edge(s.into(), o.target.into(), ());
                    }
                }
            }
        }
        g
    }

    /// Textual dump with states, action representatives, δ and r.
    pub fn to_json(&self, net: &Sdpn) -> serde_json::Value {
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let marking: serde_json::Map<_, _> = s
                    .marking
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(p, &k)| (net.place_name(p).to_string(), json!(k)))
                    .collect();
                let actions: Vec<_> = self.actions[i]
                    .iter()
                    .map(|a| {
                        json!({
                            "deactivate": net.transition_names(&a.deactivated),
                            "delta": a.outcomes.iter().map(|o| json!({
                                "to": o.target,
                                "p": rational::show(&o.probability),
                                "r": rational::show(&o.reward),
                            })).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json!({"id": i, "marking": marking, "seen": net.place_names(&s.seen), "actions": actions})
            })
            .collect();
        json!({"initial": Self::INITIAL, "states": states})
    }
}

/// Σ R(Y) over Y ⊆ Q' with Y ⊄ Q, or over all Y ⊆ Q' on the very first step.
fn step_reward(net: &Sdpn, q: &IdSet, q2: &IdSet) -> Rational {
    net.rewards()
        .iter()
        .filter(|(y, _)| y.is_subset(q2) && (q.is_empty() || !y.is_subset(q)))
        .map(|(_, v)| v)
        .sum()
}

pub fn compile_mdp(net: &Sdpn) -> Result<Mdp> {
    compile_mdp_with_cap(net, DEFAULT_STATE_CAP)
}

pub fn compile_mdp_with_cap(net: &Sdpn, state_cap: usize) -> Result<Mdp> {
    // With an empty initial marking Q would stay empty and R(∅) would be
    // collected on every step.
    if net.initial().is_empty() && !net.rewards().get(&net.empty_places()).is_zero() {
        return Err(Error::EmptyInitialMarking);
    }
    let s0 = MdpState { marking: net.initial().clone(), seen: net.empty_places() };
    let mut index = HashMap::from([(s0.clone(), 0usize)]);
    let mut states = vec![s0];
    let mut actions = Vec::new();
    let mut choice = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let MdpState { marking: m, seen: q } = states[next].clone();
        let q2 = q.union(&m.support());
        let reward = step_reward(net, &q, &q2);
        let en = net.enabled(&m);
        let ctrl = en.intersection(net.controllable());
        let mut acts = Vec::new();
        for d in subsets(&ctrl) {
            let live = en.difference(&d);
            let mut dist: Vec<(MdpState, Rational)> = Vec::new();
            if live.is_empty() {
                dist.push((MdpState { marking: m.clone(), seen: q2.clone() }, Rational::one()));
            } else {
                let total: Rational = live.iter().map(|t| net.rate(t)).sum();
                for t in live.iter() {
                    let target = MdpState { marking: net.fire(&m, t), seen: q2.clone() };
                    let p = net.rate(t) / &total;
                    match dist.iter_mut().find(|(s, _)| *s == target) {
                        Some((_, acc)) => *acc += p,
                        None => dist.push((target, p)),
                    }
                }
            }
            let mut outcomes = Vec::with_capacity(dist.len());
            for (target, probability) in dist {
                let id = match index.get(&target) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= state_cap {
                            return Err(Error::BudgetExceeded(state_cap));
                        }
                        index.insert(target.clone(), states.len());
                        states.push(target);
                        states.len() - 1
                    }
                };
                outcomes.push(Outcome { target: id, probability, reward: reward.clone() });
            }
            acts.push(Action { deactivated: d, outcomes });
        }
        actions.push(acts);
        choice.push(ctrl);
        next += 1;
    }
    Ok(Mdp { states, actions, choice, controllable: net.controllable().clone() })
}

/// A deactivation set per state, stored as an action index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalPolicy {
    pub choice: Vec<usize>,
}

impl PositionalPolicy {
    pub fn constant(mdp: &Mdp, d: &IdSet) -> PositionalPolicy {
        PositionalPolicy { choice: (0..mdp.num_states()).map(|s| mdp.action_for(s, d)).collect() }
    }

    pub fn deactivation<'a>(&self, mdp: &'a Mdp, s: usize) -> &'a IdSet {
        &mdp.actions[s][self.choice[s]].deactivated
    }
}

/// Expected reward of one action at `s` given values of all other states.
/// A self-loop with probability q < 1 is folded in geometrically; a certain
/// self-loop scores its own reward once (always zero, Q has stopped growing).
fn action_value(mdp: &Mdp, s: usize, a: usize, v: &[Rational]) -> Rational {
    let mut rest = Rational::zero();
    let mut stay = Rational::zero();
    let mut stay_reward = Rational::zero();
    for o in &mdp.actions[s][a].outcomes {
        if o.target == s {
            stay += &o.probability;
            stay_reward += &o.probability * &o.reward;
        } else {
            rest += &o.probability * (&o.reward + &v[o.target]);
        }
    }
    if stay.is_one() {
        Rational::zero()
    } else {
        (rest + stay_reward) / (Rational::one() - stay)
    }
}

/// Values of every state under `pi`.
pub fn evaluate_policy_all(mdp: &Mdp, pi: &PositionalPolicy) -> Vec<Rational> {
    let n = mdp.num_states();
    let g = mdp.graph(|s| vec![pi.choice[s]]);
    let mut v = vec![Rational::zero(); n];
    // Tarjan yields components with successors first.
    for comp in tarjan_scc(&g) {
        if comp.len() == 1 {
            let s = comp[0].index();
            v[s] = action_value(mdp, s, pi.choice[s], &v);
        } else {
            solve_component(mdp, pi, &comp.iter().map(|x| x.index()).collect::<Vec<_>>(), &mut v);
        }
    }
    v
}

/// (I - P_SS) v_S = b over a strongly connected component S. A component
/// nothing leaves is a closed zero-reward class and gets value 0.
fn solve_component(mdp: &Mdp, pi: &PositionalPolicy, comp: &[usize], v: &mut [Rational]) {
    let pos: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let k = comp.len();
    let mut a = vec![vec![Rational::zero(); k + 1]; k];
    let mut leaves = false;
    for (i, &s) in comp.iter().enumerate() {
        a[i][i] += Rational::one();
        for o in &mdp.actions[s][pi.choice[s]].outcomes {
            a[i][k] += &o.probability * &o.reward;
            match pos.get(&o.target) {
                Some(&j) => a[i][j] -= &o.probability,
                None => {
                    leaves = true;
                    a[i][k] += &o.probability * &v[o.target];
                }
            }
        }
    }
    if !leaves {
        for &s in comp {
            v[s] = Rational::zero();
        }
        return;
    }
    for (i, x) in gauss(a).into_iter().enumerate() {
        v[comp[i]] = x;
    }
}

/// Exact Gaussian elimination on an augmented nonsingular system.
fn gauss(mut a: Vec<Vec<Rational>>) -> Vec<Rational> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero()).expect("transient component gives a nonsingular system");
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=k {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    a.into_iter().map(|row| row[k].clone()).collect()
}

/// Expected total reward from s0.
pub fn evaluate_policy(mdp: &Mdp, pi: &PositionalPolicy) -> Rational {
    evaluate_policy_all(mdp, pi).swap_remove(Mdp::INITIAL)
}

#[derive(Clone, Copy, Debug)]
pub struct OptimiseOptions {
    /// Iteration bound for the cyclic case.
    pub horizon: usize,
}

impl Default for OptimiseOptions {
    fn default() -> Self {
        OptimiseOptions { horizon: 100_000 }
    }
}

pub fn optimal_positional_policy(mdp: &Mdp) -> Result<(PositionalPolicy, Rational)> {
    optimal_positional_policy_with(mdp, OptimiseOptions::default())
}

/// Best positional policy. Ties go to the first action, i.e. the smallest
/// deactivation set in binary-counter order.
pub fn optimal_positional_policy_with(mdp: &Mdp, opts: OptimiseOptions) -> Result<(PositionalPolicy, Rational)> {
    let n = mdp.num_states();
    if mdp.is_acyclic_modulo_self_loops() {
        let g = mdp.graph(|s| (0..mdp.actions[s].len()).collect());
        let mut v = vec![Rational::zero(); n];
        let mut choice = vec![0; n];
        for comp in tarjan_scc(&g) {
            let s = comp[0].index();
            let (a, best) = argmax(mdp, s, &v);
            v[s] = best;
            choice[s] = a;
        }
        let value = v.swap_remove(Mdp::INITIAL);
        return Ok((PositionalPolicy { choice }, value));
    }
    cyclic_optimum(mdp, opts)
}

fn argmax(mdp: &Mdp, s: usize, v: &[Rational]) -> (usize, Rational) {
    let mut best = (0, action_value(mdp, s, 0, v));
    for a in 1..mdp.actions[s].len() {
        let x = action_value(mdp, s, a, v);
        if x > best.1 {
            best = (a, x);
        }
    }
    best
}

/// Floating-point value iteration picks a candidate, which is then evaluated
/// exactly and improved until no single action beats it.
fn cyclic_optimum(mdp: &Mdp, opts: OptimiseOptions) -> Result<(PositionalPolicy, Rational)> {
    let n = mdp.num_states();
    let qf = |s: usize, a: usize, v: &[f64]| -> f64 {
        mdp.actions[s][a]
            .outcomes
            .iter()
            .map(|o| rational::to_f64(&o.probability) * (rational::to_f64(&o.reward) + v[o.target]))
            .sum()
    };
    let mut v = vec![0.0f64; n];
    let mut converged = false;
    for _ in 0..opts.horizon {
        let next: Vec<f64> = (0..n)
            .map(|s| (0..mdp.actions[s].len()).map(|a| qf(s, a, &v)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::HorizonNotConverged(opts.horizon));
    }
    let mut choice: Vec<usize> = (0..n)
        .map(|s| {
            let (mut best, mut bv) = (0, qf(s, 0, &v));
            for a in 1..mdp.actions[s].len() {
                let x = qf(s, a, &v);
                if x > bv + 1e-12 {
                    best = a;
                    bv = x;
                }
            }
            best
        })
        .collect();
    for _ in 0..n.max(16) {
        let pi = PositionalPolicy { choice: choice.clone() };
        let exact = evaluate_policy_all(mdp, &pi);
        let mut improved = false;
        for s in 0..n {
            let q = |a: usize| -> Rational {
                mdp.actions[s][a].outcomes.iter().map(|o| &o.probability * (&o.reward + &exact[o.target])).sum()
            };
            let cur = q(choice[s]);
            if let Some(a) = (0..mdp.actions[s].len()).find(|&a| q(a) > cur) {
                choice[s] = a;
                improved = true;
            }
        }
        if !improved {
            let value = exact[Mdp::INITIAL].clone();
            return Ok((pi, value));
        }
    }
    Err(Error::HorizonNotConverged(opts.horizon))
}

/// Best constant policy by evaluating every D ⊆ C on the MDP.
pub fn best_constant_policy_via_mdp(mdp: &Mdp) -> (IdSet, Rational) {
    let all: Vec<IdSet> = subsets(mdp.controllable()).collect();
    let values: Vec<Rational> =
        all.par_iter().map(|d| evaluate_policy(mdp, &PositionalPolicy::constant(mdp, d))).collect();
    let mut best = 0;
    for i in 1..all.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    (all[best].clone(), values[best].clone())
}
