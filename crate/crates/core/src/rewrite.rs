//! Reward rewriting for safe acyclic free-choice nets. Place rewards are
//! pushed backwards through the cells, one cell per level, until they become
//! a reward [R] on sets of transitions. Because the cells of such a net fire
//! independently, the value of a constant policy is then a sum over the
//! support of [R] of products of local choice probabilities.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::net::{classify, compute_cells, order_cells, Cell, Sdpn, DEFAULT_STATE_CAP};
use crate::rational::{self, Rational};

/// R[k] : 2^P × 2^T -> Q, keyed by (U, V).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxReward {
    pub entries: BTreeMap<(IdSet, IdSet), Rational>,
}

impl AuxReward {
    fn add(&mut self, key: (IdSet, IdSet), v: &Rational) {
        let slot = self.entries.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, u: &IdSet, v: &IdSet) -> Rational {
        self.entries.get(&(u.clone(), v.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    /// Entries sorted by (|V|, V, |U|, U) member lists, for display.
    pub fn sorted(&self) -> Vec<(&IdSet, &IdSet, &Rational)> {
        let mut v: Vec<_> = self.entries.iter().map(|((u, w), x)| (u, w, x)).collect();
        v.sort_by_key(|(u, w, _)| (w.key(), u.key()));
        v
    }
}

/// [R] : 2^T -> Q.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionReward {
    pub entries: BTreeMap<IdSet, Rational>,
}

impl TransitionReward {
    pub fn get(&self, tau: &IdSet) -> Rational {
        self.entries.get(tau).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sorted(&self) -> Vec<(&IdSet, &Rational)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by_key(|(t, _)| (t.len(), t.key()));
        v
    }
}

#[derive(Clone, Debug)]
pub struct Rewriting {
    /// C_1 .. C_m in the order used.
    pub cells: Vec<Cell>,
    /// P_0 .. P_m.
    pub place_bounds: Vec<IdSet>,
    /// R[0] .. R[m].
    pub levels: Vec<AuxReward>,
    pub transition_reward: TransitionReward,
    /// Contributions discarded because their new place set left P_k. These
    /// need places that no configuration can mark together.
    pub dropped: usize,
}

impl Rewriting {
    pub fn support_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(AuxReward::len).collect()
    }

    pub fn to_json(&self, net: &Sdpn) -> serde_json::Value {
        let levels: Vec<_> = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, lvl)| {
                json!({
                    "level": k,
                    "entries": lvl.sorted().into_iter().map(|(u, v, x)| json!({
                        "places": net.place_names(u),
                        "transitions": net.transition_names(v),
                        "value": rational::show(x),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "cells": self.cells.iter().map(|c| c.members.iter().map(|&t| net.transition_name(t)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "levels": levels,
            "transition_reward": transition_reward_json(net, &self.transition_reward),
            "dropped": self.dropped,
        })
    }
}

pub fn transition_reward_json(net: &Sdpn, tr: &TransitionReward) -> serde_json::Value {
    tr.sorted()
        .into_iter()
        .map(|(t, x)| json!({"transitions": net.transition_names(t), "value": rational::show(x)}))
        .collect()
}

/// Checks the preconditions, then rewrites.
pub fn rewrite_rewards(net: &Sdpn) -> Result<Rewriting> {
    let c = classify(net, DEFAULT_STATE_CAP)?;
    if !c.is_safc() {
        return Err(Error::NotSafc(c.safc_violations()));
    }
    if !c.initial_no_predecessors {
        return Err(Error::AssumptionViolated("an initially marked place has a producer".into()));
    }
    rewrite_rewards_unchecked(net)
}

/// Rewriting without the reachability-based safety check. The caller
/// vouches for the net being safe, acyclic and free-choice.
pub fn rewrite_rewards_unchecked(net: &Sdpn) -> Result<Rewriting> {
    let cells = order_cells(net)?;
    let m = cells.len();
    let posts: Vec<IdSet> = cells.iter().map(|c| c.post(net)).collect();
    let all = IdSet::from_iter(net.num_places(), 0..net.num_places());
    let place_bounds: Vec<IdSet> = (0..=m)
        .map(|k| {
            let mut later = net.empty_places();
            let mut earlier = net.empty_places();
            posts[k..].iter().for_each(|p| later.union_with(p));
            posts[..k].iter().for_each(|p| earlier.union_with(p));
            all.difference(&later).union(&earlier)
        })
        .collect();

    let mut top = AuxReward::default();
    for (q, v) in net.rewards().iter() {
        top.add((q.clone(), net.empty_transitions()), v);
    }
    let mut levels = vec![top];
    let mut dropped = 0;
    for k in (0..m).rev() {
        let bound = &place_bounds[k];
        let upper = levels.last().unwrap();
        let mut lower = AuxReward::default();
        for ((u2, v2), x) in &upper.entries {
            if u2.is_subset(bound) {
                lower.add((u2.clone(), v2.clone()), x);
            }
            for &t in &cells[k].members {
                if u2.is_disjoint(net.post_set(t)) {
                    continue;
                }
                let u = u2.difference(net.post_set(t)).union(net.pre_set(t));
                if u.is_subset(bound) {
                    let mut v = v2.clone();
                    v.insert(t);
                    lower.add((u, v), x);
                } else {
                    dropped += 1;
                }
            }
        }
        levels.push(lower);
    }
    levels.reverse();

    let initial = net.initial().support();
    let mut transition_reward = TransitionReward::default();
    for ((u, v), x) in &levels[0].entries {
        if u.is_subset(&initial) {
            let slot = transition_reward.entries.entry(v.clone()).or_insert_with(Rational::zero);
            *slot += x;
        }
    }
    transition_reward.entries.retain(|_, x| !x.is_zero());
    Ok(Rewriting { cells, place_bounds, levels, transition_reward, dropped })
}

/// Cell membership lookup.
#[derive(Clone, Debug)]
pub struct Cells {
    pub cells: Vec<Cell>,
    pub cell_of: Vec<usize>,
}

impl Cells {
    pub fn new(net: &Sdpn) -> Cells {
        let cells = compute_cells(net);
        let mut cell_of = vec![0; net.num_transitions()];
        for (i, c) in cells.iter().enumerate() {
            for &t in &c.members {
                cell_of[t] = i;
            }
        }
        Cells { cells, cell_of }
    }

    /// Λ(t) / Σ_{t' ∈ cell(t) \ D} Λ(t'), or 0 if t ∈ D.
    pub fn local(&self, net: &Sdpn, d: &IdSet, t: usize) -> Rational {
        if d.contains(t) {
            return Rational::zero();
        }
        let live: Rational = self.cells[self.cell_of[t]].transitions.difference(d).iter().map(|u| net.rate(u)).sum();
        net.rate(t) / live
    }

    pub fn config_probability(&self, net: &Sdpn, d: &IdSet, tau: &IdSet) -> Rational {
        let mut p = Rational::one();
        for t in tau.iter() {
            p *= self.local(net, d, t);
            if p.is_zero() {
                break;
            }
        }
        p
    }
}

/// P^D(τ) for a configuration τ: the product of the local choice
/// probabilities of its transitions.
pub fn config_probability(net: &Sdpn, d: &IdSet, tau: &IdSet) -> Rational {
    Cells::new(net).config_probability(net, d, tau)
}

pub fn value_via_rewrite(net: &Sdpn, tr: &TransitionReward, d: &IdSet) -> Result<Rational> {
    net.check_deactivation(d)?;
    let cells = Cells::new(net);
    Ok(tr.entries.iter().map(|(tau, x)| cells.config_probability(net, d, tau) * x).sum())
}

/// Whether some firing sequence from m0 fires exactly τ. Greedy firing is
/// exact for the safe free-choice nets rewriting works on.
pub fn is_configuration(net: &Sdpn, tau: &IdSet) -> bool {
    let mut m = net.initial().clone();
    let mut left = tau.clone();
    loop {
        let next = left.iter().find(|&t| net.is_enabled(&m, t));
        match next {
            Some(t) => {
                m = net.fire(&m, t);
                left.remove(t);
            }
            None => return left.is_empty(),
        }
    }
}

/// One factor Λ(t)·x_t / Σ Λ(t')·x_t' of a term.
#[derive(Clone, Debug)]
pub struct Factor {
    pub transition: usize,
    /// (transition, rate, controllable) for every member of t's cell.
    pub cell: Vec<(usize, Rational, bool)>,
}

impl Factor {
    fn is_constant(&self) -> bool {
        self.cell.iter().all(|(_, _, c)| !c)
    }

    pub fn evaluate(&self, d: &IdSet) -> Rational {
        if d.contains(self.transition) {
            return Rational::zero();
        }
        let mut own = Rational::zero();
        let mut live = Rational::zero();
        for (u, rate, _) in &self.cell {
            if !d.contains(*u) {
                live += rate;
                if *u == self.transition {
                    own = rate.clone();
                }
            }
        }
        if live.is_zero() {
            Rational::zero()
        } else {
            own / live
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coefficient: Rational,
    pub factors: Vec<Factor>,
}

/// val^D as a function of the indicator variables x_t (x_t = 1 when the
/// controllable t stays active).
#[derive(Clone, Debug)]
pub struct ValueExpression {
    pub terms: Vec<Term>,
    pub names: Vec<String>,
    pub controllable: Vec<usize>,
}

impl ValueExpression {
    pub fn new(net: &Sdpn, tr: &TransitionReward) -> ValueExpression {
        let cells = Cells::new(net);
        let terms = tr
            .sorted()
            .into_iter()
            .map(|(tau, x)| {
                let mut coefficient = x.clone();
                let mut factors = Vec::new();
                for t in tau.iter() {
                    let cell = cells.cells[cells.cell_of[t]]
                        .members
                        .iter()
                        .map(|&u| (u, net.rate(u).clone(), net.controllable().contains(u)))
                        .collect();
                    let f = Factor { transition: t, cell };
                    if f.is_constant() {
                        coefficient *= f.evaluate(&net.empty_transitions());
                    } else {
                        factors.push(f);
                    }
                }
                Term { coefficient, factors }
            })
            .filter(|t| !t.coefficient.is_zero())
            .collect();
        ValueExpression {
            terms,
            names: net.transitions().iter().map(|t| t.id.clone()).collect(),
            controllable: net.controllable().to_vec(),
        }
    }

    pub fn evaluate(&self, d: &IdSet) -> Rational {
        self.terms
            .iter()
            .map(|t| t.factors.iter().fold(t.coefficient.clone(), |acc, f| if acc.is_zero() { acc } else { acc * f.evaluate(d) }))
            .sum()
    }

    fn weighted(&self, rate: &Rational, name: &str) -> String {
        if rate.is_one() {
            format!("x_{name}")
        } else {
            format!("{}*x_{name}", rational::show(rate))
        }
    }

    fn render_factor(&self, f: &Factor) -> String {
        let (_, rate, ctrl) = f.cell.iter().find(|(u, _, _)| *u == f.transition).unwrap();
        let name = &self.names[f.transition];
        let num = if *ctrl { self.weighted(rate, name) } else { rational::show(rate) };
        let mut fixed = Rational::zero();
        let mut parts = Vec::new();
        for (u, r, c) in &f.cell {
            if *c {
                parts.push(self.weighted(r, &self.names[*u]));
            } else {
                fixed += r;
            }
        }
        if !fixed.is_zero() {
            parts.push(rational::show(&fixed));
        }
        format!("{num}/({})", parts.join("+"))
    }
}

impl fmt::Display for ValueExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let mut parts = Vec::new();
            if !t.coefficient.is_one() || t.factors.is_empty() {
                parts.push(format!("({})", rational::show(&t.coefficient)));
            }
            parts.extend(t.factors.iter().map(|x| format!("({})", self.render_factor(x))));
            let _ = write!(out, "{}", parts.join("*"));
        }
        f.write_str(&out)
    }
}
