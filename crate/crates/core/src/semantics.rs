//! Discrete-time firing semantics under a constant deactivation set: run
//! enumeration, exact values, Monte Carlo estimation, the normalisation ψ and
//! the closed form for free-choice occurrence nets.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::net::{classify, compute_cells, Marking, RewardFn, Sdpn, DEFAULT_STATE_CAP};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Fire(usize),
    /// The marking is dead under the deactivation set.
    Idle,
}

/// Transitions that may fire in `m` once `d` is switched off.
pub fn active(net: &Sdpn, m: &Marking, d: &IdSet) -> IdSet {
    net.enabled(m).difference(d)
}

/// One-step distribution: each active transition with probability
/// proportional to its rate, or an idle step when nothing is active.
pub fn step_distribution(net: &Sdpn, m: &Marking, d: &IdSet) -> Vec<(Step, Rational)> {
    let act = active(net, m, d);
    if act.is_empty() {
        return vec![(Step::Idle, Rational::one())];
    }
    let total: Rational = act.iter().map(|t| net.rate(t)).sum();
    act.iter().map(|t| (Step::Fire(t), net.rate(t) / &total)).collect()
}

/// Limits on exhaustive run enumeration.
#[derive(Clone, Copy, Debug)]
pub struct RunBudget {
    pub max_runs: usize,
    pub max_length: usize,
}

impl Default for RunBudget {
    fn default() -> Self {
        RunBudget { max_runs: 5_000_000, max_length: 10_000 }
    }
}

/// A maximal run, i.e. a firing sequence ending in a dead marking.
#[derive(Clone, Debug)]
pub struct Run {
    pub transitions: Vec<usize>,
    pub probability: Rational,
    /// pl(μ): every place marked at some point.
    pub places: IdSet,
    pub final_marking: Marking,
}

impl Run {
    /// tr(μ) as a set.
    pub fn transition_set(&self, universe: usize) -> IdSet {
        IdSet::from_iter(universe, self.transitions.iter().copied())
    }
}

/// Depth-first walk over all maximal runs.
fn walk(
    net: &Sdpn,
    d: &IdSet,
    budget: RunBudget,
    visit: &mut dyn FnMut(&[usize], &Rational, &IdSet, &Marking),
) -> Result<()> {
    struct Ctx<'a> {
        net: &'a Sdpn,
        d: &'a IdSet,
        budget: RunBudget,
        runs: usize,
        seq: Vec<usize>,
    }
    fn go(
        cx: &mut Ctx,
        m: &Marking,
        prob: &Rational,
        seen: &IdSet,
        visit: &mut dyn FnMut(&[usize], &Rational, &IdSet, &Marking),
    ) -> Result<()> {
        let act = active(cx.net, m, cx.d);
        if act.is_empty() {
            cx.runs += 1;
            if cx.runs > cx.budget.max_runs {
                return Err(Error::BudgetExceeded(cx.budget.max_runs));
            }
            visit(&cx.seq, prob, seen, m);
            return Ok(());
        }
        if cx.seq.len() >= cx.budget.max_length {
            return Err(Error::BudgetExceeded(cx.budget.max_length));
        }
        let total: Rational = act.iter().map(|t| cx.net.rate(t)).sum();
        for t in act.iter() {
            let m2 = cx.net.fire(m, t);
            let seen2 = seen.union(&m2.support());
            let p2 = prob * cx.net.rate(t) / &total;
            cx.seq.push(t);
            go(cx, &m2, &p2, &seen2, visit)?;
            cx.seq.pop();
        }
        Ok(())
    }
    net.check_deactivation(d)?;
    let mut cx = Ctx { net, d, budget, runs: 0, seq: Vec::new() };
    let m0 = net.initial().clone();
    go(&mut cx, &m0, &Rational::one(), &m0.support(), visit)
}

pub fn enumerate_runs(net: &Sdpn, d: &IdSet, budget: RunBudget) -> Result<Vec<Run>> {
    let mut runs = Vec::new();
    walk(net, d, budget, &mut |seq, p, seen, m| {
        runs.push(Run {
            transitions: seq.to_vec(),
            probability: p.clone(),
            places: seen.clone(),
            final_marking: m.clone(),
        })
    })?;
    Ok(runs)
}

/// val^D by summing over every maximal run.
pub fn exact_value(net: &Sdpn, d: &IdSet, budget: RunBudget) -> Result<Rational> {
    let mut acc = Rational::zero();
    let r = net.rewards();
    walk(net, d, budget, &mut |_, p, seen, _| acc += p * r.payoff(seen))?;
    Ok(acc)
}

pub fn value_of_places(rewards: &RewardFn, places: &IdSet) -> Rational {
    rewards.payoff(places)
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub runs: usize,
    #[serde(serialize_with = "rational::ser")]
    pub mean: Rational,
    pub std_error: f64,
    pub seed: u64,
}

/// Seed of the generator for run `i`. Each run owns its stream, so the
/// estimate does not depend on how runs are spread over threads.
fn run_seed(seed: u64, i: u64) -> u64 {
    seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn simulate_one(net: &Sdpn, d: &IdSet, rates: &[f64], seed: u64, step_cap: usize) -> Result<Rational> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut m = net.initial().clone();
    let mut seen = m.support();
    for _ in 0..step_cap {
        let act = active(net, &m, d).to_vec();
        if act.is_empty() {
            return Ok(net.rewards().payoff(&seen));
        }
        let total: f64 = act.iter().map(|&t| rates[t]).sum();
        let mut u = rng.gen::<f64>() * total;
        let mut pick = *act.last().unwrap();
        for &t in &act {
            if u < rates[t] {
                pick = t;
                break;
            }
            u -= rates[t];
        }
        m = net.fire(&m, pick);
        seen.union_with(&m.support());
    }
    Err(Error::StepCapExceeded(step_cap))
}

/// Monte Carlo estimate of val^D. Uses xoshiro256++ seeded per run through
/// SplitMix64 (`seed_from_u64`), so results are reproducible across
/// platforms and thread counts.
pub fn simulate(net: &Sdpn, d: &IdSet, seed: u64, runs: usize, step_cap: usize) -> Result<SimulationSummary> {
    net.check_deactivation(d)?;
    let rates: Vec<f64> = (0..net.num_transitions()).map(|t| rational::to_f64(net.rate(t))).collect();
    let values: Vec<Rational> = (0..runs as u64)
        .into_par_iter()
        .map(|i| simulate_one(net, d, &rates, run_seed(seed, i), step_cap))
        .collect::<Result<_>>()?;
    let sum: Rational = values.iter().sum();
    let mean = if runs == 0 { Rational::zero() } else { sum / rational::int(runs as i64) };
    let mf = rational::to_f64(&mean);
    let var = if runs > 1 {
        values.iter().map(|v| (rational::to_f64(v) - mf).powi(2)).sum::<f64>() / (runs - 1) as f64
    } else {
        0.0
    };
    Ok(SimulationSummary { runs, mean, std_error: (var / runs.max(1) as f64).sqrt(), seed })
}

/// ψ(x) = (x - v_min) / (v_max - v_min), mapping payoffs into [0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiTransform {
    pub v_min: Rational,
    pub v_max: Rational,
}

impl PsiTransform {
    pub fn is_degenerate(&self) -> bool {
        self.v_min == self.v_max
    }

    /// Zero when degenerate (all rewards zero).
    pub fn apply(&self, x: &Rational) -> Rational {
        if self.is_degenerate() {
            Rational::zero()
        } else {
            (x - &self.v_min) / (&self.v_max - &self.v_min)
        }
    }

    pub fn invert(&self, y: &Rational) -> Rational {
        &self.v_min + y * (&self.v_max - &self.v_min)
    }
}

pub fn psi(rewards: &RewardFn) -> PsiTransform {
    let (v_min, v_max) = rewards.bounds();
    PsiTransform { v_min, v_max }
}

/// Closed form for free-choice occurrence nets: for each rewarded set Q, the
/// probability that every place of Q gets marked is the product over the
/// causes of Q of their local choice probabilities.
pub fn fcon_value(net: &Sdpn, d: &IdSet) -> Result<Rational> {
    net.check_deactivation(d)?;
    if !classify(net, DEFAULT_STATE_CAP)?.is_fcon() {
        return Err(Error::NotOccurrenceNet);
    }
    let cells = compute_cells(net);
    let mut cell_of = vec![0; net.num_transitions()];
    for (i, c) in cells.iter().enumerate() {
        for &t in &c.members {
            cell_of[t] = i;
        }
    }
    let initial = net.initial().support();
    let mut acc = Rational::zero();
    'sets: for (q, value) in net.rewards().iter() {
        let mut causes = net.empty_transitions();
        let mut stack: Vec<usize> = q.to_vec();
        let mut done = net.empty_places();
        while let Some(p) = stack.pop() {
            if done.contains(p) {
                continue;
            }
            done.insert(p);
            if initial.contains(p) {
                continue;
            }
            match net.producers(p).next() {
                None => continue 'sets,
                Some(t) => {
                    causes.insert(t);
                    stack.extend(net.pre_set(t).iter());
                }
            }
        }
        if !causes.is_disjoint(d) {
            continue;
        }
        let mut used = vec![false; cells.len()];
        let mut prob = Rational::one();
        for t in causes.iter() {
            if std::mem::replace(&mut used[cell_of[t]], true) {
                continue 'sets;
            }
            let live: Rational = cells[cell_of[t]].transitions.difference(d).iter().map(|u| net.rate(u)).sum();
            prob *= net.rate(t) / live;
        }
        acc += prob * value;
    }
    Ok(acc)
}
