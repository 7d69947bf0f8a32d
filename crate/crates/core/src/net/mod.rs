//! The net model: places, transitions with positive rational rates, an
//! initial marking, the controllable transitions and a reward function on
//! sets of places.

mod json;
mod structure;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::idset::IdSet;
use crate::rational::{self, Rational};

pub use json::{Multiset, NetFile, RewardEntry, TransitionEntry};
pub use structure::{
    classify, compute_cells, is_acyclic, order_cells, reachable_markings, Cell, Classification, ReachabilityGraph,
};

/// Reachability exploration stops with an error beyond this many markings.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn support(&self) -> IdSet {
        IdSet::from_iter(self.0.len(), self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i))
    }

    pub fn from_set(set: &IdSet) -> Marking {
        let mut m = vec![0; set.universe()];
        for p in set.iter() {
            m[p] = 1;
        }
        Marking(m)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn max_tokens(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// Sparse multiset: (place, multiplicity) sorted by place.
    pub pre: Vec<(usize, u32)>,
    pub post: Vec<(usize, u32)>,
    pub rate: Rational,
}

/// R : 2^P -> Q with finite support. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RewardFn {
    entries: BTreeMap<IdSet, Rational>,
}

impl RewardFn {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, set: IdSet, value: Rational) {
        let slot = self.entries.entry(set.clone()).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&set);
        }
    }

    pub fn get(&self, set: &IdSet) -> Rational {
        self.entries.get(set).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IdSet, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// V(M) = sum of R(Q) over Q ⊆ M.
    pub fn payoff(&self, places: &IdSet) -> Rational {
        self.entries
            .iter()
            .filter(|(q, _)| q.is_subset(places))
            .map(|(_, v)| v)
            .sum()
    }

    /// Union of the support.
    pub fn places(&self, universe: usize) -> IdSet {
        let mut all = IdSet::empty(universe);
        for q in self.entries.keys() {
            all.union_with(q);
        }
        all
    }

    /// Sum of the negative (resp. positive) values: the least and greatest
    /// payoff any set of places can achieve is bounded by these.
    pub fn bounds(&self) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for v in self.entries.values() {
            if v.is_negative() {
                lo += v;
            } else {
                hi += v;
            }
        }
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sdpn {
    places: Vec<String>,
    place_ix: HashMap<String, usize>,
    transitions: Vec<Transition>,
    trans_ix: HashMap<String, usize>,
    initial: Marking,
    controllable: IdSet,
    rewards: RewardFn,
    pre_sets: Vec<IdSet>,
    post_sets: Vec<IdSet>,
}

impl Sdpn {
    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: usize) -> &Transition {
        &self.transitions[t]
    }

    pub fn place_name(&self, p: usize) -> &str {
        &self.places[p]
    }

    pub fn transition_name(&self, t: usize) -> &str {
        &self.transitions[t].id
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.place_ix.get(id).copied()
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.trans_ix.get(id).copied()
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn controllable(&self) -> &IdSet {
        &self.controllable
    }

    pub fn rewards(&self) -> &RewardFn {
        &self.rewards
    }

    pub fn rate(&self, t: usize) -> &Rational {
        &self.transitions[t].rate
    }

    /// Support of the pre-multiset.
    pub fn pre_set(&self, t: usize) -> &IdSet {
        &self.pre_sets[t]
    }

    pub fn post_set(&self, t: usize) -> &IdSet {
        &self.post_sets[t]
    }

    pub fn producers(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.transitions.len()).filter(move |&t| self.post_sets[t].contains(p))
    }

    pub fn consumers(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.transitions.len()).filter(move |&t| self.pre_sets[t].contains(p))
    }

    pub fn empty_places(&self) -> IdSet {
        IdSet::empty(self.places.len())
    }

    pub fn empty_transitions(&self) -> IdSet {
        IdSet::empty(self.transitions.len())
    }

    pub fn all_transitions(&self) -> IdSet {
        IdSet::from_iter(self.transitions.len(), 0..self.transitions.len())
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.transitions[t].pre.iter().all(|&(p, k)| m.0[p] >= k)
    }

    pub fn enabled(&self, m: &Marking) -> IdSet {
        IdSet::from_iter(self.transitions.len(), (0..self.transitions.len()).filter(|&t| self.is_enabled(m, t)))
    }

    pub fn fire(&self, m: &Marking, t: usize) -> Marking {
        let mut next = m.0.clone();
        let tr = &self.transitions[t];
        for &(p, k) in &tr.pre {
            next[p] -= k;
        }
        for &(p, k) in &tr.post {
            next[p] += k;
        }
        Marking(next)
    }

    pub fn place_set(&self, ids: &[&str]) -> Result<IdSet> {
        let mut s = self.empty_places();
        for id in ids {
            s.insert(self.place_index(id).ok_or_else(|| Error::InvalidNet(format!("unknown place {id}")))?);
        }
        Ok(s)
    }

    pub fn transition_set(&self, ids: &[&str]) -> Result<IdSet> {
        let mut s = self.empty_transitions();
        for id in ids {
            s.insert(self.transition_index(id).ok_or_else(|| Error::InvalidNet(format!("unknown transition {id}")))?);
        }
        Ok(s)
    }

    /// Parse a deactivation set, rejecting anything outside C.
    pub fn deactivation(&self, ids: &[&str]) -> Result<IdSet> {
        let d = self.transition_set(ids)?;
        self.check_deactivation(&d)?;
        Ok(d)
    }

    pub fn check_deactivation(&self, d: &IdSet) -> Result<()> {
        match d.iter().find(|&t| !self.controllable.contains(t)) {
            Some(t) => Err(Error::NotControllable(self.transitions[t].id.clone())),
            None => Ok(()),
        }
    }

    pub fn place_names(&self, s: &IdSet) -> Vec<String> {
        s.iter().map(|p| self.places[p].clone()).collect()
    }

    pub fn transition_names(&self, s: &IdSet) -> Vec<String> {
        s.iter().map(|t| self.transitions[t].id.clone()).collect()
    }

    pub fn show_places(&self, s: &IdSet) -> String {
        format!("{{{}}}", self.place_names(s).join(","))
    }

    pub fn show_transitions(&self, s: &IdSet) -> String {
        format!("{{{}}}", self.transition_names(s).join(","))
    }

    /// Same net with a different controllable set.
    pub fn with_controllable(&self, controllable: IdSet) -> Sdpn {
        Sdpn { controllable, ..self.clone() }
    }

    pub fn with_rewards(&self, rewards: RewardFn) -> Sdpn {
        Sdpn { rewards, ..self.clone() }
    }
}

/// Incremental construction by name. `build` validates everything.
#[derive(Default)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<(String, Vec<String>, Vec<String>, Rational)>,
    initial: Vec<String>,
    controllable: Vec<String>,
    rewards: Vec<(Vec<String>, Rational)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(mut self, id: impl Into<String>) -> Self {
        self.places.push(id.into());
        self
    }

    pub fn places<S: Into<String>>(mut self, ids: impl IntoIterator<Item = S>) -> Self {
        self.places.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn transition<S: AsRef<str>>(mut self, id: impl Into<String>, pre: &[S], post: &[S], rate: Rational) -> Self {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        self.transitions.push((id.into(), own(pre), own(post), rate));
        self
    }

    pub fn initial<S: AsRef<str>>(mut self, ids: &[S]) -> Self {
        self.initial.extend(ids.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn controllable<S: AsRef<str>>(mut self, ids: &[S]) -> Self {
        self.controllable.extend(ids.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn reward<S: AsRef<str>>(mut self, places: &[S], value: Rational) -> Self {
        self.rewards.push((places.iter().map(|s| s.as_ref().to_string()).collect(), value));
        self
    }

    pub fn build(self) -> Result<Sdpn> {
        let invalid = |m: String| Error::InvalidNet(m);
        let mut place_ix = HashMap::new();
        for (i, p) in self.places.iter().enumerate() {
            if place_ix.insert(p.clone(), i).is_some() {
                return Err(invalid(format!("duplicate place {p}")));
            }
        }
        let np = self.places.len();
        let lookup = |id: &str| place_ix.get(id).copied().ok_or_else(|| invalid(format!("unknown place {id}")));
        let multiset = |ids: &[String]| -> Result<Vec<(usize, u32)>> {
            let mut counts = BTreeMap::new();
            for id in ids {
                *counts.entry(lookup(id)?).or_insert(0u32) += 1;
            }
            Ok(counts.into_iter().collect())
        };

        let mut trans_ix = HashMap::new();
        let mut transitions = Vec::new();
        let mut shapes = HashSet::new();
        for (i, (id, pre, post, rate)) in self.transitions.into_iter().enumerate() {
            if trans_ix.insert(id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate transition {id}")));
            }
            if !rate.is_positive() {
                return Err(invalid(format!("transition {id} has non-positive rate {}", rational::show(&rate))));
            }
            let pre = multiset(&pre)?;
            let post = multiset(&post)?;
            if !shapes.insert((pre.clone(), post.clone())) {
                return Err(invalid(format!("transition {id} repeats the pre- and post-set of another transition")));
            }
            transitions.push(Transition { id, pre, post, rate });
        }

        let mut initial = vec![0u32; np];
        for id in &self.initial {
            initial[lookup(id)?] += 1;
        }
        let mut controllable = IdSet::empty(transitions.len());
        for id in &self.controllable {
            let t = trans_ix.get(id).ok_or_else(|| invalid(format!("unknown controllable transition {id}")))?;
            controllable.insert(*t);
        }
        let mut rewards = RewardFn::new();
        let mut seen = HashSet::new();
        for (ids, v) in &self.rewards {
            let mut q = IdSet::empty(np);
            for id in ids {
                q.insert(lookup(id)?);
            }
            if !seen.insert(q.clone()) {
                return Err(invalid(format!("reward set {{{}}} listed twice", ids.join(","))));
            }
            rewards.add(q, v.clone());
        }

        let support = |ms: &[(usize, u32)]| IdSet::from_iter(np, ms.iter().map(|&(p, _)| p));
        let pre_sets = transitions.iter().map(|t| support(&t.pre)).collect();
        let post_sets = transitions.iter().map(|t| support(&t.post)).collect();
        Ok(Sdpn {
            places: self.places,
            place_ix,
            transitions,
            trans_ix,
            initial: Marking(initial),
            controllable,
            rewards,
            pre_sets,
            post_sets,
        })
    }
}

impl fmt::Display for Sdpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "places: {}", self.places.join(" "))?;
        for (i, t) in self.transitions.iter().enumerate() {
            let side = |ms: &[(usize, u32)]| {
                ms.iter()
                    .flat_map(|&(p, k)| std::iter::repeat(self.places[p].as_str()).take(k as usize))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let mark = if self.controllable.contains(i) { " (controllable)" } else { "" };
            writeln!(f, "{}: {{{}}} -> {{{}}} rate {}{}", t.id, side(&t.pre), side(&t.post), rational::show(&t.rate), mark)?;
        }
        writeln!(f, "initial: {}", self.show_places(&self.initial.support()))?;
        for (q, v) in self.rewards.iter() {
            writeln!(f, "R{} = {}", self.show_places(q), rational::show(v))?;
        }
        Ok(())
    }
}
