use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{NetBuilder, Sdpn};
use crate::error::Result;
use crate::rational::{self, Rational};

/// On-disk form of a net.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub places: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
    #[serde(default)]
    pub initial: Multiset,
    #[serde(default)]
    pub controllable: Vec<String>,
    #[serde(default)]
    pub rewards: Vec<RewardEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub id: String,
    #[serde(default)]
    pub pre: Multiset,
    #[serde(default)]
    pub post: Multiset,
    #[serde(serialize_with = "rational::ser", deserialize_with = "rational::de", default = "rational::one")]
    pub rate: Rational,
}

/// Place id to token count. Reading also accepts a list of ids, a repeated
/// id counting once per occurrence.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Default)]
#[serde(from = "MultisetRepr", into = "BTreeMap<String, u32>")]
pub struct Multiset(pub BTreeMap<String, u32>);

#[derive(Deserialize)]
#[serde(untagged)]
enum MultisetRepr {
    Counts(BTreeMap<String, u32>),
    List(Vec<String>),
}

impl From<MultisetRepr> for Multiset {
    fn from(r: MultisetRepr) -> Self {
        match r {
            MultisetRepr::Counts(m) => Multiset(m.into_iter().filter(|&(_, k)| k > 0).collect()),
            MultisetRepr::List(v) => {
                let mut m = BTreeMap::new();
                for p in v {
                    *m.entry(p).or_insert(0) += 1;
                }
                Multiset(m)
            }
        }
    }
}

impl From<Multiset> for BTreeMap<String, u32> {
    fn from(m: Multiset) -> Self {
        m.0
    }
}

impl Multiset {
    pub fn to_list(&self) -> Vec<String> {
        self.0.iter().flat_map(|(p, &k)| std::iter::repeat(p.clone()).take(k as usize)).collect()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RewardEntry {
    pub places: Vec<String>,
    #[serde(serialize_with = "rational::ser", deserialize_with = "rational::de")]
    pub value: Rational,
}

impl NetFile {
    pub fn into_net(self) -> Result<Sdpn> {
        let mut b = NetBuilder::new().places(self.places);
        for t in self.transitions {
            b = b.transition(t.id, &t.pre.to_list(), &t.post.to_list(), t.rate);
        }
        b = b.initial(&self.initial.to_list()).controllable(&self.controllable);
        for r in self.rewards {
            b = b.reward(&r.places, r.value);
        }
        b.build()
    }
}

impl Sdpn {
    pub fn to_file(&self) -> NetFile {
        let side = |ms: &mut dyn Iterator<Item = (usize, u32)>| {
            Multiset(ms.filter(|&(_, k)| k > 0).map(|(p, k)| (self.place_name(p).to_string(), k)).collect())
        };
        NetFile {
            places: self.places().to_vec(),
            transitions: self
                .transitions()
                .iter()
                .map(|t| TransitionEntry { id: t.id.clone(), pre: side(&mut t.pre.iter().copied()), post: side(&mut t.post.iter().copied()), rate: t.rate.clone() })
                .collect(),
            initial: side(&mut self.initial().0.iter().copied().enumerate()),
            controllable: self.transition_names(self.controllable()),
            rewards: self
                .rewards()
                .iter()
                .map(|(q, v)| RewardEntry { places: self.place_names(q), value: v.clone() })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Sdpn> {
        serde_json::from_str::<NetFile>(text)?.into_net()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("net serialisation cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Sdpn> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
