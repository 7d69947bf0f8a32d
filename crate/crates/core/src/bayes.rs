//! Discrete Bayesian networks with exact rational inference by enumeration.
//! Enumeration walks the nodes in topological order and skips zero-weight
//! branches, which keeps the mostly deterministic networks produced by the
//! reductions cheap.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub domain: Vec<String>,
    pub parents: Vec<usize>,
    /// One row per parent assignment; the first parent is the most
    /// significant digit. Each row is a distribution over `domain`.
    pub cpt: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    order: Vec<usize>,
}

/// (node, value index) pairs.
pub type Evidence = Vec<(usize, usize)>;

impl BayesNet {
    pub fn builder() -> BayesNetBuilder {
        BayesNetBuilder::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    fn row(&self, i: usize, values: &[usize]) -> usize {
        self.nodes[i].parents.iter().fold(0, |acc, &p| acc * self.nodes[p].domain.len() + values[p])
    }

    /// P(X_i = v | parents as in `values`).
    pub fn cond(&self, i: usize, values: &[usize]) -> &Rational {
        &self.nodes[i].cpt[self.row(i, values)][values[i]]
    }

    /// Resolve `[("c", "0"), ("d", "1")]` to indices.
    pub fn evidence(&self, pairs: &[(&str, &str)]) -> Result<Evidence> {
        pairs
            .iter()
            .map(|(n, v)| {
                let i = self.index(n).ok_or_else(|| Error::InvalidBayesNet(format!("unknown variable {n}")))?;
                let j = self.nodes[i]
                    .domain
                    .iter()
                    .position(|d| d == v)
                    .ok_or_else(|| Error::InvalidBayesNet(format!("{v} is not in the domain of {n}")))?;
                Ok((i, j))
            })
            .collect()
    }

    pub fn variables(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.index(n).ok_or_else(|| Error::InvalidBayesNet(format!("unknown variable {n}"))))
            .collect()
    }

    /// Product of the conditional probabilities of a full assignment.
    pub fn joint_probability(&self, values: &[usize]) -> Rational {
        let mut p = Rational::one();
        for i in 0..self.nodes.len() {
            p *= self.cond(i, values);
        }
        p
    }

    /// P(X_i = v_i for all pairs), summing over everything else.
    pub fn probability(&self, fixed: &[(usize, usize)]) -> Rational {
        let mut pin = vec![None; self.nodes.len()];
        for &(i, v) in fixed {
            match pin[i] {
                Some(w) if w != v => return Rational::zero(),
                _ => pin[i] = Some(v),
            }
        }
        let mut values = vec![0; self.nodes.len()];
        self.sum_from(0, &pin, &mut values, &Rational::one())
    }

    fn sum_from(&self, k: usize, pin: &[Option<usize>], values: &mut Vec<usize>, acc: &Rational) -> Rational {
        if k == self.order.len() {
            return acc.clone();
        }
        let i = self.order[k];
        let row = &self.nodes[i].cpt[self.row(i, values)];
        let mut total = Rational::zero();
        let range = match pin[i] {
            Some(v) => v..v + 1,
            None => 0..row.len(),
        };
        for v in range {
            if row[v].is_zero() {
                continue;
            }
            values[i] = v;
            total += self.sum_from(k + 1, pin, values, &(acc * &row[v]));
        }
        total
    }

    /// Replace the given nodes by point masses without parents.
    pub fn intervene(&self, fixed: &[(usize, usize)]) -> BayesNet {
        let mut nodes = self.nodes.clone();
        for &(i, v) in fixed {
            let mut row = vec![Rational::zero(); nodes[i].domain.len()];
            row[v] = Rational::one();
            nodes[i].parents.clear();
            nodes[i].cpt = vec![row];
        }
        let order = topological(&nodes).expect("removing edges keeps the graph acyclic");
        BayesNet { nodes, index: self.index.clone(), order }
    }

    pub fn from_json(text: &str) -> Result<BayesNet> {
        serde_json::from_str::<BnFile>(text)?.into_bn()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BayesNet> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> BnFile {
        BnFile {
            nodes: self
                .nodes
                .iter()
                .map(|n| {
                    let mut cpt = BTreeMap::new();
                    for (r, row) in n.cpt.iter().enumerate() {
                        cpt.insert(self.row_key(n, r), row.iter().map(rational::show).collect());
                    }
                    NodeEntry {
                        id: n.id.clone(),
                        domain: n.domain.clone(),
                        parents: n.parents.iter().map(|&p| self.nodes[p].id.clone()).collect(),
                        cpt,
                    }
                })
                .collect(),
        }
    }

    fn row_key(&self, n: &Node, mut r: usize) -> String {
        let mut parts = Vec::new();
        for &p in n.parents.iter().rev() {
            let d = self.nodes[p].domain.len();
            parts.push(self.nodes[p].domain[r % d].clone());
            r /= d;
        }
        parts.reverse();
        parts.join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serialisation cannot fail")
    }
}

fn topological(nodes: &[Node]) -> Option<Vec<usize>> {
    let n = nodes.len();
    let mut indeg: Vec<usize> = nodes.iter().map(|x| x.parents.len()).collect();
    let mut children = vec![Vec::new(); n];
    for (i, x) in nodes.iter().enumerate() {
        for &p in &x.parents {
            children[p].push(i);
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        order.push(i);
        for &c in children[i].iter().rev() {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[derive(Default)]
pub struct BayesNetBuilder {
    nodes: Vec<(String, Vec<String>, Vec<String>, Vec<Vec<Rational>>)>,
}

impl BayesNetBuilder {
    pub fn node(mut self, id: impl Into<String>, domain: Vec<String>, parents: &[&str], cpt: Vec<Vec<Rational>>) -> Self {
        self.nodes.push((id.into(), domain, parents.iter().map(|s| s.to_string()).collect(), cpt));
        self
    }

    pub fn node_owned(mut self, id: String, domain: Vec<String>, parents: Vec<String>, cpt: Vec<Vec<Rational>>) -> Self {
        self.nodes.push((id, domain, parents, cpt));
        self
    }

    pub fn build(self) -> Result<BayesNet> {
        let bad = |m: String| Error::InvalidBayesNet(m);
        let mut index = HashMap::new();
        for (i, (id, ..)) in self.nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(bad(format!("duplicate variable {id}")));
            }
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (id, domain, parents, _) in &self.nodes {
            if domain.is_empty() {
                return Err(bad(format!("{id} has an empty domain")));
            }
            let parents = parents
                .iter()
                .map(|p| index.get(p).copied().ok_or_else(|| bad(format!("unknown parent {p} of {id}"))))
                .collect::<Result<Vec<_>>>()?;
            nodes.push(Node { id: id.clone(), domain: domain.clone(), parents, cpt: Vec::new() });
        }
        for (i, (id, _, _, cpt)) in self.nodes.into_iter().enumerate() {
            let rows: usize = nodes[i].parents.iter().map(|&p| nodes[p].domain.len()).product();
            if cpt.len() != rows {
                return Err(bad(format!("{id} needs {rows} rows, got {}", cpt.len())));
            }
            for row in &cpt {
                if row.len() != nodes[i].domain.len() {
                    return Err(bad(format!("row of {id} has the wrong length")));
                }
                if row.iter().any(|x| x.is_negative()) || !row.iter().sum::<Rational>().is_one() {
                    return Err(bad(format!("row of {id} is not a distribution")));
                }
            }
            nodes[i].cpt = cpt;
        }
        let order = topological(&nodes).ok_or_else(|| bad("the graph is cyclic".into()))?;
        Ok(BayesNet { nodes, index, order })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BnFile {
    pub nodes: Vec<NodeEntry>,
}

/// `cpt` maps comma-joined parent values (empty string for roots) to the
/// distribution over the domain, as rational strings.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    pub domain: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: BTreeMap<String, Vec<String>>,
}

impl BnFile {
    pub fn into_bn(self) -> Result<BayesNet> {
        let domains: HashMap<&str, &Vec<String>> = self.nodes.iter().map(|n| (n.id.as_str(), &n.domain)).collect();
        let mut b = BayesNet::builder();
        for n in &self.nodes {
            let pd = n
                .parents
                .iter()
                .map(|p| domains.get(p.as_str()).copied().ok_or_else(|| Error::InvalidBayesNet(format!("unknown parent {p}"))))
                .collect::<Result<Vec<_>>>()?;
            let rows: usize = pd.iter().map(|d| d.len()).product();
            let mut cpt = Vec::with_capacity(rows);
            for mut r in 0..rows {
                let mut parts = Vec::new();
                for d in pd.iter().rev() {
                    parts.push(d[r % d.len()].as_str());
                    r /= d.len();
                }
                parts.reverse();
                let key = parts.join(",");
                let row = n
                    .cpt
                    .get(&key)
                    .ok_or_else(|| Error::InvalidBayesNet(format!("{} has no row for ({key})", n.id)))?;
                cpt.push(row.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?);
            }
            if n.cpt.len() != rows {
                return Err(Error::InvalidBayesNet(format!("{} has rows for unknown parent values", n.id)));
            }
            b = b.node_owned(n.id.clone(), n.domain.clone(), n.parents.clone(), cpt);
        }
        b.build()
    }
}

/// D-PR: is P(E = e) > p?
pub fn d_pr(bn: &BayesNet, evidence: &[(usize, usize)], p: &Rational) -> (bool, Rational) {
    let q = bn.probability(evidence);
    (&q > p, q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapResult {
    pub decision: bool,
    /// Value index per query variable, in the order given.
    pub assignment: Vec<usize>,
    pub probability: Rational,
}

/// D-MAP: maximise over assignments f of the variables `query` either
/// P(E = e | F = f) or, with `conditional = false`, P(F = f, E = e).
/// Assignments are tried in lexicographic order of value indices and the
/// first maximiser wins. Conditioning on a zero-probability f is an error.
pub fn d_map(bn: &BayesNet, query: &[usize], evidence: &[(usize, usize)], p: &Rational, conditional: bool) -> Result<MapResult> {
    let sizes: Vec<usize> = query.iter().map(|&i| bn.node(i).domain.len()).collect();
    let total: usize = sizes.iter().product();
    let mut best: Option<(Vec<usize>, Rational)> = None;
    for mut code in 0..total {
        let mut f = vec![0; query.len()];
        for k in (0..query.len()).rev() {
            f[k] = code % sizes[k];
            code /= sizes[k];
        }
        let pinned: Vec<(usize, usize)> = query.iter().copied().zip(f.iter().copied()).collect();
        let with_e: Vec<(usize, usize)> = pinned.iter().chain(evidence).copied().collect();
        let joint = bn.probability(&with_e);
        let score = if conditional {
            let pf = bn.probability(&pinned);
            if pf.is_zero() {
                return Err(Error::ZeroConditioning);
            }
            joint / pf
        } else {
            joint
        };
        if best.as_ref().map_or(true, |(_, b)| &score > b) {
            best = Some((f, score));
        }
    }
    let (assignment, probability) = best.expect("at least the empty assignment");
    Ok(MapResult { decision: &probability > p, assignment, probability })
}
