//! Constructive reductions between the policy problem and Bayesian-network
//! inference, plus the 3-SAT encoding into free-choice occurrence nets.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::bayes::{BayesNet, Evidence};
use crate::error::{Error, Result};
use crate::idset::{subsets, IdSet};
use crate::net::{classify, compute_cells, NetBuilder, RewardFn, Sdpn, DEFAULT_STATE_CAP};
use crate::rational::{self, Rational};
use crate::semantics::{psi, PsiTransform};

/// How the generated names relate to the source, and how to translate the
/// threshold.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReductionCert {
    /// Source name -> generated name(s).
    pub mapping: BTreeMap<String, Vec<String>>,
    pub threshold: ThresholdMap,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ThresholdMap {
    Identity,
    /// p maps to ψ(p) = (p - v_min) / (v_max - v_min).
    Psi {
        #[serde(serialize_with = "rational::ser")]
        v_min: Rational,
        #[serde(serialize_with = "rational::ser")]
        v_max: Rational,
    },
    Fixed {
        #[serde(serialize_with = "rational::ser")]
        value: Rational,
    },
}

fn is_binary(bn: &BayesNet, i: usize) -> bool {
    bn.node(i).domain.len() == 2
}

pub struct BnToSafc {
    pub net: Sdpn,
    /// Value place per node and value.
    pub value_places: Vec<[usize; 2]>,
    /// Root choice transition per MAP node and value (absent if that value
    /// has probability zero).
    pub choices: Vec<(usize, [Option<usize>; 2])>,
    pub cert: ReductionCert,
}

impl BnToSafc {
    /// D_f: switch off the root transitions of the values f does not pick.
    pub fn deactivation(&self, f: &[usize]) -> IdSet {
        let mut d = self.net.empty_transitions();
        for ((_, ts), &v) in self.choices.iter().zip(f) {
            if let Some(t) = ts[1 - v] {
                d.insert(t);
            }
        }
        d
    }
}

fn joined(values: &[&str]) -> String {
    values.join(",")
}

/// D-MAP over binary variables with MAP roots F, as a SAFC net whose value
/// under D_f is P(E = e | F = f). MAP roots get rate 1/2 per value whatever
/// their prior: D_f leaves one of the two enabled, so the prior cannot
/// matter. Other zero-probability CPT entries become absent transitions,
/// since rates must be positive.
pub fn bn_to_safc(bn: &BayesNet, evidence: &Evidence, map_vars: &[usize]) -> Result<BnToSafc> {
    for i in 0..bn.len() {
        if !is_binary(bn, i) {
            return Err(Error::NotBinary(bn.node(i).id.clone()));
        }
    }
    for &i in map_vars {
        let n = bn.node(i);
        if !n.parents.is_empty() {
            return Err(Error::NotUniformInput(n.id.clone()));
        }
        if evidence.iter().any(|&(e, _)| e == i) {
            return Err(Error::InvalidBayesNet(format!("{} is both evidence and MAP variable", n.id)));
        }
    }
    let n = bn.len();
    let children: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| bn.node(j).parents.contains(&i)).collect()).collect();
    let val = |i: usize, v: usize| bn.node(i).domain[v].as_str();
    // Parent value tuples of node i, first parent most significant.
    let tuples = |i: usize| -> Vec<Vec<usize>> {
        let k = bn.node(i).parents.len();
        (0..1usize << k).map(|code| (0..k).map(|b| code >> (k - 1 - b) & 1).collect()).collect()
    };
    let tuple_name = |i: usize, vt: &[usize]| {
        joined(&bn.node(i).parents.iter().zip(vt).map(|(&p, &v)| val(p, v)).collect::<Vec<_>>())
    };
    let value_place = |i: usize, v: usize| format!("{}={}", bn.node(i).id, val(i, v));
    let aux_place = |j: Option<usize>, i: usize, vt: &str| match j {
        Some(j) => format!("{}>{}[{}]", bn.node(j).id, bn.node(i).id, vt),
        None => format!(">{}[]", bn.node(i).id),
    };

    let mut mapping: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut b = NetBuilder::new();
    let mut initial = Vec::new();
    for i in 0..n {
        let id = &bn.node(i).id;
        let mut names = vec![value_place(i, 0), value_place(i, 1)];
        if bn.node(i).parents.is_empty() {
            names.push(aux_place(None, i, ""));
            initial.push(aux_place(None, i, ""));
        } else {
            for vt in tuples(i) {
                for &j in &bn.node(i).parents {
                    names.push(aux_place(Some(j), i, &tuple_name(i, &vt)));
                }
            }
        }
        b = b.places(names.iter().cloned());
        mapping.insert(id.clone(), names);
    }
    let mut choice_names = vec![[None, None]; n];
    for i in 0..n {
        let node = bn.node(i);
        for (row, vt) in tuples(i).into_iter().enumerate() {
            let tn = tuple_name(i, &vt);
            let pre: Vec<String> = if node.parents.is_empty() {
                vec![aux_place(None, i, "")]
            } else {
                node.parents.iter().map(|&j| aux_place(Some(j), i, &tn)).collect()
            };
            for v in 0..2 {
                let rate = if map_vars.contains(&i) { rational::ratio(1, 2) } else { node.cpt[row][v].clone() };
                if rate.is_zero() {
                    continue;
                }
                let name = format!("{}[{}]->{}", node.id, tn, val(i, v));
                if node.parents.is_empty() {
                    choice_names[i][v] = Some(name.clone());
                }
                b = b.transition(name.as_str(), &pre, &[value_place(i, v)], rate);
                mapping.get_mut(&node.id).unwrap().push(name);
            }
        }
        for v in 0..2 {
            let mut post = Vec::new();
            for &c in &children[i] {
                let pos = bn.node(c).parents.iter().position(|&p| p == i).unwrap();
                for vt in tuples(c) {
                    if vt[pos] == v {
                        post.push(aux_place(Some(i), c, &tuple_name(c, &vt)));
                    }
                }
            }
            let name = format!("dup:{}", value_place(i, v));
            b = b.transition(name.as_str(), &[value_place(i, v)], &post, rational::one());
            mapping.get_mut(&node.id).unwrap().push(name);
        }
    }
    let controllable: Vec<String> =
        map_vars.iter().flat_map(|&i| choice_names[i].iter().flatten().cloned()).collect();
    let goal: Vec<String> = evidence.iter().map(|&(i, v)| value_place(i, v)).collect();
    let net = b.initial(&initial).controllable(&controllable).reward(&goal, rational::one()).build()?;
    let value_places = (0..n)
        .map(|i| [net.place_index(&value_place(i, 0)).unwrap(), net.place_index(&value_place(i, 1)).unwrap()])
        .collect();
    let choices = map_vars
        .iter()
        .map(|&i| {
            let t = |v: usize| choice_names[i][v].as_ref().and_then(|s| net.transition_index(s));
            (i, [t(0), t(1)])
        })
        .collect();
    Ok(BnToSafc { net, value_places, choices, cert: ReductionCert { mapping, threshold: ThresholdMap::Identity } })
}

/// The D-MAP question produced from a net.
#[derive(Clone, Debug, PartialEq)]
pub struct MapQuery {
    /// One MAP variable per controllable transition, in index order.
    pub map_vars: Vec<usize>,
    pub evidence: Evidence,
}

pub struct SafcToBn {
    pub bn: BayesNet,
    pub query: MapQuery,
    pub psi: PsiTransform,
    /// Controllable transition behind each MAP variable.
    pub transitions: Vec<usize>,
    pub cert: ReductionCert,
}

impl SafcToBn {
    /// The MAP assignment corresponding to deactivating `d`.
    pub fn assignment(&self, d: &IdSet) -> Vec<usize> {
        self.transitions.iter().map(|&t| usize::from(!d.contains(t))).collect()
    }

    pub fn deactivation(&self, net: &Sdpn, f: &[usize]) -> IdSet {
        IdSet::from_iter(net.num_transitions(), self.transitions.iter().zip(f).filter(|(_, &v)| v == 0).map(|(&t, _)| t))
    }
}

pub const DEFAULT_PARENT_CAP: usize = 2;

const EPS: &str = "eps";

struct BnParts {
    names: Vec<String>,
    domains: Vec<Vec<String>>,
    parents: Vec<Vec<usize>>,
    cpts: Vec<Vec<Vec<Rational>>>,
}

impl BnParts {
    fn add(&mut self, name: String, domain: Vec<String>, parents: Vec<usize>, cpt: impl Fn(&[usize]) -> Vec<Rational>) -> usize {
        let sizes: Vec<usize> = parents.iter().map(|&p| self.domains[p].len()).collect();
        let rows: usize = sizes.iter().product();
        let mut table = Vec::with_capacity(rows);
        for mut code in 0..rows {
            let mut vals = vec![0; sizes.len()];
            for k in (0..sizes.len()).rev() {
                vals[k] = code % sizes[k];
                code /= sizes[k];
            }
            table.push(cpt(&vals));
        }
        self.names.push(name);
        self.domains.push(domain);
        self.parents.push(parents);
        self.cpts.push(table);
        self.names.len() - 1
    }
}

fn bit(b: bool) -> Vec<Rational> {
    if b {
        vec![Rational::zero(), Rational::one()]
    } else {
        vec![Rational::one(), Rational::zero()]
    }
}

fn binary() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

/// SAFC policy problem as D-MAP. Variables: one per place (was it ever
/// marked), one uniform root per controllable transition, one per cell (which
/// transition fired, or eps) and a reward node with P(1 | marked places) =
/// ψ(payoff). Nodes with more than `cap` place parents are split into
/// ∧-chains (cell preconditions) or ∨-chains (places with several producing
/// cells).
pub fn safc_to_bn(net: &Sdpn, k: usize, l: usize, cap: usize) -> Result<SafcToBn> {
    let c = classify(net, DEFAULT_STATE_CAP)?;
    if !c.is_safc() {
        return Err(Error::NotSafc(c.safc_violations()));
    }
    let cells = compute_cells(net);
    for cell in &cells {
        let ctrl = cell.transitions.intersection(net.controllable()).len();
        if ctrl > k {
            return Err(Error::BoundExceeded('k', format!("a cell has {ctrl} controllable transitions, bound {k}")));
        }
    }
    let rewarded = net.rewards().places(net.num_places());
    if rewarded.len() > l {
        return Err(Error::BoundExceeded('l', format!("{} rewarded places, bound {l}", rewarded.len())));
    }
    let cap = cap.max(2);
    let mut parts = BnParts { names: vec![], domains: vec![], parents: vec![], cpts: vec![] };
    let mut mapping: BTreeMap<String, Vec<String>> = BTreeMap::new();

    let mut t_node = vec![usize::MAX; net.num_transitions()];
    let transitions: Vec<usize> = net.controllable().to_vec();
    for &t in &transitions {
        let name = format!("t:{}", net.transition_name(t));
        let half = rational::ratio(1, 2);
        t_node[t] = parts.add(name.clone(), binary(), vec![], |_| vec![half.clone(), half.clone()]);
        mapping.insert(net.transition_name(t).to_string(), vec![name]);
    }

    // Cells in causal order so that every parent exists before its child.
    let ordered = crate::net::order_cells(net)?;
    let cell_domain = |cell: &crate::net::Cell| -> Vec<String> {
        let mut d = vec![EPS.to_string()];
        d.extend(cell.members.iter().map(|&t| net.transition_name(t).to_string()));
        if cell.members.iter().any(|&t| net.transition_name(t) == EPS) {
            d[0] = format!("_{EPS}");
        }
        d
    };
    let mut p_node = vec![usize::MAX; net.num_places()];
    let mut cell_node = vec![usize::MAX; ordered.len()];
    let producers: Vec<Vec<usize>> = (0..net.num_places())
        .map(|p| (0..ordered.len()).filter(|&ci| ordered[ci].post(net).contains(p)).collect())
        .collect();
    let cell_name = |ci: usize| {
        format!(
            "C[{}]",
            ordered[ci].members.iter().map(|&t| net.transition_name(t)).collect::<Vec<_>>().join("|")
        )
    };

    // Place nodes become available once all their producing cells exist;
    // plain topological processing over places and cells.
    let initial = net.initial().support();
    let place_ready = |p: usize, parts: &mut BnParts, cell_node: &[usize], mapping: &mut BTreeMap<String, Vec<String>>| {
        let pname = format!("p:{}", net.place_name(p));
        let prods = &producers[p];
        let marks = |ci: usize, v: usize| -> bool {
            v > 0 && net.post_set(ordered[ci].members[v - 1]).contains(p)
        };
        let mut names = vec![];
        let node = if prods.is_empty() {
            let on = initial.contains(p);
            parts.add(pname.clone(), binary(), vec![], move |_| bit(on))
        } else if prods.len() <= cap {
            let pars: Vec<usize> = prods.iter().map(|&ci| cell_node[ci]).collect();
            let prods = prods.clone();
            parts.add(pname.clone(), binary(), pars, move |vals| bit(prods.iter().zip(vals).any(|(&ci, &v)| marks(ci, v))))
        } else {
            // ∨-chain: or_j = or_{j-1} ∨ [p ∈ post of cell j's choice].
            let (a, b2) = (prods[0], prods[1]);
            let first = format!("or:{}:2", net.place_name(p));
            let mut prev = parts.add(first.clone(), binary(), vec![cell_node[a], cell_node[b2]], move |v| {
                bit(marks(a, v[0]) || marks(b2, v[1]))
            });
            names.push(first);
            for (j, &ci) in prods.iter().enumerate().skip(2) {
                let last = j + 1 == prods.len();
                let name = if last { pname.clone() } else { format!("or:{}:{}", net.place_name(p), j + 1) };
                prev = parts.add(name.clone(), binary(), vec![prev, cell_node[ci]], move |v| bit(v[0] == 1 || marks(ci, v[1])));
                if !last {
                    names.push(name);
                }
            }
            prev
        };
        names.insert(0, pname);
        mapping.insert(net.place_name(p).to_string(), names);
        node
    };

    let mut done_cells = 0;
    let mut remaining_places: Vec<usize> = (0..net.num_places()).collect();
    loop {
        let mut progress = false;
        remaining_places.retain(|&p| {
            if producers[p].iter().all(|&ci| ci < done_cells) {
                p_node[p] = place_ready(p, &mut parts, &cell_node, &mut mapping);
                progress = true;
                false
            } else {
                true
            }
        });
        if done_cells == ordered.len() {
            break;
        }
        let ci = done_cells;
        let cell = &ordered[ci];
        if cell.pre.iter().all(|p| p_node[p] != usize::MAX) {
            let pre: Vec<usize> = cell.pre.iter().map(|p| p_node[p]).collect();
            let ctrl: Vec<usize> = cell.members.iter().copied().filter(|&t| net.controllable().contains(t)).collect();
            let members = cell.members.clone();
            let rates: Vec<Rational> = members.iter().map(|&t| net.rate(t).clone()).collect();
            let ctrl_pos: Vec<Option<usize>> = members.iter().map(|t| ctrl.iter().position(|u| u == t)).collect();
            // Row for "all preconditions marked" given activation bits u.
            let dist = move |all_marked: bool, u: &[usize]| -> Vec<Rational> {
                let mut row = vec![Rational::zero(); members.len() + 1];
                if all_marked {
                    let act: Vec<bool> = ctrl_pos.iter().map(|cp| cp.map_or(true, |j| u[j] == 1)).collect();
                    let total: Rational = rates.iter().zip(&act).filter(|(_, &a)| a).map(|(r, _)| r).sum();
                    if !total.is_zero() {
                        for (i, r) in rates.iter().enumerate() {
                            if act[i] {
                                row[i + 1] = r / &total;
                            }
                        }
                    }
                }
                let rest = Rational::one() - row.iter().sum::<Rational>();
                row[0] = rest;
                row
            };
            let name = cell_name(ci);
            let mut names = vec![name.clone()];
            let ctrl_nodes: Vec<usize> = ctrl.iter().map(|&t| t_node[t]).collect();
            let node = if pre.len() <= cap {
                let m = pre.len();
                let mut pars = pre.clone();
                pars.extend(&ctrl_nodes);
                parts.add(name.clone(), cell_domain(cell), pars, move |v| dist(v[..m].iter().all(|&x| x == 1), &v[m..]))
            } else {
                // ∧-chain over the preconditions, then X'_C(and, u).
                let pn: Vec<&str> = cell.pre.iter().map(|p| net.place_name(p)).collect();
                let mut prev = parts.add(format!("and:{}:{}", name, pn[..2].join(",")), binary(), vec![pre[0], pre[1]], |v| {
                    bit(v[0] == 1 && v[1] == 1)
                });
                names.push(parts.names[prev].clone());
                for j in 2..pre.len() {
                    prev = parts.add(format!("and:{}:{}", name, pn[..=j].join(",")), binary(), vec![prev, pre[j]], |v| {
                        bit(v[0] == 1 && v[1] == 1)
                    });
                    names.push(parts.names[prev].clone());
                }
                let mut pars = vec![prev];
                pars.extend(&ctrl_nodes);
                parts.add(name.clone(), cell_domain(cell), pars, move |v| dist(v[0] == 1, &v[1..]))
            };
            mapping.insert(name, names);
            cell_node[ci] = node;
            done_cells += 1;
            progress = true;
        }
        if !progress {
            unreachable!("cells are in causal order");
        }
    }

    let ps = psi(net.rewards());
    let rew_parents: Vec<usize> = rewarded.to_vec();
    let rewards = net.rewards().clone();
    let np = net.num_places();
    let ps2 = ps.clone();
    let rp = rew_parents.clone();
    let rew = parts.add("rew".into(), binary(), rew_parents.iter().map(|&p| p_node[p]).collect(), move |v| {
        let marked = IdSet::from_iter(np, rp.iter().zip(v).filter(|(_, &x)| x == 1).map(|(&p, _)| p));
        let y = ps2.apply(&rewards.payoff(&marked));
        vec![Rational::one() - &y, y]
    });

    let mut b = BayesNet::builder();
    for i in 0..parts.names.len() {
        let pars = parts.parents[i].iter().map(|&p| parts.names[p].clone()).collect();
        b = b.node_owned(parts.names[i].clone(), parts.domains[i].clone(), pars, std::mem::take(&mut parts.cpts[i]));
    }
    let bn = b.build()?;
    let query = MapQuery { map_vars: transitions.iter().map(|&t| t_node[t]).collect(), evidence: vec![(rew, 1)] };
    let cert = ReductionCert {
        mapping,
        threshold: ThresholdMap::Psi { v_min: ps.v_min.clone(), v_max: ps.v_max.clone() },
    };
    Ok(SafcToBn { bn, query, psi: ps, transitions, cert })
}

/// A literal is (variable index from 0, positive?).
pub type Literal = (usize, bool);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&(x, pos)| assignment[x] == pos))
    }

    /// Exhaustive check; fine for the handful of variables used in tests.
    pub fn is_satisfiable(&self) -> bool {
        (0..1u64 << self.num_vars)
            .any(|m| self.satisfied_by(&(0..self.num_vars).map(|x| m >> x & 1 == 1).collect::<Vec<_>>()))
    }

    /// DIMACS. Clauses with fewer than three literals are padded by
    /// repeating their last literal; longer clauses are rejected.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let bad = |m: &str| Error::Parse(format!("DIMACS: {m}"));
        let mut header = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(bad("malformed problem line"));
                }
                let v: usize = f[2].parse().map_err(|_| bad("variable count"))?;
                let c: usize = f[3].parse().map_err(|_| bad("clause count"))?;
                header = Some((v, c));
                continue;
            }
            let (nv, _) = header.ok_or_else(|| bad("clause before problem line"))?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| bad("literal"))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(bad("empty clause"));
                    }
                    if current.len() > 3 {
                        return Err(bad("clause wider than three literals"));
                    }
                    while current.len() < 3 {
                        current.push(*current.last().unwrap());
                    }
                    let to = |l: i64| ((l.unsigned_abs() - 1) as usize, l > 0);
                    clauses.push([to(current[0]), to(current[1]), to(current[2])]);
                    current.clear();
                } else {
                    if lit.unsigned_abs() as usize > nv {
                        return Err(bad("literal outside the declared variables"));
                    }
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            return Err(bad("unterminated clause"));
        }
        let (num_vars, count) = header.ok_or_else(|| bad("missing problem line"))?;
        if count != clauses.len() {
            return Err(bad("clause count does not match the problem line"));
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for &(x, pos) in c {
                let v = x as i64 + 1;
                s.push_str(&format!("{} ", if pos { v } else { -v }));
            }
            s.push_str("0\n");
        }
        s
    }

    /// Uniform random 3-CNF.
    pub fn random(num_vars: usize, num_clauses: usize, seed: u64) -> CnfFormula {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut lit = || (rng.gen_range(0..num_vars), rng.gen_bool(0.5));
        let clauses = (0..num_clauses).map(|_| [lit(), lit(), lit()]).collect();
        CnfFormula { num_vars, clauses }
    }
}

/// (R1 ∨ R2)(Q) = R1(Q) + R2(Q) - Σ_{Q1 ∪ Q2 = Q} R1(Q1)·R2(Q2). On 0/1
/// payoffs this is the pointwise maximum.
pub fn disjunction(r1: &RewardFn, r2: &RewardFn) -> RewardFn {
    let mut out = r1.clone();
    for (q, v) in r2.iter() {
        out.add(q.clone(), v.clone());
    }
    for (q1, v1) in r1.iter() {
        for (q2, v2) in r2.iter() {
            out.add(q1.union(q2), -(v1 * v2));
        }
    }
    out
}

pub struct SatToFcon {
    pub net: Sdpn,
    pub threshold: Rational,
    /// t_x per variable.
    pub variable_transitions: Vec<usize>,
    pub cert: ReductionCert,
}

impl SatToFcon {
    /// D_A: deactivate t_x exactly for the variables set to true.
    pub fn deactivation(&self, assignment: &[bool]) -> IdSet {
        IdSet::from_iter(
            self.net.num_transitions(),
            self.variable_transitions.iter().zip(assignment).filter(|(_, &a)| a).map(|(&t, _)| t),
        )
    }

    pub fn assignment(&self, d: &IdSet) -> Vec<bool> {
        self.variable_transitions.iter().map(|&t| d.contains(t)).collect()
    }
}

/// One token per variable that may move from p_x to q_x. Keeping t_x
/// switched off means x is true. Each clause pays 1 when satisfied, so the
/// formula is satisfiable iff some D has value above |clauses| - 1.
pub fn sat_to_fcon(phi: &CnfFormula) -> Result<SatToFcon> {
    let n = phi.num_vars;
    let p = |x: usize| format!("p_x{}", x + 1);
    let q = |x: usize| format!("q_x{}", x + 1);
    let t = |x: usize| format!("t_x{}", x + 1);
    let mut b = NetBuilder::new().places((0..n).map(p)).places((0..n).map(q));
    for x in 0..n {
        b = b.transition(t(x), &[p(x)], &[q(x)], rational::one());
    }
    let ps: Vec<String> = (0..n).map(p).collect();
    let ts: Vec<String> = (0..n).map(t).collect();
    let skeleton = b.initial(&ps).controllable(&ts).build()?;
    let np = skeleton.num_places();
    let qset = |x: usize| IdSet::from_iter(np, [n + x]);
    let literal = |(x, pos): Literal| {
        let mut r = RewardFn::new();
        if pos {
            r.add(IdSet::empty(np), rational::one());
            r.add(qset(x), -rational::one());
        } else {
            r.add(qset(x), rational::one());
        }
        r
    };
    let mut total = RewardFn::new();
    for c in &phi.clauses {
        let r = disjunction(&disjunction(&literal(c[0]), &literal(c[1])), &literal(c[2]));
        for (set, v) in r.iter() {
            total.add(set.clone(), v.clone());
        }
    }
    let net = skeleton.with_rewards(total);
    let mut mapping = BTreeMap::new();
    for x in 0..n {
        mapping.insert(format!("x{}", x + 1), vec![p(x), q(x), t(x)]);
    }
    let threshold = rational::int(phi.clauses.len() as i64 - 1);
    Ok(SatToFcon {
        variable_transitions: (0..n).collect(),
        cert: ReductionCert { mapping, threshold: ThresholdMap::Fixed { value: threshold.clone() } },
        threshold,
        net,
    })
}

/// Every D ⊆ C of a reduced net, for sweeping answer preservation.
pub fn all_deactivations(net: &Sdpn) -> Vec<IdSet> {
    subsets(net.controllable()).collect()
}
