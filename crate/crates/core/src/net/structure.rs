use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{Marking, Sdpn};
use crate::error::{Error, Result};
use crate::idset::IdSet;

/// Structural and behavioural properties of a net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub ordinary: bool,
    pub safe: bool,
    pub acyclic: bool,
    pub free_choice: bool,
    pub occurrence: bool,
    pub backward_conflict_free: bool,
    pub self_conflict_free: bool,
    pub initial_no_predecessors: bool,
    pub reachable_markings: usize,
    /// `None` when the reachability graph has a cycle, i.e. runs can be
    /// arbitrarily long.
    pub max_run_length: Option<usize>,
}

impl Classification {
    /// Safe, acyclic and free-choice.
    pub fn is_safc(&self) -> bool {
        self.safe && self.acyclic && self.free_choice
    }

    pub fn is_fcon(&self) -> bool {
        self.occurrence && self.free_choice
    }

    pub fn safc_violations(&self) -> String {
        let mut why = Vec::new();
        if !self.safe {
            why.push("not safe");
        }
        if !self.acyclic {
            why.push("cyclic");
        }
        if !self.free_choice {
            why.push("not free-choice");
        }
        why.join(", ")
    }
}

/// Transitions sharing one pre-multiset. In a free-choice net these are the
/// conflict clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub members: Vec<usize>,
    pub transitions: IdSet,
    pub pre: IdSet,
}

impl Cell {
    pub fn post(&self, net: &Sdpn) -> IdSet {
        let mut s = net.empty_places();
        for &t in &self.members {
            s.union_with(net.post_set(t));
        }
        s
    }
}

/// Cells in order of their smallest member.
pub fn compute_cells(net: &Sdpn) -> Vec<Cell> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut by_pre: HashMap<&[(usize, u32)], usize> = HashMap::new();
    for (t, tr) in net.transitions().iter().enumerate() {
        let head = *by_pre.entry(&tr.pre).or_insert(t);
        groups.entry(head).or_default().push(t);
    }
    groups
        .into_values()
        .map(|members| Cell {
            transitions: IdSet::from_iter(net.num_transitions(), members.iter().copied()),
            pre: net.pre_set(members[0]).clone(),
            members,
        })
        .collect()
}

fn transition_graph(net: &Sdpn) -> DiGraph<(), (), usize> {
    let n = net.num_transitions();
    let mut g = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for t in 0..n {
        for u in 0..n {
            if !net.post_set(t).is_disjoint(net.pre_set(u)) {
                g.add_edge(t.into(), u.into(), ());
            }
        }
    }
    g
}

pub fn is_acyclic(net: &Sdpn) -> bool {
    !is_cyclic_directed(&transition_graph(net))
}

/// Cells in a linear extension of the causal order between them. Ties go to
/// the cell whose smallest member id is lexicographically smallest.
pub fn order_cells(net: &Sdpn) -> Result<Vec<Cell>> {
    if !is_acyclic(net) {
        return Err(Error::CyclicNet);
    }
    let cells = compute_cells(net);
    let k = cells.len();
    let key: Vec<String> =
        cells.iter().map(|c| c.members.iter().map(|&t| net.transition_name(t)).min().unwrap().to_string()).collect();
    let mut succ = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    for a in 0..k {
        let post = cells[a].post(net);
        for b in 0..k {
            if a != b && !post.is_disjoint(&cells[b].pre) {
                succ[a].push(b);
                indeg[b] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(String, usize)>> =
        (0..k).filter(|&c| indeg[c] == 0).map(|c| Reverse((key[c].clone(), c))).collect();
    let mut out = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = ready.pop() {
        out.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push(Reverse((key[d].clone(), d)));
            }
        }
    }
    debug_assert_eq!(out.len(), k);
    let mut cells: Vec<Option<Cell>> = cells.into_iter().map(Some).collect();
    Ok(out.into_iter().map(|c| cells[c].take().unwrap()).collect())
}

/// Reachability graph: markings in discovery order and successor lists.
pub struct ReachabilityGraph {
    pub markings: Vec<Marking>,
    pub successors: Vec<Vec<usize>>,
}

pub fn reachable_markings(net: &Sdpn, state_cap: usize) -> Result<ReachabilityGraph> {
    let mut index = HashMap::new();
    let mut markings = vec![net.initial().clone()];
    let mut successors = Vec::new();
    index.insert(net.initial().clone(), 0usize);
    let mut next = 0;
    while next < markings.len() {
        let m = markings[next].clone();
        let mut out = Vec::new();
        for t in net.enabled(&m).iter() {
            let m2 = net.fire(&m, t);
            let id = match index.get(&m2) {
                Some(&id) => id,
                None => {
                    if markings.len() >= state_cap {
                        return Err(Error::BudgetExceeded(state_cap));
                    }
                    index.insert(m2.clone(), markings.len());
                    markings.push(m2);
                    markings.len() - 1
                }
            };
            if !out.contains(&id) {
                out.push(id);
            }
        }
        successors.push(out);
        next += 1;
    }
    Ok(ReachabilityGraph { markings, successors })
}

fn longest_path(g: &ReachabilityGraph) -> Option<usize> {
    // Iterative DFS, colours: 0 new, 1 on stack, 2 done.
    let n = g.markings.len();
    let mut colour = vec![0u8; n];
    let mut depth = vec![0usize; n];
    let mut stack = vec![(0usize, 0usize)];
    colour[0] = 1;
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        if *i < g.successors[v].len() {
            let w = g.successors[v][*i];
            *i += 1;
            match colour[w] {
                0 => {
                    colour[w] = 1;
                    stack.push((w, 0));
                }
                1 => return None,
                _ => {}
            }
        } else {
            depth[v] = g.successors[v].iter().map(|&w| depth[w] + 1).max().unwrap_or(0);
            colour[v] = 2;
            stack.pop();
        }
    }
    Some(depth[0])
}

/// Transitions t with t ≺+ x, for every transition x and every place x.
fn causal_predecessors(net: &Sdpn) -> (Vec<IdSet>, Vec<IdSet>) {
    let nt = net.num_transitions();
    let np = net.num_places();
    // Fixpoint; converges in at most |T| rounds and also handles cycles.
    let mut of_t = vec![IdSet::empty(nt); nt];
    let mut of_p = vec![IdSet::empty(nt); np];
    loop {
        let mut changed = false;
        for p in 0..np {
            let mut s = of_p[p].clone();
            for t in net.producers(p) {
                s.insert(t);
                s.union_with(&of_t[t]);
            }
            if s != of_p[p] {
                of_p[p] = s;
                changed = true;
            }
        }
        for t in 0..nt {
            let mut s = of_t[t].clone();
            for p in net.pre_set(t).iter() {
                s.union_with(&of_p[p]);
            }
            if s != of_t[t] {
                of_t[t] = s;
                changed = true;
            }
        }
        if !changed {
            return (of_t, of_p);
        }
    }
}

fn has_conflict_pair(net: &Sdpn, ts: &IdSet) -> bool {
    let v = ts.to_vec();
    v.iter().enumerate().any(|(i, &a)| v[i + 1..].iter().any(|&b| !net.pre_set(a).is_disjoint(net.pre_set(b))))
}

pub fn classify(net: &Sdpn, state_cap: usize) -> Result<Classification> {
    let ordinary = net.transitions().iter().all(|t| t.pre.iter().chain(&t.post).all(|&(_, k)| k <= 1));
    let nt = net.num_transitions();
    let free_choice = ordinary
        && (0..nt).all(|a| {
            (0..nt).all(|b| net.pre_set(a) == net.pre_set(b) || net.pre_set(a).is_disjoint(net.pre_set(b)))
        });
    let acyclic = is_acyclic(net);
    let graph = reachable_markings(net, state_cap)?;
    let safe = ordinary && graph.markings.iter().all(|m| m.max_tokens() <= 1);
    let backward_conflict_free = (0..net.num_places()).all(|p| net.producers(p).count() <= 1);
    let (pred_t, pred_p) = causal_predecessors(net);
    let self_conflict_free = !pred_t.iter().chain(&pred_p).any(|s| has_conflict_pair(net, s));
    let initial_no_predecessors = net.initial().support().iter().all(|p| net.producers(p).next().is_none());
    Ok(Classification {
        ordinary,
        safe,
        acyclic,
        free_choice,
        occurrence: safe && acyclic && backward_conflict_free && self_conflict_free && initial_no_predecessors,
        backward_conflict_free,
        self_conflict_free,
        initial_no_predecessors,
        reachable_markings: graph.markings.len(),
        max_run_length: longest_path(&graph),
    })
}
