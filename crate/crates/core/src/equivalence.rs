//! Markov equivalence classes: CPDAG construction, consistent extension and
//! the backward-search `Delete` operator.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeSet, UGraph};

/// Partially directed graph. Undirected pairs are stored as `(a, b)`, `a < b`.
#[derive(Clone, PartialEq, Eq)]
pub struct Pdag {
    nodes: NodeSet,
    directed: BTreeSet<(NodeId, NodeId)>,
    undirected: BTreeSet<(NodeId, NodeId)>,
}

impl Pdag {
    pub fn empty(nodes: NodeSet) -> Self {
        Pdag {
            nodes,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn new<D, U>(nodes: NodeSet, directed: D, undirected: U) -> Result<Self>
    where
        D: IntoIterator<Item = (NodeId, NodeId)>,
        U: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut p = Pdag::empty(nodes);
        for (u, v) in directed {
            p.check_pair(u, v)?;
            if p.directed.contains(&(v, u)) {
                return Err(Error::input(format!(
                    "both {0} -> {1} and {1} -> {0} present",
                    p.nodes.label(u),
                    p.nodes.label(v)
                )));
            }
            p.directed.insert((u, v));
        }
        for (a, b) in undirected {
            p.check_pair(a, b)?;
            let key = (a.min(b), a.max(b));
            if p.directed.contains(&(a, b)) || p.directed.contains(&(b, a)) {
                return Err(Error::input(format!(
                    "pair {} / {} is both directed and undirected",
                    p.nodes.label(a),
                    p.nodes.label(b)
                )));
            }
            p.undirected.insert(key);
        }
        Ok(p)
    }

    fn check_pair(&self, a: NodeId, b: NodeId) -> Result<()> {
        self.nodes.check(a)?;
        self.nodes.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(self.nodes.label(a).to_string()));
        }
        Ok(())
    }

    /// Every edge of `g` kept directed.
    pub fn from_dag(g: &Dag) -> Self {
        Pdag {
            nodes: g.nodes().clone(),
            directed: g.edges().collect(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn directed(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.directed
    }

    pub fn undirected(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.undirected
    }

    pub fn has_directed(&self, u: NodeId, v: NodeId) -> bool {
        self.directed.contains(&(u, v))
    }

    pub fn has_undirected(&self, a: NodeId, b: NodeId) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_directed(a, b) || self.has_directed(b, a) || self.has_undirected(a, b)
    }

    pub fn skeleton_edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    pub fn is_empty_skeleton(&self) -> bool {
        self.skeleton_edge_count() == 0
    }

    pub fn skeleton(&self) -> UGraph {
        let mut ug = UGraph::empty(self.nodes.clone());
        for &(a, b) in self.directed.iter().chain(&self.undirected) {
            ug.add_edge(a, b);
        }
        ug
    }

    /// Sources of directed edges into `v`.
    pub fn parents(&self, v: NodeId) -> Vec<NodeId> {
        self.directed
            .iter()
            .filter(|&&(_, t)| t == v)
            .map(|&(s, _)| s)
            .collect()
    }
}

impl fmt::Debug for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |i| self.nodes.label(i);
        let mut parts: Vec<String> = self
            .directed
            .iter()
            .map(|&(u, v)| format!("{}->{}", l(u), l(v)))
            .collect();
        parts.extend(
            self.undirected
                .iter()
                .map(|&(a, b)| format!("{}--{}", l(a), l(b))),
        );
        write!(f, "Pdag{{{}}}", parts.join(", "))
    }
}

const NONE: u8 = 0;
const OUT: u8 = 1;
const IN: u8 = 2;
const UND: u8 = 3;

/// Dense adjacency matrix view of a mixed graph, used by the hot loops.
#[derive(Clone)]
pub(crate) struct Mixed {
    n: usize,
    m: Vec<u8>,
}

impl Mixed {
    fn new(n: usize) -> Self {
        Mixed {
            n,
            m: vec![NONE; n * n],
        }
    }

    pub(crate) fn from_pdag(p: &Pdag) -> Self {
        let mut m = Mixed::new(p.nodes.len());
        for &(u, v) in &p.directed {
            m.set_directed(u, v);
        }
        for &(a, b) in &p.undirected {
            m.set_undirected(a, b);
        }
        m
    }

    fn to_pdag(&self, nodes: NodeSet) -> Pdag {
        let mut p = Pdag::empty(nodes);
        for a in 0..self.n {
            for b in 0..self.n {
                match self.get(a, b) {
                    OUT => {
                        p.directed.insert((a, b));
                    }
                    UND if a < b => {
                        p.undirected.insert((a, b));
                    }
                    _ => {}
                }
            }
        }
        p
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, a: NodeId, b: NodeId) -> u8 {
        self.m[a * self.n + b]
    }

    fn set_directed(&mut self, a: NodeId, b: NodeId) {
        self.m[a * self.n + b] = OUT;
        self.m[b * self.n + a] = IN;
    }

    fn set_undirected(&mut self, a: NodeId, b: NodeId) {
        self.m[a * self.n + b] = UND;
        self.m[b * self.n + a] = UND;
    }

    fn clear(&mut self, a: NodeId, b: NodeId) {
        self.m[a * self.n + b] = NONE;
        self.m[b * self.n + a] = NONE;
    }

    #[inline]
    pub(crate) fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.get(a, b) != NONE
    }

    #[inline]
    pub(crate) fn is_directed(&self, a: NodeId, b: NodeId) -> bool {
        self.get(a, b) == OUT
    }

    #[inline]
    pub(crate) fn is_undirected(&self, a: NodeId, b: NodeId) -> bool {
        self.get(a, b) == UND
    }

    pub(crate) fn parents(&self, v: NodeId) -> Vec<NodeId> {
        (0..self.n).filter(|&w| self.is_directed(w, v)).collect()
    }

    pub(crate) fn is_clique(&self, set: &[NodeId]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    /// Conditioning-candidate pool for deleting the edge `u -> v` (or `u - v`
    /// evaluated in that orientation), sorted.
    pub(crate) fn na_set(&self, v: NodeId, u: NodeId) -> Vec<NodeId> {
        let uv_undirected = self.is_undirected(u, v);
        (0..self.n)
            .filter(|&w| w != u && w != v)
            .filter(|&w| self.is_directed(w, v) || self.is_undirected(w, v))
            .filter(|&w| self.is_undirected(w, u) || (uv_undirected && self.adjacent(w, u)))
            .collect()
    }
}

/// A `Delete` operator instance: drop `from -> to` (or the undirected pair
/// when `undirected` is set, evaluated in that orientation) and orient the
/// edges towards `h_set`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeleteChoice {
    pub from: NodeId,
    pub to: NodeId,
    pub undirected: bool,
    pub h_set: Vec<NodeId>,
}

impl DeleteChoice {
    pub fn new(from: NodeId, to: NodeId, undirected: bool, mut h_set: Vec<NodeId>) -> Self {
        h_set.sort_unstable();
        h_set.dedup();
        DeleteChoice {
            from,
            to,
            undirected,
            h_set,
        }
    }

    /// True when this is the second orientation evaluated for an undirected pair.
    pub fn is_reversed(&self) -> bool {
        self.undirected && self.from > self.to
    }
}

/// Completed pattern of `g`'s equivalence class: v-structures oriented,
/// then Meek's orientation rules applied to a fixpoint.
pub fn dag_to_cpdag(g: &Dag) -> Pdag {
    let mut m = Mixed::new(g.node_count());
    for (u, v) in g.edges() {
        m.set_undirected(u, v);
    }
    for (a, c, b) in g.v_structures() {
        m.set_directed(a, c);
        m.set_directed(b, c);
    }
    meek_closure(&mut m);
    m.to_pdag(g.nodes().clone())
}

fn meek_closure(m: &mut Mixed) {
    let n = m.n;
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if a != b && m.is_undirected(a, b) && compelled(m, a, b) {
                    m.set_directed(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Whether undirected `a - b` must be oriented `a -> b`.
fn compelled(m: &Mixed, a: NodeId, b: NodeId) -> bool {
    let n = m.n;
    // R1: c -> a - b with c, b non-adjacent.
    // R2: a -> c -> b.
    for c in 0..n {
        if c == a || c == b {
            continue;
        }
        if m.is_directed(c, a) && !m.adjacent(c, b) {
            return true;
        }
        if m.is_directed(a, c) && m.is_directed(c, b) {
            return true;
        }
    }
    // R3: a - c -> b and a - d -> b with c, d non-adjacent.
    let mids: Vec<NodeId> = (0..n)
        .filter(|&c| c != b && m.is_undirected(a, c) && m.is_directed(c, b))
        .collect();
    mids.iter()
        .enumerate()
        .any(|(i, &c)| mids[i + 1..].iter().any(|&d| !m.adjacent(c, d)))
}

/// Consistent extension by repeated sink elimination: a node qualifies when
/// it has no outgoing directed edge and each undirected neighbour is adjacent
/// to all of its other neighbours. The smallest qualifying id is taken.
pub fn pdag_to_dag(p: &Pdag) -> Result<Dag> {
    let n = p.nodes.len();
    let m = Mixed::from_pdag(p);
    let mut alive = vec![true; n];
    let mut edges: Vec<(NodeId, NodeId)> = p.directed.iter().copied().collect();
    for _ in 0..n {
        let sink = (0..n)
            .filter(|&x| alive[x])
            .find(|&x| is_extension_sink(&m, &alive, x))
            .ok_or(Error::NoConsistentExtension)?;
        for y in 0..n {
            if alive[y] && m.is_undirected(y, sink) {
                edges.push((y, sink));
            }
        }
        alive[sink] = false;
    }
    Dag::new(p.nodes.clone(), edges).map_err(|_| Error::NoConsistentExtension)
}

fn is_extension_sink(m: &Mixed, alive: &[bool], x: NodeId) -> bool {
    let n = m.n;
    if (0..n).any(|y| alive[y] && m.is_directed(x, y)) {
        return false;
    }
    let adj: Vec<NodeId> = (0..n).filter(|&y| alive[y] && m.adjacent(x, y)).collect();
    adj.iter()
        .filter(|&&y| m.is_undirected(x, y))
        .all(|&y| adj.iter().all(|&z| z == y || m.adjacent(y, z)))
}

/// Conditioning-candidate pool for deleting `u -> v` in `p`.
///
/// Nodes adjacent to `v` (as a parent or through an undirected edge) that are
/// joined to `u` by an undirected edge, or, when `u - v` is itself
/// undirected, adjacent to `u` at all.
pub fn na_set(p: &Pdag, v: NodeId, u: NodeId) -> Result<Vec<NodeId>> {
    p.nodes.check(u)?;
    p.nodes.check(v)?;
    if !p.adjacent(u, v) {
        return Err(Error::input(format!(
            "{} and {} are not adjacent",
            p.nodes.label(u),
            p.nodes.label(v)
        )));
    }
    Ok(Mixed::from_pdag(p).na_set(v, u))
}

/// Applies `Delete(u, v, H)`: removes the edge, then orients `v - h` as
/// `v -> h` and `u - h` as `u -> h` for every `h` in `H`.
///
/// Fails when the edge is absent, `H` is not drawn from the candidate pool,
/// or the pool minus `H` is not a clique.
pub fn apply_delete(p: &Pdag, choice: &DeleteChoice) -> Result<Pdag> {
    let (u, v) = (choice.from, choice.to);
    p.check_pair(u, v)?;
    let present = if choice.undirected {
        p.has_undirected(u, v)
    } else {
        p.has_directed(u, v)
    };
    if !present {
        return Err(Error::MissingEdge {
            from: p.nodes.label(u).to_string(),
            to: p.nodes.label(v).to_string(),
            kind: if choice.undirected { "--" } else { "->" },
        });
    }
    let mut m = Mixed::from_pdag(p);
    let pool = m.na_set(v, u);
    if let Some(h) = choice.h_set.iter().find(|h| !pool.contains(h)) {
        return Err(Error::InvalidDelete(format!(
            "{} is not a conditioning candidate",
            p.nodes.label(*h)
        )));
    }
    let rest: Vec<NodeId> = pool
        .iter()
        .copied()
        .filter(|w| !choice.h_set.contains(w))
        .collect();
    if !m.is_clique(&rest) {
        return Err(Error::InvalidDelete(
            "remaining candidates do not form a clique".into(),
        ));
    }
    m.clear(u, v);
    for &h in &choice.h_set {
        if m.is_undirected(v, h) {
            m.set_directed(v, h);
        }
        if m.is_undirected(u, h) {
            m.set_directed(u, h);
        }
    }
    Ok(m.to_pdag(p.nodes.clone()))
}

/// Extends `p` to a DAG and returns that DAG's CPDAG.
pub fn renormalize(p: &Pdag) -> Result<Pdag> {
    Ok(dag_to_cpdag(&pdag_to_dag(p)?))
}
