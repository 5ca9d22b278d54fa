//! Directed and undirected graph types over a shared, label-indexed node set,
//! plus the structural primitives used throughout the crate: topological
//! order, ancestral sets, moralization and d-separation.
//!
//! Nodes are addressed by dense ids. Ids follow sorted label order, so any
//! iteration by id is deterministic and matches lexicographic label order.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense node identifier, valid for the [`NodeSet`] it was issued by.
pub type NodeId = usize;

/// Ordered set of unique node labels.
///
/// Cloning is cheap; graphs built from the same set share one allocation.
#[derive(Clone)]
pub struct NodeSet {
    labels: Arc<[String]>,
    index: Arc<HashMap<String, NodeId>>,
}

impl NodeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for l in &labels {
            validate_label(l)?;
        }
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateNode(w[0].clone()));
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(NodeSet {
            labels: labels.into(),
            index: Arc::new(index),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn id(&self, label: &str) -> Result<NodeId> {
        self.get(label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn ids<'a, I>(&self, labels: I) -> Result<Vec<NodeId>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels.into_iter().map(|l| self.id(l)).collect()
    }

    pub(crate) fn check(&self, id: NodeId) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("#{id}")))
        }
    }

    /// Errors with the offending labels when `other` differs from `self`.
    pub fn ensure_same(&self, other: &NodeSet) -> Result<()> {
        if self == other {
            return Ok(());
        }
        let only_left: Vec<&str> = self
            .labels
            .iter()
            .filter(|l| other.get(l).is_none())
            .map(String::as_str)
            .collect();
        let only_right: Vec<&str> = other
            .labels
            .iter()
            .filter(|l| self.get(l).is_none())
            .map(String::as_str)
            .collect();
        Err(Error::NodeSetMismatch(format!(
            "only in first: [{}]; only in second: [{}]",
            only_left.join(","),
            only_right.join(",")
        )))
    }

    /// Labels of `ids`, in the given order.
    pub fn labels_of(&self, ids: &[NodeId]) -> Vec<String> {
        ids.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

impl PartialEq for NodeSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for NodeSet {}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || c == ',' || c == '#')
    {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

fn insert_sorted(v: &mut Vec<NodeId>, x: NodeId) -> bool {
    match v.binary_search(&x) {
        Ok(_) => false,
        Err(pos) => {
            v.insert(pos, x);
            true
        }
    }
}

fn remove_sorted(v: &mut Vec<NodeId>, x: NodeId) -> bool {
    match v.binary_search(&x) {
        Ok(pos) => {
            v.remove(pos);
            true
        }
        Err(_) => false,
    }
}

/// Total order over all nodes of a [`NodeSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOrder {
    sequence: Vec<NodeId>,
    position: Vec<usize>,
}

impl NodeOrder {
    pub fn new(sequence: Vec<NodeId>, node_count: usize) -> Result<Self> {
        if sequence.len() != node_count {
            return Err(Error::InvalidOrdering(format!(
                "expected {node_count} nodes, got {}",
                sequence.len()
            )));
        }
        let mut position = vec![usize::MAX; node_count];
        for (pos, &id) in sequence.iter().enumerate() {
            if id >= node_count {
                return Err(Error::InvalidOrdering(format!("node id {id} out of range")));
            }
            if position[id] != usize::MAX {
                return Err(Error::InvalidOrdering(format!("node id {id} repeated")));
            }
            position[id] = pos;
        }
        Ok(NodeOrder { sequence, position })
    }

    pub fn from_labels<'a, I>(nodes: &NodeSet, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let seq = nodes.ids(labels)?;
        Self::new(seq, nodes.len()).map_err(|e| match e {
            Error::InvalidOrdering(m) => {
                Error::InvalidOrdering(format!("{m} (node set: {:?})", nodes))
            }
            other => other,
        })
    }

    pub fn identity(node_count: usize) -> Self {
        NodeOrder {
            sequence: (0..node_count).collect(),
            position: (0..node_count).collect(),
        }
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.sequence
    }

    pub fn position(&self, id: NodeId) -> usize {
        self.position[id]
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn labels(&self, nodes: &NodeSet) -> Vec<String> {
        nodes.labels_of(&self.sequence)
    }
}

/// Directed acyclic graph. Parent and child lists are kept sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: NodeSet,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
}

impl Dag {
    pub fn empty(nodes: NodeSet) -> Self {
        let n = nodes.len();
        Dag {
            nodes,
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
        }
    }

    /// Builds a DAG, rejecting self-loops, unknown ids and cycles.
    pub fn new<I>(nodes: NodeSet, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Dag::empty(nodes);
        for (u, v) in edges {
            g.nodes.check(u)?;
            g.nodes.check(v)?;
            if u == v {
                return Err(Error::SelfLoop(g.nodes.label(u).to_string()));
            }
            insert_sorted(&mut g.children[u], v);
            insert_sorted(&mut g.parents[v], u);
        }
        topological_sort(&g)?;
        Ok(g)
    }

    pub fn from_labels(nodes: NodeSet, edges: &[(&str, &str)]) -> Result<Self> {
        let ids = edges
            .iter()
            .map(|(u, v)| Ok((nodes.id(u)?, nodes.id(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Dag::new(nodes, ids)
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Edges sorted by `(from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (u, v)))
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.children[u].binary_search(&v).is_ok()
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        let removed = remove_sorted(&mut self.children[u], v);
        if removed {
            remove_sorted(&mut self.parents[v], u);
        }
        removed
    }

    /// True when `to` already reaches `from`, i.e. adding `from -> to`
    /// would close a directed cycle.
    pub fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(x) = stack.pop() {
            for &c in &self.children[x] {
                if c == to {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Adds `u -> v`. Returns `Ok(false)` if the edge already exists.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        self.nodes.check(u)?;
        self.nodes.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(self.nodes.label(u).to_string()));
        }
        if self.has_edge(u, v) {
            return Ok(false);
        }
        if self.reaches(v, u) {
            return Err(Error::Cycle {
                from: self.nodes.label(u).to_string(),
                to: self.nodes.label(v).to_string(),
            });
        }
        insert_sorted(&mut self.children[u], v);
        insert_sorted(&mut self.parents[v], u);
        Ok(true)
    }

    pub fn skeleton(&self) -> UGraph {
        let mut ug = UGraph::empty(self.nodes.clone());
        for (u, v) in self.edges() {
            ug.add_edge(u, v);
        }
        ug
    }

    /// Triples `(a, c, b)` with `a -> c <- b`, `a < b` and `a`, `b` non-adjacent.
    pub fn v_structures(&self) -> Vec<(NodeId, NodeId, NodeId)> {
        let mut out = Vec::new();
        for c in 0..self.node_count() {
            let ps = &self.parents[c];
            for (i, &a) in ps.iter().enumerate() {
                for &b in &ps[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.push((a, c, b));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|(u, v)| format!("{}->{}", self.nodes.label(u), self.nodes.label(v)))
            .collect();
        write!(f, "Dag{{{}}}", edges.join(", "))
    }
}

/// Simple undirected graph; edges stored canonically as `(a, b)` with `a < b`.
#[derive(Clone, PartialEq, Eq)]
pub struct UGraph {
    nodes: NodeSet,
    adj: Vec<Vec<NodeId>>,
}

impl UGraph {
    pub fn empty(nodes: NodeSet) -> Self {
        let n = nodes.len();
        UGraph {
            nodes,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn new<I>(nodes: NodeSet, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = UGraph::empty(nodes);
        for (a, b) in edges {
            g.nodes.check(a)?;
            g.nodes.check(b)?;
            if a == b {
                return Err(Error::SelfLoop(g.nodes.label(a).to_string()));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Returns false for self-loops and already present edges.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return false;
        }
        let added = insert_sorted(&mut self.adj[a], b);
        if added {
            insert_sorted(&mut self.adj[b], a);
        }
        added
    }

    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        let removed = remove_sorted(&mut self.adj[a], b);
        if removed {
            remove_sorted(&mut self.adj[b], a);
        }
        removed
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn neighbors(&self, a: NodeId) -> &[NodeId] {
        &self.adj[a]
    }

    pub fn degree(&self, a: NodeId) -> usize {
        self.adj[a].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Canonical `(a, b)` pairs with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, ns)| {
            ns.iter()
                .copied()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// Drops every edge incident to `node`. The node itself stays in the set.
    pub fn isolate(&mut self, node: NodeId) {
        let ns = std::mem::take(&mut self.adj[node]);
        for b in ns {
            remove_sorted(&mut self.adj[b], node);
        }
    }

    /// Whether `a` and `b` are joined by a path.
    pub fn connected(&self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if y == b {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }
}

impl fmt::Debug for UGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|(a, b)| format!("{}--{}", self.nodes.label(a), self.nodes.label(b)))
            .collect();
        write!(f, "UGraph{{{}}}", edges.join(", "))
    }
}

/// Kahn's algorithm with the smallest available id taken first.
pub fn topological_sort(g: &Dag) -> Result<NodeOrder> {
    let n = g.node_count();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.parents(v).len()).collect();
    let mut heap: BinaryHeap<Reverse<NodeId>> = (0..n)
        .filter(|&v| indeg[v] == 0)
        .map(Reverse)
        .collect();
    let mut seq = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        seq.push(v);
        for &c in g.children(v) {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                heap.push(Reverse(c));
            }
        }
    }
    if seq.len() < n {
        // Every unplaced node keeps an unplaced parent; walking parents must revisit.
        let mut on_walk = vec![false; n];
        let mut x = (0..n).find(|&v| indeg[v] > 0).expect("unplaced node");
        loop {
            on_walk[x] = true;
            let p = *g
                .parents(x)
                .iter()
                .find(|&&p| indeg[p] > 0)
                .expect("unplaced parent");
            if on_walk[p] {
                return Err(Error::Cycle {
                    from: g.nodes().label(p).to_string(),
                    to: g.nodes().label(x).to_string(),
                });
            }
            x = p;
        }
    }
    NodeOrder::new(seq, n)
}

/// Membership mask of `seeds` and all of their ancestors.
pub fn ancestral_mask(g: &Dag, seeds: &[NodeId]) -> Vec<bool> {
    let mut mask = vec![false; g.node_count()];
    let mut stack: Vec<NodeId> = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if !mask[s] {
            mask[s] = true;
            stack.push(s);
        }
    }
    while let Some(x) = stack.pop() {
        for &p in g.parents(x) {
            if !mask[p] {
                mask[p] = true;
                stack.push(p);
            }
        }
    }
    mask
}

/// Subgraph induced by `s` and its ancestors, over the reduced node set.
pub fn ancestral_subgraph(g: &Dag, s: &[NodeId]) -> Result<Dag> {
    for &x in s {
        g.nodes().check(x)?;
    }
    let mask = ancestral_mask(g, s);
    let kept: Vec<NodeId> = (0..g.node_count()).filter(|&v| mask[v]).collect();
    let nodes = NodeSet::new(kept.iter().map(|&v| g.nodes().label(v).to_string()))?;
    // Ids in the reduced set keep the same relative (label) order.
    let mut remap = vec![usize::MAX; g.node_count()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new;
    }
    let edges = g
        .edges()
        .filter(|&(u, v)| mask[u] && mask[v])
        .map(|(u, v)| (remap[u], remap[v]));
    Dag::new(nodes, edges)
}

pub fn moralize(g: &Dag) -> UGraph {
    moral_restricted(g, None)
}

/// Moral graph of the subgraph induced by `mask` (all nodes when `None`),
/// kept over the full node set so ids stay valid.
pub(crate) fn moral_restricted(g: &Dag, mask: Option<&[bool]>) -> UGraph {
    let inside = |v: NodeId| mask.map_or(true, |m| m[v]);
    let mut ug = UGraph::empty(g.nodes().clone());
    for v in 0..g.node_count() {
        if !inside(v) {
            continue;
        }
        let ps: Vec<NodeId> = g.parents(v).iter().copied().filter(|&p| inside(p)).collect();
        for (i, &a) in ps.iter().enumerate() {
            ug.add_edge(a, v);
            for &b in &ps[i + 1..] {
                ug.add_edge(a, b);
            }
        }
    }
    ug
}

/// Moral graph of the ancestral closure of `seeds ∪ removed`, with the
/// `removed` nodes isolated.
pub(crate) fn conditioned_moral_graph(g: &Dag, seeds: &[NodeId], removed: &[NodeId]) -> UGraph {
    let all: Vec<NodeId> = seeds.iter().chain(removed).copied().collect();
    let mask = ancestral_mask(g, &all);
    let mut m = moral_restricted(g, Some(&mask));
    for &z in removed {
        m.isolate(z);
    }
    m
}

/// Whether `u` and `v` are d-separated by `z` in `g`, decided on the moral
/// graph of the ancestral closure of `{u, v} ∪ z` with `z` removed.
pub fn d_separated(g: &Dag, u: NodeId, v: NodeId, z: &[NodeId]) -> Result<bool> {
    let nodes = g.nodes();
    nodes.check(u)?;
    nodes.check(v)?;
    for &x in z {
        nodes.check(x)?;
    }
    if u == v {
        return Err(Error::input("d-separation query needs two distinct nodes"));
    }
    if z.contains(&u) || z.contains(&v) {
        return Err(Error::input(
            "d-separation query endpoints may not be in the conditioning set",
        ));
    }
    let m = conditioned_moral_graph(g, &[u, v], z);
    Ok(!m.connected(u, v))
}
