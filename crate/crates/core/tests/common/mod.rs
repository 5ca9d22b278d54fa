//! Seeded graph generators and brute-force reference implementations used
//! to check the library against independent computations.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mcbnc_core::synth::rng;
use mcbnc_core::{Dag, NodeId, NodeSet, UGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Labels `n00, n01, ...`; zero padding keeps ids in numeric order.
pub fn labels(n: usize) -> NodeSet {
    NodeSet::new((0..n).map(|i| format!("n{i:02}"))).unwrap()
}

/// DAG whose edges follow `perm`: pair `(i, j)`, `i < j`, becomes
/// `perm[i] -> perm[j]` when its bit is set. Bits are read in pair order.
pub fn dag_from_bits(perm: &[NodeId], bits: &[bool]) -> Dag {
    let n = perm.len();
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits.get(k).copied().unwrap_or(false) {
                edges.push((perm[i], perm[j]));
            }
            k += 1;
        }
    }
    Dag::new(labels(n), edges).unwrap()
}

pub fn seeded_dag(n: usize, density: f64, seed: u64) -> Dag {
    let mut r = rng(seed);
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(&mut r);
    let bits: Vec<bool> = (0..n * n.saturating_sub(1) / 2).map(|_| r.gen_bool(density)).collect();
    dag_from_bits(&perm, &bits)
}

pub fn seeded_ugraph(n: usize, density: f64, max_edges: usize, seed: u64) -> UGraph {
    let mut r = rng(seed);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(density) {
                pairs.push((a, b));
            }
        }
    }
    pairs.shuffle(&mut r);
    pairs.truncate(max_edges);
    UGraph::new(labels(n), pairs).unwrap()
}

fn descendants_or_self(g: &Dag, x: NodeId) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![x];
    seen[x] = true;
    while let Some(a) = stack.pop() {
        for &c in g.children(a) {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    seen
}

/// d-separation by enumerating every simple path of the skeleton and
/// applying the chain, fork and collider rules to each interior node.
pub fn dsep_by_paths(g: &Dag, u: NodeId, v: NodeId, z: &[NodeId]) -> bool {
    let n = g.node_count();
    let in_z: Vec<bool> = (0..n).map(|x| z.contains(&x)).collect();
    let active_collider: Vec<bool> = (0..n)
        .map(|x| descendants_or_self(g, x).iter().enumerate().any(|(d, &is)| is && in_z[d]))
        .collect();
    let mut path = vec![u];
    let mut on_path = vec![false; n];
    on_path[u] = true;

    fn open(g: &Dag, path: &[NodeId], in_z: &[bool], active_collider: &[bool]) -> bool {
        path.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            if g.has_edge(a, b) && g.has_edge(c, b) {
                active_collider[b]
            } else {
                !in_z[b]
            }
        })
    }

    fn search(
        g: &Dag,
        v: NodeId,
        path: &mut Vec<NodeId>,
        on_path: &mut [bool],
        in_z: &[bool],
        active_collider: &[bool],
    ) -> bool {
        let last = *path.last().unwrap();
        if last == v {
            return open(g, path, in_z, active_collider);
        }
        let nbrs: Vec<NodeId> = g.parents(last).iter().chain(g.children(last)).copied().collect();
        for w in nbrs {
            if on_path[w] {
                continue;
            }
            path.push(w);
            on_path[w] = true;
            // Prune once the prefix is already blocked.
            let ok = open(g, path, in_z, active_collider)
                && search(g, v, path, on_path, in_z, active_collider);
            on_path[w] = false;
            path.pop();
            if ok {
                return true;
            }
        }
        false
    }

    !search(g, v, &mut path, &mut on_path, &in_z, &active_collider)
}

/// All subsets of `items`, each in input order.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

fn connected_without(g: &UGraph, s: NodeId, t: NodeId, removed: &[(NodeId, NodeId)]) -> bool {
    let mut h = g.clone();
    for &(a, b) in removed {
        h.remove_edge(a, b);
    }
    h.connected(s, t)
}

/// Size of the smallest edge set whose removal disconnects `s` from `t`,
/// found by trying all edge subsets in order of size.
pub fn brute_min_cut(g: &UGraph, s: NodeId, t: NodeId) -> usize {
    let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    fn pick(
        g: &UGraph,
        s: NodeId,
        t: NodeId,
        edges: &[(NodeId, NodeId)],
        start: usize,
        left: usize,
        chosen: &mut Vec<(NodeId, NodeId)>,
    ) -> bool {
        if left == 0 {
            return !connected_without(g, s, t, chosen);
        }
        for i in start..edges.len() {
            chosen.push(edges[i]);
            let found = pick(g, s, t, edges, i + 1, left - 1, chosen);
            chosen.pop();
            if found {
                return true;
            }
        }
        false
    }
    (0..=edges.len())
        .find(|&k| pick(g, s, t, &edges, 0, k, &mut Vec::new()))
        .expect("removing every edge disconnects")
}

pub fn disconnects(g: &UGraph, s: NodeId, t: NodeId, cut: &[(NodeId, NodeId)]) -> bool {
    !connected_without(g, s, t, cut)
}

fn sorted_v_structures(g: &Dag) -> Vec<(NodeId, NodeId, NodeId)> {
    let mut v = g.v_structures();
    v.sort_unstable();
    v
}

/// Every DAG with the skeleton and v-structures of `g`.
pub fn equivalence_class(g: &Dag) -> Vec<Dag> {
    let skeleton: Vec<(NodeId, NodeId)> = g.skeleton().edges().collect();
    let target = sorted_v_structures(g);
    let mut out = Vec::new();
    for mask in 0u64..1 << skeleton.len() {
        let edges = skeleton
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if mask >> i & 1 == 1 { (b, a) } else { (a, b) });
        if let Ok(d) = Dag::new(g.nodes().clone(), edges) {
            if sorted_v_structures(&d) == target {
                out.push(d);
            }
        }
    }
    out
}

/// CPDAG from the class: an edge is directed iff every member agrees on it.
pub fn cpdag_by_enumeration(g: &Dag) -> (BTreeSet<(NodeId, NodeId)>, BTreeSet<(NodeId, NodeId)>) {
    let class = equivalence_class(g);
    let mut directed = BTreeSet::new();
    let mut undirected = BTreeSet::new();
    for (a, b) in g.skeleton().edges() {
        let forward = class.iter().filter(|d| d.has_edge(a, b)).count();
        if forward == class.len() {
            directed.insert((a, b));
        } else if forward == 0 {
            directed.insert((b, a));
        } else {
            undirected.insert((a, b));
        }
    }
    (directed, undirected)
}

/// Width of eliminating `g` in `order`.
pub fn elimination_width(g: &UGraph, order: &[NodeId]) -> usize {
    let n = g.node_count();
    let mut adj: Vec<BTreeSet<NodeId>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut width = 0;
    for &v in order {
        let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
        width = width.max(nbrs.len());
        for &a in &nbrs {
            adj[a].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
    }
    width
}

/// Exact treewidth: the best width over all elimination orders.
pub fn exact_treewidth(g: &UGraph) -> usize {
    fn permute(g: &UGraph, order: &mut Vec<NodeId>, k: usize, best: &mut usize) {
        if k == order.len() {
            *best = (*best).min(elimination_width(g, order));
            return;
        }
        for i in k..order.len() {
            order.swap(k, i);
            permute(g, order, k + 1, best);
            order.swap(k, i);
        }
    }
    let mut order: Vec<NodeId> = (0..g.node_count()).collect();
    let mut best = usize::MAX;
    permute(g, &mut order, 0, &mut best);
    if order.is_empty() {
        0
    } else {
        best
    }
}

/// Moral graph built directly from the definition: skeleton plus an edge
/// between every pair of parents sharing a child.
pub fn moral_by_definition(g: &Dag) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for (a, b) in g.edges() {
        out.insert((a.min(b), a.max(b)));
    }
    for c in 0..g.node_count() {
        for &a in g.parents(c) {
            for &b in g.parents(c) {
                if a < b {
                    out.insert((a, b));
                }
            }
        }
    }
    out
}
