//! Unit-capacity max-flow / min-cut on undirected graphs.
//!
//! Each undirected edge becomes a pair of opposing arcs of capacity one that
//! serve as each other's residual reverse. Augmenting paths are found
//! breadth-first with neighbours visited in id order, so both the flow and
//! the returned cut are deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{NodeId, UGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    /// Max-flow value, equal to the number of cut edges.
    pub value: usize,
    /// Canonical `(a, b)` pairs, `a < b`, sorted.
    pub cut_edges: Vec<(NodeId, NodeId)>,
    /// Nodes reachable from the source in the final residual graph, sorted.
    pub source_side: Vec<NodeId>,
}

struct Network {
    offset: Vec<usize>,
    head: Vec<NodeId>,
    rev: Vec<usize>,
    residual: Vec<u32>,
}

impl Network {
    fn new(g: &UGraph) -> Self {
        let n = g.node_count();
        let mut offset = Vec::with_capacity(n + 1);
        let mut head = Vec::new();
        offset.push(0);
        for a in 0..n {
            head.extend_from_slice(g.neighbors(a));
            offset.push(head.len());
        }
        // Reverse of arc a->b is the arc b->a, located by binary search in b's
        // (sorted) neighbour slice.
        let mut rev = vec![0; head.len()];
        for a in 0..n {
            for i in offset[a]..offset[a + 1] {
                let b = head[i];
                let j = g.neighbors(b).binary_search(&a).expect("symmetric adjacency");
                rev[i] = offset[b] + j;
            }
        }
        let residual = vec![1; head.len()];
        Network {
            offset,
            head,
            rev,
            residual,
        }
    }

    fn arcs(&self, a: NodeId) -> std::ops::Range<usize> {
        self.offset[a]..self.offset[a + 1]
    }

    /// Breadth-first search over arcs with spare capacity. Returns the arc
    /// used to enter each reached node.
    fn bfs(&self, s: NodeId, t: Option<NodeId>) -> Vec<Option<usize>> {
        let n = self.offset.len() - 1;
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for arc in self.arcs(a) {
                let b = self.head[arc];
                if !seen[b] && self.residual[arc] > 0 {
                    seen[b] = true;
                    via[b] = Some(arc);
                    if Some(b) == t {
                        return via;
                    }
                    queue.push_back(b);
                }
            }
        }
        via
    }

    fn reachable(&self, s: NodeId) -> Vec<bool> {
        let via = self.bfs(s, None);
        let mut side: Vec<bool> = via.iter().map(Option::is_some).collect();
        side[s] = true;
        side
    }
}

pub fn min_cut(g: &UGraph, s: NodeId, t: NodeId) -> Result<CutResult> {
    g.nodes().check(s)?;
    g.nodes().check(t)?;
    if s == t {
        return Err(Error::input("min-cut source and sink must differ"));
    }
    let mut net = Network::new(g);
    let mut value = 0usize;
    loop {
        let via = net.bfs(s, Some(t));
        if via[t].is_none() {
            break;
        }
        let mut path = Vec::new();
        let mut x = t;
        while x != s {
            let arc = via[x].expect("path back to source");
            path.push(arc);
            x = net.head[net.rev[arc]];
        }
        let bottleneck = path.iter().map(|&a| net.residual[a]).min().unwrap_or(0);
        for &arc in &path {
            net.residual[arc] -= bottleneck;
            net.residual[net.rev[arc]] += bottleneck;
        }
        value += bottleneck as usize;
    }
    let side = net.reachable(s);
    let cut_edges: Vec<(NodeId, NodeId)> = g.edges().filter(|&(a, b)| side[a] != side[b]).collect();
    debug_assert_eq!(cut_edges.len(), value);
    Ok(CutResult {
        value,
        cut_edges,
        source_side: (0..g.node_count()).filter(|&v| side[v]).collect(),
    })
}
