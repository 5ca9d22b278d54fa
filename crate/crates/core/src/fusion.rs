//! Unrestricted structural fusion: align every input DAG to one node order
//! via its minimal I-map, then take the union of the aligned edge sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{d_separated, topological_sort, Dag, NodeId, NodeOrder, NodeSet};

#[derive(Clone, Debug)]
pub struct FusionInput {
    pub graphs: Vec<Dag>,
    pub ordering_override: Option<NodeOrder>,
}

impl FusionInput {
    pub fn new(graphs: Vec<Dag>) -> Self {
        FusionInput {
            graphs,
            ordering_override: None,
        }
    }

    pub fn with_ordering(mut self, order: NodeOrder) -> Self {
        self.ordering_override = Some(order);
        self
    }

    /// The shared node set, after checking every input agrees on it.
    pub fn nodes(&self) -> Result<&NodeSet> {
        shared_nodes(&self.graphs)
    }
}

pub(crate) fn shared_nodes(graphs: &[Dag]) -> Result<&NodeSet> {
    let first = graphs
        .first()
        .ok_or_else(|| Error::input("at least one input graph is required"))?;
    for g in &graphs[1..] {
        first.nodes().ensure_same(g.nodes())?;
    }
    Ok(first.nodes())
}

/// Chooses a node order for fusion.
pub trait OrderingHeuristic {
    fn order(&self, graphs: &[Dag]) -> Result<NodeOrder>;
}

/// Sorts nodes by their mean depth (longest path from a root) across the
/// inputs, ties broken by label.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeanDepth;

impl OrderingHeuristic for MeanDepth {
    fn order(&self, graphs: &[Dag]) -> Result<NodeOrder> {
        let nodes = shared_nodes(graphs)?;
        let n = nodes.len();
        // Same number of inputs for every node, so summed depth orders like the mean.
        let mut total = vec![0usize; n];
        for g in graphs {
            for (v, d) in depths(g)?.into_iter().enumerate() {
                total[v] += d;
            }
        }
        let mut seq: Vec<NodeId> = (0..n).collect();
        seq.sort_by_key(|&v| (total[v], v));
        NodeOrder::new(seq, n)
    }
}

fn depths(g: &Dag) -> Result<Vec<usize>> {
    let topo = topological_sort(g)?;
    let mut depth = vec![0usize; g.node_count()];
    for &v in topo.as_slice() {
        for &c in g.children(v) {
            depth[c] = depth[c].max(depth[v] + 1);
        }
    }
    Ok(depth)
}

pub fn heuristic_ordering(graphs: &[Dag]) -> Result<NodeOrder> {
    MeanDepth.order(graphs)
}

/// Minimal I-map of `g` consistent with `order`.
///
/// For each node the candidate parents are all of its predecessors; they are
/// scanned from last to first in `order`, dropping any that are d-separated
/// from the node given the candidates that remain.
pub fn minimal_imap(g: &Dag, order: &NodeOrder) -> Result<Dag> {
    if order.len() != g.node_count() {
        return Err(Error::InvalidOrdering(format!(
            "ordering covers {} nodes, graph has {}",
            order.len(),
            g.node_count()
        )));
    }
    let seq = order.as_slice();
    let mut edges = Vec::new();
    for (pos, &v) in seq.iter().enumerate() {
        let mut kept: Vec<NodeId> = seq[..pos].to_vec();
        for &w in seq[..pos].iter().rev() {
            let others: Vec<NodeId> = kept.iter().copied().filter(|&x| x != w).collect();
            if d_separated(g, v, w, &others)? {
                kept = others;
            }
        }
        edges.extend(kept.into_iter().map(|p| (p, v)));
    }
    Dag::new(g.nodes().clone(), edges)
}

#[derive(Clone, Debug)]
pub struct Fusion {
    pub g_plus: Dag,
    pub sigma: NodeOrder,
    pub aligned: Vec<Dag>,
}

pub fn fuse(input: &FusionInput) -> Result<Fusion> {
    fuse_with(input, &MeanDepth)
}

pub fn fuse_with(input: &FusionInput, heuristic: &dyn OrderingHeuristic) -> Result<Fusion> {
    let nodes = input.nodes()?.clone();
    let sigma = match &input.ordering_override {
        Some(o) if o.len() != nodes.len() => {
            return Err(Error::InvalidOrdering(format!(
                "ordering covers {} nodes, inputs have {}",
                o.len(),
                nodes.len()
            )))
        }
        Some(o) => o.clone(),
        None => heuristic.order(&input.graphs)?,
    };
    let aligned = input
        .graphs
        .par_iter()
        .map(|g| minimal_imap(g, &sigma))
        .collect::<Result<Vec<_>>>()?;
    let mut union: Vec<(NodeId, NodeId)> = aligned.iter().flat_map(Dag::edges).collect();
    union.sort_unstable();
    union.dedup();
    let g_plus = Dag::new(nodes, union)?;
    Ok(Fusion {
        g_plus,
        sigma,
        aligned,
    })
}
