//! Structural metrics: moral Hamming distance, treewidth upper bound and
//! edge counts.

use crate::equivalence::{pdag_to_dag, Pdag};
use crate::error::Result;
use crate::graph::{moralize, Dag, NodeId, UGraph};
use crate::Score;

/// Anything with a well-defined moral graph.
pub trait Structure {
    fn moral_graph(&self) -> Result<UGraph>;
    fn skeleton_edge_count(&self) -> usize;
}

impl Structure for Dag {
    fn moral_graph(&self) -> Result<UGraph> {
        Ok(moralize(self))
    }

    fn skeleton_edge_count(&self) -> usize {
        self.edge_count()
    }
}

/// Uses any consistent extension; the moral graph is the same for every
/// member of an equivalence class.
impl Structure for Pdag {
    fn moral_graph(&self) -> Result<UGraph> {
        Ok(moralize(&pdag_to_dag(self)?))
    }

    fn skeleton_edge_count(&self) -> usize {
        Pdag::skeleton_edge_count(self)
    }
}

/// An undirected graph is treated as already moral.
impl Structure for UGraph {
    fn moral_graph(&self) -> Result<UGraph> {
        Ok(self.clone())
    }

    fn skeleton_edge_count(&self) -> usize {
        self.edge_count()
    }
}

/// Size of the symmetric difference between two edge sets.
pub fn moral_distance(a: &UGraph, b: &UGraph) -> Result<usize> {
    a.nodes().ensure_same(b.nodes())?;
    let mut diff = 0;
    for v in 0..a.node_count() {
        let (na, nb) = (a.neighbors(v), b.neighbors(v));
        let (mut i, mut j) = (0, 0);
        // Only count pairs (v, w) with v < w.
        while i < na.len() || j < nb.len() {
            let x = na.get(i).copied().unwrap_or(usize::MAX);
            let y = nb.get(j).copied().unwrap_or(usize::MAX);
            let w = x.min(y);
            if x == y {
                i += 1;
                j += 1;
            } else {
                if w > v {
                    diff += 1;
                }
                if x < y {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
    }
    Ok(diff)
}

/// Structural moral Hamming distance.
pub fn smhd(a: &impl Structure, b: &impl Structure) -> Result<usize> {
    moral_distance(&a.moral_graph()?, &b.moral_graph()?)
}

/// Treewidth upper bound from min-fill elimination on the moral graph.
pub fn treewidth_upper(g: &impl Structure) -> Result<usize> {
    Ok(min_fill_width(&g.moral_graph()?))
}

/// Width of the min-fill elimination order of `g`: repeatedly eliminate the
/// node adding the fewest fill edges (ties: smaller degree, then smaller id)
/// and report the largest neighbourhood seen.
pub fn min_fill_width(g: &UGraph) -> usize {
    let n = g.node_count();
    let mut adj = vec![false; n * n];
    let mut nbrs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (a, b) in g.edges() {
        adj[a * n + b] = true;
        adj[b * n + a] = true;
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let mut alive = vec![true; n];
    let mut width = 0;
    for _ in 0..n {
        let mut best: Option<(usize, usize, NodeId)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let ns = &nbrs[v];
            let mut fill = 0;
            for (i, &a) in ns.iter().enumerate() {
                for &b in &ns[i + 1..] {
                    if !adj[a * n + b] {
                        fill += 1;
                    }
                }
            }
            let key = (fill, ns.len(), v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let (_, deg, v) = best.expect("a live node remains");
        width = width.max(deg);
        let ns = std::mem::take(&mut nbrs[v]);
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if !adj[a * n + b] {
                    adj[a * n + b] = true;
                    adj[b * n + a] = true;
                    nbrs[a].push(b);
                    nbrs[b].push(a);
                }
            }
        }
        for &a in &ns {
            nbrs[a].retain(|&x| x != v);
            adj[a * n + v] = false;
            adj[v * n + a] = false;
        }
        alive[v] = false;
    }
    width
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricsReport {
    pub smhd_to_gold: Option<usize>,
    pub mean_smhd_to_inputs: Score,
    pub edge_count: usize,
    pub treewidth_ub: usize,
}

/// Mean moral distance from `moral` to each of `input_morals`.
pub fn mean_moral_distance(moral: &UGraph, input_morals: &[UGraph]) -> Result<Score> {
    let mut total = 0u64;
    for m in input_morals {
        total += moral_distance(moral, m)? as u64;
    }
    Ok(Score::new(total, input_morals.len().max(1) as u64))
}

pub fn report(g: &impl Structure, inputs: &[Dag], gold: Option<&Dag>) -> Result<MetricsReport> {
    let moral = g.moral_graph()?;
    let input_morals: Vec<UGraph> = inputs.iter().map(moralize).collect();
    Ok(MetricsReport {
        smhd_to_gold: gold
            .map(|gs| moral_distance(&moral, &moralize(gs)))
            .transpose()?,
        mean_smhd_to_inputs: mean_moral_distance(&moral, &input_morals)?,
        edge_count: g.skeleton_edge_count(),
        treewidth_ub: min_fill_width(&moral),
    })
}
