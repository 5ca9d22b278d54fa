//! Synthetic benchmark generator: a random gold-standard DAG and randomly
//! perturbed copies of it, all under degree and size constraints.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so outputs are identical across platforms for a fixed
//! dependency lockfile.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConstraints {
    pub max_parents: usize,
    pub max_children: usize,
    pub max_edges: usize,
    pub perturbations: usize,
}

impl GenConstraints {
    /// Three parents, four children, `⌊2.5 n⌋` edges, `⌊0.75 n⌋` perturbations.
    pub fn for_nodes(n: usize) -> Self {
        GenConstraints {
            max_parents: 3,
            max_children: 4,
            max_edges: n * 5 / 2,
            perturbations: n * 3 / 4,
        }
    }

    /// Whether `g` is within the degree and size limits.
    pub fn admits(&self, g: &Dag) -> bool {
        g.edge_count() <= self.max_edges
            && (0..g.node_count()).all(|v| {
                g.parents(v).len() <= self.max_parents && g.children(v).len() <= self.max_children
            })
    }

    fn allows_edge(&self, g: &Dag, u: NodeId, v: NodeId) -> bool {
        g.edge_count() < self.max_edges
            && g.children(u).len() < self.max_children
            && g.parents(v).len() < self.max_parents
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Node set `v1..vn`.
pub fn node_names(n: usize) -> Result<NodeSet> {
    NodeSet::new((1..=n).map(|i| format!("v{i}")))
}

/// Random DAG on `v1..vn`: edges follow a random permutation (so the result
/// is acyclic) and are sampled uniformly among admissible pairs until
/// `max_edges` is reached or the attempt budget runs out.
pub fn random_dag(n: usize, c: &GenConstraints, seed: u64) -> Result<Dag> {
    if n < 2 {
        return Err(Error::input("random DAG needs at least two nodes"));
    }
    let mut c = *c;
    let cap = n * (n - 1) / 2;
    if c.max_edges > cap {
        warn!("max_edges {} exceeds {cap} possible edges; clamping", c.max_edges);
        c.max_edges = cap;
    }
    let mut rng = rng(seed);
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut g = Dag::empty(node_names(n)?);
    let budget = 20 * n * n;
    for _ in 0..budget {
        if g.edge_count() >= c.max_edges {
            break;
        }
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let (u, v) = (perm[i.min(j)], perm[i.max(j)]);
        if !g.has_edge(u, v) && c.allows_edge(&g, u, v) {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// Applies `c.perturbations` random edits. Each edit adds or deletes an edge
/// with equal probability; an add that finds no admissible acyclic pair
/// within `n²` draws deletes instead.
pub fn perturb(g: &Dag, c: &GenConstraints, seed: u64) -> Dag {
    let mut rng = rng(seed);
    let mut g = g.clone();
    let n = g.node_count();
    for _ in 0..c.perturbations {
        if rng.gen_bool(0.5) && try_add(&mut g, c, &mut rng) {
            continue;
        }
        let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
        if let Some(&(u, v)) = edges.choose(&mut rng) {
            g.remove_edge(u, v);
        }
    }
    debug_assert!(n == 0 || g.node_count() == n);
    g
}

fn try_add(g: &mut Dag, c: &GenConstraints, rng: &mut ChaCha8Rng) -> bool {
    let n = g.node_count();
    if n < 2 {
        return false;
    }
    for _ in 0..n * n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v || g.adjacent(u, v) || !c.allows_edge(g, u, v) || g.reaches(v, u) {
            continue;
        }
        g.add_edge(u, v).expect("checked acyclic");
        return true;
    }
    false
}

/// Gold DAG from `seed` and `r` perturbed copies, copy `i` (1-based) seeded
/// with `seed ^ i`.
pub fn instance(n: usize, r: usize, seed: u64, c: &GenConstraints) -> Result<(Dag, Vec<Dag>)> {
    let gold = random_dag(n, c, seed)?;
    let inputs = (1..=r as u64).map(|i| perturb(&gold, c, seed ^ i)).collect();
    Ok((gold, inputs))
}
