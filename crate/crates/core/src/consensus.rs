//! Min-cut consensus: score each deletable edge of the fused CPDAG by how
//! strongly the inputs connect its endpoints, then greedily delete the
//! weakest edge until the weakest score exceeds the threshold.

use std::collections::BTreeMap;

use log::{debug, warn};
use rayon::prelude::*;

use crate::equivalence::{apply_delete, dag_to_cpdag, pdag_to_dag, renormalize, DeleteChoice, Mixed, Pdag};
use crate::error::{Error, Result};
use crate::fusion::{fuse, shared_nodes, FusionInput};
use crate::graph::{conditioned_moral_graph, moralize, Dag, NodeId, UGraph};
use crate::maxflow::min_cut;
use crate::scoring::{EvalKey, Scorer};
use crate::metrics::{mean_moral_distance, min_fill_width, moral_distance, Structure};
use crate::trajectory::{PruneStep, Trajectory};
use crate::Score;

pub const DEFAULT_K_MAX: usize = 10;

/// Unordered node pair `(a, b)` with `a < b`.
pub type Pair = (NodeId, NodeId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalityResult {
    /// Mean cut size over the input graphs.
    pub psi: Score,
    /// Minimum cut found in each input's conditioned moral graph.
    pub per_graph_cuts: Vec<Vec<Pair>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Stop once the best score exceeds this; `None` prunes to the empty graph.
    pub theta: Option<Score>,
    pub k_max: usize,
}

impl Config {
    pub fn threshold(theta: Score) -> Self {
        Config {
            theta: Some(theta),
            k_max: DEFAULT_K_MAX,
        }
    }

    pub fn trajectory() -> Self {
        Config {
            theta: None,
            k_max: DEFAULT_K_MAX,
        }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.theta {
            if t > Score::from_integer(1) {
                return Err(Error::input(format!("theta must lie in [0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

/// Parses a threshold exactly, either as a fraction `a/b` or a decimal such
/// as `0.5` or `.25`.
pub fn parse_score(text: &str) -> Result<Score> {
    let t = text.trim();
    let bad = || Error::input(format!("`{text}` is not a non-negative number or fraction"));
    if let Some((n, d)) = t.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Score::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int
        .checked_mul(den)
        .and_then(|x| x.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Score::new(num, den))
}

pub fn score_to_f64(s: Score) -> f64 {
    *s.numer() as f64 / *s.denom() as f64
}

fn cut_between(g: &Dag, u: NodeId, v: NodeId, cond: &[NodeId]) -> Result<Vec<Pair>> {
    let m = conditioned_moral_graph(g, &[u, v], cond);
    Ok(min_cut(&m, u, v)?.cut_edges)
}

/// Mean min-cut size separating `u` and `v` across the inputs, each taken
/// in the moral graph of the ancestral closure of `{u, v} ∪ cond` with the
/// `cond` nodes removed.
pub fn criticality(u: NodeId, v: NodeId, graphs: &[Dag], cond: &[NodeId]) -> Result<CriticalityResult> {
    let nodes = shared_nodes(graphs)?;
    nodes.check(u)?;
    nodes.check(v)?;
    for &c in cond {
        nodes.check(c)?;
    }
    if u == v {
        return Err(Error::input("criticality needs two distinct endpoints"));
    }
    if cond.contains(&u) || cond.contains(&v) {
        return Err(Error::input("conditioning set may not contain the edge endpoints"));
    }
    criticality_unchecked(u, v, graphs, cond)
}

fn criticality_unchecked(u: NodeId, v: NodeId, graphs: &[Dag], cond: &[NodeId]) -> Result<CriticalityResult> {
    let per_graph_cuts = graphs
        .iter()
        .map(|g| cut_between(g, u, v, cond))
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = per_graph_cuts.iter().map(|c| c.len() as u64).sum();
    Ok(CriticalityResult {
        psi: Score::new(total, graphs.len() as u64),
        per_graph_cuts,
    })
}

/// The winning deletion of one [`best_edge`] round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestEdge {
    pub choice: DeleteChoice,
    /// Conditioning set passed to the criticality score: the candidates not
    /// in `H`, plus the directed parents of the head other than the tail.
    pub conditioning: Vec<NodeId>,
    pub psi: Score,
    pub per_graph_cuts: Vec<Vec<Pair>>,
}

struct Candidate {
    choice: DeleteChoice,
    conditioning: Vec<NodeId>,
}

impl Candidate {
    /// Canonical position among equal scores: edge, then `H` (by size, then
    /// lexicographically), then listed orientation before reversed.
    fn tie_key(&self) -> (NodeId, NodeId, usize, &[NodeId], bool) {
        let c = &self.choice;
        (
            c.from.min(c.to),
            c.from.max(c.to),
            c.h_set.len(),
            &c.h_set,
            c.is_reversed(),
        )
    }

    fn eval_key(&self) -> EvalKey {
        let c = &self.choice;
        (c.from.min(c.to), c.from.max(c.to), self.conditioning.clone())
    }
}

/// All cliques `C` of `pool` (in the skeleton of `m`) with at least `min_len`
/// members, each in increasing id order.
fn cliques_at_least(m: &Mixed, pool: &[NodeId], min_len: usize) -> Vec<Vec<NodeId>> {
    fn grow(
        m: &Mixed,
        pool: &[NodeId],
        start: usize,
        current: &mut Vec<NodeId>,
        min_len: usize,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if current.len() >= min_len {
            out.push(current.clone());
        }
        for i in start..pool.len() {
            if current.len() + (pool.len() - i) < min_len {
                break;
            }
            let w = pool[i];
            if current.iter().all(|&c| m.adjacent(c, w)) {
                current.push(w);
                grow(m, pool, i + 1, current, min_len, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(m, pool, 0, &mut Vec::new(), min_len, &mut out);
    out
}

fn candidates(m: &Mixed, k_max: usize) -> Vec<Candidate> {
    let n = m.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let orientations: &[(NodeId, NodeId, bool)] = if m.is_directed(a, b) {
                &[(a, b, false)]
            } else if m.is_directed(b, a) {
                &[(b, a, false)]
            } else if m.is_undirected(a, b) {
                &[(a, b, true), (b, a, true)]
            } else {
                continue;
            };
            for &(u, v, undirected) in orientations {
                let pool = m.na_set(v, u);
                let parents: Vec<NodeId> = m.parents(v).into_iter().filter(|&p| p != u).collect();
                // Valid H leave a clique behind; enumerate those cliques directly.
                let min_rest = pool.len().saturating_sub(k_max);
                let mut group: Vec<Candidate> = cliques_at_least(m, &pool, min_rest)
                    .into_iter()
                    .map(|rest| {
                        let h: Vec<NodeId> = pool.iter().copied().filter(|w| !rest.contains(w)).collect();
                        let mut cond = rest;
                        cond.extend_from_slice(&parents);
                        cond.sort_unstable();
                        cond.dedup();
                        Candidate {
                            choice: DeleteChoice::new(u, v, undirected, h),
                            conditioning: cond,
                        }
                    })
                    .collect();
                group.sort_by(|x, y| x.tie_key().cmp(&y.tie_key()));
                out.extend(group);
            }
        }
    }
    out
}

/// Picks the lowest-scoring deletion whose result still extends to a DAG,
/// returning it with the renormalized CPDAG it leads to.
///
/// Keys are visited in order of their cached lower bounds and abandoned as
/// soon as their running total exceeds the best total seen, so only the
/// winning score is computed exactly.
fn select(cpdag: &Pdag, scorer: &mut Scorer, k_max: usize) -> Result<(BestEdge, Pdag)> {
    if cpdag.is_empty_skeleton() {
        return Err(Error::EmptySkeleton);
    }
    let m = Mixed::from_pdag(cpdag);
    let cands = candidates(&m, k_max);
    // Scores depend on the unordered endpoints and the conditioning set only.
    let mut groups: BTreeMap<EvalKey, Vec<usize>> = BTreeMap::new();
    for (i, c) in cands.iter().enumerate() {
        groups.entry(c.eval_key()).or_default().push(i);
    }
    let mut excluded = vec![false; cands.len()];
    let mut skipped = 0usize;
    loop {
        let mut order: Vec<(u32, &EvalKey)> = groups
            .iter()
            .filter(|(_, members)| members.iter().any(|&i| !excluded[i]))
            .map(|(k, _)| (scorer.floor(k), k))
            .collect();
        if order.is_empty() {
            return Err(Error::NoConsistentExtension);
        }
        order.sort();
        let mut best_total = u32::MAX;
        let mut tied: Vec<&EvalKey> = Vec::new();
        for (floor, key) in order {
            if floor > best_total {
                break;
            }
            match scorer.total_within(key, best_total) {
                Some(t) if t < best_total => {
                    best_total = t;
                    tied = vec![key];
                }
                Some(t) if t == best_total => tied.push(key),
                _ => {}
            }
        }
        let winner = tied
            .iter()
            .flat_map(|k| groups[*k].iter().copied())
            .filter(|&i| !excluded[i])
            .min_by(|&x, &y| cands[x].tie_key().cmp(&cands[y].tie_key()))
            .expect("tied keys have live candidates");
        let cand = &cands[winner];
        match apply_delete(cpdag, &cand.choice).and_then(|p| renormalize(&p)) {
            Ok(next) => {
                if skipped > 0 {
                    warn!("skipped {skipped} deletion candidates without a consistent extension");
                }
                let c = &cand.choice;
                let res = criticality_unchecked(c.from, c.to, scorer.graphs(), &cand.conditioning)?;
                debug_assert_eq!(res.psi, Score::new(best_total as u64, scorer.graphs().len() as u64));
                let best = BestEdge {
                    choice: cand.choice.clone(),
                    conditioning: cand.conditioning.clone(),
                    psi: res.psi,
                    per_graph_cuts: res.per_graph_cuts,
                };
                return Ok((best, next));
            }
            Err(Error::NoConsistentExtension) => {
                excluded[winner] = true;
                skipped += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Lowest-criticality deletion available in `cpdag`.
///
/// Directed edges are evaluated as listed and undirected edges in both
/// orientations, each with every valid `H` of at most `k_max` nodes.
pub fn best_edge(cpdag: &Pdag, graphs: &[Dag], k_max: usize) -> Result<BestEdge> {
    shared_nodes(graphs)?.ensure_same(cpdag.nodes())?;
    select(cpdag, &mut Scorer::new(graphs.to_vec()), k_max).map(|(b, _)| b)
}

/// Removes each cut pair from its graph, in whichever direction it is
/// present. Pairs that are only moral marriages have no edge and are skipped.
pub fn remove_cut_edges(graphs: &[Dag], per_graph_cuts: &[Vec<Pair>]) -> Result<Vec<Dag>> {
    let mut out = graphs.to_vec();
    remove_cut_edges_in_place(&mut out, per_graph_cuts)?;
    Ok(out)
}

fn remove_cut_edges_in_place(graphs: &mut [Dag], per_graph_cuts: &[Vec<Pair>]) -> Result<()> {
    if graphs.len() != per_graph_cuts.len() {
        return Err(Error::input(format!(
            "{} graphs but {} cut sets",
            graphs.len(),
            per_graph_cuts.len()
        )));
    }
    for (g, cuts) in graphs.iter_mut().zip(per_graph_cuts) {
        for &(a, b) in cuts {
            g.remove_edge(a, b);
            g.remove_edge(b, a);
        }
    }
    Ok(())
}

/// Output of a consensus run.
#[derive(Clone, Debug)]
pub struct Consensus {
    pub dag: Dag,
    pub cpdag: Pdag,
    pub trajectory: Trajectory,
}

pub fn run(input: &FusionInput, cfg: &Config) -> Result<Consensus> {
    cfg.validate()?;
    let fusion = fuse(input)?;
    let mut cpdag = dag_to_cpdag(&fusion.g_plus);
    let mut scorer = Scorer::new(input.graphs.clone());
    let mut steps = Vec::new();
    while !cpdag.is_empty_skeleton() {
        let (best, next) = select(&cpdag, &mut scorer, cfg.k_max)?;
        if cfg.theta.is_some_and(|theta| best.psi > theta) {
            break;
        }
        scorer.remove_cuts(&best.per_graph_cuts);
        cpdag = next;
        debug!(
            "step {}: removed {}-{} psi={} ({} edges left)",
            steps.len() + 1,
            cpdag.nodes().label(best.choice.from),
            cpdag.nodes().label(best.choice.to),
            best.psi,
            cpdag.skeleton_edge_count()
        );
        steps.push(PruneStep {
            index: steps.len() + 1,
            choice: best.choice,
            conditioning: best.conditioning,
            psi_star: best.psi,
            per_graph_cuts: best.per_graph_cuts,
            skeleton_edges: cpdag.skeleton_edge_count(),
            treewidth_ub: min_fill_width(&cpdag.moral_graph()?),
            input_edge_counts: scorer.graphs().iter().map(Dag::edge_count).collect(),
        });
    }
    let dag = pdag_to_dag(&cpdag)?;
    Ok(Consensus {
        dag,
        trajectory: Trajectory {
            sigma: fusion.sigma,
            g_plus: fusion.g_plus,
            k_max: cfg.k_max,
            theta: cfg.theta,
            steps,
            final_state: cpdag.clone(),
        },
        cpdag,
    })
}

/// Replays the recorded deletions from the CPDAG of the fused graph,
/// stopping before the first step whose score exceeds `theta`.
pub fn graph_at_theta(traj: &Trajectory, theta: Score) -> Result<Pdag> {
    let mut cpdag = dag_to_cpdag(&traj.g_plus);
    for step in &traj.steps {
        if step.psi_star > theta {
            break;
        }
        cpdag = renormalize(&apply_delete(&cpdag, &step.choice)?)?;
    }
    Ok(cpdag)
}

/// CPDAG after each prefix of the trajectory; entry `t` follows `t` steps.
pub fn prefix_states(traj: &Trajectory) -> Result<Vec<Pdag>> {
    let mut states = Vec::with_capacity(traj.steps.len() + 1);
    let mut cpdag = dag_to_cpdag(&traj.g_plus);
    for step in &traj.steps {
        let next = renormalize(&apply_delete(&cpdag, &step.choice)?)?;
        states.push(std::mem::replace(&mut cpdag, next));
    }
    states.push(cpdag);
    Ok(states)
}

/// Metrics of one trajectory prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixMetrics {
    /// Number of steps applied.
    pub step: usize,
    /// Score of the last applied step; `None` for the empty prefix.
    pub psi_star: Option<Score>,
    pub edges: usize,
    pub treewidth_ub: usize,
    pub mean_smhd_to_inputs: Score,
    pub smhd_to_gold: Option<usize>,
}

pub fn prefix_profile(traj: &Trajectory, inputs: &[Dag], gold: Option<&Dag>) -> Result<Vec<PrefixMetrics>> {
    let nodes = shared_nodes(inputs)?;
    nodes.ensure_same(traj.g_plus.nodes())?;
    let input_morals: Vec<UGraph> = inputs.iter().map(moralize).collect();
    let gold_moral = gold.map(moralize);
    prefix_states(traj)?
        .par_iter()
        .enumerate()
        .map(|(t, state)| {
            let moral = state.moral_graph()?;
            Ok(PrefixMetrics {
                step: t,
                psi_star: t.checked_sub(1).map(|i| traj.steps[i].psi_star),
                edges: state.skeleton_edge_count(),
                treewidth_ub: min_fill_width(&moral),
                mean_smhd_to_inputs: mean_moral_distance(&moral, &input_morals)?,
                smhd_to_gold: gold_moral.as_ref().map(|g| moral_distance(&moral, g)).transpose()?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSelection {
    pub theta: Score,
    /// Number of steps in the winning prefix.
    pub prefix: usize,
    pub graph: Pdag,
    pub mean_smhd: Score,
}

/// Picks the prefix with the smallest mean moral distance to the original
/// inputs; ties go to the longer prefix.
pub fn select_theta(traj: &Trajectory, inputs: &[Dag]) -> Result<ThetaSelection> {
    let profile = prefix_profile(traj, inputs, None)?;
    let best = profile
        .iter()
        .min_by(|a, b| {
            a.mean_smhd_to_inputs
                .cmp(&b.mean_smhd_to_inputs)
                .then(b.step.cmp(&a.step))
        })
        .expect("profile has the empty prefix");
    Ok(ThetaSelection {
        theta: best.psi_star.unwrap_or_else(|| Score::from_integer(0)),
        prefix: best.step,
        graph: prefix_states(traj)?.swap_remove(best.step),
        mean_smhd: best.mean_smhd_to_inputs,
    })
}
