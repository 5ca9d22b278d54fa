//! Pruning trajectory records and their JSON / CSV encodings.
//!
//! JSON refers to nodes by label. Scores are written both as exact
//! fractions (`"1/3"`) and as floats; only the fraction is read back.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::consensus::{parse_score, score_to_f64, Pair, PrefixMetrics};
use crate::equivalence::{DeleteChoice, Pdag};
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeOrder, NodeSet};
use crate::Score;

pub const TRAJECTORY_FORMAT: &str = "mcbnc-trajectory/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneStep {
    /// 1-based step number.
    pub index: usize,
    pub choice: DeleteChoice,
    pub conditioning: Vec<NodeId>,
    pub psi_star: Score,
    pub per_graph_cuts: Vec<Vec<Pair>>,
    /// Skeleton edges of the CPDAG after this step.
    pub skeleton_edges: usize,
    pub treewidth_ub: usize,
    /// Edge counts of the (cut-reduced) inputs after this step.
    pub input_edge_counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub sigma: NodeOrder,
    pub g_plus: Dag,
    pub k_max: usize,
    /// Threshold the run stopped at; `None` for a full trajectory.
    pub theta: Option<Score>,
    pub steps: Vec<PruneStep>,
    pub final_state: Pdag,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryDoc {
    format: String,
    nodes: Vec<String>,
    sigma: Vec<String>,
    k_max: usize,
    theta: Option<String>,
    g_plus: Vec<[String; 2]>,
    steps: Vec<StepDoc>,
    final_state: PdagDoc,
}

#[derive(Serialize, Deserialize)]
struct StepDoc {
    step: usize,
    from: String,
    to: String,
    undirected: bool,
    h_set: Vec<String>,
    conditioning: Vec<String>,
    psi_star: String,
    psi_star_value: f64,
    per_graph_cuts: Vec<Vec<[String; 2]>>,
    skeleton_edges: usize,
    treewidth_ub: usize,
    input_edge_counts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PdagDoc {
    directed: Vec<[String; 2]>,
    undirected: Vec<[String; 2]>,
}

fn pair_labels(nodes: &NodeSet, (a, b): Pair) -> [String; 2] {
    [nodes.label(a).to_string(), nodes.label(b).to_string()]
}

fn pair_ids(nodes: &NodeSet, [a, b]: &[String; 2]) -> Result<Pair> {
    Ok((nodes.id(a)?, nodes.id(b)?))
}

fn ids(nodes: &NodeSet, labels: &[String]) -> Result<Vec<NodeId>> {
    nodes.ids(labels.iter().map(String::as_str))
}

impl Trajectory {
    pub fn nodes(&self) -> &NodeSet {
        self.g_plus.nodes()
    }

    fn to_doc(&self) -> TrajectoryDoc {
        let nodes = self.nodes();
        let steps = self
            .steps
            .iter()
            .map(|s| StepDoc {
                step: s.index,
                from: nodes.label(s.choice.from).to_string(),
                to: nodes.label(s.choice.to).to_string(),
                undirected: s.choice.undirected,
                h_set: nodes.labels_of(&s.choice.h_set),
                conditioning: nodes.labels_of(&s.conditioning),
                psi_star: s.psi_star.to_string(),
                psi_star_value: score_to_f64(s.psi_star),
                per_graph_cuts: s
                    .per_graph_cuts
                    .iter()
                    .map(|cut| cut.iter().map(|&p| pair_labels(nodes, p)).collect())
                    .collect(),
                skeleton_edges: s.skeleton_edges,
                treewidth_ub: s.treewidth_ub,
                input_edge_counts: s.input_edge_counts.clone(),
            })
            .collect();
        TrajectoryDoc {
            format: TRAJECTORY_FORMAT.to_string(),
            nodes: nodes.labels().to_vec(),
            sigma: self.sigma.labels(nodes),
            k_max: self.k_max,
            theta: self.theta.map(|t| t.to_string()),
            g_plus: self.g_plus.edges().map(|p| pair_labels(nodes, p)).collect(),
            steps,
            final_state: PdagDoc {
                directed: self.final_state.directed().iter().map(|&p| pair_labels(nodes, p)).collect(),
                undirected: self
                    .final_state
                    .undirected()
                    .iter()
                    .map(|&p| pair_labels(nodes, p))
                    .collect(),
            },
        }
    }

    fn from_doc(doc: TrajectoryDoc) -> Result<Self> {
        if doc.format != TRAJECTORY_FORMAT {
            return Err(Error::input(format!(
                "unsupported trajectory format `{}`",
                doc.format
            )));
        }
        let nodes = NodeSet::new(doc.nodes)?;
        let sigma = NodeOrder::from_labels(&nodes, doc.sigma.iter().map(String::as_str))?;
        let g_plus = Dag::new(
            nodes.clone(),
            doc.g_plus
                .iter()
                .map(|p| pair_ids(&nodes, p))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let steps = doc
            .steps
            .into_iter()
            .map(|s| {
                Ok(PruneStep {
                    index: s.step,
                    choice: DeleteChoice::new(
                        nodes.id(&s.from)?,
                        nodes.id(&s.to)?,
                        s.undirected,
                        ids(&nodes, &s.h_set)?,
                    ),
                    conditioning: ids(&nodes, &s.conditioning)?,
                    psi_star: parse_score(&s.psi_star)?,
                    per_graph_cuts: s
                        .per_graph_cuts
                        .iter()
                        .map(|cut| cut.iter().map(|p| pair_ids(&nodes, p)).collect())
                        .collect::<Result<Vec<_>>>()?,
                    skeleton_edges: s.skeleton_edges,
                    treewidth_ub: s.treewidth_ub,
                    input_edge_counts: s.input_edge_counts,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let final_state = Pdag::new(
            nodes.clone(),
            doc.final_state
                .directed
                .iter()
                .map(|p| pair_ids(&nodes, p))
                .collect::<Result<Vec<_>>>()?,
            doc.final_state
                .undirected
                .iter()
                .map(|p| pair_ids(&nodes, p))
                .collect::<Result<Vec<_>>>()?,
        )?;
        Ok(Trajectory {
            sigma,
            g_plus,
            k_max: doc.k_max,
            theta: doc.theta.as_deref().map(parse_score).transpose()?,
            steps,
            final_state,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_doc())?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(serde_json::from_str(text)?)
    }
}

/// Column order of the per-prefix summary CSV.
pub const SUMMARY_COLUMNS: [&str; 6] = [
    "step",
    "psi_star",
    "edges",
    "treewidth_ub",
    "mean_smhd_to_inputs",
    "smhd_to_gold",
];

/// Writes one row per prefix. `psi_star` is empty for step 0 and
/// `smhd_to_gold` is omitted entirely when no row carries it.
pub fn write_summary_csv<W: Write>(rows: &[PrefixMetrics], out: W) -> Result<()> {
    let with_gold = rows.iter().any(|r| r.smhd_to_gold.is_some());
    let cols = if with_gold { &SUMMARY_COLUMNS[..] } else { &SUMMARY_COLUMNS[..5] };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(cols)?;
    for r in rows {
        let mut rec = vec![
            r.step.to_string(),
            r.psi_star.map(|p| score_to_f64(p).to_string()).unwrap_or_default(),
            r.edges.to_string(),
            r.treewidth_ub.to_string(),
            score_to_f64(r.mean_smhd_to_inputs).to_string(),
        ];
        if with_gold {
            rec.push(r.smhd_to_gold.map(|g| g.to_string()).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
