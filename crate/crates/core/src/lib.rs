//! Min-cut Bayesian network consensus.
//!
//! Fuses a set of DAGs over a shared node set into their unrestricted union
//! under a common node order, then greedily deletes the least supported
//! edges of the fused equivalence class. Support for an edge is the mean
//! size of the minimum cut separating its endpoints in the conditioned,
//! moralized ancestral subgraphs of the inputs.
//!
//! ```
//! use mcbnc_core::{run, Config, Dag, FusionInput, NodeOrder, NodeSet, Score};
//!
//! let nodes = NodeSet::new(["w", "x", "y", "z"])?;
//! let inputs = vec![
//!     Dag::from_labels(nodes.clone(), &[("w", "x"), ("x", "y"), ("y", "z")])?,
//!     Dag::from_labels(nodes.clone(), &[("w", "x"), ("w", "y"), ("x", "z")])?,
//!     Dag::from_labels(nodes.clone(), &[("w", "x"), ("y", "x"), ("x", "z")])?,
//! ];
//! let sigma = NodeOrder::from_labels(&nodes, ["w", "y", "x", "z"])?;
//! let input = FusionInput::new(inputs).with_ordering(sigma);
//! let out = run(&input, &Config::threshold(Score::new(1, 2)))?;
//! assert_eq!(out.dag.edge_count(), 4);
//! # Ok::<(), mcbnc_core::Error>(())
//! ```

pub mod consensus;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod fusion;
pub mod graph;
pub mod maxflow;
pub mod metrics;
mod scoring;
pub mod synth;
pub mod trajectory;

/// Exact criticality scores and thresholds.
pub type Score = num_rational::Ratio<u64>;

pub use consensus::{
    best_edge, criticality, graph_at_theta, parse_score, prefix_profile, prefix_states,
    remove_cut_edges, run, select_theta, BestEdge, Config, Consensus, CriticalityResult,
    PrefixMetrics, ThetaSelection, DEFAULT_K_MAX,
};
pub use equivalence::{
    apply_delete, dag_to_cpdag, na_set, pdag_to_dag, renormalize, DeleteChoice, Pdag,
};
pub use error::{Error, Result};
pub use fusion::{fuse, heuristic_ordering, minimal_imap, Fusion, FusionInput, MeanDepth, OrderingHeuristic};
pub use graph::{
    ancestral_mask, ancestral_subgraph, d_separated, moralize, topological_sort, Dag, NodeId,
    NodeOrder, NodeSet, UGraph,
};
pub use maxflow::{min_cut, CutResult};
pub use metrics::{report, smhd, treewidth_upper, MetricsReport, Structure};
pub use synth::{perturb, random_dag, GenConstraints};
pub use trajectory::{PruneStep, Trajectory};
