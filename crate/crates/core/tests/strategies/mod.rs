#![allow(dead_code)]

use mcbnc_core::{Dag, NodeId, UGraph};
use proptest::prelude::*;

use crate::common::{dag_from_bits, labels};

pub fn arb_dag(min_n: usize, max_n: usize, density: f64) -> impl Strategy<Value = Dag> {
    (min_n..=max_n)
        .prop_flat_map(move |n| {
            (
                Just((0..n).collect::<Vec<NodeId>>()).prop_shuffle(),
                prop::collection::vec(prop::bool::weighted(density), n * n.saturating_sub(1) / 2),
            )
        })
        .prop_map(|(perm, bits)| dag_from_bits(&perm, &bits))
}

pub fn arb_ugraph(min_n: usize, max_n: usize, max_edges: usize) -> impl Strategy<Value = UGraph> {
    (min_n..=max_n)
        .prop_flat_map(move |n| {
            let pairs: Vec<(NodeId, NodeId)> =
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let cap = pairs.len().min(max_edges);
            (Just(n), prop::sample::subsequence(pairs, 0..=cap))
        })
        .prop_map(|(n, edges)| UGraph::new(labels(n), edges).unwrap())
}

/// Several DAGs over the same `n` nodes.
pub fn arb_dags(n: usize, count: usize, density: f64) -> impl Strategy<Value = Vec<Dag>> {
    prop::collection::vec(arb_dag(n, n, density), count)
}
