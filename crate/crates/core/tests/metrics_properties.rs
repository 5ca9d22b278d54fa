mod common;
mod strategies;

use common::{exact_treewidth, seeded_dag};
use mcbnc_core::metrics::min_fill_width;
use mcbnc_core::{dag_to_cpdag, moralize, smhd, treewidth_upper, Dag};
use proptest::prelude::*;
use strategies::{arb_dag, arb_ugraph};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smhd_is_a_pseudometric(
        (a, b, c) in (1usize..=8).prop_flat_map(|n| (arb_dag(n, n, 0.3), arb_dag(n, n, 0.3), arb_dag(n, n, 0.3)))
    ) {
        prop_assert_eq!(smhd(&a, &a).unwrap(), 0);
        prop_assert_eq!(smhd(&a, &b).unwrap(), smhd(&b, &a).unwrap());
        prop_assert!(smhd(&a, &c).unwrap() <= smhd(&a, &b).unwrap() + smhd(&b, &c).unwrap());
        // Equivalent graphs share a moral graph.
        prop_assert_eq!(smhd(&a, &dag_to_cpdag(&a)).unwrap(), 0);
    }

    #[test]
    fn min_fill_bounds_exact_width(g in arb_ugraph(1, 7, 21)) {
        prop_assert!(min_fill_width(&g) >= exact_treewidth(&g));
    }
}

/// Moral graphs of seeded random DAGs on at most seven nodes.
fn small_moral_graphs() -> Vec<Dag> {
    (0..100u64).map(|seed| seeded_dag(2 + (seed % 6) as usize, 0.45, seed)).collect()
}

#[test]
fn min_fill_is_exact_on_small_moral_graphs() {
    for g in small_moral_graphs() {
        let m = moralize(&g);
        assert_eq!(treewidth_upper(&g).unwrap(), exact_treewidth(&m), "{g:?}");
    }
}

/// Min-fill is a heuristic: on this 7-node graph it eliminates into width 5
/// while an optimal order reaches 4.
#[test]
fn min_fill_can_exceed_exact_width() {
    let edges = [
        (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2), (1, 5), (1, 6),
        (2, 3), (2, 4), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6),
    ];
    let g = mcbnc_core::UGraph::new(common::labels(7), edges).unwrap();
    assert_eq!(exact_treewidth(&g), 4);
    assert_eq!(min_fill_width(&g), 5);
}
