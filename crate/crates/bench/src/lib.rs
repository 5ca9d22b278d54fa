//! Fixed benchmark inputs.

use mcbnc_core::synth::instance;
use mcbnc_core::{Dag, GenConstraints, UGraph};

/// Gold graph and `r` perturbed copies over `n` nodes.
pub fn synthetic(n: usize, r: usize, seed: u64) -> (Dag, Vec<Dag>) {
    instance(n, r, seed, &GenConstraints::for_nodes(n)).expect("valid instance size")
}

/// Moral graph of a synthetic gold graph.
pub fn moral(n: usize, seed: u64) -> UGraph {
    mcbnc_core::moralize(&synthetic(n, 1, seed).0)
}
