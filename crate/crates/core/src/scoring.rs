//! Cut-size evaluation for the consensus search.
//!
//! Only cut sizes are needed to rank candidates, and the size of a minimum
//! cut does not depend on which augmenting paths are taken, so this module
//! uses a dense residual matrix and stops as soon as the flow passes a
//! caller-supplied limit. Sizes are cached per input graph and dropped when
//! that graph loses an edge.

use std::collections::HashMap;

use crate::graph::{Dag, NodeId};

/// Unordered endpoints and sorted conditioning set.
pub(crate) type EvalKey = (NodeId, NodeId, Vec<NodeId>);

#[derive(Clone, Copy, Debug)]
enum Bound {
    Exact(u32),
    AtLeast(u32),
}

impl Bound {
    fn floor(self) -> u32 {
        match self {
            Bound::Exact(v) | Bound::AtLeast(v) => v,
        }
    }
}

#[derive(Default)]
struct Scratch {
    n: usize,
    mask: Vec<bool>,
    removed: Vec<bool>,
    cap: Vec<bool>,
    flow: Vec<i8>,
    via: Vec<usize>,
    queue: Vec<NodeId>,
    stack: Vec<NodeId>,
}

impl Scratch {
    fn reset(&mut self, n: usize) {
        if self.n != n {
            *self = Scratch {
                n,
                mask: vec![false; n],
                removed: vec![false; n],
                cap: vec![false; n * n],
                flow: vec![0; n * n],
                via: vec![usize::MAX; n],
                queue: Vec::with_capacity(n),
                stack: Vec::with_capacity(n),
            };
        } else {
            self.mask.fill(false);
            self.removed.fill(false);
            self.cap.fill(false);
            self.flow.fill(0);
        }
    }

    fn link(&mut self, a: NodeId, b: NodeId) {
        let n = self.n;
        self.cap[a * n + b] = true;
        self.cap[b * n + a] = true;
    }

    /// Size of the minimum `u`-`v` cut in the conditioned moral graph, or
    /// `limit + 1` if it is larger than `limit`.
    fn cut_size(&mut self, g: &Dag, u: NodeId, v: NodeId, cond: &[NodeId], limit: u32) -> u32 {
        let n = g.node_count();
        self.reset(n);
        for &s in [u, v].iter().chain(cond) {
            if !self.mask[s] {
                self.mask[s] = true;
                self.stack.push(s);
            }
        }
        while let Some(x) = self.stack.pop() {
            for &p in g.parents(x) {
                if !self.mask[p] {
                    self.mask[p] = true;
                    self.stack.push(p);
                }
            }
        }
        for &c in cond {
            self.removed[c] = true;
        }
        for c in 0..n {
            if !self.mask[c] {
                continue;
            }
            // Ancestral sets are closed under parents, so every parent is inside.
            let ps = g.parents(c);
            for (i, &a) in ps.iter().enumerate() {
                if !self.removed[a] {
                    if !self.removed[c] {
                        self.link(a, c);
                    }
                    for &b in &ps[i + 1..] {
                        if !self.removed[b] {
                            self.link(a, b);
                        }
                    }
                }
            }
        }
        let mut value = 0;
        while value <= limit && self.augment(u, v) {
            value += 1;
        }
        value
    }

    fn residual(&self, a: NodeId, b: NodeId) -> bool {
        let i = a * self.n + b;
        (self.cap[i] as i8) - self.flow[i] > 0
    }

    fn augment(&mut self, s: NodeId, t: NodeId) -> bool {
        let n = self.n;
        self.via.fill(usize::MAX);
        self.via[s] = s;
        self.queue.clear();
        self.queue.push(s);
        let mut head = 0;
        while head < self.queue.len() {
            let a = self.queue[head];
            head += 1;
            for b in 0..n {
                if self.via[b] == usize::MAX && self.residual(a, b) {
                    self.via[b] = a;
                    if b == t {
                        let mut x = t;
                        while x != s {
                            let p = self.via[x];
                            self.flow[p * n + x] += 1;
                            self.flow[x * n + p] -= 1;
                            x = p;
                        }
                        return true;
                    }
                    self.queue.push(b);
                }
            }
        }
        false
    }
}

/// Input graphs being pruned, with cached cut sizes.
pub(crate) struct Scorer {
    graphs: Vec<Dag>,
    cache: Vec<HashMap<EvalKey, Bound>>,
    scratch: Scratch,
}

impl Scorer {
    pub(crate) fn new(graphs: Vec<Dag>) -> Self {
        let cache = vec![HashMap::new(); graphs.len()];
        Scorer {
            graphs,
            cache,
            scratch: Scratch::default(),
        }
    }

    pub(crate) fn graphs(&self) -> &[Dag] {
        &self.graphs
    }

    /// Sum of known lower bounds over the inputs.
    pub(crate) fn floor(&self, key: &EvalKey) -> u32 {
        self.cache.iter().map(|c| c.get(key).map_or(0, |b| b.floor())).sum()
    }

    /// Total cut size over the inputs if it is at most `bound`.
    pub(crate) fn total_within(&mut self, key: &EvalKey, bound: u32) -> Option<u32> {
        let mut total = 0u32;
        // Cached graphs first: they cost nothing and tighten the budget.
        let mut order: Vec<usize> = (0..self.graphs.len()).collect();
        order.sort_by_key(|&i| !self.cache[i].contains_key(key));
        for i in order {
            let budget = bound - total;
            let size = match self.cache[i].get(key) {
                Some(Bound::Exact(v)) => *v,
                Some(Bound::AtLeast(v)) if *v > budget => return None,
                _ => {
                    let (a, b, cond) = key;
                    let size = self.scratch.cut_size(&self.graphs[i], *a, *b, cond, budget);
                    let entry = if size > budget {
                        Bound::AtLeast(size)
                    } else {
                        Bound::Exact(size)
                    };
                    self.cache[i].insert(key.clone(), entry);
                    size
                }
            };
            if size > budget {
                return None;
            }
            total += size;
        }
        Some(total)
    }

    /// Removes each cut pair from its graph, in whichever direction it is
    /// present, and forgets cached sizes of graphs that changed.
    pub(crate) fn remove_cuts(&mut self, per_graph_cuts: &[Vec<(NodeId, NodeId)>]) {
        for (i, cuts) in per_graph_cuts.iter().enumerate() {
            let mut changed = false;
            for &(a, b) in cuts {
                changed |= self.graphs[i].remove_edge(a, b);
                changed |= self.graphs[i].remove_edge(b, a);
            }
            if changed {
                self.cache[i].clear();
            }
        }
    }
}
