//! Cycle detection, deterministic topological ordering and the linear-time
//! exact equilibrium pass for acyclic graphs.
//!
//! On an acyclic graph every model's continuous trajectory converges, and
//! the equilibrium equals the discrete scheme evaluated once per argument in
//! topological order: each argument only depends on parents whose final
//! strength is already known. Total work is proportional to the number of
//! arguments plus edges.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::bag::{ArgId, Bag};
use crate::semantics::{Model, StateVector};

/// A permutation of argument ids in which every edge source precedes its
/// target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologicalOrder {
    order: Vec<ArgId>,
}

impl TopologicalOrder {
    pub fn ids(&self) -> &[ArgId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Exhaustively checks the edge-precedence invariant against a graph.
    pub fn is_valid_for(&self, bag: &Bag) -> bool {
        if self.order.len() != bag.len() {
            return false;
        }
        let mut position = vec![usize::MAX; bag.len()];
        for (pos, &id) in self.order.iter().enumerate() {
            if id >= bag.len() || position[id] != usize::MAX {
                return false;
            }
            position[id] = pos;
        }
        bag.attacks()
            .iter()
            .chain(bag.supports())
            .all(|&(src, tgt)| position[src] < position[tgt])
    }
}

/// Verdict of the cycle analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    Acyclic(TopologicalOrder),
    /// The graph has a cycle; `witness` lists the ids of the arguments on
    /// one cycle (a single id for a self-loop), sorted ascending.
    Cyclic {
        witness: Vec<ArgId>,
    },
}

/// Raised when the exact pass is asked to handle a cyclic graph.
#[derive(Debug, Error)]
#[error("graph is cyclic (witness: {}); use the ODE solver instead", witness.join(", "))]
pub struct CyclicError {
    /// Names of the arguments on one witness cycle.
    pub witness: Vec<String>,
}

impl CyclicError {
    fn new(bag: &Bag, witness: &[ArgId]) -> Self {
        CyclicError {
            witness: witness.iter().map(|&id| bag.name(id).to_owned()).collect(),
        }
    }
}

/// Computes a deterministic topological order (Kahn's elimination, smallest
/// id first) or reports the graph cyclic with a witness cycle.
///
/// Self-loops count as cycles: an argument cannot precede itself.
pub fn topological_order(bag: &Bag) -> Topology {
    let n = bag.len();
    let mut indegree = vec![0usize; n];
    let mut successors = vec![Vec::new(); n];
    for &(src, tgt) in bag.attacks().iter().chain(bag.supports()) {
        indegree[tgt] += 1;
        successors[src].push(tgt);
    }

    let mut ready: BinaryHeap<Reverse<ArgId>> = (0..n)
        .filter(|&id| indegree[id] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    let mut emitted = vec![false; n];
    while let Some(Reverse(id)) = ready.pop() {
        emitted[id] = true;
        order.push(id);
        for &next in &successors[id] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                ready.push(Reverse(next));
            }
        }
    }

    if order.len() == n {
        Topology::Acyclic(TopologicalOrder { order })
    } else {
        Topology::Cyclic {
            witness: find_cycle(bag, &emitted),
        }
    }
}

/// Extracts one cycle from the arguments left over by the elimination.
///
/// Every leftover argument has at least one leftover predecessor, so walking
/// smallest predecessors from the smallest leftover id must revisit a node;
/// the walk between the two visits is a cycle.
fn find_cycle(bag: &Bag, emitted: &[bool]) -> Vec<ArgId> {
    let start = (0..bag.len())
        .find(|&id| !emitted[id])
        .expect("cycle extraction requires a leftover argument");
    let mut visited_at = vec![usize::MAX; bag.len()];
    let mut path = Vec::new();
    let mut current = start;
    loop {
        if visited_at[current] != usize::MAX {
            let mut cycle: Vec<ArgId> = path[visited_at[current]..].to_vec();
            cycle.sort_unstable();
            return cycle;
        }
        visited_at[current] = path.len();
        path.push(current);
        current = bag
            .attackers(current)
            .iter()
            .chain(bag.supporters(current))
            .copied()
            .filter(|&p| !emitted[p])
            .min()
            .expect("leftover argument must have a leftover predecessor");
    }
}

/// Runs the single equilibrium pass with a caller-supplied per-argument
/// update, visiting arguments in the given order. Exposed separately so the
/// update function can be instrumented.
pub fn equilibrium_in_order(
    bag: &Bag,
    order: &TopologicalOrder,
    mut update: impl FnMut(&[f64], ArgId) -> f64,
) -> StateVector {
    let mut values = bag.weights();
    for &id in order.ids() {
        values[id] = update(&values, id);
    }
    StateVector::new(values, 0.0)
}

/// Exact equilibrium of an acyclic graph under any model: one update per
/// argument in topological order.
pub fn acyclic_equilibrium(model: Model, bag: &Bag) -> Result<StateVector, CyclicError> {
    match topological_order(bag) {
        Topology::Acyclic(order) => Ok(equilibrium_in_order(bag, &order, |values, id| {
            model.update_component(bag, values, id)
        })),
        Topology::Cyclic { witness } => Err(CyclicError::new(bag, &witness)),
    }
}
