//! Counting, enumerating and uniformly sampling maximal runs of an acyclic
//! run graph.

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;

use super::graph::RunGraph;
use super::SpaceError;
use crate::engine::{seeded_rng, Scenario, Terminal};
use crate::num::PathCount;

fn require_exact(graph: &RunGraph) -> Result<Vec<usize>, SpaceError> {
    if graph.is_truncated() {
        return Err(SpaceError::TruncatedGraph);
    }
    graph.topological_order().ok_or(SpaceError::CyclicGraph)
}

/// Number of completed maximal runs leaving every node, indexed by node id.
/// Deadlocked terminals contribute nothing.
pub fn path_counts<C: PathCount>(graph: &RunGraph) -> Result<Vec<C>, SpaceError> {
    let order = require_exact(graph)?;
    let mut counts = vec![C::zero(); graph.nodes.len()];
    for &n in order.iter().rev() {
        counts[n] = if graph.nodes[n].deadlock {
            C::zero()
        } else if graph.nodes[n].terminal {
            C::one()
        } else {
            let mut total = C::zero();
            for &ei in graph.out_edges(n) {
                total = total
                    .checked_add(&counts[graph.edges[ei].to])
                    .ok_or(SpaceError::Overflow)?;
            }
            total
        };
    }
    Ok(counts)
}

/// Number of distinct maximal root-to-terminal paths, excluding paths that
/// end in a deadlock.
pub fn count_runs_as<C: PathCount>(graph: &RunGraph) -> Result<C, SpaceError> {
    let mut counts = path_counts::<C>(graph)?;
    Ok(counts.swap_remove(graph.root))
}

pub fn count_runs(graph: &RunGraph) -> Result<BigUint, SpaceError> {
    count_runs_as(graph)
}

/// Depth-first enumeration in canonical edge order, at most `limit` runs.
pub fn enumerate_runs(graph: &RunGraph, limit: Option<usize>) -> Result<Vec<Scenario>, SpaceError> {
    require_exact(graph)?;
    let mut runs = Vec::new();
    if limit == Some(0) {
        return Ok(runs);
    }
    // (node, next out-edge position)
    let mut stack = vec![(graph.root, 0usize)];
    let mut path = Vec::new();
    while let Some((node, pos)) = stack.last_mut() {
        let node = *node;
        if graph.nodes[node].terminal {
            if graph.nodes[node].deadlock {
                stack.pop();
                path.pop();
                continue;
            }
            runs.push(Scenario {
                events: path
                    .iter()
                    .map(|&ei: &usize| graph.edges[ei].event.clone())
                    .collect(),
                terminal: Terminal::Completed,
            });
            if limit.is_some_and(|l| runs.len() >= l) {
                break;
            }
            stack.pop();
            path.pop();
            continue;
        }
        match graph.out_edges(node).get(*pos) {
            Some(&ei) => {
                *pos += 1;
                path.push(ei);
                stack.push((graph.edges[ei].to, 0));
            }
            None => {
                stack.pop();
                path.pop();
            }
        }
    }
    Ok(runs)
}

/// `n` independent runs, each uniform over all completed maximal runs: at every node
/// an out-edge is taken with probability count(target) / count(node).
pub fn uniform_sample(graph: &RunGraph, n: usize, seed: u64) -> Result<Vec<Scenario>, SpaceError> {
    let counts = path_counts::<BigUint>(graph)?;
    if n > 0 && counts[graph.root].is_zero() {
        return Err(SpaceError::NoCompletedRuns);
    }
    let mut rng = seeded_rng(seed);
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let mut node = graph.root;
        let mut events = Vec::new();
        while !graph.nodes[node].terminal {
            let mut r = rng.gen_biguint_below(&counts[node]);
            let mut chosen = None;
            for &ei in graph.out_edges(node) {
                let c = &counts[graph.edges[ei].to];
                if &r < c {
                    chosen = Some(ei);
                    break;
                }
                r -= c;
            }
            let ei = chosen.expect("path counts sum to the node count");
            events.push(graph.edges[ei].event.clone());
            node = graph.edges[ei].to;
        }
        samples.push(Scenario {
            events,
            terminal: Terminal::Completed,
        });
    }
    Ok(samples)
}
