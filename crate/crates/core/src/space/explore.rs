use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::graph::{Edge, NodeInfo, RunGraph};
use super::SpaceError;
use crate::dsl::CheckedModel;
use crate::engine::{enabled_events, Configuration, Engine};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Nodes at this breadth-first depth are not expanded.
    pub max_depth: Option<usize>,
    /// Exploration fails with [`SpaceError::BudgetExceeded`] beyond this
    /// many nodes.
    pub max_nodes: Option<usize>,
}

/// Breadth-first exploration from the initial configuration.
pub fn explore(model: &CheckedModel, opts: ExploreOptions) -> Result<RunGraph, SpaceError> {
    explore_with_states(model, opts).map(|(g, _)| g)
}

/// Like [`explore`], also returning the configuration behind every node id.
pub fn explore_with_states(
    model: &CheckedModel,
    opts: ExploreOptions,
) -> Result<(RunGraph, Vec<Configuration>), SpaceError> {
    let engine = Engine::new(model);
    let root = engine.init();
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut states = vec![root.clone()];
    let mut nodes = vec![NodeInfo {
        id: 0,
        hash: root.canonical_hash(),
        terminal: false,
        deadlock: false,
        truncated: false,
        depth: 0,
    }];
    index.insert(root, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let config = states[id].clone();
        let snapshot = engine.sync_snapshot(&config);
        let enabled = enabled_events(&snapshot);
        let depth = nodes[id].depth;
        if enabled.is_empty() {
            nodes[id].terminal = true;
            nodes[id].deadlock = snapshot.iter().any(|s| !s.requested.is_empty());
            continue;
        }
        if opts.max_depth.is_some_and(|d| depth >= d) {
            nodes[id].truncated = true;
            continue;
        }
        for event in enabled {
            let next = engine.step_unchecked(&config, &event);
            let to = match index.entry(next) {
                Entry::Occupied(o) => *o.get(),
                Entry::Vacant(v) => {
                    if opts.max_nodes.is_some_and(|m| nodes.len() >= m) {
                        // the current node and everything still queued stay unexpanded
                        let unexpanded = std::iter::once(id).chain(queue.iter().copied());
                        for n in unexpanded.collect::<Vec<_>>() {
                            nodes[n].truncated = true;
                        }
                        edges.retain(|e: &Edge| e.from != id);
                        let graph = RunGraph::from_parts(nodes, edges, 0, opts.max_depth);
                        return Err(SpaceError::BudgetExceeded(Box::new(graph)));
                    }
                    let to = nodes.len();
                    nodes.push(NodeInfo {
                        id: to,
                        hash: v.key().canonical_hash(),
                        terminal: false,
                        deadlock: false,
                        truncated: false,
                        depth: depth + 1,
                    });
                    states.push(v.key().clone());
                    v.insert(to);
                    queue.push_back(to);
                    to
                }
            };
            edges.push(Edge {
                from: id,
                event,
                to,
            });
        }
    }
    Ok((
        RunGraph::from_parts(nodes, edges, 0, opts.max_depth),
        states,
    ))
}
