use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Highlight;
use crate::engine::Event;
use crate::space::{Edge, NodeInfo, RunGraph};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: usize,
    terminal: bool,
    deadlock: bool,
    truncated: bool,
    depth: usize,
    /// 16 lowercase hex digits.
    hash: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: usize,
    event: Event,
    to: usize,
    highlighted: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    root: usize,
    acyclic: bool,
    depth_bound: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("malformed graph file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// Single-line canonical JSON (sorted keys) plus a trailing newline.
pub fn to_structured(graph: &RunGraph, highlight: Option<&Highlight>) -> String {
    let record = GraphRecord {
        nodes: graph
            .nodes
            .iter()
            .map(|n| NodeRecord {
                id: n.id,
                terminal: n.terminal,
                deadlock: n.deadlock,
                truncated: n.truncated,
                depth: n.depth,
                hash: format!("{:016x}", n.hash),
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeRecord {
                from: e.from,
                event: e.event.clone(),
                to: e.to,
                highlighted: highlight.is_some_and(|h| h.contains(i)),
            })
            .collect(),
        root: graph.root,
        acyclic: graph.acyclic,
        depth_bound: graph.depth_bound,
    };
    let mut text = serde_json::to_value(&record)
        .expect("graph serializes")
        .to_string();
    text.push('\n');
    text
}

/// Inverse of [`to_structured`].
pub fn from_structured(text: &str) -> Result<(RunGraph, Highlight), ImportError> {
    let record: GraphRecord = serde_json::from_str(text)?;
    let invalid = |m: String| ImportError::Invalid(m);
    let n = record.nodes.len();
    let mut nodes = Vec::with_capacity(n);
    for (i, r) in record.nodes.into_iter().enumerate() {
        if r.id != i {
            return Err(invalid(format!("node at position {i} has id {}", r.id)));
        }
        let hash = u64::from_str_radix(&r.hash, 16)
            .map_err(|_| invalid(format!("node {i} has a bad hash {:?}", r.hash)))?;
        nodes.push(NodeInfo {
            id: r.id,
            hash,
            terminal: r.terminal,
            deadlock: r.deadlock,
            truncated: r.truncated,
            depth: r.depth,
        });
    }
    if record.root >= n.max(1) {
        return Err(invalid(format!("root {} is not a node", record.root)));
    }
    let mut highlight = Highlight::default();
    let mut edges = Vec::with_capacity(record.edges.len());
    for (i, e) in record.edges.into_iter().enumerate() {
        if e.from >= n || e.to >= n {
            return Err(invalid(format!("edge {i} points outside the node list")));
        }
        if e.highlighted {
            highlight.edges.insert(i);
        }
        edges.push(Edge {
            from: e.from,
            event: e.event,
            to: e.to,
        });
    }
    let graph = RunGraph::from_parts(nodes, edges, record.root, record.depth_bound);
    if graph.acyclic != record.acyclic {
        return Err(invalid("the acyclic flag disagrees with the edges".into()));
    }
    Ok((graph, highlight))
}
