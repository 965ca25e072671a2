//! Run-graph export: dot-language digraphs, canonical structured JSON and
//! PDF rendering through an external dot renderer.

mod dot;
mod render;
mod structured;

use std::collections::BTreeSet;

pub use dot::to_graph_description;
pub use render::{render_pdf, RenderError, RENDERER_CONFIG_KEY};
pub use structured::{from_structured, to_structured, ImportError};

use crate::engine::Scenario;
use crate::space::RunGraph;

/// Edges to emphasize, resolved by replaying scenarios on a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Highlight {
    pub edges: BTreeSet<usize>,
    /// Indices of scenarios that left the graph and were not highlighted.
    pub unresolved: Vec<usize>,
}

impl Highlight {
    pub fn resolve(graph: &RunGraph, scenarios: &[Scenario]) -> Highlight {
        let mut h = Highlight::default();
        for (i, s) in scenarios.iter().enumerate() {
            match graph.replay(&s.events) {
                Ok(path) => h.edges.extend(path),
                Err(_) => h.unresolved.push(i),
            }
        }
        h
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.contains(&edge)
    }
}
