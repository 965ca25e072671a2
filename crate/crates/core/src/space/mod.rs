//! Exhaustive exploration of a model's configuration graph.

mod explore;
mod graph;
mod runs;

use thiserror::Error;

pub use explore::{explore, explore_with_states, ExploreOptions};
pub use graph::{Edge, NodeInfo, RunGraph};
pub use runs::{count_runs, count_runs_as, enumerate_runs, path_counts, uniform_sample};

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("the run graph has a cycle, so its runs cannot be counted or listed")]
    CyclicGraph,
    #[error("the run graph was truncated by a depth or node limit")]
    TruncatedGraph,
    #[error("exploration stopped after {} nodes", .0.nodes.len())]
    BudgetExceeded(Box<RunGraph>),
    #[error("every maximal run of the model ends in a deadlock")]
    NoCompletedRuns,
    #[error("run count does not fit in the requested integer type")]
    Overflow,
}
