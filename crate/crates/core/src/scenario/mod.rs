//! Sampling, coverage and ensembles over scenarios.

mod coverage;
mod ensemble;
mod io;
mod walk;

use thiserror::Error;

pub use coverage::{covered, feasible_targets, CoverageTarget, Criterion};
pub use ensemble::{ensemble, Ensemble, Weights};
pub use io::{read_scenarios, write_scenarios, ScenarioFileError};
pub use walk::{sample_walk, walk_seed};

use crate::space::SpaceError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("unsupported criterion `{0}`; supported: events, pairs, triples, edges, diversity")]
    UnsupportedCriterion(String),
    #[error("the edges criterion needs a run graph")]
    GraphRequired,
    #[error("scenario leaves the run graph at event #{index}")]
    ReplayMismatch { index: usize },
    #[error("ensemble budget must be at least 1")]
    ZeroBudget,
    #[error("the scenario pool is empty")]
    EmptyPool,
    #[error("{0}")]
    Space(String),
}

impl From<SpaceError> for ScenarioError {
    fn from(e: SpaceError) -> Self {
        ScenarioError::Space(e.to_string())
    }
}
