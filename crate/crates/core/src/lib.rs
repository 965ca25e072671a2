//! Scenario-driven model-based testing.
//!
//! Stories written in the `.story` language are woven together under
//! behavioral-programming semantics into a graph of every legal test run.
//! The graph can be counted, enumerated, sampled, reduced to coverage
//! ensembles, exported, and its scenarios executed against a system under
//! test.
//!
//! ```
//! use bpweave::space::count_runs;
//! use bpweave::{compile_str, explore, ExploreOptions};
//!
//! let model = compile_str("m.story", r#"story "s" { request a request b }"#).unwrap();
//! let graph = explore(&model, ExploreOptions::default()).unwrap();
//! assert_eq!(count_runs(&graph).unwrap(), 1u32.into());
//! ```

pub mod dsl;
pub mod engine;
pub mod export;
pub mod models;
pub mod num;
pub mod runner;
pub mod scenario;
pub mod space;

pub use dsl::{check, compile_str, expand_refinements, parse, CheckedModel, Diagnostic, ModelAst};
pub use engine::{Configuration, Engine, Event, EventPattern, Scenario, Strategy, Terminal, Value};
pub use space::{explore, ExploreOptions, RunGraph};

/// Exact run counts.
pub type RunCount = num_bigint::BigUint;
/// Fraction of feasible coverage targets reached.
pub type CoverageRatio = num_rational::Ratio<u64>;
/// Failure-probability interval in double precision.
pub type Interval = runner::stats::Interval<f64>;
