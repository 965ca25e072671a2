//! Scenario execution against a system under test, and failure reports.

mod adapter;
mod report;
pub mod stats;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

pub use adapter::{Adapter, AdapterError, Dispatch, Verdict};
pub use report::{report, Group, Report};
pub use stats::{wilson95, StatsError};

use crate::dsl::CheckedModel;
use crate::engine::{Event, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
            Status::Skipped => "skipped",
        })
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Status {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Error => Status::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub event: Event,
    pub status: Status,
    pub duration_ms: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunResult {
    pub scenario: Scenario,
    pub outcomes: Vec<Outcome>,
    pub overall: Verdict,
    pub tags: BTreeSet<String>,
}

impl RunResult {
    pub fn failed(&self) -> bool {
        self.overall != Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecOptions {
    pub stop_on_failure: bool,
    pub workers: usize,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            stop_on_failure: true,
            workers: 1,
        }
    }
}

/// Dispatches the events in order. With `stop_on_failure`, everything after
/// the first fail or error is skipped.
pub fn execute(
    scenario: &Scenario,
    adapter: &Adapter,
    stop_on_failure: bool,
    tags: BTreeSet<String>,
) -> Result<RunResult, AdapterError> {
    adapter.validate()?;
    Ok(execute_validated(scenario, adapter, stop_on_failure, tags))
}

fn execute_validated(
    scenario: &Scenario,
    adapter: &Adapter,
    stop_on_failure: bool,
    tags: BTreeSet<String>,
) -> RunResult {
    let mut outcomes = Vec::with_capacity(scenario.events.len());
    let mut overall = Verdict::Pass;
    for event in &scenario.events {
        if stop_on_failure && overall != Verdict::Pass {
            outcomes.push(Outcome {
                event: event.clone(),
                status: Status::Skipped,
                duration_ms: 0,
                detail: String::new(),
            });
            continue;
        }
        let d = adapter.dispatch(event);
        overall = overall.max(d.verdict);
        outcomes.push(Outcome {
            event: event.clone(),
            status: d.verdict.into(),
            duration_ms: d.duration_ms,
            detail: d.detail,
        });
    }
    RunResult {
        scenario: scenario.clone(),
        outcomes,
        overall,
        tags,
    }
}

/// Runs every scenario, up to `options.workers` at a time. Results keep
/// the input order.
pub fn execute_all(
    scenarios: &[(Scenario, BTreeSet<String>)],
    adapter: &Adapter,
    options: &ExecOptions,
) -> Result<Vec<RunResult>, AdapterError> {
    adapter.validate()?;
    let workers = options.workers.clamp(1, scenarios.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunResult>>> = Mutex::new(vec![None; scenarios.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((s, tags)) = scenarios.get(i) else {
                    break;
                };
                let r = execute_validated(s, adapter, options.stop_on_failure, tags.clone());
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect())
}

/// Names of the stories that requested at least one of the scenario's
/// events, plus `extra`. `model` should be the expanded model so that the
/// scenario's low-level events are found.
pub fn tags_for(model: &CheckedModel, scenario: &Scenario, extra: &[String]) -> BTreeSet<String> {
    let mut tags: BTreeSet<String> = extra.iter().cloned().collect();
    for (story, requests) in model.requests_by_story() {
        if scenario.events.iter().any(|e| requests.contains(e)) {
            tags.insert(story);
        }
    }
    tags
}
