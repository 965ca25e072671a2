//! The checked, low-level form of a model that the engine executes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::diag::Diagnostic;
use crate::engine::{Event, EventPattern, Value};

/// Value of a template field inside an `event` definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TemplateValue {
    Param(String),
    Literal(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Template {
    pub name: String,
    pub fields: BTreeMap<String, TemplateValue>,
}

/// A resolved `event` definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub params: Vec<String>,
    pub body: Vec<Template>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Step {
    Request(Event),
    WaitFor(Vec<EventPattern>),
    BlockUntil {
        blocked: Vec<EventPattern>,
        until: EventPattern,
    },
    Repeat {
        count: u32,
        body: Vec<Step>,
    },
    Forever(Vec<Step>),
    Choose(Vec<Vec<Step>>),
    /// Only present before refinement expansion.
    Session {
        id: String,
        body: Vec<Step>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckedStory {
    pub name: String,
    pub body: Vec<Step>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckedModel {
    pub refinements: BTreeMap<String, Refinement>,
    pub stories: Vec<CheckedStory>,
    /// Names of every event some story can request.
    pub vocabulary: BTreeSet<String>,
    #[serde(skip)]
    pub warnings: Vec<Diagnostic>,
}

impl CheckedModel {
    /// Canonical JSON of the model, warnings excluded.
    pub fn to_canonical_json(&self) -> String {
        // round-trip through Value so every object key is sorted
        let value = serde_json::to_value(self).expect("model serializes");
        value.to_string()
    }

    /// Every concrete event each story may request, for tagging scenarios
    /// with the stories that contributed to them.
    pub fn requests_by_story(&self) -> Vec<(String, BTreeSet<Event>)> {
        self.stories
            .iter()
            .map(|s| {
                let mut set = BTreeSet::new();
                collect_requests(&s.body, &mut set);
                (s.name.clone(), set)
            })
            .collect()
    }
}

fn collect_requests(body: &[Step], out: &mut BTreeSet<Event>) {
    for step in body {
        match step {
            Step::Request(e) => {
                out.insert(e.clone());
            }
            Step::Repeat { body, .. } | Step::Forever(body) | Step::Session { body, .. } => {
                collect_requests(body, out)
            }
            Step::Choose(branches) => branches.iter().for_each(|b| collect_requests(b, out)),
            Step::WaitFor(_) | Step::BlockUntil { .. } => {}
        }
    }
}

pub(crate) fn vocabulary_of(stories: &[CheckedStory]) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    for s in stories {
        collect_requests(&s.body, &mut set);
    }
    set.into_iter().map(|e| e.name).collect()
}
