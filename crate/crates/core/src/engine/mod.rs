//! The behavioral-programming run cycle: every story declares what it
//! requests, waits for and blocks; one enabled event is selected; the
//! stories that requested or waited for it resume.

mod event;
mod program;

use std::collections::BTreeSet;
use std::fmt;

use rand::RngCore;
use rand_pcg::Pcg32;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use event::{Event, EventPattern, Value, SESSION_FIELD};
use program::Program;
pub use program::{BlockRegister, SyncStatement, ThreadState};

use crate::dsl::CheckedModel;

/// PCG32 stream constant used by every seeded selection in the crate.
pub const PCG_STREAM: u64 = 0xda3e_39cb_94b9_5bdb;

/// A PCG32 generator on the crate's fixed stream.
pub fn seeded_rng(seed: u64) -> Pcg32 {
    Pcg32::new(seed, PCG_STREAM)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("event {0} is not enabled in this configuration")]
    NotEnabled(Event),
}

/// The full engine state: one thread per story, in story order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    pub threads: Vec<ThreadState>,
}

impl Configuration {
    /// Stable 64-bit digest of the canonical encoding. Threads are kept in
    /// story order, so the encoding does not depend on insertion order.
    pub fn canonical_hash(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("configuration serializes");
        let digest = Sha256::digest(&bytes);
        u64::from_be_bytes(digest[..8].try_into().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    Completed,
    DepthCapped,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Completed => "completed",
            Terminal::DepthCapped => "depth-capped",
        })
    }
}

/// One generated test: the selected events in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub events: Vec<Event>,
    pub terminal: Terminal,
}

impl Scenario {
    pub fn names(&self) -> Vec<&str> {
        self.events.iter().map(|e| e.name.as_str()).collect()
    }

    /// Display labels (`name(k=v, ...)`) of the events in order.
    pub fn labels(&self) -> Vec<String> {
        self.events.iter().map(Event::to_string).collect()
    }

    /// Single-line canonical JSON (sorted keys, no whitespace).
    pub fn canonical(&self) -> String {
        serde_json::to_value(self)
            .expect("scenario serializes")
            .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Always the first enabled event in canonical order.
    First,
    /// `enabled[next_u32 % len]` from a PCG32 seeded with this value.
    SeededRandom(u64),
}

/// Deduplicated union of all requests minus everything any thread blocks,
/// in canonical order.
pub fn enabled_events(statements: &[SyncStatement]) -> Vec<Event> {
    let requested: BTreeSet<&Event> = statements.iter().flat_map(|s| &s.requested).collect();
    let mut enabled: Vec<Event> = requested
        .into_iter()
        .filter(|e| {
            !statements
                .iter()
                .flat_map(|s| &s.blocked)
                .any(|p| p.matches(e))
        })
        .cloned()
        .collect();
    enabled.sort_by_cached_key(Event::canonical);
    enabled
}

/// A checked model compiled into one step machine per story.
#[derive(Debug, Clone)]
pub struct Engine {
    programs: Vec<Program>,
    story_names: Vec<String>,
}

impl Engine {
    pub fn new(model: &CheckedModel) -> Engine {
        Engine {
            programs: model
                .stories
                .iter()
                .map(|s| Program::compile(&s.body))
                .collect(),
            story_names: model.stories.iter().map(|s| s.name.clone()).collect(),
        }
    }

    pub fn story_names(&self) -> &[String] {
        &self.story_names
    }

    pub fn init(&self) -> Configuration {
        Configuration {
            threads: self
                .programs
                .iter()
                .enumerate()
                .map(|(i, p)| ThreadState::start(i as u32, p))
                .collect(),
        }
    }

    fn program(&self, t: &ThreadState) -> &Program {
        &self.programs[t.story as usize]
    }

    pub fn sync_snapshot(&self, config: &Configuration) -> Vec<SyncStatement> {
        config
            .threads
            .iter()
            .map(|t| t.statement(self.program(t)))
            .collect()
    }

    pub fn enabled(&self, config: &Configuration) -> Vec<Event> {
        enabled_events(&self.sync_snapshot(config))
    }

    pub fn is_terminated(&self, thread: &ThreadState) -> bool {
        thread.is_terminated(self.program(thread))
    }

    /// Resumes every thread that requested or waits for `event`.
    pub fn step(
        &self,
        config: &Configuration,
        event: &Event,
    ) -> Result<Configuration, EngineError> {
        if !self.enabled(config).contains(event) {
            return Err(EngineError::NotEnabled(event.clone()));
        }
        Ok(self.step_unchecked(config, event))
    }

    /// [`Engine::step`] without the enabledness check; the caller guarantees
    /// `event` came from [`Engine::enabled`].
    pub(crate) fn step_unchecked(&self, config: &Configuration, event: &Event) -> Configuration {
        Configuration {
            threads: config
                .threads
                .iter()
                .map(|t| {
                    t.advance(self.program(t), event)
                        .unwrap_or_else(|| t.clone())
                })
                .collect(),
        }
    }

    /// Selects and steps until nothing is enabled or `max_depth` events
    /// have been produced.
    pub fn run(&self, strategy: Strategy, max_depth: Option<usize>) -> Scenario {
        let mut rng = match strategy {
            Strategy::SeededRandom(seed) => Some(seeded_rng(seed)),
            Strategy::First => None,
        };
        let mut config = self.init();
        let mut events = Vec::new();
        loop {
            let enabled = self.enabled(&config);
            if enabled.is_empty() {
                return Scenario {
                    events,
                    terminal: Terminal::Completed,
                };
            }
            if max_depth.is_some_and(|d| events.len() >= d) {
                return Scenario {
                    events,
                    terminal: Terminal::DepthCapped,
                };
            }
            let index = match rng.as_mut() {
                Some(rng) => rng.next_u32() as usize % enabled.len(),
                None => 0,
            };
            let event = enabled[index].clone();
            config = self.step_unchecked(&config, &event);
            events.push(event);
        }
    }
}

pub fn init(model: &CheckedModel) -> Configuration {
    Engine::new(model).init()
}

pub fn run(model: &CheckedModel, strategy: Strategy, max_depth: Option<usize>) -> Scenario {
    Engine::new(model).run(strategy, max_depth)
}

#[cfg(test)]
mod tests;
