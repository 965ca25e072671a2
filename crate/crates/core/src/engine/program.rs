//! Stories compiled to flat instruction lists, and the thread states that
//! walk them.

use serde::Serialize;

use super::event::{Event, EventPattern};
use crate::dsl::Step;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Instr {
    Request(Event),
    WaitFor(Vec<EventPattern>),
    BlockUntil {
        blocked: Vec<EventPattern>,
        until: EventPattern,
    },
    /// Pushes an iteration counter.
    LoopStart(u32),
    /// Decrements the top counter; jumps back to `body` while it is positive,
    /// otherwise pops it and falls through.
    LoopEnd {
        body: usize,
    },
    Jump(usize),
    Choose(Vec<usize>),
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Program {
    pub instrs: Vec<Instr>,
}

impl Program {
    pub fn compile(body: &[Step]) -> Program {
        let mut instrs = Vec::new();
        emit(body, &mut instrs);
        instrs.push(Instr::End);
        Program { instrs }
    }
}

fn emit(body: &[Step], out: &mut Vec<Instr>) {
    for step in body {
        match step {
            Step::Request(e) => out.push(Instr::Request(e.clone())),
            Step::WaitFor(ps) => out.push(Instr::WaitFor(ps.clone())),
            Step::BlockUntil { blocked, until } => out.push(Instr::BlockUntil {
                blocked: blocked.clone(),
                until: until.clone(),
            }),
            // a loop that never synchronizes has no observable effect
            Step::Repeat { body, .. } | Step::Forever(body) if !crate::dsl::must_sync(body) => {}
            Step::Repeat { count, body } => {
                out.push(Instr::LoopStart(*count));
                let start = out.len();
                emit(body, out);
                out.push(Instr::LoopEnd { body: start });
            }
            Step::Forever(body) => {
                let start = out.len();
                emit(body, out);
                out.push(Instr::Jump(start));
            }
            Step::Choose(branches) => {
                let at = out.len();
                out.push(Instr::Choose(Vec::new()));
                let mut starts = Vec::new();
                let mut exits = Vec::new();
                for b in branches {
                    starts.push(out.len());
                    emit(b, out);
                    exits.push(out.len());
                    out.push(Instr::Jump(usize::MAX));
                }
                let end = out.len();
                for e in exits {
                    out[e] = Instr::Jump(end);
                }
                out[at] = Instr::Choose(starts);
            }
            Step::Session { body, .. } => emit(body, out),
        }
    }
}

/// Active `block P until q` of a thread parked on that statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockRegister {
    pub blocked: Vec<EventPattern>,
    pub until: EventPattern,
}

/// Position of one story in its program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ThreadState {
    pub story: u32,
    pub pc: u32,
    /// Remaining iterations of the enclosing `repeat` loops, innermost last.
    pub counters: Vec<u32>,
    pub register: Option<BlockRegister>,
}

/// What one thread declares at a sync point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyncStatement {
    pub requested: Vec<Event>,
    pub waited: Vec<EventPattern>,
    pub blocked: Vec<EventPattern>,
}

impl SyncStatement {
    pub fn is_empty(&self) -> bool {
        self.requested.is_empty() && self.waited.is_empty() && self.blocked.is_empty()
    }
}

impl ThreadState {
    /// Thread at the first sync point of `program`.
    pub(crate) fn start(story: u32, program: &Program) -> ThreadState {
        settle(program, story, 0, Vec::new())
    }

    pub(crate) fn is_terminated(&self, program: &Program) -> bool {
        program.instrs[self.pc as usize] == Instr::End
    }

    /// The sync points this thread is simultaneously parked at: itself, or
    /// the entry point of every branch when parked at a `choose`.
    pub(crate) fn leaves(&self, program: &Program) -> Vec<ThreadState> {
        match &program.instrs[self.pc as usize] {
            Instr::Choose(targets) => targets
                .iter()
                .flat_map(|&t| {
                    settle(program, self.story, t, self.counters.clone()).leaves(program)
                })
                .collect(),
            _ => vec![self.clone()],
        }
    }

    pub(crate) fn statement(&self, program: &Program) -> SyncStatement {
        let mut st = SyncStatement::default();
        for leaf in self.leaves(program) {
            match &program.instrs[leaf.pc as usize] {
                Instr::Request(e) => st.requested.push(e.clone()),
                Instr::WaitFor(ps) => st.waited.extend(ps.iter().cloned()),
                Instr::BlockUntil { blocked, until } => {
                    st.blocked.extend(blocked.iter().cloned());
                    st.waited.push(until.clone());
                }
                _ => {}
            }
        }
        st
    }

    /// The successor state after `event` was selected, or `None` when this
    /// thread neither requested nor waited for it.
    pub(crate) fn advance(&self, program: &Program, event: &Event) -> Option<ThreadState> {
        self.leaves(program).into_iter().find_map(|leaf| {
            let resumes = match &program.instrs[leaf.pc as usize] {
                Instr::Request(e) => e == event,
                Instr::WaitFor(ps) => ps.iter().any(|p| p.matches(event)),
                Instr::BlockUntil { until, .. } => until.matches(event),
                _ => false,
            };
            resumes.then(|| settle(program, leaf.story, leaf.pc as usize + 1, leaf.counters))
        })
    }
}

/// Runs control-flow instructions from `pc` until a sync point, a `choose`
/// or the end. Terminates because every loop body that is compiled at all
/// contains a sync point on every path.
fn settle(program: &Program, story: u32, mut pc: usize, mut counters: Vec<u32>) -> ThreadState {
    loop {
        match &program.instrs[pc] {
            Instr::LoopStart(n) => {
                counters.push(*n);
                pc += 1;
            }
            Instr::LoopEnd { body } => {
                let top = counters.last_mut().expect("loop counter present");
                *top -= 1;
                if *top > 0 {
                    pc = *body;
                } else {
                    counters.pop();
                    pc += 1;
                }
            }
            Instr::Jump(t) => pc = *t,
            Instr::BlockUntil { blocked, until } => {
                return ThreadState {
                    story,
                    pc: pc as u32,
                    counters,
                    register: Some(BlockRegister {
                        blocked: blocked.clone(),
                        until: until.clone(),
                    }),
                }
            }
            _ => {
                return ThreadState {
                    story,
                    pc: pc as u32,
                    counters,
                    register: None,
                }
            }
        }
    }
}
