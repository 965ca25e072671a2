//! Coverage criteria and the targets they define.
//!
//! Targets are built from event labels (`push(color=green)`), so events
//! that share a name but differ in fields are distinct targets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use super::ScenarioError;
use crate::engine::Scenario;
use crate::space::{path_counts, RunGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Every event name.
    Events,
    /// Ordered name pairs occurring as (not necessarily adjacent) subsequences.
    Pairs,
    /// Ordered name triples, as for pairs.
    Triples,
    /// Run-graph edges.
    Edges,
    /// Spread of event-name sequences under edit distance.
    Diversity,
}

impl Criterion {
    pub const SUPPORTED: [&'static str; 5] = ["events", "pairs", "triples", "edges", "diversity"];

    /// Subsequence length for the sequence criteria.
    pub fn strength(self) -> Option<usize> {
        match self {
            Criterion::Events => Some(1),
            Criterion::Pairs => Some(2),
            Criterion::Triples => Some(3),
            Criterion::Edges | Criterion::Diversity => None,
        }
    }
}

impl FromStr for Criterion {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "events" => Criterion::Events,
            "pairs" => Criterion::Pairs,
            "triples" => Criterion::Triples,
            "edges" => Criterion::Edges,
            "diversity" => Criterion::Diversity,
            other => return Err(ScenarioError::UnsupportedCriterion(other.to_string())),
        })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Events => "events",
            Criterion::Pairs => "pairs",
            Criterion::Triples => "triples",
            Criterion::Edges => "edges",
            Criterion::Diversity => "diversity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverageTarget {
    Event(String),
    Sequence(Vec<String>),
    Edge(usize),
}

impl fmt::Display for CoverageTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageTarget::Event(n) => f.write_str(n),
            CoverageTarget::Sequence(ns) => write!(f, "({})", ns.join(", ")),
            CoverageTarget::Edge(i) => write!(f, "edge {i}"),
        }
    }
}

/// Ordered `t`-tuples of names occurring as subsequences of `names`.
fn subsequences(names: &[&str], t: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    match t {
        1 => {
            out.extend(names.iter().map(|n| vec![n.to_string()]));
        }
        2 => {
            let mut before: BTreeSet<&str> = BTreeSet::new();
            for &n in names {
                out.extend(before.iter().map(|b| vec![b.to_string(), n.to_string()]));
                before.insert(n);
            }
        }
        3 => {
            // prefix pairs seen so far, extended by each later name
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            let mut pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
            for &n in names {
                out.extend(
                    pairs
                        .iter()
                        .map(|(a, b)| vec![a.to_string(), b.to_string(), n.to_string()]),
                );
                pairs.extend(seen.iter().map(|&s| (s, n)));
                seen.insert(n);
            }
        }
        _ => unreachable!("strength is 1, 2 or 3"),
    }
    out
}

/// Targets a single scenario covers.
pub fn covered(
    scenario: &Scenario,
    criterion: Criterion,
    graph: Option<&RunGraph>,
) -> Result<BTreeSet<CoverageTarget>, ScenarioError> {
    Ok(match criterion {
        Criterion::Events | Criterion::Pairs | Criterion::Triples => {
            let labels = scenario.labels();
            let names: Vec<&str> = labels.iter().map(String::as_str).collect();
            let t = criterion.strength().unwrap();
            subsequences(&names, t)
                .into_iter()
                .map(|mut seq| {
                    if t == 1 {
                        CoverageTarget::Event(seq.pop().unwrap())
                    } else {
                        CoverageTarget::Sequence(seq)
                    }
                })
                .collect()
        }
        Criterion::Edges => {
            let graph = graph.ok_or(ScenarioError::GraphRequired)?;
            graph
                .replay(&scenario.events)
                .map_err(|index| ScenarioError::ReplayMismatch { index })?
                .into_iter()
                .map(CoverageTarget::Edge)
                .collect()
        }
        Criterion::Diversity => BTreeSet::new(),
    })
}

/// Union of [`covered`] over every completed run of `graph`, computed by
/// dynamic programming over the graph rather than by enumeration.
pub fn feasible_targets(
    graph: &RunGraph,
    criterion: Criterion,
) -> Result<BTreeSet<CoverageTarget>, ScenarioError> {
    let counts = path_counts::<BigUint>(graph)?;
    let order = graph
        .topological_order()
        .expect("path_counts checked acyclicity");
    // an edge lies on some completed run iff its target still reaches one
    let useful = |ei: usize| !counts[graph.edges[ei].to].is_zero();
    let useful_edges = || {
        order
            .iter()
            .flat_map(|&n| graph.out_edges(n).iter().copied())
            .filter(|&ei| !counts[graph.edges[ei].from].is_zero() && useful(ei))
    };
    let name = |ei: usize| graph.edges[ei].event.to_string();

    let mut out = BTreeSet::new();
    match criterion {
        Criterion::Diversity => {}
        Criterion::Edges => out.extend(useful_edges().map(CoverageTarget::Edge)),
        Criterion::Events => out.extend(useful_edges().map(|ei| CoverageTarget::Event(name(ei)))),
        Criterion::Pairs | Criterion::Triples => {
            // names (and name pairs) that occur on some path from the root to each node
            let mut names: Vec<BTreeSet<String>> = vec![BTreeSet::new(); graph.nodes.len()];
            let mut pairs: Vec<BTreeMap<String, BTreeSet<String>>> =
                vec![BTreeMap::new(); graph.nodes.len()];
            let triples = criterion == Criterion::Triples;
            let mut seqs: BTreeSet<Vec<String>> = BTreeSet::new();
            for ei in useful_edges() {
                let (from, to) = (graph.edges[ei].from, graph.edges[ei].to);
                let label = name(ei);
                for a in &names[from] {
                    if !triples {
                        seqs.insert(vec![a.clone(), label.clone()]);
                    }
                }
                if triples {
                    for (a, bs) in &pairs[from] {
                        for b in bs {
                            seqs.insert(vec![a.clone(), b.clone(), label.clone()]);
                        }
                    }
                    let mut carried = pairs[from].clone();
                    for a in &names[from] {
                        carried.entry(a.clone()).or_default().insert(label.clone());
                    }
                    for (a, bs) in carried {
                        pairs[to].entry(a).or_default().extend(bs);
                    }
                }
                let mut carried = names[from].clone();
                carried.insert(label);
                names[to].extend(carried);
            }
            out.extend(seqs.into_iter().map(CoverageTarget::Sequence));
        }
    }
    Ok(out)
}
