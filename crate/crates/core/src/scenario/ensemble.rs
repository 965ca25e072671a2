//! Greedy ensemble construction.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use super::coverage::{covered, feasible_targets, CoverageTarget, Criterion};
use super::ScenarioError;
use crate::engine::Scenario;
use crate::space::RunGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    pub scenarios: Vec<Scenario>,
    pub criterion: Criterion,
    pub covered: BTreeSet<CoverageTarget>,
    /// Size of the target universe the ratio is measured against.
    pub feasible: usize,
    pub coverage_ratio: Ratio<u64>,
    /// Smallest pairwise edit distance among members (diversity only).
    pub min_distance: Option<usize>,
}

/// Per-label (or per-name) integer multiplicities for coverage targets.
/// Unlisted labels weigh 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Weights(pub BTreeMap<String, u64>);

impl Weights {
    fn label(&self, label: &str) -> u64 {
        let base = label.split('(').next().unwrap_or(label);
        self.0
            .get(label)
            .or_else(|| self.0.get(base))
            .copied()
            .unwrap_or(1)
    }

    fn target(&self, t: &CoverageTarget, graph: Option<&RunGraph>) -> u64 {
        match t {
            CoverageTarget::Event(l) => self.label(l),
            CoverageTarget::Sequence(ls) => ls.iter().map(|l| self.label(l)).max().unwrap_or(1),
            CoverageTarget::Edge(i) => graph
                .and_then(|g| g.edges.get(*i))
                .map_or(1, |e| self.label(&e.event.to_string())),
        }
    }
}

/// Sorted by canonical encoding, duplicates removed.
fn normalize(pool: &[Scenario]) -> Vec<(String, Scenario)> {
    let mut keyed: Vec<(String, Scenario)> =
        pool.iter().map(|s| (s.canonical(), s.clone())).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed
}

fn ratio(covered: usize, feasible: usize) -> Ratio<u64> {
    if feasible == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(covered as u64, feasible as u64)
    }
}

/// Builds an ensemble of at most `budget` members from `pool`.
///
/// Coverage criteria use greedy set cover: repeatedly take the scenario with
/// the largest weighted gain in uncovered targets (ties: shorter, then
/// canonical order) until the budget is spent or nothing adds coverage.
/// With an acyclic, untruncated `graph` the ratio is measured against the
/// exact feasible set, otherwise against everything the pool can reach.
///
/// Diversity starts from the longest scenario and repeatedly adds the one
/// farthest (max-min edit distance over label sequences) from the members.
pub fn ensemble(
    pool: &[Scenario],
    criterion: Criterion,
    budget: usize,
    graph: Option<&RunGraph>,
    weights: &Weights,
) -> Result<Ensemble, ScenarioError> {
    if budget == 0 {
        return Err(ScenarioError::ZeroBudget);
    }
    if pool.is_empty() {
        return Err(ScenarioError::EmptyPool);
    }
    let pool = normalize(pool);
    if criterion == Criterion::Diversity {
        return Ok(diversity(&pool, budget));
    }

    let target_sets = pool
        .iter()
        .map(|(_, s)| covered(s, criterion, graph))
        .collect::<Result<Vec<_>, _>>()?;
    let universe = match graph {
        Some(g) if g.acyclic && !g.is_truncated() => feasible_targets(g, criterion)?,
        _ => target_sets.iter().flatten().cloned().collect(),
    };

    let mut chosen = vec![false; pool.len()];
    let mut members = Vec::new();
    let mut covered_set: BTreeSet<CoverageTarget> = BTreeSet::new();
    while members.len() < budget {
        let best = (0..pool.len())
            .filter(|&i| !chosen[i])
            .map(|i| {
                let gain: u64 = target_sets[i]
                    .difference(&covered_set)
                    .map(|t| weights.target(t, graph))
                    .sum();
                (i, gain)
            })
            .filter(|&(_, gain)| gain > 0)
            .max_by(|&(i, gi), &(j, gj)| {
                gi.cmp(&gj)
                    .then(pool[j].1.events.len().cmp(&pool[i].1.events.len()))
                    .then(pool[j].0.cmp(&pool[i].0))
            });
        let Some((i, _)) = best else { break };
        chosen[i] = true;
        covered_set.extend(target_sets[i].iter().cloned());
        members.push(pool[i].1.clone());
    }
    let hit = covered_set.intersection(&universe).count();
    Ok(Ensemble {
        scenarios: members,
        criterion,
        coverage_ratio: ratio(hit, universe.len()),
        feasible: universe.len(),
        covered: covered_set,
        min_distance: None,
    })
}

fn diversity(pool: &[(String, Scenario)], budget: usize) -> Ensemble {
    let labels: Vec<Vec<String>> = pool.iter().map(|(_, s)| s.labels()).collect();
    let distance = |i: usize, j: usize| strsim::generic_levenshtein(&labels[i], &labels[j]);
    // longest first; canonical order breaks ties
    let seed = (0..pool.len())
        .max_by(|&i, &j| {
            labels[i]
                .len()
                .cmp(&labels[j].len())
                .then(pool[j].0.cmp(&pool[i].0))
        })
        .expect("pool is non-empty");
    let mut members = vec![seed];
    // distance from each candidate to its nearest member
    let mut nearest: Vec<usize> = (0..pool.len()).map(|i| distance(i, seed)).collect();
    let mut min_distance = None;
    while members.len() < budget {
        let best = (0..pool.len())
            .filter(|i| !members.contains(i))
            .max_by(|&i, &j| {
                nearest[i]
                    .cmp(&nearest[j])
                    .then(labels[j].len().cmp(&labels[i].len()))
                    .then(pool[j].0.cmp(&pool[i].0))
            });
        let Some(i) = best.filter(|&i| nearest[i] > 0) else {
            break;
        };
        min_distance = Some(min_distance.map_or(nearest[i], |d: usize| d.min(nearest[i])));
        members.push(i);
        for (k, d) in nearest.iter_mut().enumerate() {
            *d = (*d).min(distance(k, i));
        }
    }
    Ensemble {
        scenarios: members.into_iter().map(|i| pool[i].1.clone()).collect(),
        criterion: Criterion::Diversity,
        covered: BTreeSet::new(),
        feasible: 0,
        coverage_ratio: ratio(0, 0),
        min_distance,
    }
}
