use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value as Json};

use super::stats::{wilson95, Interval};
use super::RunResult;

/// Failure statistics for one tag, or for all runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub tag: String,
    pub n: u64,
    pub k: u64,
    pub p_hat: Option<f64>,
    pub variance: Option<f64>,
    pub wilson95: Option<Interval<f64>>,
}

impl Group {
    fn new(tag: &str, n: u64, k: u64) -> Group {
        let (p_hat, variance, interval) = if n == 0 {
            (None, None, None)
        } else {
            let p = k as f64 / n as f64;
            (Some(p), Some(p * (1.0 - p) / n as f64), wilson95(k, n).ok())
        };
        Group {
            tag: tag.to_string(),
            n,
            k,
            p_hat,
            variance,
            wilson95: interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub groups: Vec<Group>,
    pub totals: Group,
    pub generated_at: String,
    pub config: Json,
}

/// Groups runs by tag; a run with several tags counts in each of them and
/// once in the totals. A run is a failure unless it passed. The result does
/// not depend on the order of `results`.
pub fn report(results: &[RunResult], generated_at: &str, config: Json) -> Report {
    let mut by_tag: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    let mut k = 0;
    for r in results {
        let failed = r.failed() as u64;
        k += failed;
        for t in &r.tags {
            let e = by_tag.entry(t).or_default();
            e.0 += 1;
            e.1 += failed;
        }
    }
    Report {
        groups: by_tag
            .into_iter()
            .map(|(t, (n, k))| Group::new(t, n, k))
            .collect(),
        totals: Group::new("*", results.len() as u64, k),
        generated_at: generated_at.to_string(),
        config,
    }
}

impl Report {
    /// One canonical JSON object per line: a header, one line per group,
    /// then the totals.
    pub fn to_ndjson(&self) -> String {
        let mut lines = vec![json!({
            "kind": "header",
            "generated_at": self.generated_at,
            "config": self.config,
        })];
        for g in &self.groups {
            lines.push(group_json("group", g));
        }
        lines.push(group_json("totals", &self.totals));
        lines.into_iter().map(|l| l.to_string() + "\n").collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("generated: {}\n\n", self.generated_at);
        let width = self
            .groups
            .iter()
            .map(|g| g.tag.len())
            .chain([5])
            .max()
            .unwrap();
        writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>8}  {:>10}  {:>17}",
            "tag", "runs", "fails", "p_hat", "variance", "wilson95"
        )
        .unwrap();
        for g in &self.groups {
            row(&mut out, &g.tag, g, width);
        }
        row(&mut out, "total", &self.totals, width);
        out
    }
}

fn group_json(kind: &str, g: &Group) -> Json {
    let mut v = serde_json::to_value(g).expect("group serializes");
    v["kind"] = json!(kind);
    if kind == "totals" {
        v.as_object_mut().unwrap().remove("tag");
    }
    v
}

fn row(out: &mut String, tag: &str, g: &Group, width: usize) {
    let fmt = |x: Option<f64>, d: usize| x.map_or("-".to_string(), |x| format!("{x:.d$}"));
    let interval = g
        .wilson95
        .map_or("-".to_string(), |i| format!("[{:.4}, {:.4}]", i.lo, i.hi));
    writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>8}  {:>10}  {:>17}",
        tag,
        g.n,
        g.k,
        fmt(g.p_hat, 4),
        fmt(g.variance, 6),
        interval
    )
    .unwrap();
}
