use std::fmt::Write;

use super::Highlight;
use crate::space::RunGraph;

const HIGHLIGHT_COLOR: &str = "#d62728";

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Dot digraph of `graph`. Nodes are labeled with their discovery index;
/// terminal nodes are double circles (red when deadlocked), depth-truncated
/// frontier nodes are dashed, highlighted edges are thick and colored.
/// Emission follows discovery order, so output is byte-stable.
pub fn to_graph_description(graph: &RunGraph, highlight: Option<&Highlight>) -> String {
    let mut out = String::from("digraph runs {\n  node [shape=circle];\n");
    for n in &graph.nodes {
        let mut attrs = vec![format!("label=\"{}\"", n.id)];
        if n.terminal {
            attrs.push("shape=doublecircle".into());
        }
        if n.deadlock {
            attrs.push("color=red".into());
        }
        if n.truncated {
            attrs.push("style=dashed".into());
        } else if n.id == graph.root {
            attrs.push("style=bold".into());
        }
        writeln!(out, "  n{} [{}];", n.id, attrs.join(", ")).unwrap();
    }
    for (i, e) in graph.edges.iter().enumerate() {
        let mut attrs = vec![format!("label=\"{}\"", escape(&e.event.to_string()))];
        if highlight.is_some_and(|h| h.contains(i)) {
            attrs.push("penwidth=3".into());
            attrs.push(format!("color=\"{HIGHLIGHT_COLOR}\""));
        }
        writeln!(out, "  n{} -> n{} [{}];", e.from, e.to, attrs.join(", ")).unwrap();
    }
    out.push_str("}\n");
    out
}
