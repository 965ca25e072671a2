use std::collections::VecDeque;

use crate::engine::Event;

/// Summary of one explored configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    /// Breadth-first discovery index.
    pub id: usize,
    /// [`crate::engine::Configuration::canonical_hash`] of the configuration.
    pub hash: u64,
    pub terminal: bool,
    /// Terminal with requests still pending, all of them blocked. Such a run
    /// never finished its stories and is not counted as a test.
    pub deadlock: bool,
    /// Not expanded because a depth or node limit was hit.
    pub truncated: bool,
    /// Breadth-first distance from the root.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub event: Event,
    pub to: usize,
}

/// Deduplicated transition graph of a model. Maximal root-to-terminal paths
/// are the model's test scenarios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunGraph {
    pub nodes: Vec<NodeInfo>,
    /// Grouped by source node in discovery order; within a node in
    /// canonical event order.
    pub edges: Vec<Edge>,
    pub root: usize,
    pub acyclic: bool,
    pub depth_bound: Option<usize>,
    out: Vec<Vec<usize>>,
}

impl RunGraph {
    /// Builds the adjacency index and recomputes `acyclic`.
    pub fn from_parts(
        nodes: Vec<NodeInfo>,
        edges: Vec<Edge>,
        root: usize,
        depth_bound: Option<usize>,
    ) -> RunGraph {
        let mut out = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.from].push(i);
        }
        let mut g = RunGraph {
            nodes,
            edges,
            root,
            acyclic: true,
            depth_bound,
            out,
        };
        g.acyclic = g.topological_order().is_some();
        g
    }

    /// Indices into [`RunGraph::edges`] leaving `node`.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn is_truncated(&self) -> bool {
        self.nodes.iter().any(|n| n.truncated)
    }

    /// Kahn's algorithm; `None` when a cycle (including a self-loop) exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            indegree[e.to] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.nodes.len())
            .filter(|&n| indegree[n] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = queue.pop_front() {
            order.push(n);
            for &ei in &self.out[n] {
                let to = self.edges[ei].to;
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    queue.push_back(to);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Edge ids of some cycle, in traversal order, if the graph has one.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        // 0 unvisited, 1 on the current path, 2 done
        let mut state = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if state[start] != 0 {
                continue;
            }
            // (node, position in out-list, edge used to enter node)
            let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(start, 0, None)];
            state[start] = 1;
            while let Some(top) = stack.last_mut() {
                let (node, pos) = (top.0, top.1);
                if let Some(&ei) = self.out[node].get(pos) {
                    top.1 += 1;
                    let to = self.edges[ei].to;
                    match state[to] {
                        0 => {
                            state[to] = 1;
                            stack.push((to, 0, Some(ei)));
                        }
                        1 => {
                            let from = stack
                                .iter()
                                .position(|f| f.0 == to)
                                .expect("grey node is on the stack");
                            let mut cycle: Vec<usize> =
                                stack[from + 1..].iter().filter_map(|f| f.2).collect();
                            cycle.push(ei);
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Follows `events` from the root. Returns the traversed edge ids, or
    /// the index of the first event with no matching out-edge. Replay stops
    /// quietly at a truncated node.
    pub fn replay(&self, events: &[Event]) -> Result<Vec<usize>, usize> {
        let mut node = self.root;
        let mut path = Vec::with_capacity(events.len());
        for (i, ev) in events.iter().enumerate() {
            if self.nodes[node].truncated {
                break;
            }
            match self.out[node]
                .iter()
                .find(|&&ei| &self.edges[ei].event == ev)
            {
                Some(&ei) => {
                    path.push(ei);
                    node = self.edges[ei].to;
                }
                None => return Err(i),
            }
        }
        Ok(path)
    }
}
