//! Dinic's blocking-flow maximum flow on real-valued capacities.

use std::collections::VecDeque;

use crate::{Error, Result};

/// Residual capacities at or below `SATURATION_TOL * scale` count as saturated,
/// where `scale` is the largest finite capacity in the network (at least 1).
pub const SATURATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    flow: f64,
    rev: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeId {
    node: usize,
    index: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    graph: Vec<Vec<Edge>>,
    max_cap: f64,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            max_cap: 1.0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> Result<EdgeId> {
        let n = self.graph.len();
        if from >= n || to >= n {
            return Err(Error::Network(format!(
                "edge {from}->{to} references a node outside 0..{n}"
            )));
        }
        if from == to {
            return Err(Error::Network(format!("self-loop on node {from}")));
        }
        if !(cap >= 0.0) || cap.is_infinite() {
            return Err(Error::Network(format!(
                "capacity of {from}->{to} must be finite and >= 0, got {cap}"
            )));
        }
        self.max_cap = self.max_cap.max(cap);
        let fwd = self.graph[from].len();
        let back = self.graph[to].len();
        self.graph[from].push(Edge {
            to,
            cap,
            flow: 0.0,
            rev: back,
        });
        self.graph[to].push(Edge {
            to: from,
            cap: 0.0,
            flow: 0.0,
            rev: fwd,
        });
        Ok(EdgeId {
            node: from,
            index: fwd,
        })
    }

    pub fn flow(&self, edge: EdgeId) -> f64 {
        self.graph[edge.node][edge.index].flow
    }

    pub fn capacity(&self, edge: EdgeId) -> f64 {
        self.graph[edge.node][edge.index].cap
    }

    fn tol(&self) -> f64 {
        SATURATION_TOL * self.max_cap
    }

    /// Pushes a maximum flow from `source` to `sink` and returns its value.
    /// Calling it again continues from the current flow.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Result<f64> {
        let n = self.graph.len();
        if source >= n || sink >= n || source == sink {
            return Err(Error::Network(format!(
                "invalid terminals source={source} sink={sink} for {n} nodes"
            )));
        }
        let tol = self.tol();
        let mut total = 0.0;
        let mut level = vec![usize::MAX; n];
        let mut iter = vec![0usize; n];
        while self.build_levels(source, sink, tol, &mut level) {
            iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.augment(source, sink, f64::INFINITY, tol, &level, &mut iter);
                if pushed <= tol {
                    break;
                }
                total += pushed;
            }
        }
        Ok(total)
    }

    /// Nodes reachable from `from` along edges whose residual capacity exceeds
    /// `rel_tol` times the largest capacity. After [`max_flow`](Self::max_flow)
    /// this is the source side of a minimum cut.
    pub fn residual_reachable(&self, from: usize, rel_tol: f64) -> Vec<bool> {
        let tol = rel_tol * self.max_cap;
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for e in &self.graph[v] {
                if e.cap - e.flow > tol && !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }

    fn build_levels(&self, source: usize, sink: usize, tol: f64, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for e in &self.graph[v] {
                if e.cap - e.flow > tol && level[e.to] == usize::MAX {
                    level[e.to] = level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        level[sink] != usize::MAX
    }

    fn augment(
        &mut self,
        v: usize,
        sink: usize,
        limit: f64,
        tol: f64,
        level: &[usize],
        iter: &mut [usize],
    ) -> f64 {
        if v == sink {
            return limit;
        }
        while iter[v] < self.graph[v].len() {
            let (to, residual) = {
                let e = &self.graph[v][iter[v]];
                (e.to, e.cap - e.flow)
            };
            if residual > tol && level[to] == level[v] + 1 {
                let pushed = self.augment(to, sink, limit.min(residual), tol, level, iter);
                if pushed > tol {
                    let rev = self.graph[v][iter[v]].rev;
                    self.graph[v][iter[v]].flow += pushed;
                    self.graph[to][rev].flow -= pushed;
                    return pushed;
                }
            }
            iter[v] += 1;
        }
        0.0
    }
}
