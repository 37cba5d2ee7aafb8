//! Dinic max-flow on real capacities.

use std::collections::VecDeque;

const EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: f64,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    original: Vec<f64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), adj: vec![Vec::new(); nodes], original: Vec::new() }
    }

    /// Add `u -> v` with capacity `cap`; returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap: 0.0 });
        self.original.push(cap);
        self.original.push(0.0);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently on arc `id`.
    pub fn flow(&self, id: usize) -> f64 {
        self.original[id] - self.arcs[id].cap
    }

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if self.arcs[a].cap > EPS && level[v] < 0 {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[i64], it: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let v = self.arcs[a].to;
            if self.arcs[a].cap > EPS && level[v] == level[u] + 1 {
                let got = self.push(v, t, limit.min(self.arcs[a].cap), level, it);
                if got > EPS {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return total;
            }
            let mut it = vec![0; self.adj.len()];
            loop {
                let f = self.push(s, t, f64::INFINITY, &level, &mut it);
                if f <= EPS {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l >= 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1: max flow 23.
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in [(0, 1, 16.), (0, 2, 13.), (2, 1, 4.), (1, 3, 12.), (3, 2, 9.), (2, 4, 14.), (4, 3, 7.), (3, 5, 20.), (4, 5, 4.)] {
            g.add_arc(u, v, c);
        }
        assert!((g.max_flow(0, 5) - 23.0).abs() < 1e-9);
        let side = g.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn fractional_capacities() {
        let mut g = FlowNetwork::new(3);
        let a = g.add_arc(0, 1, 0.75);
        g.add_arc(1, 2, 0.5);
        g.add_arc(0, 2, 0.25);
        assert!((g.max_flow(0, 2) - 0.75).abs() < 1e-12);
        assert!((g.flow(a) - 0.5).abs() < 1e-12);
    }
}
