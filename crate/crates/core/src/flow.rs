//! Dinic max-flow on integer capacities and the bipartite transport network
//! built on it.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: i64,
}

/// Directed network with paired residual edges.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    original: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); nodes],
            edges: Vec::new(),
            original: Vec::new(),
        }
    }

    /// Adds `u → v` with capacity `cap` and returns its edge id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap });
        self.edges.push(Edge { to: u, cap: 0 });
        self.original.push(cap);
        self.original.push(0);
        self.adjacency[u].push(id);
        self.adjacency[v].push(id + 1);
        id
    }

    /// Flow currently carried by edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.original[id] - self.edges[id].cap
    }

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1; self.adjacency.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let edge = &self.edges[e];
                if edge.cap > 0 && level[edge.to] < 0 {
                    level[edge.to] = level[u] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: i64, level: &[i64], next: &mut [usize]) -> i64 {
        if u == t {
            return pushed;
        }
        while next[u] < self.adjacency[u].len() {
            let e = self.adjacency[u][next[u]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let got = self.augment(to, t, pushed.min(cap), level, next);
                if got > 0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Maximum `s → t` flow.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return total;
            }
            let mut next = vec![0usize; self.adjacency.len()];
            loop {
                let got = self.augment(s, t, i64::MAX, &level, &mut next);
                if got == 0 {
                    break;
                }
                total += got;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network: the source side of a
    /// minimum cut once a maximum flow has been pushed.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l >= 0).collect()
    }
}

/// Result of routing integer supplies to integer demands along allowed pairs.
#[derive(Clone, Debug)]
pub struct BipartiteFlow {
    pub value: i64,
    pub total: i64,
    /// `(i, j, amount)` for every pair carrying positive flow.
    pub routed: Vec<(usize, usize, i64)>,
    /// Supply nodes on the source side of the minimum cut.
    pub cut: Vec<usize>,
}

impl BipartiteFlow {
    pub fn is_complete(&self) -> bool {
        self.value == self.total
    }
}

/// Max-flow from supplies `a` to demands `b` with unbounded capacity on each
/// allowed pair `(i, j)`. Requires `Σ a = Σ b`.
pub fn bipartite_flow(a: &[i64], b: &[i64], pairs: &[(usize, usize)]) -> BipartiteFlow {
    let (n1, n2) = (a.len(), b.len());
    let s = 0;
    let t = n1 + n2 + 1;
    let total: i64 = a.iter().sum();
    let mut net = FlowNetwork::new(n1 + n2 + 2);
    for (i, &w) in a.iter().enumerate() {
        net.add_edge(s, 1 + i, w);
    }
    for (j, &w) in b.iter().enumerate() {
        net.add_edge(1 + n1 + j, t, w);
    }
    let middle: Vec<usize> = pairs
        .iter()
        .map(|&(i, j)| net.add_edge(1 + i, 1 + n1 + j, total))
        .collect();
    let value = net.max_flow(s, t);
    let routed = pairs
        .iter()
        .zip(&middle)
        .filter_map(|(&(i, j), &e)| {
            let f = net.flow(e);
            (f > 0).then_some((i, j, f))
        })
        .collect();
    let reach = net.residual_reachable(s);
    let cut = (0..n1).filter(|&i| reach[1 + i]).collect();
    BipartiteFlow {
        value,
        total,
        routed,
        cut,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 3);
        net.add_edge(0, 2, 2);
        net.add_edge(1, 2, 5);
        net.add_edge(1, 3, 2);
        net.add_edge(2, 3, 3);
        assert_eq!(net.max_flow(0, 3), 5);
    }

    #[test]
    fn hall_violation_is_the_cut() {
        // Both supplies can only reach demand 0.
        let f = bipartite_flow(&[1, 1], &[1, 1], &[(0, 0), (1, 0)]);
        assert!(!f.is_complete());
        assert_eq!(f.value, 1);
        assert_eq!(f.cut, vec![0, 1]);
    }

    #[test]
    fn perfect_matching() {
        let f = bipartite_flow(&[2, 1], &[1, 2], &[(0, 0), (0, 1), (1, 1)]);
        assert!(f.is_complete());
        let routed: i64 = f.routed.iter().map(|r| r.2).sum();
        assert_eq!(routed, 3);
        assert!(f.cut.is_empty());
    }
}
