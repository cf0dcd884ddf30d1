//! Brandes betweenness centrality on unweighted undirected graphs.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::graph::UndirectedGraph;

const SOURCES_PER_TASK: usize = 64;

/// Exact betweenness: for each node, the sum over unordered pairs `{s, t}` of
/// the fraction of shortest `s`–`t` paths passing through it.
pub fn betweenness_centrality(g: &UndirectedGraph) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    // Fixed-size chunks summed in order keep the result independent of
    // thread scheduling.
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_TASK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut ws = Workspace::new(n);
            for &s in chunk {
                ws.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // Each unordered pair was counted from both endpoints.
    total.iter_mut().for_each(|x| *x /= 2.0);
    total
}

struct Workspace {
    stack: Vec<usize>,
    queue: VecDeque<usize>,
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
        }
    }

    fn accumulate(&mut self, g: &UndirectedGraph, s: usize, acc: &mut [f64]) {
        self.dist.fill(-1);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        self.preds.iter_mut().for_each(Vec::clear);
        self.stack.clear();

        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        while let Some(w) = self.stack.pop() {
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_gnp, gen_grid, gen_star};

    /// Counts shortest paths by BFS from both ends: `v` lies on
    /// `sigma_sv * sigma_vt` of the `sigma_st` shortest paths when
    /// `d(s,v) + d(v,t) = d(s,t)`.
    fn brute_force(g: &UndirectedGraph) -> Vec<f64> {
        let n = g.node_count();
        let bfs = |s: usize| {
            let mut dist = vec![usize::MAX; n];
            let mut count = vec![0.0f64; n];
            dist[s] = 0;
            count[s] = 1.0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in g.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        q.push_back(v);
                    }
                    if dist[v] == dist[u] + 1 {
                        count[v] += count[u];
                    }
                }
            }
            (dist, count)
        };
        let all: Vec<_> = (0..n).map(bfs).collect();
        let mut score = vec![0.0; n];
        for s in 0..n {
            for t in s + 1..n {
                let (ds, cs) = &all[s];
                if ds[t] == usize::MAX {
                    continue;
                }
                let (dt, ct) = &all[t];
                for v in 0..n {
                    if v != s && v != t && ds[v] != usize::MAX && ds[v] + dt[v] == ds[t] {
                        score[v] += cs[v] * ct[v] / cs[t];
                    }
                }
            }
        }
        score
    }

    #[test]
    fn path_of_three() {
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(betweenness_centrality(&g), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star_center_counts_leaf_pairs() {
        let g = gen_star(7).unwrap();
        let bc = betweenness_centrality(&g);
        assert_eq!(bc[0], 21.0);
        assert!(bc[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn complete_graph_is_uniform() {
        let g = gen_gnp(6, 1.0, 0).unwrap();
        assert!(betweenness_centrality(&g).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn agrees_with_pair_enumeration() {
        for g in [gen_grid(4, 3).unwrap(), gen_gnp(25, 0.15, 3).unwrap(), gen_gnp(200, 0.03, 1).unwrap()] {
            let fast = betweenness_centrality(&g);
            let slow = brute_force(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }
}
