//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the algorithms it checks; graphs are described by plain edge lists.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, VecDeque};

use remixgraph::{Design, DesignId, LineageGraph, TagSet};

/// A small DAG: node `i` is named `n{i}`, edges are (child, parent) with parent < child.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn name(i: usize) -> DesignId {
    DesignId::new(format!("n{i:02}")).unwrap()
}

impl EdgeList {
    pub fn parents(&self, child: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == child).map(|e| e.1).collect()
    }

    /// Builds a graph inserting nodes in `order`, each with its parent list.
    pub fn build(&self, order: &[usize], tags: impl Fn(usize) -> TagSet) -> LineageGraph {
        let mut g = LineageGraph::new();
        for &i in order {
            let d = Design::new(name(i))
                .with_tags(tags(i))
                .with_parents(self.parents(i).into_iter().map(name));
            g.add_design(d).unwrap();
        }
        g
    }

    fn adjacency(&self, directed: bool) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(c, p) in &self.edges {
            // influence flows parent -> child
            adj[p].push(c);
            if !directed {
                adj[c].push(p);
            }
        }
        adj
    }

    /// BFS distances and shortest-path counts from every source.
    fn all_pairs(&self, directed: bool) -> (Vec<Vec<Option<usize>>>, Vec<Vec<f64>>) {
        let adj = self.adjacency(directed);
        let mut dist = vec![vec![None; self.n]; self.n];
        let mut sigma = vec![vec![0.0; self.n]; self.n];
        for s in 0..self.n {
            dist[s][s] = Some(0);
            sigma[s][s] = 1.0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                let dv = dist[s][v].unwrap();
                for &w in &adj[v] {
                    if dist[s][w].is_none() {
                        dist[s][w] = Some(dv + 1);
                        q.push_back(w);
                    }
                    if dist[s][w] == Some(dv + 1) {
                        sigma[s][w] += sigma[s][v];
                    }
                }
            }
        }
        (dist, sigma)
    }

    /// Raw betweenness by summing σ_sv·σ_vt/σ_st over every pair and every
    /// intermediate node on a shortest path.
    pub fn naive_betweenness(&self, directed: bool) -> Vec<f64> {
        let (dist, sigma) = self.all_pairs(directed);
        let mut raw = vec![0.0; self.n];
        for s in 0..self.n {
            for t in 0..self.n {
                if s == t || (!directed && t < s) {
                    continue;
                }
                let Some(dst) = dist[s][t] else { continue };
                for v in 0..self.n {
                    if v == s || v == t {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (dist[s][v], dist[v][t]) {
                        if a + b == dst {
                            raw[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                        }
                    }
                }
            }
        }
        raw
    }

    pub fn undirected_hops(&self) -> Vec<Vec<Option<usize>>> {
        self.all_pairs(false).0
    }

    /// `reach[a][b]`: b is an ancestor of a (or a itself).
    pub fn ancestor_closure(&self) -> Vec<Vec<bool>> {
        let mut reach = vec![vec![false; self.n]; self.n];
        for a in 0..self.n {
            reach[a][a] = true;
            let mut stack = vec![a];
            while let Some(v) = stack.pop() {
                for p in self.parents(v) {
                    if !reach[a][p] {
                        reach[a][p] = true;
                        stack.push(p);
                    }
                }
            }
        }
        reach
    }
}

pub fn normalizer(n: usize, directed: bool) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    let pairs = ((n - 1) * (n - 2)) as f64;
    if directed {
        pairs
    } else {
        pairs / 2.0
    }
}

/// Independence by enumerating the symbol pool: a symbol is in the
/// intersection if every set holds it, in the union if any set does.
pub fn enumerated_independence(pool: &[String], sets: &[BTreeSet<String>]) -> Option<f64> {
    if sets.len() < 2 {
        return None;
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for sym in pool {
        let hits = sets.iter().filter(|s| s.contains(sym)).count();
        if hits == sets.len() {
            inter += 1;
        }
        if hits > 0 {
            union += 1;
        }
    }
    (union > 0).then(|| 1.0 - inter as f64 / union as f64)
}

pub fn tag_set(tags: &BTreeSet<String>) -> TagSet {
    tags.iter().collect()
}
