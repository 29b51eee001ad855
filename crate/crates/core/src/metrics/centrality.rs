//! Exact betweenness centrality (Brandes accumulation, unweighted BFS).
//!
//! Undirected graphs are first stripped of degree-1 vertices; pairs routed
//! through the pruned trees are counted directly and the path-counting pass
//! runs only on what remains, with each vertex weighted by the trees it
//! absorbed.
//!
//! Sources are split into a fixed number of contiguous blocks. Each block
//! accumulates its sources sequentially and the block partials are summed in
//! block order, so the result is bit-identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{DesignId, LineageGraph, NodeIx};

/// Upper bound on the number of source blocks. Fixed so the summation order
/// never depends on the thread pool.
const SOURCE_BLOCKS: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Edges followed in either direction; each unordered pair counted once.
    #[default]
    Undirected,
    /// Edges followed parent→child, the direction of influence.
    Directed,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Undirected => "undirected",
            Orientation::Directed => "directed",
        })
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "undirected" => Ok(Orientation::Undirected),
            "directed" => Ok(Orientation::Directed),
            other => Err(format!("unknown orientation `{other}`")),
        }
    }
}

impl Orientation {
    /// Number of ordered (directed) or unordered (undirected) pairs that
    /// exclude a given node; zero when n ≤ 2.
    pub fn normalizer(self, n: usize) -> f64 {
        if n <= 2 {
            return 0.0;
        }
        let pairs = (n - 1) as f64 * (n - 2) as f64;
        match self {
            Orientation::Directed => pairs,
            Orientation::Undirected => pairs / 2.0,
        }
    }
}

/// Per-node betweenness, indexed by [`NodeIx`].
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityResult {
    pub orientation: Orientation,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl CentralityResult {
    pub fn raw_of(&self, graph: &LineageGraph, id: &DesignId) -> Option<f64> {
        graph.index_of(id).ok().map(|ix| self.raw[ix])
    }

    pub fn normalized_of(&self, graph: &LineageGraph, id: &DesignId) -> Option<f64> {
        graph.index_of(id).ok().map(|ix| self.normalized[ix])
    }

    /// Largest absolute per-node difference in normalized values.
    pub fn max_abs_diff(&self, other: &CentralityResult) -> f64 {
        self.normalized
            .iter()
            .zip(&other.normalized)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Betweenness on the ambient rayon pool.
pub fn betweenness(graph: &LineageGraph, orientation: Orientation) -> CentralityResult {
    compute(graph, orientation)
}

/// Betweenness on a dedicated pool of `workers` threads (`0` uses the ambient pool).
pub fn betweenness_with_workers(graph: &LineageGraph, orientation: Orientation, workers: usize) -> CentralityResult {
    if workers == 0 {
        return compute(graph, orientation);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| compute(graph, orientation)),
        Err(_) => compute(graph, orientation),
    }
}

/// Compressed adjacency for the traversal direction. For `Undirected` both
/// lists are the same neighbour set.
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    fn build(n: usize, mut neighbours: impl FnMut(usize, &mut Vec<usize>)) -> Csr {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in 0..n {
            neighbours(v, &mut targets);
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn of(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// The part of the graph the path-counting pass runs on. `nodes[i]` is the
/// graph index of core vertex `i`; `weight[i]` is how many graph vertices it
/// stands for (itself plus any trees pruned into it).
struct Core {
    nodes: Vec<NodeIx>,
    weight: Vec<f64>,
    forward: Csr,
    backward: Option<Csr>,
}

/// Pairs separated by pruned tree vertices, counted exactly, plus the core
/// left once no degree-1 vertex remains.
///
/// A pruned vertex is a cut vertex: every pair split between two of the parts
/// it separates passes through it on its only shortest path. A core vertex
/// additionally carries the pairs split between its own pruned subtrees and
/// the rest of its component.
fn prune_undirected(graph: &LineageGraph, raw: &mut [f64]) -> Core {
    let n = graph.node_count();
    let neighbours = |v: NodeIx| graph.parent_indices(v).iter().chain(graph.child_indices(v)).copied();
    let mut degree: Vec<usize> = (0..n).map(|v| neighbours(v).count()).collect();
    let mut size = vec![1u64; n];
    let mut removed = vec![false; n];
    // (pruned vertex, vertex it hung from) in removal order.
    let mut hung: Vec<(NodeIx, NodeIx)> = Vec::new();

    let mut stack: Vec<NodeIx> = (0..n).rev().filter(|&v| degree[v] == 1).collect();
    while let Some(u) = stack.pop() {
        if removed[u] || degree[u] != 1 {
            continue;
        }
        let p = neighbours(u).find(|&p| !removed[p]).expect("degree-1 vertex has a live neighbour");
        removed[u] = true;
        degree[u] = 0;
        degree[p] -= 1;
        size[p] += size[u];
        hung.push((u, p));
        if degree[p] == 1 {
            stack.push(p);
        }
    }

    let mut component_size = vec![0u64; n];
    for comp in graph.weak_components() {
        for &v in &comp {
            component_size[v] = comp.len() as u64;
        }
    }

    // Per vertex: sum and sum of squares of the pruned subtree sizes below it.
    let mut below = vec![(0u64, 0u64); n];
    for &(u, p) in &hung {
        below[p].0 += size[u];
        below[p].1 += size[u] * size[u];
    }
    for v in 0..n {
        let (sum, squares) = below[v];
        // Everything in the component outside v's pruned subtree.
        let rest = component_size[v] - size[v];
        let pairs = if removed[v] {
            let total = sum + rest;
            (total * total - squares - rest * rest) / 2
        } else {
            (sum * sum - squares) / 2 + sum * rest
        };
        raw[v] += pairs as f64;
    }

    let nodes: Vec<NodeIx> = (0..n).filter(|&v| !removed[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let forward = Csr::build(nodes.len(), |i, out| {
        out.extend(neighbours(nodes[i]).filter(|&w| !removed[w]).map(|w| local[w]));
    });
    let weight = nodes.iter().map(|&v| size[v] as f64).collect();
    Core {
        nodes,
        weight,
        forward,
        backward: None,
    }
}

fn full_directed(graph: &LineageGraph) -> Core {
    let n = graph.node_count();
    Core {
        nodes: (0..n).collect(),
        weight: vec![1.0; n],
        forward: Csr::build(n, |v, out| out.extend_from_slice(graph.child_indices(v))),
        backward: Some(Csr::build(n, |v, out| out.extend_from_slice(graph.parent_indices(v)))),
    }
}

struct Workspace {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![u32::MAX; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }

    /// Adds the weighted dependencies of `source` on every other core vertex
    /// into `acc`. Each target `t` counts `weight[t]` times and the source
    /// counts `weight[source]` times.
    fn accumulate(&mut self, source: usize, core: &Core, acc: &mut [f64]) {
        for &v in &self.order {
            self.dist[v] = u32::MAX;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
        }
        self.order.clear();
        let backward = core.backward.as_ref().unwrap_or(&core.forward);

        // `order` doubles as the BFS queue.
        self.dist[source] = 0;
        self.sigma[source] = 1.0;
        self.order.push(source);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let next = self.dist[v] + 1;
            let sv = self.sigma[v];
            for &w in core.forward.of(v) {
                let dw = self.dist[w];
                if dw == u32::MAX {
                    self.dist[w] = next;
                    self.sigma[w] = sv;
                    self.order.push(w);
                } else if dw == next {
                    self.sigma[w] += sv;
                }
            }
        }

        let source_weight = core.weight[source];
        for &w in self.order.iter().rev() {
            let dw = self.dist[w];
            if dw == 0 {
                continue;
            }
            let coeff = (core.weight[w] + self.delta[w]) / self.sigma[w];
            for &v in backward.of(w) {
                if self.dist[v] != u32::MAX && self.dist[v] + 1 == dw {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            acc[w] += source_weight * self.delta[w];
        }
    }
}

fn compute(graph: &LineageGraph, orientation: Orientation) -> CentralityResult {
    let n = graph.node_count();
    let mut raw = vec![0.0; n];
    let core = match orientation {
        Orientation::Undirected => prune_undirected(graph, &mut raw),
        Orientation::Directed => full_directed(graph),
    };

    let m = core.nodes.len();
    let blocks = m.clamp(1, SOURCE_BLOCKS);
    let block_len = m.div_ceil(blocks).max(1);
    let partials: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; m];
            let mut ws = Workspace::new(m);
            let start = (b * block_len).min(m);
            let end = ((b + 1) * block_len).min(m);
            for s in start..end {
                ws.accumulate(s, &core, &mut acc);
            }
            acc
        })
        .collect();

    let mut paths = vec![0.0; m];
    for part in &partials {
        for (r, p) in paths.iter_mut().zip(part) {
            *r += p;
        }
    }
    // Undirected: every unordered pair was visited from both ends.
    let halve = orientation == Orientation::Undirected;
    for (i, &v) in core.nodes.iter().enumerate() {
        raw[v] += if halve { paths[i] / 2.0 } else { paths[i] };
    }

    let norm = orientation.normalizer(n);
    let normalized = raw
        .iter()
        .map(|&r| if norm > 0.0 { (r / norm).min(1.0) } else { 0.0 })
        .collect();
    CentralityResult {
        orientation,
        raw,
        normalized,
    }
}
