//! Ranking design pairs as combination candidates.
//!
//! A pair scores `tag_distance × structural_separation`. Tag distance is the
//! Jaccard distance of the two designs' own tags. Structural separation is
//! the undirected hop distance capped and scaled into [0, 1], with
//! disconnected pairs at 1. Stubs, pairs on one lineage (ancestor and
//! descendant) and pairs with no tags between them are never returned.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{DesignId, GraphError, LineageGraph, NodeIx, TagSet};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecommendError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("design `{0}` is a stub")]
    StubDesign(DesignId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCandidate {
    pub id_a: DesignId,
    pub id_b: DesignId,
    pub tag_distance: f64,
    pub structural_separation: f64,
    pub combined_score: f64,
}

/// Best first: higher combined score, then `(id_a, id_b)` ascending.
pub fn rank_order(x: &PairCandidate, y: &PairCandidate) -> Ordering {
    y.combined_score
        .total_cmp(&x.combined_score)
        .then_with(|| x.id_a.cmp(&y.id_a))
        .then_with(|| x.id_b.cmp(&y.id_b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    /// Score `samples` distinct unordered pairs chosen uniformly with the
    /// given seed. Falls back to the exhaustive scan when `samples` covers
    /// every pair.
    Sampled { samples: usize, seed: u64 },
}

fn jaccard_distance(a: &TagSet, b: &TagSet) -> Option<f64> {
    let union = a.union_len(b);
    (union > 0).then(|| 1.0 - a.intersection_len(b) as f64 / union as f64)
}

/// Jaccard distance between the two designs' tag sets; `None` when both are untagged.
pub fn pair_tag_distance(graph: &LineageGraph, a: &DesignId, b: &DesignId) -> Result<Option<f64>, RecommendError> {
    let da = graph.get(a).ok_or_else(|| GraphError::UnknownDesign(a.clone()))?;
    let db = graph.get(b).ok_or_else(|| GraphError::UnknownDesign(b.clone()))?;
    for d in [da, db] {
        if d.is_stub {
            return Err(RecommendError::StubDesign(d.id.clone()));
        }
    }
    Ok(jaccard_distance(&da.tags, &db.tags))
}

fn separation(hops: usize, cap: usize) -> f64 {
    if hops == usize::MAX {
        1.0
    } else {
        hops.min(cap) as f64 / cap as f64
    }
}

pub fn structural_separation(graph: &LineageGraph, a: &DesignId, b: &DesignId, cap: usize) -> Result<f64, RecommendError> {
    if cap == 0 {
        return Err(RecommendError::InvalidArgument("cap must be positive".into()));
    }
    let hops = graph.undirected_distance(a, b)?;
    Ok(separation(hops.unwrap_or(usize::MAX), cap))
}

/// Diameter of the largest weakly connected component, at least 1.
/// Ties on size go to the component holding the earliest-inserted node.
pub fn default_cap(graph: &LineageGraph) -> usize {
    let components = graph.weak_components();
    let Some(largest) = components.iter().max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0]))) else {
        return 1;
    };
    let diameter = largest
        .par_iter()
        .map_init(
            || (vec![usize::MAX; graph.node_count()], VecDeque::new()),
            |(dist, queue), &s| {
                graph.undirected_bfs_into(s, dist, queue);
                largest.iter().map(|&v| dist[v]).max().unwrap_or(0)
            },
        )
        .max()
        .unwrap_or(0);
    diameter.max(1)
}

/// Top-`k` pairs with the default cap ([`default_cap`]).
pub fn recommend(graph: &LineageGraph, k: usize, strategy: Strategy) -> Result<Vec<PairCandidate>, RecommendError> {
    recommend_with_cap(graph, k, strategy, default_cap(graph))
}

pub fn recommend_with_cap(
    graph: &LineageGraph,
    k: usize,
    strategy: Strategy,
    cap: usize,
) -> Result<Vec<PairCandidate>, RecommendError> {
    if k == 0 {
        return Err(RecommendError::InvalidArgument("k must be at least 1".into()));
    }
    if cap == 0 {
        return Err(RecommendError::InvalidArgument("cap must be positive".into()));
    }
    let scorer = PairScorer::new(graph, cap);
    let m = scorer.eligible.len();
    let total = m * m.saturating_sub(1) / 2;

    let groups: Vec<(usize, Vec<usize>)> = match strategy {
        Strategy::Sampled { samples, seed } if samples < total => sampled_groups(m, total, samples, seed),
        _ => (0..m).map(|i| (i, (i + 1..m).collect())).collect(),
    };

    let mut out: Vec<PairCandidate> = groups
        .par_iter()
        .map_init(
            || Scratch::new(graph.node_count()),
            |scratch, (i, partners)| scorer.score_row(scratch, *i, partners, k),
        )
        .flatten_iter()
        .collect();
    out.sort_by(rank_order);
    out.truncate(k);
    Ok(out)
}

/// Maps sampled pair indices onto rows: row `i` holds pairs `(i, j)`, `j > i`.
fn sampled_groups(m: usize, total: usize, samples: usize, seed: u64) -> Vec<(usize, Vec<usize>)> {
    let mut rng = SeededRng::new(seed);
    // Floyd's algorithm: `samples` distinct values in 0..total.
    let mut chosen: HashSet<u64> = HashSet::with_capacity(samples);
    let total = total as u64;
    for upper in (total - samples as u64)..total {
        let t = rng.below(upper + 1);
        if !chosen.insert(t) {
            chosen.insert(upper);
        }
    }
    let mut picks: Vec<u64> = chosen.into_iter().collect();
    picks.sort_unstable();

    let row_start = |i: usize| -> u64 {
        let i = i as u64;
        let m = m as u64;
        i * (2 * m - i - 1) / 2
    };
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut row = 0;
    for t in picks {
        while row + 1 < m && row_start(row + 1) <= t {
            row += 1;
        }
        let j = row + 1 + (t - row_start(row)) as usize;
        match groups.last_mut() {
            Some((r, js)) if *r == row => js.push(j),
            _ => groups.push((row, vec![j])),
        }
    }
    groups
}

struct Scratch {
    dist: Vec<usize>,
    lineage: Vec<u32>,
    stamp: u32,
    queue: VecDeque<NodeIx>,
    stack: Vec<NodeIx>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![usize::MAX; n],
            lineage: vec![0; n],
            stamp: 0,
            queue: VecDeque::new(),
            stack: Vec::new(),
        }
    }
}

struct PairScorer<'g> {
    graph: &'g LineageGraph,
    cap: usize,
    /// Non-stub nodes sorted by id.
    eligible: Vec<NodeIx>,
    /// Interned, sorted tag ids per eligible position.
    tags: Vec<Vec<u32>>,
}

impl<'g> PairScorer<'g> {
    fn new(graph: &'g LineageGraph, cap: usize) -> Self {
        let eligible: Vec<NodeIx> = graph
            .sorted_indices()
            .into_iter()
            .filter(|&ix| !graph.design(ix).is_stub)
            .collect();
        let mut interner: HashMap<&str, u32> = HashMap::new();
        let tags = eligible
            .iter()
            .map(|&ix| {
                let mut ids: Vec<u32> = graph
                    .design(ix)
                    .tags
                    .iter()
                    .map(|t| {
                        let next = interner.len() as u32;
                        *interner.entry(t).or_insert(next)
                    })
                    .collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        PairScorer { graph, cap, eligible, tags }
    }

    fn tag_distance(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = (&self.tags[i], &self.tags[j]);
        let (mut x, mut y, mut shared) = (0, 0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                Ordering::Less => x += 1,
                Ordering::Greater => y += 1,
                Ordering::Equal => {
                    shared += 1;
                    x += 1;
                    y += 1;
                }
            }
        }
        let union = a.len() + b.len() - shared;
        (union > 0).then(|| 1.0 - shared as f64 / union as f64)
    }

    /// Marks every ancestor and descendant of `source` with the current stamp.
    fn mark_lineage(&self, s: &mut Scratch, source: NodeIx) {
        s.stamp += 1;
        let stamp = s.stamp;
        s.lineage[source] = stamp;
        for upward in [true, false] {
            s.stack.clear();
            s.stack.push(source);
            while let Some(v) = s.stack.pop() {
                let next = if upward {
                    self.graph.parent_indices(v)
                } else {
                    self.graph.child_indices(v)
                };
                for &w in next {
                    if s.lineage[w] != stamp {
                        s.lineage[w] = stamp;
                        s.stack.push(w);
                    }
                }
            }
        }
    }

    /// Scores `(i, j)` for every listed partner `j > i`, keeping the best `k`.
    fn score_row(&self, s: &mut Scratch, i: usize, partners: &[usize], k: usize) -> Vec<PairCandidate> {
        let a = self.eligible[i];
        self.graph.undirected_bfs_into(a, &mut s.dist, &mut s.queue);
        self.mark_lineage(s, a);
        let stamp = s.stamp;
        let mut best: Vec<PairCandidate> = Vec::new();
        for &j in partners {
            let b = self.eligible[j];
            if s.lineage[b] == stamp {
                continue;
            }
            let Some(tag_distance) = self.tag_distance(i, j) else {
                continue;
            };
            let structural_separation = separation(s.dist[b], self.cap);
            let candidate = PairCandidate {
                id_a: self.graph.design(a).id.clone(),
                id_b: self.graph.design(b).id.clone(),
                tag_distance,
                structural_separation,
                combined_score: tag_distance * structural_separation,
            };
            if best.len() == k {
                if rank_order(&candidate, &best[k - 1]) != Ordering::Less {
                    continue;
                }
                best.pop();
            }
            let at = best.partition_point(|c| rank_order(c, &candidate) == Ordering::Less);
            best.insert(at, candidate);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Design;

    fn id(s: &str) -> DesignId {
        DesignId::new(s).unwrap()
    }

    fn add(g: &mut LineageGraph, name: &str, tags: &[&str], parents: &[&str]) {
        g.add_design(
            Design::new(id(name))
                .with_tags(tags.iter().collect())
                .with_parents(parents.iter().map(|p| id(p))),
        )
        .unwrap();
    }

    #[test]
    fn tag_distance_examples() {
        let mut g = LineageGraph::new();
        add(&mut g, "x", &["a", "b"], &[]);
        add(&mut g, "y", &["a", "b"], &[]);
        add(&mut g, "z", &["c"], &[]);
        add(&mut g, "p", &["a", "b", "c"], &[]);
        add(&mut g, "q", &["b", "c", "d"], &[]);
        add(&mut g, "e1", &[], &[]);
        add(&mut g, "e2", &[], &["ghost"]);
        assert_eq!(pair_tag_distance(&g, &id("x"), &id("y")).unwrap(), Some(0.0));
        assert_eq!(pair_tag_distance(&g, &id("x"), &id("z")).unwrap(), Some(1.0));
        assert_eq!(pair_tag_distance(&g, &id("p"), &id("q")).unwrap(), Some(0.5));
        assert_eq!(pair_tag_distance(&g, &id("e1"), &id("e2")).unwrap(), None);
        assert_eq!(
            pair_tag_distance(&g, &id("x"), &id("ghost")),
            Err(RecommendError::StubDesign(id("ghost")))
        );
        assert!(matches!(
            pair_tag_distance(&g, &id("x"), &id("nope")),
            Err(RecommendError::Graph(GraphError::UnknownDesign(_)))
        ));
    }

    #[test]
    fn separation_examples() {
        let mut g = LineageGraph::new();
        add(&mut g, "a", &[], &[]);
        add(&mut g, "b", &[], &["a"]);
        add(&mut g, "lone", &[], &[]);
        assert_eq!(structural_separation(&g, &id("a"), &id("b"), 4).unwrap(), 0.25);
        assert_eq!(structural_separation(&g, &id("a"), &id("lone"), 4).unwrap(), 1.0);
        assert_eq!(structural_separation(&g, &id("a"), &id("a"), 4).unwrap(), 0.0);
        assert!(structural_separation(&g, &id("a"), &id("b"), 0).is_err());
    }

    #[test]
    fn default_cap_is_largest_component_diameter() {
        let mut g = LineageGraph::new();
        assert_eq!(default_cap(&g), 1);
        add(&mut g, "a", &[], &[]);
        assert_eq!(default_cap(&g), 1);
        add(&mut g, "b", &[], &["a"]);
        add(&mut g, "c", &[], &["b"]);
        add(&mut g, "d", &[], &["c"]);
        add(&mut g, "x", &[], &[]);
        add(&mut g, "y", &[], &["x"]);
        assert_eq!(default_cap(&g), 3);
    }

    fn crafted() -> LineageGraph {
        // Two lineages; "left" and "right" share nothing and are disconnected.
        let mut g = LineageGraph::new();
        add(&mut g, "root", &["print", "box"], &[]);
        add(&mut g, "left", &["print", "box", "lid"], &["root"]);
        add(&mut g, "sib", &["print", "box"], &["root"]);
        add(&mut g, "right", &["robot", "arduino"], &[]);
        g
    }

    #[test]
    fn top_pair_is_disjoint_and_disconnected() {
        let g = crafted();
        let top = recommend(&g, 1, Strategy::Exhaustive).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].combined_score, 1.0);
        let pair = [top[0].id_a.as_str(), top[0].id_b.as_str()];
        assert!(pair.contains(&"right"));
    }

    #[test]
    fn lineage_pairs_are_excluded() {
        let g = crafted();
        let all = recommend(&g, 100, Strategy::Exhaustive).unwrap();
        // 6 unordered pairs minus root-left and root-sib.
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|p| p.id_a < p.id_b));
        assert!(all.windows(2).all(|w| rank_order(&w[0], &w[1]) == Ordering::Less));
        assert!(!all.iter().any(|p| p.id_a.as_str() == "left" && p.id_b.as_str() == "root"));
    }

    #[test]
    fn identical_tags_give_zero_scores_in_id_order() {
        let mut g = LineageGraph::new();
        for n in ["c", "a", "b"] {
            add(&mut g, n, &["same"], &[]);
        }
        let all = recommend(&g, 10, Strategy::Exhaustive).unwrap();
        let pairs: Vec<_> = all.iter().map(|p| (p.id_a.as_str(), p.id_b.as_str())).collect();
        assert_eq!(pairs, vec![("a", "b"), ("a", "c"), ("b", "c")]);
        assert!(all.iter().all(|p| p.combined_score == 0.0));
    }

    #[test]
    fn sampled_covering_all_pairs_matches_exhaustive() {
        let g = crafted();
        let ex = recommend(&g, 3, Strategy::Exhaustive).unwrap();
        let sa = recommend(&g, 3, Strategy::Sampled { samples: 6, seed: 9 }).unwrap();
        assert_eq!(ex, sa);
    }

    #[test]
    fn sampled_is_deterministic_and_bounded() {
        let g = crate::synth::generate(&crate::synth::SynthConfig::new(80, 4)).unwrap();
        let s = Strategy::Sampled { samples: 50, seed: 17 };
        let a = recommend(&g, 100, s).unwrap();
        assert_eq!(a, recommend(&g, 100, s).unwrap());
        assert!(a.len() <= 50);
    }

    #[test]
    fn sampled_pair_indices_cover_triangle() {
        let m = 7;
        let total = m * (m - 1) / 2;
        let groups = sampled_groups(m, total, total - 1, 3);
        let mut pairs: Vec<(usize, usize)> = groups
            .iter()
            .flat_map(|(i, js)| js.iter().map(move |&j| (*i, j)))
            .collect();
        assert_eq!(pairs.len(), total - 1);
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), total - 1);
        assert!(pairs.iter().all(|&(i, j)| i < j && j < m));
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(matches!(
            recommend(&crafted(), 0, Strategy::Exhaustive),
            Err(RecommendError::InvalidArgument(_))
        ));
    }
}
