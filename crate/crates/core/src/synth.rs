//! Seeded synthetic remix networks.
//!
//! Designs `d_1..d_n` are created in order. Each design after the first takes
//! one parent, or two with probability `p_multi`, drawn from earlier designs
//! with weight `children + 1`. Each parent tag is inherited with probability
//! `p_inherit`; the set is then padded with fresh uniform tags from the pool
//! up to `tags_per_design`. Parents always precede children, so the graph is
//! acyclic by construction.
//!
//! Draw order per design `i ≥ 2`: one `chance(p_multi)`, the parent draws
//! (rejecting a repeat of the first parent), one `chance(p_inherit)` per
//! parent tag in parent order then tag order, then the padding draws. `d_1`
//! only makes padding draws. See [`crate::rng`] for the draw definitions.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Design, DesignId, LineageGraph, NodeIx, TagSet};
use crate::rng::SeededRng;

/// 2012-01-01T00:00:00Z; design `d_k` is stamped `k - 1` hours later.
const EPOCH_START: i64 = 1_325_376_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub p_multi: f64,
    pub tag_pool: usize,
    pub tags_per_design: usize,
    pub p_inherit: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        SynthConfig {
            n,
            p_multi: 0.0143,
            tag_pool: 200,
            tags_per_design: 5,
            p_inherit: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        for (name, p) in [("p_multi", self.p_multi), ("p_inherit", self.p_inherit)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.tag_pool == 0 {
            return bad("tag_pool must be positive".into());
        }
        if self.tags_per_design == 0 {
            return bad("tags_per_design must be positive".into());
        }
        Ok(())
    }
}

fn design_id(k: usize, width: usize) -> DesignId {
    DesignId::new(format!("d{k:0width$}")).expect("non-empty")
}

fn tag_name(t: u64) -> String {
    format!("t{t}")
}

pub fn generate(config: &SynthConfig) -> Result<LineageGraph, SynthError> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    let width = config.n.to_string().len().max(6);
    let target_tags = config.tags_per_design.min(config.tag_pool);

    let mut graph = LineageGraph::new();
    // Each node appears once, plus once per child: uniform draws from this
    // urn are proportional to (children + 1).
    let mut urn: Vec<NodeIx> = Vec::with_capacity(config.n * 2);

    for i in 0..config.n {
        let mut parents: Vec<NodeIx> = Vec::with_capacity(2);
        let mut tags = TagSet::new();
        if i > 0 {
            let wants_two = rng.chance(config.p_multi);
            let first = urn[rng.below(urn.len() as u64) as usize];
            parents.push(first);
            if wants_two && i >= 2 {
                let second = loop {
                    let pick = urn[rng.below(urn.len() as u64) as usize];
                    if pick != first {
                        break pick;
                    }
                };
                parents.push(second);
            }
            for &p in &parents {
                for tag in graph.design(p).tags.iter() {
                    if rng.chance(config.p_inherit) {
                        tags.insert(tag);
                    }
                }
            }
        }
        while tags.len() < target_tags {
            tags.insert(&tag_name(rng.below(config.tag_pool as u64)));
        }

        let k = i + 1;
        let design = Design {
            id: design_id(k, width),
            title: format!("Design {k}"),
            author: "synth".into(),
            created_at: DateTime::<Utc>::from_timestamp(EPOCH_START + 3600 * i as i64, 0),
            tags,
            parent_ids: parents.iter().map(|&p| graph.design(p).id.clone()).collect(),
            is_stub: false,
        };
        let ix = graph.add_design(design).expect("fresh ids, earlier parents");
        urn.push(ix);
        urn.extend_from_slice(&parents);
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_root() {
        let g = generate(&SynthConfig::new(1, 3)).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.design(0).tags.len(), 5);
    }

    #[test]
    fn forced_single_inheritance() {
        let mut cfg = SynthConfig::new(100, 11);
        cfg.p_multi = 0.0;
        let g = generate(&cfg).unwrap();
        assert!(g.multi_parent_designs().is_empty());
        assert_eq!(g.edge_count(), 99);
    }

    #[test]
    fn forced_multi_inheritance() {
        let mut cfg = SynthConfig::new(50, 11);
        cfg.p_multi = 1.0;
        let g = generate(&cfg).unwrap();
        // d_2 only has one earlier design to choose from.
        assert_eq!(g.multi_parent_designs().len(), 48);
        assert_eq!(g.stub_count(), 0);
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig::new(300, 42);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        let ids = |g: &LineageGraph| g.designs().map(|d| (d.id.clone(), d.tags.clone(), d.parent_ids.clone())).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
        let c = generate(&SynthConfig::new(300, 43)).unwrap();
        assert_ne!(ids(&a), ids(&c));
    }

    #[test]
    fn tag_pool_smaller_than_target() {
        let mut cfg = SynthConfig::new(20, 5);
        cfg.tag_pool = 2;
        let g = generate(&cfg).unwrap();
        assert!(g.designs().all(|d| d.tags.len() == 2));
    }

    #[test]
    fn invalid_configs() {
        let base = SynthConfig::new(10, 0);
        let cases = [
            SynthConfig { n: 0, ..base.clone() },
            SynthConfig { p_multi: 1.5, ..base.clone() },
            SynthConfig { p_inherit: -0.1, ..base.clone() },
            SynthConfig { p_multi: f64::NAN, ..base.clone() },
            SynthConfig { tag_pool: 0, ..base.clone() },
            SynthConfig { tags_per_design: 0, ..base.clone() },
        ];
        for cfg in cases {
            assert!(matches!(generate(&cfg), Err(SynthError::InvalidConfig(_))), "{cfg:?}");
        }
    }
}
