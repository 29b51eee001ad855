//! Independence of a design's parents, measured on their tag sets.
//!
//! For parent tag sets P1..Pn the score is `1 - |P1 ∩ .. ∩ Pn| / |P1 ∪ .. ∪ Pn|`.
//! With two parents this is the Jaccard distance.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{DesignId, GraphError, LineageGraph, TagSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndependenceResult {
    /// `None` when undefined: fewer than two parents, a stub parent, or no tags at all.
    pub value: Option<f64>,
    pub parent_count: usize,
    pub has_stub_parent: bool,
}

/// Score over any family of tag sets. `None` for fewer than two sets or an
/// empty union.
pub fn independence_of<'a, I>(sets: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a TagSet>,
{
    let sets: Vec<&TagSet> = sets.into_iter().collect();
    let (first, rest) = sets.split_first()?;
    if rest.is_empty() {
        return None;
    }
    let shared = first.iter().filter(|t| rest.iter().all(|s| s.contains(t))).count();
    let union: BTreeSet<&str> = sets.iter().flat_map(|s| s.iter()).collect();
    if union.is_empty() {
        return None;
    }
    Some(1.0 - shared as f64 / union.len() as f64)
}

pub fn independence(graph: &LineageGraph, id: &DesignId) -> Result<IndependenceResult, GraphError> {
    let ix = graph.index_of(id)?;
    let parents = graph.parent_indices(ix);
    let has_stub_parent = parents.iter().any(|&p| graph.design(p).is_stub);
    let value = if has_stub_parent {
        None
    } else {
        independence_of(parents.iter().map(|&p| &graph.design(p).tags))
    };
    Ok(IndependenceResult {
        value,
        parent_count: parents.len(),
        has_stub_parent,
    })
}

/// Just the value of [`independence`].
pub fn independence_score(graph: &LineageGraph, id: &DesignId) -> Result<Option<f64>, GraphError> {
    independence(graph, id).map(|r| r.value)
}
