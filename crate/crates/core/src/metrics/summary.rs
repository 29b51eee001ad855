use std::fmt;

use serde::Serialize;

use crate::model::LineageGraph;

/// Whole-graph counts. Stubs are excluded from `total_designs`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total_designs: usize,
    pub stub_count: usize,
    pub edge_count: usize,
    /// Designs listing two or more parents, stub parents included.
    pub multi_parent_count: usize,
    /// Multi-parent designs whose parents all resolved to real designs.
    pub multi_parent_resolved_count: usize,
    /// `multi_parent_count / total_designs`, or 0 for an empty graph.
    pub multi_parent_ratio: f64,
    pub component_count: usize,
    pub timestamp_violations: usize,
}

pub fn summary(graph: &LineageGraph) -> Summary {
    let multi = graph.multi_parent_designs();
    let resolved = multi
        .iter()
        .filter(|id| {
            let ix = graph.index_of(id).expect("listed designs resolve");
            graph.parent_indices(ix).iter().all(|&p| !graph.design(p).is_stub)
        })
        .count();
    let total = graph.node_count() - graph.stub_count();
    Summary {
        total_designs: total,
        stub_count: graph.stub_count(),
        edge_count: graph.edge_count(),
        multi_parent_count: multi.len(),
        multi_parent_resolved_count: resolved,
        multi_parent_ratio: if total == 0 { 0.0 } else { multi.len() as f64 / total as f64 },
        component_count: graph.weak_components().len(),
        timestamp_violations: graph.timestamp_violations(),
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ints = [
            ("total_designs", self.total_designs),
            ("stub_count", self.stub_count),
            ("edge_count", self.edge_count),
            ("multi_parent_count", self.multi_parent_count),
            ("multi_parent_resolved", self.multi_parent_resolved_count),
        ];
        for (name, value) in ints {
            writeln!(f, "{name:<24}{value:>12}")?;
        }
        writeln!(f, "{:<24}{:>12.6}", "multi_parent_ratio", self.multi_parent_ratio)?;
        writeln!(f, "{:<24}{:>12}", "component_count", self.component_count)?;
        writeln!(f, "{:<24}{:>12}", "timestamp_violations", self.timestamp_violations)
    }
}
