//! Score rows for multi-parent designs and their quadrant labels.
//!
//! Axes: x is normalized betweenness, y is independence. A value counts as
//! "high" only when it is strictly above its threshold.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::centrality::{betweenness, CentralityResult, Orientation};
use super::independence::independence;
use crate::model::{DesignId, LineageGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no row has a defined independence score and no thresholds were given")]
    EmptyTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Quadrant {
    /// Low betweenness, low independence.
    Q1,
    /// High betweenness, low independence.
    Q2,
    /// Low betweenness, high independence.
    Q3,
    /// High betweenness, high independence.
    Q4,
}

impl Quadrant {
    pub fn classify(betweenness: f64, independence: f64, thresholds: Thresholds) -> Quadrant {
        let high_b = betweenness > thresholds.betweenness;
        let high_i = independence > thresholds.independence;
        match (high_b, high_i) {
            (false, false) => Quadrant::Q1,
            (true, false) => Quadrant::Q2,
            (false, true) => Quadrant::Q3,
            (true, true) => Quadrant::Q4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::Q1 => "Q1",
            Quadrant::Q2 => "Q2",
            Quadrant::Q3 => "Q3",
            Quadrant::Q4 => "Q4",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quadrant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q1" => Ok(Quadrant::Q1),
            "Q2" => Ok(Quadrant::Q2),
            "Q3" => Ok(Quadrant::Q3),
            "Q4" => Ok(Quadrant::Q4),
            other => Err(format!("unknown quadrant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub betweenness: f64,
    pub independence: f64,
}

impl Thresholds {
    pub fn new(betweenness: f64, independence: f64) -> Self {
        Thresholds { betweenness, independence }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignScore {
    pub id: DesignId,
    pub betweenness: f64,
    pub independence: Option<f64>,
    pub quadrant: Option<Quadrant>,
}

/// One row per multi-parent design, sorted by id.
pub fn score_table(graph: &LineageGraph, orientation: Orientation) -> Vec<DesignScore> {
    if graph.multi_parent_designs().is_empty() {
        return Vec::new();
    }
    score_table_from(graph, &betweenness(graph, orientation))
}

/// Like [`score_table`] with a precomputed centrality result.
pub fn score_table_from(graph: &LineageGraph, centrality: &CentralityResult) -> Vec<DesignScore> {
    graph
        .multi_parent_designs()
        .into_iter()
        .map(|id| {
            let ix = graph.index_of(&id).expect("listed designs resolve");
            let independence = independence(graph, &id).expect("listed designs resolve").value;
            DesignScore {
                id,
                betweenness: centrality.normalized[ix],
                independence,
                quadrant: None,
            }
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Per-dimension medians over rows with a defined independence score.
pub fn median_thresholds(table: &[DesignScore]) -> Option<Thresholds> {
    let (mut bs, mut is): (Vec<f64>, Vec<f64>) = table
        .iter()
        .filter_map(|r| r.independence.map(|i| (r.betweenness, i)))
        .unzip();
    if bs.is_empty() {
        return None;
    }
    Some(Thresholds::new(median(&mut bs), median(&mut is)))
}

/// The given thresholds, or the medians when none were given.
pub fn resolve_thresholds(table: &[DesignScore], thresholds: Option<Thresholds>) -> Result<Thresholds, MetricsError> {
    match thresholds {
        Some(t) => Ok(t),
        None => median_thresholds(table).ok_or(MetricsError::EmptyTable),
    }
}

/// Labels every row with a defined independence score. Undefined rows pass
/// through without a label.
pub fn classify_quadrants(
    table: &[DesignScore],
    thresholds: Option<Thresholds>,
) -> Result<Vec<DesignScore>, MetricsError> {
    let t = resolve_thresholds(table, thresholds)?;
    Ok(table
        .iter()
        .map(|row| DesignScore {
            quadrant: row.independence.map(|i| Quadrant::classify(row.betweenness, i, t)),
            ..row.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Design, TagSet};

    fn row(name: &str, b: f64, i: Option<f64>) -> DesignScore {
        DesignScore {
            id: DesignId::new(name).unwrap(),
            betweenness: b,
            independence: i,
            quadrant: None,
        }
    }

    fn labels(rows: &[DesignScore]) -> Vec<Option<Quadrant>> {
        rows.iter().map(|r| r.quadrant).collect()
    }

    #[test]
    fn single_row_ties_fall_low() {
        let out = classify_quadrants(&[row("a", 0.3, Some(0.7))], None).unwrap();
        assert_eq!(labels(&out), vec![Some(Quadrant::Q1)]);
    }

    #[test]
    fn four_corners() {
        let table = [
            row("a", 0.1, Some(0.1)),
            row("b", 0.9, Some(0.1)),
            row("c", 0.1, Some(0.9)),
            row("d", 0.9, Some(0.9)),
        ];
        let out = classify_quadrants(&table, Some(Thresholds::new(0.5, 0.5))).unwrap();
        use Quadrant::*;
        assert_eq!(labels(&out), vec![Some(Q1), Some(Q2), Some(Q3), Some(Q4)]);
        // Medians are 0.5 on both axes here as well.
        assert_eq!(classify_quadrants(&table, None).unwrap(), out);
    }

    #[test]
    fn zero_thresholds_put_positive_scores_in_q4() {
        let table = [row("a", 0.2, Some(0.4)), row("b", 1e-9, Some(1.0))];
        let out = classify_quadrants(&table, Some(Thresholds::new(0.0, 0.0))).unwrap();
        assert!(out.iter().all(|r| r.quadrant == Some(Quadrant::Q4)));
    }

    #[test]
    fn undefined_rows_pass_through() {
        let table = [row("a", 0.2, None), row("b", 0.2, Some(0.4))];
        let out = classify_quadrants(&table, None).unwrap();
        assert_eq!(labels(&out), vec![None, Some(Quadrant::Q1)]);
        assert_eq!(
            classify_quadrants(&[row("a", 0.2, None)], None),
            Err(MetricsError::EmptyTable)
        );
        assert_eq!(classify_quadrants(&[], None), Err(MetricsError::EmptyTable));
    }

    #[test]
    fn score_table_rows() {
        let id = |s: &str| DesignId::new(s).unwrap();
        let tags = |l: &[&str]| l.iter().collect::<TagSet>();
        let mut g = LineageGraph::new();
        assert!(score_table(&g, Orientation::Undirected).is_empty());
        g.add_design(Design::new(id("a")).with_tags(tags(&["x", "y"]))).unwrap();
        g.add_design(Design::new(id("b")).with_tags(tags(&["y", "z"]))).unwrap();
        g.add_design(Design::new(id("c")).with_parents([id("a"), id("b")])).unwrap();
        g.add_design(Design::new(id("d")).with_parents([id("c")])).unwrap();
        g.add_design(Design::new(id("e")).with_parents([id("d"), id("ghost")])).unwrap();

        let table = score_table(&g, Orientation::Undirected);
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].id, id("c"));
        assert!((table[0].independence.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(table[0].betweenness > 0.0);
        assert_eq!(table[1].id, id("e"));
        assert_eq!(table[1].independence, None);
        let labelled = classify_quadrants(&table, None).unwrap();
        assert_eq!(labelled[1].quadrant, None);
    }
}
