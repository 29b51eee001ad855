//! The two scoring dimensions and what is built on them.
//!
//! * [`centrality`]: exact normalized betweenness, optionally parallel.
//! * [`independence`]: one minus the intersection/union ratio of the parent tag sets.
//! * [`quadrant`]: per-design score rows and their four-way classification.
//! * [`summary`]: whole-graph counts.

pub mod centrality;
pub mod independence;
pub mod quadrant;
pub mod summary;

pub use centrality::{betweenness, betweenness_with_workers, CentralityResult, Orientation};
pub use independence::{independence, independence_of, independence_score, IndependenceResult};
pub use quadrant::{
    classify_quadrants, median_thresholds, resolve_thresholds, score_table, score_table_from, DesignScore,
    MetricsError, Quadrant, Thresholds,
};
pub use summary::{summary, Summary};
