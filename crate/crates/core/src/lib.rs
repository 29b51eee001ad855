//! Remix lineage networks.
//!
//! Designs link to the designs they were derived from. This crate rebuilds
//! that network from dataset files, scores every multi-parent design on
//! normalized betweenness and on how independent its parents' tag sets are,
//! splits those designs into quadrants, and ranks unrelated, differently
//! tagged design pairs as candidates for new combinations.
//!
//! ```
//! use remixgraph::{build_graph, parse_jsonl, score_table, classify_quadrants, Orientation};
//!
//! let data = r#"{"id":"box","tags":["box","screw"]}
//! {"id":"cap","tags":["lemon","novelty"]}
//! {"id":"grenade","tags":["container"],"parents":["box","cap"]}
//! "#;
//! let (records, errors) = parse_jsonl(data.as_bytes()).unwrap();
//! assert!(errors.is_empty());
//! let (graph, report) = build_graph(records);
//! assert_eq!(report.records_accepted, 3);
//!
//! let table = score_table(&graph, Orientation::Undirected);
//! assert_eq!(table[0].independence, Some(1.0));
//! let labelled = classify_quadrants(&table, None).unwrap();
//! assert!(labelled[0].quadrant.is_some());
//! ```

pub mod export;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod recommend;
pub mod rng;
pub mod synth;

pub use export::{read_score_csv, render_scatter_svg, write_dot, write_pairs_csv, write_score_csv, ExportError};
pub use ingest::{
    build_graph, build_graph_with_errors, normalize_tags, parse_csv, parse_jsonl, write_jsonl, DesignRecord,
    IngestError, IngestReport, LineError,
};
pub use metrics::{
    betweenness, betweenness_with_workers, classify_quadrants, independence, independence_of, independence_score,
    resolve_thresholds, score_table, score_table_from, summary, CentralityResult, DesignScore, IndependenceResult,
    MetricsError, Orientation, Quadrant, Summary, Thresholds,
};
pub use model::{Design, DesignId, GraphError, LineageGraph, NodeIx, TagSet};
pub use recommend::{
    default_cap, pair_tag_distance, recommend, recommend_with_cap, structural_separation, PairCandidate,
    RecommendError, Strategy,
};
pub use synth::{generate, SynthConfig, SynthError};
