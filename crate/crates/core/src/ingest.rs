//! Dataset parsing and graph construction.
//!
//! Two input shapes are accepted: newline-delimited JSON records and a pair
//! of CSV files (nodes plus child/parent edges). Both produce
//! [`DesignRecord`]s, which [`build_graph`] turns into a [`LineageGraph`]
//! while tallying every rejection in an [`IngestReport`].

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Read};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Design, DesignId, GraphError, LineageGraph, TagSet};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    #[error("{file} header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch {
        file: InputSource,
        expected: String,
        found: String,
    },
}

/// Which input a line came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSource {
    Jsonl,
    Nodes,
    Edges,
}

impl fmt::Display for InputSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputSource::Jsonl => "jsonl",
            InputSource::Nodes => "nodes",
            InputSource::Edges => "edges",
        })
    }
}

/// A line that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    pub source: InputSource,
    pub line: usize,
    pub reason: String,
}

/// A parsed but not yet normalized design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRecord {
    pub line: usize,
    pub id: String,
    pub title: String,
    pub author: String,
    pub created_at: Option<DateTime<Utc>>,
    pub tags: Vec<String>,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Malformed,
    Duplicate,
    SelfLoop,
    CycleEdge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: RejectReason,
    pub detail: String,
}

/// Tallies for one ingest run.
///
/// `records_read == records_accepted + duplicates_rejected +
/// self_loops_rejected + malformed` always holds. Cycle edges do not reject
/// their record, only the offending edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub records_accepted: usize,
    pub duplicates_rejected: usize,
    pub self_loops_rejected: usize,
    pub malformed: usize,
    pub cycle_edges_rejected: usize,
    pub stubs_created: usize,
    pub timestamp_violations: usize,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    /// Folds parse-stage line errors into the totals.
    pub fn add_line_errors(&mut self, errors: &[LineError]) {
        for err in errors {
            self.records_read += 1;
            self.malformed += 1;
            self.rejections.push(Rejection {
                line: err.line,
                reason: RejectReason::Malformed,
                detail: format!("{}: {}", err.source, err.reason),
            });
        }
        self.rejections.sort_by_key(|r| r.line);
    }

    pub fn totals_balance(&self) -> bool {
        self.records_read
            == self.records_accepted + self.duplicates_rejected + self.self_loops_rejected + self.malformed
    }

    /// Any rejected record or edge.
    pub fn has_data_errors(&self) -> bool {
        self.malformed + self.duplicates_rejected + self.self_loops_rejected + self.cycle_edges_rejected > 0
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("records_read", self.records_read),
            ("records_accepted", self.records_accepted),
            ("duplicates_rejected", self.duplicates_rejected),
            ("self_loops_rejected", self.self_loops_rejected),
            ("malformed", self.malformed),
            ("cycle_edges_rejected", self.cycle_edges_rejected),
            ("stubs_created", self.stubs_created),
            ("timestamp_violations", self.timestamp_violations),
        ];
        for (name, value) in rows {
            writeln!(f, "{name:<22}{value:>10}")?;
        }
        for r in &self.rejections {
            let reason = match r.reason {
                RejectReason::Malformed => "malformed",
                RejectReason::Duplicate => "duplicate",
                RejectReason::SelfLoop => "self_loop",
                RejectReason::CycleEdge => "cycle_edge",
            };
            writeln!(f, "line {}: {reason}: {}", r.line, r.detail)?;
        }
        Ok(())
    }
}

/// Case-fold and whitespace normalization; no stemming.
pub fn normalize_tags<S: AsRef<str>>(raw: &[S]) -> TagSet {
    raw.iter().map(AsRef::as_ref).collect()
}

/// Accepts RFC 3339 text, or integer epoch seconds as a number or string.
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(secs) = raw.parse::<i64>() {
        return DateTime::from_timestamp(secs, 0);
    }
    DateTime::parse_from_rfc3339(raw).ok().map(|t| t.with_timezone(&Utc))
}

#[derive(Deserialize)]
struct JsonRecord {
    id: String,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    author: Option<String>,
    #[serde(default)]
    created_at: Option<serde_json::Value>,
    #[serde(default)]
    tags: Option<Vec<String>>,
    #[serde(default)]
    parents: Option<Vec<String>>,
}

fn json_timestamp(value: Option<serde_json::Value>) -> Result<Option<DateTime<Utc>>, String> {
    use serde_json::Value;
    match value {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => parse_timestamp(&s)
            .map(Some)
            .ok_or_else(|| format!("bad created_at `{s}`")),
        Some(Value::Number(n)) => n
            .as_i64()
            .and_then(|secs| DateTime::from_timestamp(secs, 0))
            .map(Some)
            .ok_or_else(|| format!("bad created_at `{n}`")),
        Some(other) => Err(format!("bad created_at `{other}`")),
    }
}

fn record_from_json(line: usize, text: &str) -> Result<DesignRecord, String> {
    let raw: JsonRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if raw.id.trim().is_empty() {
        return Err("empty id".into());
    }
    Ok(DesignRecord {
        line,
        id: raw.id,
        title: raw.title.unwrap_or_default(),
        author: raw.author.unwrap_or_default(),
        created_at: json_timestamp(raw.created_at)?,
        tags: raw.tags.unwrap_or_default(),
        parents: raw.parents.unwrap_or_default(),
    })
}

/// Parses newline-delimited JSON. Blank lines are skipped; a bad line is
/// reported and parsing continues.
pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<(Vec<DesignRecord>, Vec<LineError>), IngestError> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let text = match line {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                errors.push(LineError {
                    source: InputSource::Jsonl,
                    line: line_no,
                    reason: "invalid UTF-8".into(),
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if text.trim().is_empty() {
            continue;
        }
        match record_from_json(line_no, &text) {
            Ok(record) => records.push(record),
            Err(reason) => errors.push(LineError {
                source: InputSource::Jsonl,
                line: line_no,
                reason,
            }),
        }
    }
    Ok((records, errors))
}

pub const NODES_HEADER: [&str; 5] = ["id", "title", "author", "created_at", "tags"];
pub const EDGES_HEADER: [&str; 2] = ["child_id", "parent_id"];

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

fn check_header<R: Read>(
    reader: &mut csv::Reader<R>,
    file: InputSource,
    expected: &[&str],
) -> Result<(), IngestError> {
    let found = match reader.headers() {
        Ok(h) => h.iter().map(str::trim).collect::<Vec<_>>().join(","),
        Err(e) => match e.into_kind() {
            csv::ErrorKind::Io(e) => return Err(e.into()),
            other => format!("{other:?}"),
        },
    };
    let expected = expected.join(",");
    // An empty file has no header at all; treat it as having no rows.
    if found.is_empty() || found == expected {
        Ok(())
    } else {
        Err(IngestError::HeaderMismatch { file, expected, found })
    }
}

fn csv_line(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map_or(fallback, |p| p.line() as usize)
}

/// Parses the nodes/edges CSV pair. Edge rows are joined onto their child
/// row in edge-file order; a parent id with no node row is kept as a
/// reference and becomes a stub later.
pub fn parse_csv<N: Read, E: Read>(
    nodes: N,
    edges: E,
) -> Result<(Vec<DesignRecord>, Vec<LineError>), IngestError> {
    let mut records: Vec<DesignRecord> = Vec::new();
    let mut errors = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();

    let mut nodes = csv_reader(nodes);
    check_header(&mut nodes, InputSource::Nodes, &NODES_HEADER)?;
    let mut row = csv::StringRecord::new();
    let mut fallback = 1;
    loop {
        fallback += 1;
        match nodes.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(fallback, |p| p.line() as usize);
                match e.into_kind() {
                    csv::ErrorKind::Io(e) => return Err(e.into()),
                    other => errors.push(LineError {
                        source: InputSource::Nodes,
                        line,
                        reason: format!("{other:?}"),
                    }),
                }
                continue;
            }
        }
        let line = csv_line(&row, fallback);
        if row.len() != NODES_HEADER.len() {
            errors.push(LineError {
                source: InputSource::Nodes,
                line,
                reason: format!("expected {} fields, found {}", NODES_HEADER.len(), row.len()),
            });
            continue;
        }
        let id = row[0].trim();
        if id.is_empty() {
            errors.push(LineError { source: InputSource::Nodes, line, reason: "empty id".into() });
            continue;
        }
        let created_at = match row[3].trim() {
            "" => None,
            raw => match parse_timestamp(raw) {
                Some(t) => Some(t),
                None => {
                    errors.push(LineError {
                        source: InputSource::Nodes,
                        line,
                        reason: format!("bad created_at `{raw}`"),
                    });
                    continue;
                }
            },
        };
        let tags = row[4]
            .split('|')
            .filter(|t| !t.trim().is_empty())
            .map(str::to_owned)
            .collect();
        // Duplicates are kept here so build_graph can report them.
        by_id.entry(id.to_owned()).or_insert(records.len());
        records.push(DesignRecord {
            line,
            id: id.to_owned(),
            title: row[1].to_owned(),
            author: row[2].to_owned(),
            created_at,
            tags,
            parents: Vec::new(),
        });
    }

    let mut edges = csv_reader(edges);
    check_header(&mut edges, InputSource::Edges, &EDGES_HEADER)?;
    let mut fallback = 1;
    loop {
        fallback += 1;
        match edges.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(fallback, |p| p.line() as usize);
                match e.into_kind() {
                    csv::ErrorKind::Io(e) => return Err(e.into()),
                    other => errors.push(LineError {
                        source: InputSource::Edges,
                        line,
                        reason: format!("{other:?}"),
                    }),
                }
                continue;
            }
        }
        let line = csv_line(&row, fallback);
        if row.len() != EDGES_HEADER.len() {
            errors.push(LineError {
                source: InputSource::Edges,
                line,
                reason: format!("expected {} fields, found {}", EDGES_HEADER.len(), row.len()),
            });
            continue;
        }
        let (child, parent) = (row[0].trim(), row[1].trim());
        if parent.is_empty() {
            errors.push(LineError { source: InputSource::Edges, line, reason: "empty parent_id".into() });
            continue;
        }
        match by_id.get(child) {
            Some(&at) => records[at].parents.push(parent.to_owned()),
            None => errors.push(LineError {
                source: InputSource::Edges,
                line,
                reason: format!("unknown child `{child}`"),
            }),
        }
    }
    Ok((records, errors))
}

/// Inserts records in order and reports every rejection.
///
/// Duplicate ids: the first record wins. A parent edge that would close a
/// cycle is dropped individually; the record itself is still accepted.
pub fn build_graph(records: Vec<DesignRecord>) -> (LineageGraph, IngestReport) {
    let mut graph = LineageGraph::new();
    let mut report = IngestReport::default();

    for rec in records {
        report.records_read += 1;
        let line = rec.line;
        let id = match DesignId::new(rec.id) {
            Ok(id) => id,
            Err(_) => {
                report.malformed += 1;
                report.rejections.push(Rejection {
                    line,
                    reason: RejectReason::Malformed,
                    detail: "empty id".into(),
                });
                continue;
            }
        };
        if graph.get(&id).is_some_and(|d| !d.is_stub) {
            report.duplicates_rejected += 1;
            report.rejections.push(Rejection {
                line,
                reason: RejectReason::Duplicate,
                detail: format!("design `{id}` already defined"),
            });
            continue;
        }
        let mut parents = Vec::with_capacity(rec.parents.len());
        let mut malformed_parent = false;
        for p in rec.parents {
            match DesignId::new(p) {
                Ok(p) if !parents.contains(&p) => parents.push(p),
                Ok(_) => {}
                Err(_) => malformed_parent = true,
            }
        }
        if malformed_parent {
            report.malformed += 1;
            report.rejections.push(Rejection {
                line,
                reason: RejectReason::Malformed,
                detail: format!("design `{id}` lists an empty parent id"),
            });
            continue;
        }
        if parents.contains(&id) {
            report.self_loops_rejected += 1;
            report.rejections.push(Rejection {
                line,
                reason: RejectReason::SelfLoop,
                detail: format!("design `{id}` lists itself as a parent"),
            });
            continue;
        }

        let design = Design {
            id: id.clone(),
            title: rec.title,
            author: rec.author,
            created_at: rec.created_at,
            tags: normalize_tags(&rec.tags),
            parent_ids: Vec::new(),
            is_stub: false,
        };
        graph
            .add_design(design)
            .expect("duplicate and self-loop cases are filtered above");
        report.records_accepted += 1;

        for parent in parents {
            graph.ensure_node(parent.clone());
            match graph.add_edge(&id, &parent) {
                Ok(()) => {}
                Err(GraphError::Cycle { .. }) => {
                    report.cycle_edges_rejected += 1;
                    report.rejections.push(Rejection {
                        line,
                        reason: RejectReason::CycleEdge,
                        detail: format!("edge {id} -> {parent} closes a cycle"),
                    });
                }
                Err(e) => unreachable!("unexpected edge error: {e}"),
            }
        }
    }

    report.stubs_created = graph.stub_count();
    report.timestamp_violations = graph.timestamp_violations();
    (graph, report)
}

/// Builds a graph and folds parse errors into the report in one step.
pub fn build_graph_with_errors(records: Vec<DesignRecord>, errors: &[LineError]) -> (LineageGraph, IngestReport) {
    let (graph, mut report) = build_graph(records);
    report.add_line_errors(errors);
    (graph, report)
}

#[derive(Serialize)]
struct JsonOut<'a> {
    id: &'a str,
    title: &'a str,
    author: &'a str,
    created_at: Option<String>,
    tags: Vec<&'a str>,
    parents: Vec<&'a str>,
}

/// Writes the canonical JSON Lines form of a graph: one line per non-stub
/// design, sorted by id. Stubs are implied by the parent references.
pub fn write_jsonl<W: io::Write>(graph: &LineageGraph, mut out: W) -> io::Result<()> {
    for ix in graph.sorted_indices() {
        let d = graph.design(ix);
        if d.is_stub {
            continue;
        }
        write_design_line(d, &mut out)?;
    }
    out.flush()
}

pub(crate) fn write_design_line<W: io::Write>(d: &Design, out: &mut W) -> io::Result<()> {
    let row = JsonOut {
        id: d.id.as_str(),
        title: &d.title,
        author: &d.author,
        created_at: d
            .created_at
            .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true)),
        tags: d.tags.iter().collect(),
        parents: d.parent_ids.iter().map(DesignId::as_str).collect(),
    };
    serde_json::to_writer(&mut *out, &row)?;
    out.write_all(b"\n")
}
