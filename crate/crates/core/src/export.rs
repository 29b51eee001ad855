//! Output formats: score and pair CSV, Graphviz DOT, and an SVG scatter plot.
//!
//! All writers emit UTF-8 with LF line endings and are byte-deterministic
//! for a given input. Floats use Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::metrics::{DesignScore, Quadrant, Thresholds};
use crate::model::{DesignId, LineageGraph};
use crate::recommend::PairCandidate;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("score table header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("score table line {line}: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("no rows with a defined independence score to plot")]
    NothingToPlot,
}

pub const SCORE_HEADER: [&str; 4] = ["id", "betweenness", "independence", "quadrant"];
pub const PAIR_HEADER: [&str; 5] = ["id_a", "id_b", "tag_distance", "structural_separation", "combined_score"];

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_score_csv<W: Write>(rows: &[DesignScore], out: W) -> Result<(), ExportError> {
    let mut w = csv_writer(out);
    w.write_record(SCORE_HEADER)?;
    for r in rows {
        let independence = r.independence.map_or_else(|| "NA".to_owned(), |v| v.to_string());
        let quadrant = r.quadrant.map_or("", Quadrant::as_str);
        w.write_record([r.id.as_str(), &r.betweenness.to_string(), &independence, quadrant])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_score_csv`].
pub fn read_score_csv<R: Read>(input: R) -> Result<Vec<DesignScore>, ExportError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found = r.headers()?.iter().collect::<Vec<_>>().join(",");
    let expected = SCORE_HEADER.join(",");
    if found != expected {
        return Err(ExportError::HeaderMismatch { expected, found });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |reason: String| ExportError::BadRow { line, reason };
        let id = DesignId::new(&rec[0]).map_err(|e| bad(e.to_string()))?;
        let betweenness: f64 = rec[1].trim().parse().map_err(|_| bad(format!("bad betweenness `{}`", &rec[1])))?;
        let independence = match rec[2].trim() {
            "NA" => None,
            v => Some(v.parse::<f64>().map_err(|_| bad(format!("bad independence `{v}`")))?),
        };
        let quadrant = match rec[3].trim() {
            "" => None,
            q => Some(q.parse::<Quadrant>().map_err(bad)?),
        };
        rows.push(DesignScore { id, betweenness, independence, quadrant });
    }
    Ok(rows)
}

pub fn write_pairs_csv<W: Write>(pairs: &[PairCandidate], out: W) -> Result<(), ExportError> {
    let mut w = csv_writer(out);
    w.write_record(PAIR_HEADER)?;
    for p in pairs {
        w.write_record([
            p.id_a.as_str(),
            p.id_b.as_str(),
            &p.tag_distance.to_string(),
            &p.structural_separation.to_string(),
            &p.combined_score.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz digraph with edges drawn child -> parent. Multi-parent designs
/// are doubled boxes, stubs dashed. Nodes and edges follow id order.
pub fn write_dot<W: Write>(graph: &LineageGraph, mut out: W) -> io::Result<()> {
    let order = graph.sorted_indices();
    writeln!(out, "digraph lineage {{")?;
    writeln!(out, "  rankdir=BT;")?;
    writeln!(out, "  node [shape=ellipse];")?;
    for &ix in &order {
        let d = graph.design(ix);
        let name = dot_quote(d.id.as_str());
        if d.is_stub {
            writeln!(out, "  {name} [style=dashed];")?;
        } else if graph.parent_indices(ix).len() >= 2 {
            writeln!(out, "  {name} [shape=box, peripheries=2];")?;
        } else {
            writeln!(out, "  {name};")?;
        }
    }
    for &ix in &order {
        let child = dot_quote(graph.design(ix).id.as_str());
        for &p in graph.parent_indices(ix) {
            writeln!(out, "  {child} -> {};", dot_quote(graph.design(p).id.as_str()))?;
        }
    }
    writeln!(out, "}}")?;
    out.flush()
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub const SVG_WIDTH: f64 = 640.0;
pub const SVG_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn quadrant_colour(q: Quadrant) -> &'static str {
    match q {
        Quadrant::Q1 => "#4c72b0",
        Quadrant::Q2 => "#dd8452",
        Quadrant::Q3 => "#55a868",
        Quadrant::Q4 => "#c44e52",
    }
}

/// Self-contained scatter of independence against normalized betweenness.
///
/// One `circle.marker` per row with a defined independence score and exactly
/// two `line.threshold` elements. The x axis spans `[0, xmax]` where `xmax`
/// covers the data and threshold with 10% headroom (never past 1 unless the
/// data does); y spans `[0, 1]`.
pub fn render_scatter_svg(rows: &[DesignScore], thresholds: Thresholds) -> Result<String, ExportError> {
    let points: Vec<(&DesignScore, f64)> = rows
        .iter()
        .filter_map(|r| r.independence.map(|i| (r, i)))
        .collect();
    if points.is_empty() {
        return Err(ExportError::NothingToPlot);
    }
    let data_max = points
        .iter()
        .map(|(r, _)| r.betweenness)
        .fold(thresholds.betweenness, f64::max);
    let xmax = if data_max > 0.0 { (data_max * 1.1).min(1.0).max(data_max) } else { 1.0 };

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x / xmax).clamp(0.0, 1.0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - y.clamp(0.0, 1.0)) * plot_h;
    let bottom = MARGIN_TOP + plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = SVG_WIDTH,
        h = SVG_HEIGHT
    );
    let _ = writeln!(s, r#"<rect class="background" x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.2}" y="24" text-anchor="middle" font-size="15">Multi-parent design scores</text>"#,
        SVG_WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333"/>"##
    );

    let mut ticks = String::new();
    for step in 0..=4 {
        let f = step as f64 / 4.0;
        let (x, y) = (sx(f * xmax), sy(f));
        let _ = write!(ticks, "M{x:.2} {bottom:.2}v5M{MARGIN_LEFT:.2} {y:.2}h-5");
        let _ = writeln!(s, r#"<text class="tick" x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bottom + 18.0, fmt_tick(f * xmax));
        let _ = writeln!(s, r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_LEFT - 8.0, y + 4.0, fmt_tick(f));
    }
    let _ = writeln!(s, r##"<path class="ticks" d="{ticks}" stroke="#333"/>"##);
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">normalized betweenness</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="16" y="{0:.2}" text-anchor="middle" transform="rotate(-90 16 {0:.2})">independence</text>"#,
        MARGIN_TOP + plot_h / 2.0
    );

    let tx = sx(thresholds.betweenness);
    let ty = sy(thresholds.independence);
    let _ = writeln!(
        s,
        r##"<line class="threshold" x1="{tx:.2}" y1="{MARGIN_TOP:.2}" x2="{tx:.2}" y2="{bottom:.2}" stroke="#888" stroke-dasharray="4 3"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line class="threshold" x1="{MARGIN_LEFT:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        MARGIN_LEFT + plot_w
    );

    for (row, independence) in points {
        let q = row
            .quadrant
            .unwrap_or_else(|| Quadrant::classify(row.betweenness, independence, thresholds));
        let _ = writeln!(
            s,
            r#"<circle class="marker {q}" cx="{:.2}" cy="{:.2}" r="4" fill="{}" fill-opacity="0.8"><title>{} ({}, {})</title></circle>"#,
            sx(row.betweenness),
            sy(independence),
            quadrant_colour(q),
            xml_escape(row.id.as_str()),
            row.betweenness,
            independence
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v >= 0.01 {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Design;

    fn row(name: &str, b: f64, i: Option<f64>, q: Option<Quadrant>) -> DesignScore {
        DesignScore { id: DesignId::new(name).unwrap(), betweenness: b, independence: i, quadrant: q }
    }

    #[test]
    fn score_csv_format() {
        let rows = [row("a", 0.25, Some(0.5), Some(Quadrant::Q3)), row("b,c", 0.0, None, None)];
        let mut out = Vec::new();
        write_score_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "id,betweenness,independence,quadrant\na,0.25,0.5,Q3\n\"b,c\",0,NA,\n");
        assert_eq!(read_score_csv(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn score_csv_rejects_bad_input() {
        assert!(matches!(read_score_csv(&b"id,x\n"[..]), Err(ExportError::HeaderMismatch { .. })));
        let bad = "id,betweenness,independence,quadrant\na,zero,NA,\n";
        assert!(matches!(read_score_csv(bad.as_bytes()), Err(ExportError::BadRow { line: 2, .. })));
    }

    #[test]
    fn pair_csv_header_only_when_empty() {
        let mut out = Vec::new();
        write_pairs_csv(&[], &mut out).unwrap();
        assert_eq!(out, b"id_a,id_b,tag_distance,structural_separation,combined_score\n");
    }

    #[test]
    fn dot_chain_and_fork() {
        let id = |s: &str| DesignId::new(s).unwrap();
        let mut g = LineageGraph::new();
        g.add_design(Design::new(id("a"))).unwrap();
        g.add_design(Design::new(id("b")).with_parents([id("a")])).unwrap();
        let mut out = Vec::new();
        write_dot(&g, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().filter(|l| l.contains("->")).count(), 1);
        assert!(text.contains("\"b\" -> \"a\";"));

        let mut out = Vec::new();
        write_dot(&LineageGraph::new(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "digraph lineage {\n  rankdir=BT;\n  node [shape=ellipse];\n}\n");
    }

    #[test]
    fn dot_quotes_awkward_ids() {
        assert_eq!(dot_quote("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }

    #[test]
    fn svg_counts() {
        let rows = [
            row("a", 0.1, Some(0.1), None),
            row("b", 0.9, Some(0.1), None),
            row("c", 0.1, Some(0.9), None),
            row("d<&>", 0.9, Some(0.9), None),
            row("skip", 0.9, None, None),
        ];
        let svg = render_scatter_svg(&rows, Thresholds::new(0.5, 0.5)).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<line").count(), 2);
        assert!(svg.contains("d&lt;&amp;&gt;"));
        assert!(matches!(
            render_scatter_svg(&rows[4..], Thresholds::new(0.5, 0.5)),
            Err(ExportError::NothingToPlot)
        ));
    }
}
