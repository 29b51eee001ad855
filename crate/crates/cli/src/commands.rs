use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::Path;

use remixgraph::{
    build_graph_with_errors, classify_quadrants, generate, parse_csv, parse_jsonl, read_score_csv, recommend_with_cap,
    render_scatter_svg, resolve_thresholds, score_table, summary, write_dot, write_jsonl, write_pairs_csv,
    write_score_csv, DesignScore, ExportError, IngestError, IngestReport, LineageGraph, MetricsError, Strategy,
    SynthConfig, Thresholds,
};

use crate::{Command, Failure, Format, InputArgs, ScoreSource, StrategyArg, ThresholdArgs};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { input, output, strict } => ingest(&input, output.as_deref(), strict),
        Command::Stats { input, json } => {
            let (graph, _) = load(&input)?;
            let s = summary(&graph);
            let text = if json {
                let mut t = serde_json::to_string_pretty(&s).expect("summary serializes");
                t.push('\n');
                t
            } else {
                s.to_string()
            };
            emit("-", text.as_bytes())
        }
        Command::Score { input, orientation, output } => {
            let (graph, _) = load(&input)?;
            let table = score_table(&graph, orientation.into());
            if table.is_empty() {
                return Err(Failure::Empty("no multi-parent designs to score".into()));
            }
            let mut buf = Vec::new();
            write_score_csv(&table, &mut buf).map_err(export_failure)?;
            emit(&output, &buf)
        }
        Command::Quadrants { source, thresholds, output } => {
            let (table, t) = classified(&source, &thresholds)?;
            let labelled = classify_quadrants(&table, Some(t)).map_err(metrics_failure)?;
            let mut buf = Vec::new();
            write_score_csv(&labelled, &mut buf).map_err(export_failure)?;
            emit(&output, &buf)
        }
        Command::Recommend { input, k, strategy, samples, seed, cap, output } => {
            let (graph, _) = load(&input)?;
            let strategy = match strategy {
                StrategyArg::Exhaustive => Strategy::Exhaustive,
                StrategyArg::Sampled => Strategy::Sampled {
                    samples: samples.ok_or_else(|| Failure::Usage("--samples is required".into()))?,
                    seed: seed.ok_or_else(|| Failure::Usage("--seed is required".into()))?,
                },
            };
            let cap = match cap {
                Some(c) => c as usize,
                None => remixgraph::default_cap(&graph),
            };
            let pairs = recommend_with_cap(&graph, k as usize, strategy, cap).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut buf = Vec::new();
            write_pairs_csv(&pairs, &mut buf).map_err(export_failure)?;
            emit(&output, &buf)
        }
        Command::ExportDot { input, output } => {
            let (graph, _) = load(&input)?;
            let mut buf = Vec::new();
            write_dot(&graph, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            emit(&output, &buf)
        }
        Command::Plot { source, thresholds, output } => {
            let (table, t) = classified(&source, &thresholds)?;
            let svg = render_scatter_svg(&table, t).map_err(export_failure)?;
            emit(&output, svg.as_bytes())
        }
        Command::Synth { n, p_multi, tag_pool, tags_per_design, p_inherit, seed, output } => {
            let config = SynthConfig { n, p_multi, tag_pool, tags_per_design, p_inherit, seed };
            let graph = generate(&config).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut buf = Vec::new();
            write_jsonl(&graph, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            emit(&output, &buf)
        }
    }
}

fn ingest(input: &InputArgs, output: Option<&str>, strict: bool) -> Result<(), Failure> {
    let (graph, report) = load(input)?;
    let text = report.to_string();
    if strict && report.has_data_errors() {
        eprint!("{text}");
        return Err(Failure::Data("rejected records or edges under --strict".into()));
    }
    match output {
        Some("-") => {
            let mut buf = Vec::new();
            write_jsonl(&graph, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            eprint!("{text}");
            emit("-", &buf)
        }
        Some(path) => {
            let mut buf = Vec::new();
            write_jsonl(&graph, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            emit(path, &buf)?;
            emit("-", text.as_bytes())
        }
        None => emit("-", text.as_bytes()),
    }
}

/// Score rows plus the thresholds to classify them with.
fn classified(source: &ScoreSource, thresholds: &ThresholdArgs) -> Result<(Vec<DesignScore>, Thresholds), Failure> {
    let table = match &source.scores {
        Some(path) => read_score_csv(open(path.to_string_lossy().as_ref())?).map_err(export_failure)?,
        None => {
            let (graph, _) = load(&source.input)?;
            score_table(&graph, source.orientation.into())
        }
    };
    if table.is_empty() {
        return Err(Failure::Empty("no multi-parent designs to classify".into()));
    }
    let given = match (thresholds.betweenness_threshold, thresholds.independence_threshold) {
        (Some(b), Some(i)) => Some(Thresholds::new(b, i)),
        _ => None,
    };
    let t = resolve_thresholds(&table, given).map_err(metrics_failure)?;
    Ok((table, t))
}

fn load(input: &InputArgs) -> Result<(LineageGraph, IngestReport), Failure> {
    let (records, errors) = match input.format {
        Format::Jsonl => {
            let path = match input.inputs.as_slice() {
                [] => "-",
                [one] => one.as_str(),
                _ => return Err(Failure::Usage("jsonl input takes a single path".into())),
            };
            parse_jsonl(BufReader::new(open(path)?)).map_err(ingest_failure)?
        }
        Format::Csv => match input.inputs.as_slice() {
            [nodes, edges] => parse_csv(open(nodes)?, open(edges)?).map_err(ingest_failure)?,
            _ => return Err(Failure::Usage("csv input takes a nodes path and an edges path".into())),
        },
    };
    Ok(build_graph_with_errors(records, &errors))
}

fn open(path: &str) -> Result<Box<dyn Read>, Failure> {
    if path == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    File::open(Path::new(path))
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn emit(path: &str, bytes: &[u8]) -> Result<(), Failure> {
    let result = if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes).and_then(|()| out.flush())
    } else {
        std::fs::write(path, bytes)
    };
    result.map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn ingest_failure(e: IngestError) -> Failure {
    match e {
        IngestError::Io(e) => Failure::Io(e.to_string()),
        e @ IngestError::HeaderMismatch { .. } => Failure::Data(e.to_string()),
    }
}

fn export_failure(e: ExportError) -> Failure {
    match e {
        ExportError::Io(e) => Failure::Io(e.to_string()),
        ExportError::NothingToPlot => Failure::Empty(e.to_string()),
        e @ (ExportError::Csv(_) | ExportError::HeaderMismatch { .. } | ExportError::BadRow { .. }) => {
            Failure::Data(e.to_string())
        }
    }
}

fn metrics_failure(e: MetricsError) -> Failure {
    match e {
        MetricsError::EmptyTable => Failure::Empty(e.to_string()),
    }
}
