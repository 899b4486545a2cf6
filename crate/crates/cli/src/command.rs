//! Command lines, their parsing and rendering. Tabular reports are TSV;
//! with `json` set every record is one JSON object per line.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use gsql_core::eval::render::{result_json, result_text, value_json, value_text};
use serde_json::json;

use crate::bench::{bench_khop, bench_pagerank, bench_wcc};
use crate::{CliError, Result, Session};

#[derive(Debug, Parser)]
#[command(name = "gsql", no_binary_name = true, disable_version_flag = true)]
struct Line {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extend the catalog with a DDL file.
    Ddl { file: PathBuf },
    /// Load a two-column TSV edge list into a graph.
    LoadEdges { graph: String, tsv: PathBuf, vtype: String, etype: String },
    /// Load a CSV file with a header row as a relational table.
    LoadTable { csv: PathBuf, name: String },
    /// Parse, check and install every query in a file.
    Install { file: PathBuf },
    /// Run an installed query. Collection arguments are comma-separated.
    Call {
        query: String,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Read command lines from standard input.
    Repl,
    /// Run a benchmark query.
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Debug, Subcommand)]
pub enum Bench {
    /// Per-seed count of vertices at shortest distance exactly k.
    Khop {
        #[command(flatten)]
        target: Target,
        /// Newline-separated vertex ids.
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        k: i64,
    },
    /// Weakly connected components.
    Wcc {
        #[command(flatten)]
        target: Target,
    },
    /// PageRank with early exit.
    Pagerank {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 0.001)]
        max_change: f64,
        #[arg(long, default_value_t = 10)]
        max_iter: i64,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
    },
}

#[derive(Debug, clap::Args)]
pub struct Target {
    #[arg(long)]
    graph: String,
    /// Load this TSV as Node/Link edges first, declaring the types if needed.
    #[arg(long)]
    edges: Option<PathBuf>,
}

/// Where rendered output goes and in which form.
pub struct Output<'a> {
    pub out: &'a mut dyn Write,
    pub json: bool,
}

impl Output<'_> {
    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
    }

    fn record(&mut self, text: &str, obj: serde_json::Value) -> Result<()> {
        if self.json {
            self.line(&obj.to_string())
        } else {
            self.line(text)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Parses `words` as one command line and runs it.
pub fn cmd_run(s: &mut Session, words: &[String], out: &mut Output) -> Result<()> {
    let line = match Line::try_parse_from(words) {
        Ok(l) => l,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp) => return out.line(e.render().to_string().trim_end()),
        Err(e) => {
            let msg = e.render().to_string();
            return Err(CliError::Usage(msg.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    run(s, line.cmd, out)
}

fn run(s: &mut Session, cmd: Command, out: &mut Output) -> Result<()> {
    match cmd {
        Command::Ddl { file } => {
            s.apply_ddl(&read(&file)?)?;
            let cat = s.graph().catalog();
            let (v, e, g) = (cat.vertex_type_count(), cat.edge_type_count(), cat.graphs().count());
            out.record(
                &format!("catalog: {v} vertex types, {e} edge types, {g} graphs"),
                json!({"vertex_types": v, "edge_types": e, "graphs": g}),
            )
        }
        Command::LoadEdges { graph, tsv, vtype, etype } => {
            let t = Instant::now();
            let r = s.load_edges(&graph, &tsv, &vtype, &etype)?;
            load_report(out, &graph, &r, ms(t))
        }
        Command::LoadTable { csv, name } => {
            let rows = s.load_table(&csv, &name)?;
            out.record(&format!("table {name}: {rows} rows"), json!({"table": name, "rows": rows}))
        }
        Command::Install { file } => {
            for name in s.install(&read(&file)?)? {
                out.record(&format!("installed {name}"), json!({"installed": name}))?;
            }
            Ok(())
        }
        Command::Call { query, args } => {
            let r = s.call(&query, &args)?;
            for w in &r.warnings {
                log::warn!("{w}");
            }
            if out.json {
                out.line(&result_json(s.graph(), &r).to_string())
            } else {
                out.line(result_text(s.graph(), &r).trim_end())
            }
        }
        Command::Repl => Err(CliError::Usage("already reading commands".into())),
        Command::Bench(b) => bench(s, b, out),
    }
}

fn load_report(out: &mut Output, graph: &str, r: &gsql_core::graph::LoadReport, millis: f64) -> Result<()> {
    out.record(
        &format!(
            "{graph}: {} edges, {} new vertices, {} malformed rows in {millis:.1} ms",
            r.edges_created, r.vertices_created, r.malformed_rows
        ),
        json!({"graph": graph, "edges": r.edges_created, "vertices": r.vertices_created,
               "malformed": r.malformed_rows, "millis": millis}),
    )
}

fn prepare_target(s: &mut Session, t: &Target, out: &mut Output) -> Result<()> {
    if let Some(path) = &t.edges {
        s.ensure_bench_schema(&t.graph)?;
        let start = Instant::now();
        let r = s.load_edges(&t.graph, path, "Node", "Link")?;
        load_report(out, &t.graph, &r, ms(start))?;
    }
    Ok(())
}

fn bench(s: &mut Session, b: Bench, out: &mut Output) -> Result<()> {
    match b {
        Bench::Khop { target, seeds, k } => {
            prepare_target(s, &target, out)?;
            let seeds: Vec<String> = read(&seeds)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
            let rows = bench_khop(s, &target.graph, &seeds, k)?;
            if !out.json {
                out.line("seed\tcount\tmillis")?;
            }
            for r in &rows {
                out.record(&format!("{}\t{}\t{:.3}", r.seed, r.count, r.millis), json!({"seed": r.seed, "count": r.count, "millis": r.millis}))?;
            }
            let mean = rows.iter().map(|r| r.millis).sum::<f64>() / rows.len().max(1) as f64;
            let max = rows.iter().map(|r| r.millis).fold(0.0, f64::max);
            out.record(
                &format!("# seeds={} k={k} mean_ms={mean:.3} max_ms={max:.3}", rows.len()),
                json!({"summary": {"seeds": rows.len(), "k": k, "mean_ms": mean, "max_ms": max}}),
            )
        }
        Bench::Wcc { target } => {
            prepare_target(s, &target, out)?;
            let r = bench_wcc(s, &target.graph)?;
            let g = s.graph();
            if !out.json {
                out.line("node\tcomponent")?;
            }
            for (v, c) in &r.labels {
                out.record(
                    &format!("{}\t{}", value_text(g, v), value_text(g, c)),
                    json!({"node": value_json(g, v), "component": value_json(g, c)}),
                )?;
            }
            out.record(
                &format!("# components={} millis={:.3}", r.components, r.millis),
                json!({"summary": {"components": r.components, "millis": r.millis}}),
            )
        }
        Bench::Pagerank { target, max_change, max_iter, damping } => {
            prepare_target(s, &target, out)?;
            let r = bench_pagerank(s, &target.graph, max_change, max_iter, damping)?;
            let g = s.graph();
            if !out.json {
                out.line("node\tscore")?;
            }
            for (v, x) in &r.scores {
                out.record(&format!("{}\t{x}", value_text(g, v)), json!({"node": value_json(g, v), "score": x}))?;
            }
            out.record(
                &format!("# iterations={} millis={:.3}", r.iterations, r.millis),
                json!({"summary": {"iterations": r.iterations, "millis": r.millis}}),
            )
        }
    }
}

/// Runs command lines from `input` until EOF or `quit`. Errors are
/// reported and reading continues; the worst exit code is returned.
pub fn repl(s: &mut Session, input: impl BufRead, out: &mut Output, err: &mut dyn Write) -> i32 {
    let mut code = 0;
    for line in input.lines() {
        let Ok(line) = line else { return code.max(1) };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "quit" || line == "exit" {
            break;
        }
        let words: Vec<String> = line.split_whitespace().map(String::from).collect();
        if let Err(e) = cmd_run(s, &words, out) {
            let _ = writeln!(err, "error: {e}");
            code = code.max(e.exit_code());
        }
    }
    code
}

/// True when `words` is the `repl` command.
pub fn is_repl(words: &[String]) -> bool {
    matches!(Line::try_parse_from(words), Ok(Line { cmd: Command::Repl }))
}
