//! Benchmark drivers. Each runs a shipped GSQL query through the full
//! pipeline; none of them computes results natively.

use std::collections::BTreeSet;
use std::time::Instant;

use gsql_core::eval::lookup_vertex;
use gsql_core::{Table, Value};

use crate::{CliError, Result, Session};

pub const KHOP: &str = include_str!("../queries/khop.gsql");
pub const WCC: &str = include_str!("../queries/wcc.gsql");
pub const PAGERANK: &str = include_str!("../queries/pagerank.gsql");
pub const TOPK_TOYS: &str = include_str!("../queries/topk_toys.gsql");

#[derive(Debug, Clone, PartialEq)]
pub struct KhopRow {
    pub seed: String,
    pub count: i64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WccReport {
    /// `(primary key, component label)` in key order.
    pub labels: Vec<(Value, Value)>,
    pub components: usize,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankReport {
    /// `(primary key, score)` in key order.
    pub scores: Vec<(Value, f64)>,
    pub iterations: i64,
    pub millis: f64,
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn output<'r>(r: &'r gsql_core::QueryResult, name: &str) -> Result<&'r Table> {
    r.tables.get(name).ok_or_else(|| CliError::Internal(format!("bench query produced no `{name}` table")))
}

/// Count of vertices at shortest directed distance exactly `k`, per seed.
pub fn bench_khop(s: &mut Session, graph: &str, seeds: &[String], k: i64) -> Result<Vec<KhopRow>> {
    s.require_graph(graph, &["Node"], &["Link"])?;
    s.install_missing("khop", KHOP)?;
    let ids = seeds
        .iter()
        .map(|w| lookup_vertex(s.graph(), Some("Node"), w).ok_or_else(|| CliError::Usage(format!("unknown seed `{w}`"))))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(seeds.len());
    for (seed, id) in seeds.iter().zip(ids) {
        let t = Instant::now();
        let r = s.call_values("khop", vec![Value::Vertex(id), Value::Int(k)])?;
        let count = output(&r, "Count")?.rows[0][0].as_i64().unwrap_or(0);
        rows.push(KhopRow { seed: seed.clone(), count, millis: millis(t) });
    }
    Ok(rows)
}

pub fn bench_wcc(s: &mut Session, graph: &str) -> Result<WccReport> {
    s.require_graph(graph, &["Node"], &["Link"])?;
    s.install_missing("wcc", WCC)?;
    let t = Instant::now();
    let r = s.call_values("wcc", vec![])?;
    let ms = millis(t);
    let labels: Vec<(Value, Value)> = output(&r, "Components")?.rows.iter().map(|row| (row[0].clone(), row[1].clone())).collect();
    let components = labels.iter().map(|(_, c)| c).collect::<BTreeSet<_>>().len();
    Ok(WccReport { labels, components, millis: ms })
}

pub fn bench_pagerank(s: &mut Session, graph: &str, max_change: f64, max_iter: i64, damping: f64) -> Result<PageRankReport> {
    s.require_graph(graph, &["Node"], &["Link"])?;
    s.install_missing("PageRank", PAGERANK)?;
    let t = Instant::now();
    let r = s.call_values("PageRank", vec![Value::Float(max_change), Value::Int(max_iter), Value::Float(damping)])?;
    let ms = millis(t);
    let scores = output(&r, "Scores")?
        .rows
        .iter()
        .map(|row| (row[0].clone(), row[1].as_f64().unwrap_or(f64::NAN)))
        .collect();
    let iterations = r.ctx.read_gacc("iterations", false).and_then(|v| v.as_i64()).unwrap_or(0);
    Ok(PageRankReport { scores, iterations, millis: ms })
}
