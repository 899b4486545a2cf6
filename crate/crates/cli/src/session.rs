use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use gsql_core::eval::{check, parse_arg, run_query, EvalError, QueryResult, RunOptions};
use gsql_core::frontend::ast::Query;
use gsql_core::frontend::{parse_ddl, parse_queries};
use gsql_core::graph::LoadReport;
use gsql_core::{Catalog, Graph, Table, Value};

use crate::{CliError, Result};

/// Schema the bench queries are written against.
pub const BENCH_DDL: &str = include_str!("../queries/bench.ddl");

struct Installed {
    text: String,
    query: Query,
}

/// Invariant: every installed query checks against the current catalog
/// and tables. Operations that would break a query are rolled back.
pub struct Session {
    graph: Graph,
    tables: BTreeMap<String, Table>,
    queries: BTreeMap<String, Installed>,
    /// Evaluator worker threads; 0 uses every core.
    pub threads: usize,
}

impl Default for Session {
    fn default() -> Self {
        Session::with_graph(Graph::new(Arc::new(Catalog::new())))
    }
}

impl Session {
    pub fn with_graph(graph: Graph) -> Self {
        Session { graph, tables: BTreeMap::new(), queries: BTreeMap::new(), threads: 0 }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tables(&self) -> &BTreeMap<String, Table> {
        &self.tables
    }

    pub fn installed(&self) -> impl Iterator<Item = &str> {
        self.queries.keys().map(String::as_str)
    }

    /// Extends the catalog with every statement of `text`.
    pub fn apply_ddl(&mut self, text: &str) -> Result<()> {
        let mut cat = Catalog::clone(self.graph.catalog());
        for stmt in parse_ddl(text).map_err(gsql_core::Error::from)? {
            cat.apply_in_place(&stmt).map_err(gsql_core::Error::from)?;
        }
        let old = Arc::clone(self.graph.catalog());
        self.graph.set_catalog(Arc::new(cat));
        if let Err(e) = self.recheck() {
            self.graph.set_catalog(old);
            return Err(e);
        }
        Ok(())
    }

    /// Declares `Node`/`Link` and a graph `name` over them when absent.
    pub fn ensure_bench_schema(&mut self, name: &str) -> Result<()> {
        let cat = self.graph.catalog();
        if cat.vertex_type("Node").is_none() && cat.edge_type("Link").is_none() {
            self.apply_ddl(BENCH_DDL)?;
        }
        if self.graph.catalog().graph(name).is_none() {
            self.apply_ddl(&format!("CREATE GRAPH {name} (Node, Link)"))?;
        }
        Ok(())
    }

    /// Fails unless `name` is a declared graph containing the given types.
    pub fn require_graph(&self, name: &str, vtypes: &[&str], etypes: &[&str]) -> Result<()> {
        let def = self.graph.catalog().graph(name).ok_or_else(|| CliError::Usage(format!("unknown graph `{name}`")))?;
        let missing = vtypes
            .iter()
            .filter(|t| !def.vertex_types.contains(**t))
            .chain(etypes.iter().filter(|t| !def.edge_types.contains(**t)))
            .next();
        match missing {
            Some(t) => Err(CliError::Usage(format!("graph `{name}` has no type `{t}`"))),
            None => Ok(()),
        }
    }

    pub fn load_edges(&mut self, graph: &str, path: &Path, vtype: &str, etype: &str) -> Result<LoadReport> {
        self.require_graph(graph, &[vtype], &[etype])?;
        Ok(self.graph.load_edge_tsv(path, vtype, etype)?)
    }

    pub fn load_table(&mut self, path: &Path, name: &str) -> Result<usize> {
        let t = Table::from_csv(path, name)?;
        let rows = t.len();
        let old = self.tables.insert(name.to_string(), t);
        if let Err(e) = self.recheck() {
            match old {
                Some(t) => self.tables.insert(name.to_string(), t),
                None => self.tables.remove(name),
            };
            return Err(e);
        }
        Ok(rows)
    }

    /// Parses and checks every query in `text`; returns their names.
    /// Nothing is installed unless all of them check.
    pub fn install(&mut self, text: &str) -> Result<Vec<String>> {
        let mut staged = Vec::new();
        for mut q in parse_queries(text).map_err(gsql_core::Error::from)? {
            let name = q.name.clone().ok_or_else(|| CliError::Usage("installed queries need a CREATE QUERY header".into()))?;
            check(&mut q, &self.graph, &self.tables)?;
            staged.push((name, q));
        }
        let names = staged.iter().map(|(n, _)| n.clone()).collect();
        for (name, query) in staged {
            self.queries.insert(name, Installed { text: text.to_string(), query });
        }
        Ok(names)
    }

    /// Installs `text` unless a query called `name` already exists.
    pub fn install_missing(&mut self, name: &str, text: &str) -> Result<()> {
        if !self.queries.contains_key(name) {
            self.install(text)?;
        }
        Ok(())
    }

    fn recheck(&mut self) -> Result<()> {
        let mut fresh = BTreeMap::new();
        for (name, inst) in &self.queries {
            let all = parse_queries(&inst.text).map_err(gsql_core::Error::from)?;
            let mut q = all.into_iter().find(|q| q.name.as_deref() == Some(name)).expect("installed text defines the query");
            check(&mut q, &self.graph, &self.tables)?;
            fresh.insert(name.clone(), q);
        }
        for (name, q) in fresh {
            self.queries.get_mut(&name).expect("same keys").query = q;
        }
        Ok(())
    }

    fn query(&self, name: &str) -> Result<&Query> {
        self.queries.get(name).map(|i| &i.query).ok_or_else(|| CliError::Usage(format!("no installed query `{name}`")))
    }

    /// Calls an installed query with arguments given as words.
    pub fn call(&self, name: &str, words: &[String]) -> Result<QueryResult> {
        let q = self.query(name)?;
        if words.len() != q.params.len() {
            let e = EvalError::Arity { query: name.into(), expected: q.params.len(), found: words.len() };
            return Err(e.into());
        }
        let args = q
            .params
            .iter()
            .zip(words)
            .map(|(p, w)| parse_arg(&self.graph, &p.ty, &p.name, w))
            .collect::<Result<Vec<Value>, _>>()?;
        self.call_values(name, args)
    }

    pub fn call_values(&self, name: &str, args: Vec<Value>) -> Result<QueryResult> {
        let q = self.query(name)?;
        Ok(run_query(&self.graph, &self.tables, q, args, &RunOptions { threads: self.threads })?)
    }
}
