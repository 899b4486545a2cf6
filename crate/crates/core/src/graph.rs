//! In-memory typed property graph.
//!
//! Vertices and edges get dense ids in insertion order. Every vertex keeps
//! its incident edges grouped by edge type, split into out, in and
//! undirected lists, so a hop expansion touches one contiguous group.
//!
//! An undirected edge is stored once and appears in the undirected list of
//! both endpoints (once for a self-loop). A directed edge whose type has a
//! reverse partner is created together with its inverse record; both share
//! one attribute vector.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{AttrType, Catalog};
use crate::value::{parse_datetime, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
    Undirected,
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex type `{0}`")]
    UnknownVertexType(String),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
    #[error("duplicate primary key {pk} for vertex type `{vtype}`")]
    DuplicatePk { vtype: String, pk: String },
    #[error("type `{owner}` has no attribute `{attr}`")]
    UnknownAttribute { owner: String, attr: String },
    #[error("attribute `{attr}` of `{owner}` expects {expected}, got {got}")]
    TypeMismatch { owner: String, attr: String, expected: &'static str, got: String },
    #[error("edge `{etype}` expects {expected} at {end}, got `{got}`")]
    EndpointMismatch { etype: String, end: &'static str, expected: String, got: String },
    #[error("no vertex with id {0}")]
    NoSuchVertex(u32),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone)]
struct VertexRec {
    vtype: u32,
    attrs: Vec<Value>,
}

#[derive(Debug, Clone)]
struct EdgeRec {
    etype: u32,
    src: VertexId,
    tgt: VertexId,
    attrs: Arc<Vec<Value>>,
}

/// Incident edges of one vertex for one edge type.
#[derive(Debug, Clone, Default)]
pub struct AdjGroup {
    pub etype: u32,
    pub out: Vec<(EdgeId, VertexId)>,
    pub inc: Vec<(EdgeId, VertexId)>,
    pub und: Vec<(EdgeId, VertexId)>,
}

/// Counts reported by [`Graph::load_edge_tsv`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub vertices_created: usize,
    pub edges_created: usize,
    pub malformed_rows: usize,
}

#[derive(Debug, Clone)]
pub struct Graph {
    catalog: Arc<Catalog>,
    vertices: Vec<VertexRec>,
    edges: Vec<EdgeRec>,
    adj: Vec<Vec<AdjGroup>>,
    pk_index: Vec<HashMap<Value, VertexId>>,
    by_type: Vec<Vec<VertexId>>,
}

/// Coerces a value into an attribute's storage type.
pub fn coerce_attr(value: Value, dtype: AttrType) -> Option<Value> {
    Some(match (dtype, value) {
        (AttrType::Int | AttrType::Uint, Value::Int(i)) => Value::Int(i),
        (AttrType::Int | AttrType::Uint, Value::Str(s)) => Value::Int(s.trim().parse().ok()?),
        (AttrType::Float | AttrType::Double, Value::Float(f)) => Value::Float(f),
        (AttrType::Float | AttrType::Double, Value::Int(i)) => Value::Float(i as f64),
        (AttrType::Float | AttrType::Double, Value::Str(s)) => Value::Float(s.trim().parse().ok()?),
        (AttrType::String, Value::Str(s)) => Value::Str(s),
        (AttrType::String, v @ (Value::Int(_) | Value::Float(_) | Value::Bool(_))) => Value::str(&v.to_string()),
        (AttrType::Boolean, Value::Bool(b)) => Value::Bool(b),
        (AttrType::Boolean, Value::Str(s)) => Value::Bool(s.trim().eq_ignore_ascii_case("true")),
        (AttrType::Datetime, Value::DateTime(d)) => Value::DateTime(d),
        (AttrType::Datetime, Value::Str(s)) => Value::DateTime(parse_datetime(&s)?),
        (AttrType::Datetime, Value::Int(i)) => Value::DateTime(i),
        _ => return None,
    })
}

pub fn attr_default(dtype: AttrType) -> Value {
    match dtype {
        AttrType::Int | AttrType::Uint => Value::Int(0),
        AttrType::Float | AttrType::Double => Value::Float(0.0),
        AttrType::String => Value::str(""),
        AttrType::Boolean => Value::Bool(false),
        AttrType::Datetime => Value::DateTime(0),
    }
}

impl Graph {
    pub fn new(catalog: Arc<Catalog>) -> Self {
        let mut g = Graph {
            catalog,
            vertices: Vec::new(),
            edges: Vec::new(),
            adj: Vec::new(),
            pk_index: Vec::new(),
            by_type: Vec::new(),
        };
        g.grow_type_tables();
        g
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    /// Replaces the catalog with an extension of the current one.
    pub fn set_catalog(&mut self, catalog: Arc<Catalog>) {
        self.catalog = catalog;
        self.grow_type_tables();
    }

    fn grow_type_tables(&mut self) {
        let n = self.catalog.vertex_type_count();
        self.pk_index.resize_with(n, HashMap::new);
        self.by_type.resize_with(n, Vec::new);
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertices_of_type(&self, vtype: u32) -> &[VertexId] {
        self.by_type.get(vtype as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn vertex_type(&self, v: VertexId) -> u32 {
        self.vertices[v.index()].vtype
    }

    pub fn vertex_type_name(&self, v: VertexId) -> &str {
        &self.catalog.vertex_type_at(self.vertex_type(v) as usize).name
    }

    pub fn edge_type(&self, e: EdgeId) -> u32 {
        self.edges[e.index()].etype
    }

    pub fn edge_type_name(&self, e: EdgeId) -> &str {
        &self.catalog.edge_type_at(self.edge_type(e) as usize).name
    }

    pub fn edge_directed(&self, e: EdgeId) -> bool {
        self.catalog.edge_type_at(self.edge_type(e) as usize).directed
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let r = &self.edges[e.index()];
        (r.src, r.tgt)
    }

    /// The endpoint set st(e): one pair for directed edges, both orderings
    /// for undirected ones.
    pub fn st(&self, e: EdgeId) -> Vec<(VertexId, VertexId)> {
        let (s, t) = self.endpoints(e);
        if self.edge_directed(e) {
            vec![(s, t)]
        } else {
            vec![(s, t), (t, s)]
        }
    }

    pub fn vertex_attr(&self, v: VertexId, name: &str) -> Option<&Value> {
        let rec = &self.vertices[v.index()];
        let idx = self.catalog.vertex_type_at(rec.vtype as usize).attr_index(name)?;
        rec.attrs.get(idx)
    }

    pub fn vertex_attr_at(&self, v: VertexId, idx: usize) -> &Value {
        &self.vertices[v.index()].attrs[idx]
    }

    pub fn edge_attr(&self, e: EdgeId, name: &str) -> Option<&Value> {
        let rec = &self.edges[e.index()];
        let idx = self.catalog.edge_type_at(rec.etype as usize).attr_index(name)?;
        rec.attrs.get(idx)
    }

    pub fn pk(&self, v: VertexId) -> &Value {
        let rec = &self.vertices[v.index()];
        &rec.attrs[self.catalog.vertex_type_at(rec.vtype as usize).pk_index()]
    }

    pub fn lookup(&self, vtype: &str, pk: &Value) -> Option<VertexId> {
        let t = self.catalog.vertex_type_index(vtype)?;
        let def = self.catalog.vertex_type_at(t);
        let key = coerce_attr(pk.clone(), def.pk().dtype)?;
        self.pk_index[t].get(&key).copied()
    }

    pub fn add_vertex(
        &mut self,
        vtype: &str,
        pk: Value,
        attrs: &[(&str, Value)],
    ) -> Result<VertexId, GraphError> {
        let t = self
            .catalog
            .vertex_type_index(vtype)
            .ok_or_else(|| GraphError::UnknownVertexType(vtype.into()))?;
        let def = self.catalog.vertex_type_at(t);
        let pk_idx = def.pk_index();
        let mut values: Vec<Value> = def.attributes.iter().map(|a| attr_default(a.dtype)).collect();
        let mismatch = |attr: &str, dtype: AttrType, got: &Value| GraphError::TypeMismatch {
            owner: vtype.into(),
            attr: attr.into(),
            expected: dtype.keyword(),
            got: got.to_string(),
        };
        let pk_def = &def.attributes[pk_idx];
        values[pk_idx] = coerce_attr(pk.clone(), pk_def.dtype).ok_or_else(|| mismatch(&pk_def.name, pk_def.dtype, &pk))?;
        for (name, v) in attrs {
            let idx = def.attr_index(name).ok_or_else(|| GraphError::UnknownAttribute {
                owner: vtype.into(),
                attr: (*name).into(),
            })?;
            if idx == pk_idx {
                continue;
            }
            let a = &def.attributes[idx];
            values[idx] = coerce_attr(v.clone(), a.dtype).ok_or_else(|| mismatch(&a.name, a.dtype, v))?;
        }
        let key = values[pk_idx].clone();
        if self.pk_index[t].contains_key(&key) {
            return Err(GraphError::DuplicatePk { vtype: vtype.into(), pk: key.to_string() });
        }
        let id = VertexId(self.vertices.len() as u32);
        self.vertices.push(VertexRec { vtype: t as u32, attrs: values });
        self.adj.push(Vec::new());
        self.pk_index[t].insert(key, id);
        self.by_type[t].push(id);
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        etype: &str,
        src: VertexId,
        tgt: VertexId,
        attrs: &[(&str, Value)],
    ) -> Result<EdgeId, GraphError> {
        let catalog = Arc::clone(&self.catalog);
        let t = catalog
            .edge_type_index(etype)
            .ok_or_else(|| GraphError::UnknownEdgeType(etype.into()))?;
        let def = catalog.edge_type_at(t);
        for (v, end, expected) in [(src, "source", &def.from_type), (tgt, "target", &def.to_type)] {
            if v.index() >= self.vertices.len() {
                return Err(GraphError::NoSuchVertex(v.0));
            }
            let got = self.vertex_type_name(v);
            if got != expected {
                return Err(GraphError::EndpointMismatch {
                    etype: etype.into(),
                    end,
                    expected: expected.clone(),
                    got: got.into(),
                });
            }
        }
        let mut values: Vec<Value> = def.attributes.iter().map(|a| attr_default(a.dtype)).collect();
        for (name, v) in attrs {
            let idx = def.attr_index(name).ok_or_else(|| GraphError::UnknownAttribute {
                owner: etype.into(),
                attr: (*name).into(),
            })?;
            let a = &def.attributes[idx];
            values[idx] = coerce_attr(v.clone(), a.dtype).ok_or_else(|| GraphError::TypeMismatch {
                owner: etype.into(),
                attr: a.name.clone(),
                expected: a.dtype.keyword(),
                got: v.to_string(),
            })?;
        }
        let values = Arc::new(values);
        let id = self.push_edge(t as u32, def.directed, src, tgt, Arc::clone(&values));
        if let Some(partner) = def.partner() {
            let p = catalog.edge_type_index(partner).expect("partner registered") as u32;
            self.push_edge(p, true, tgt, src, values);
        }
        Ok(id)
    }

    fn push_edge(&mut self, etype: u32, directed: bool, src: VertexId, tgt: VertexId, attrs: Arc<Vec<Value>>) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(EdgeRec { etype, src, tgt, attrs });
        if directed {
            self.group_mut(src, etype).out.push((id, tgt));
            self.group_mut(tgt, etype).inc.push((id, src));
        } else {
            self.group_mut(src, etype).und.push((id, tgt));
            if src != tgt {
                self.group_mut(tgt, etype).und.push((id, src));
            }
        }
        id
    }

    fn group_mut(&mut self, v: VertexId, etype: u32) -> &mut AdjGroup {
        let groups = &mut self.adj[v.index()];
        match groups.iter().position(|g| g.etype == etype) {
            Some(i) => &mut groups[i],
            None => {
                groups.push(AdjGroup { etype, ..AdjGroup::default() });
                groups.last_mut().unwrap()
            }
        }
    }

    /// Per-type adjacency groups of a vertex.
    pub fn groups(&self, v: VertexId) -> &[AdjGroup] {
        &self.adj[v.index()]
    }

    pub fn group(&self, v: VertexId, etype: u32) -> Option<&AdjGroup> {
        self.adj[v.index()].iter().find(|g| g.etype == etype)
    }

    /// Incident edges of `v` in the given role. An empty filter admits every type.
    pub fn incident(&self, v: VertexId, dir: Direction, types: &[&str]) -> Vec<(EdgeId, VertexId)> {
        let filter: Option<Vec<u32>> = if types.is_empty() {
            None
        } else {
            Some(types.iter().filter_map(|t| self.catalog.edge_type_index(t)).map(|i| i as u32).collect())
        };
        let mut out = Vec::new();
        for g in self.groups(v) {
            if filter.as_ref().is_some_and(|f| !f.contains(&g.etype)) {
                continue;
            }
            if matches!(dir, Direction::Out | Direction::Any) {
                out.extend_from_slice(&g.out);
            }
            if matches!(dir, Direction::In | Direction::Any) {
                out.extend_from_slice(&g.inc);
            }
            if matches!(dir, Direction::Undirected | Direction::Any) {
                out.extend_from_slice(&g.und);
            }
        }
        out
    }

    /// Directed-out plus undirected incident edges passing the filter.
    pub fn outdegree(&self, v: VertexId, types: &[&str]) -> usize {
        self.groups(v)
            .iter()
            .filter(|g| types.is_empty() || types.contains(&self.catalog.edge_type_at(g.etype as usize).name.as_str()))
            .map(|g| g.out.len() + g.und.len())
            .sum()
    }

    fn vertex_for_load(&mut self, vtype: &str, raw: &str, created: &mut usize) -> Result<VertexId, GraphError> {
        let key = Value::str(raw);
        if let Some(v) = self.lookup(vtype, &key) {
            return Ok(v);
        }
        *created += 1;
        self.add_vertex(vtype, key, &[])
    }

    /// Loads a two-column, tab-separated edge list. Vertices are created on
    /// first sight with the raw id as primary key; every row adds one edge.
    pub fn load_edge_tsv(&mut self, path: &Path, vtype: &str, etype: &str) -> Result<LoadReport, GraphError> {
        let io_err = |e: std::io::Error| GraphError::Io { path: path.display().to_string(), msg: e.to_string() };
        if self.catalog.vertex_type(vtype).is_none() {
            return Err(GraphError::UnknownVertexType(vtype.into()));
        }
        if self.catalog.edge_type(etype).is_none() {
            return Err(GraphError::UnknownEdgeType(etype.into()));
        }
        let reader = BufReader::with_capacity(1 << 20, File::open(path).map_err(io_err)?);
        let mut report = LoadReport::default();
        for line in reader.lines() {
            let line = line.map_err(io_err)?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                report.malformed_rows += 1;
                continue;
            };
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() {
                report.malformed_rows += 1;
                continue;
            }
            let s = match self.vertex_for_load(vtype, a, &mut report.vertices_created) {
                Ok(v) => v,
                Err(_) => {
                    report.malformed_rows += 1;
                    continue;
                }
            };
            let t = match self.vertex_for_load(vtype, b, &mut report.vertices_created) {
                Ok(v) => v,
                Err(_) => {
                    report.malformed_rows += 1;
                    continue;
                }
            };
            self.add_edge(etype, s, t, &[])?;
            report.edges_created += 1;
        }
        if report.malformed_rows > 0 {
            log::warn!("{}: skipped {} malformed rows", path.display(), report.malformed_rows);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::io::Write;

    fn g1() -> Graph {
        let cat = Catalog::from_ddl("CREATE VERTEX N (id STRING PRIMARY KEY) CREATE DIRECTED EDGE E (FROM N, TO N)").unwrap();
        let mut g = Graph::new(Arc::new(cat));
        for i in 1..=12 {
            g.add_vertex("N", Value::str(&i.to_string()), &[]).unwrap();
        }
        let edges = [
            (1, 2), (2, 3), (3, 4), (4, 5), (2, 6), (6, 4), (2, 9), (9, 10), (10, 11), (11, 12), (12, 4), (3, 7), (7, 8), (8, 3),
        ];
        for (a, b) in edges {
            g.add_edge("E", VertexId(a - 1), VertexId(b - 1), &[]).unwrap();
        }
        g
    }

    fn pks(g: &Graph, xs: &[(EdgeId, VertexId)]) -> BTreeSet<String> {
        xs.iter().map(|(_, v)| g.pk(*v).to_string()).collect()
    }

    #[test]
    fn incident_and_outdegree_on_fixture() {
        let g = g1();
        let v2 = g.lookup("N", &Value::str("2")).unwrap();
        let out = g.incident(v2, Direction::Out, &["E"]);
        assert_eq!(pks(&g, &out), ["3", "6", "9"].iter().map(|s| s.to_string()).collect());
        assert_eq!(g.outdegree(v2, &[]), 3);
    }

    #[test]
    fn isolated_vertex_has_no_edges() {
        let mut g = g1();
        let v = g.add_vertex("N", Value::str("lonely"), &[]).unwrap();
        assert!(g.incident(v, Direction::In, &[]).is_empty());
        assert_eq!(g.outdegree(v, &[]), 0);
    }

    #[test]
    fn undirected_edge_is_symmetric() {
        let cat = Catalog::from_ddl(
            "CREATE VERTEX Person (email STRING PRIMARY KEY, age INT) CREATE UNDIRECTED EDGE Connected (FROM Person, TO Person, since DATE)",
        )
        .unwrap();
        let mut g = Graph::new(Arc::new(cat));
        let a = g.add_vertex("Person", Value::str("a"), &[]).unwrap();
        let b = g.add_vertex("Person", Value::str("b"), &[("age", Value::Int(3))]).unwrap();
        let e = g.add_edge("Connected", a, b, &[("since", Value::str("2017-01-01"))]).unwrap();
        assert_eq!(g.st(e), vec![(a, b), (b, a)]);
        assert_eq!(g.incident(a, Direction::Undirected, &[]), vec![(e, b)]);
        assert_eq!(g.incident(b, Direction::Undirected, &[]), vec![(e, a)]);
        assert_eq!(g.outdegree(a, &[]), 1);
        assert_eq!(g.vertex_attr(a, "age"), Some(&Value::Int(0)));
        assert!(matches!(g.add_vertex("Person", Value::str("a"), &[]), Err(GraphError::DuplicatePk { .. })));
        assert!(matches!(
            g.add_vertex("Person", Value::str("c"), &[("nope", Value::Int(1))]),
            Err(GraphError::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn reverse_edge_record_is_created() {
        let cat = Catalog::from_ddl(
            "CREATE VERTEX Account (number INT PRIMARY KEY) CREATE DIRECTED EDGE Debit (FROM Account, TO Account, amount FLOAT) WITH REVERSE EDGE Credit",
        )
        .unwrap();
        let mut g = Graph::new(Arc::new(cat));
        let a = g.add_vertex("Account", Value::Int(1), &[]).unwrap();
        let b = g.add_vertex("Account", Value::Int(2), &[]).unwrap();
        g.add_edge("Debit", a, b, &[("amount", Value::Float(5.0))]).unwrap();
        let credit = g.incident(b, Direction::Out, &["Credit"]);
        assert_eq!(credit.len(), 1);
        assert_eq!(credit[0].1, a);
        assert_eq!(g.edge_attr(credit[0].0, "amount"), Some(&Value::Float(5.0)));
    }

    #[test]
    fn index_and_st_agree() {
        let g = g1();
        for e in g.edge_ids() {
            for (u, v) in g.st(e) {
                assert!(g.incident(u, Direction::Out, &[]).contains(&(e, v)));
                assert!(g.incident(v, Direction::In, &[]).contains(&(e, u)));
            }
        }
    }

    #[test]
    fn tsv_loader() {
        let cat = Catalog::from_ddl("CREATE VERTEX Node () CREATE DIRECTED EDGE Link (FROM Node, TO Node)").unwrap();
        let mut g = Graph::new(Arc::new(cat));
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "1\t2\n2\t3\n2\t3\nbad row\n").unwrap();
        let r = g.load_edge_tsv(f.path(), "Node", "Link").unwrap();
        assert_eq!(r, LoadReport { vertices_created: 3, edges_created: 3, malformed_rows: 1 });
        let empty = tempfile::NamedTempFile::new().unwrap();
        let r = g.load_edge_tsv(empty.path(), "Node", "Link").unwrap();
        assert_eq!(r, LoadReport::default());
        assert!(matches!(
            g.load_edge_tsv(Path::new("/nonexistent/x.tsv"), "Node", "Link"),
            Err(GraphError::Io { .. })
        ));
    }
}
