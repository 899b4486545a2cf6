//! Shortest-path DARPE matching by layered BFS over the product of the graph
//! and a deterministic automaton. Paths are counted, never enumerated.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use super::automaton::{compile_darpe, fixed_length, DarpeAutomaton, Dir, DirSymbol};
use super::DarpeError;
use crate::binding::BindingTable;
use crate::catalog::{Catalog, GraphDef};
use crate::frontend::ast::{Darpe, PathPattern};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::value::Value;

/// Admissible vertices at one pattern position.
#[derive(Debug, Clone, PartialEq)]
pub enum VTest {
    Any,
    /// Sorted vertex type indices.
    Types(Vec<u32>),
    /// Sorted, duplicate-free members.
    Set(Arc<Vec<VertexId>>),
}

impl VTest {
    pub fn set(vs: impl IntoIterator<Item = VertexId>) -> VTest {
        let mut v: Vec<VertexId> = vs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VTest::Set(Arc::new(v))
    }

    /// Vertex types by name; unknown names admit nothing.
    pub fn types<'a>(catalog: &Catalog, names: impl IntoIterator<Item = &'a str>) -> VTest {
        let mut ts: Vec<u32> = names.into_iter().filter_map(|n| catalog.vertex_type_index(n)).map(|i| i as u32).collect();
        ts.sort_unstable();
        ts.dedup();
        VTest::Types(ts)
    }

    /// Every vertex of a named graph, or of the whole store.
    pub fn graph(catalog: &Catalog, graph: Option<&GraphDef>) -> VTest {
        match graph {
            Some(g) => VTest::types(catalog, g.vertex_types.iter().map(String::as_str)),
            None => VTest::Any,
        }
    }

    #[inline]
    pub fn admits(&self, g: &Graph, v: VertexId) -> bool {
        match self {
            VTest::Any => true,
            VTest::Types(ts) => ts.binary_search(&g.vertex_type(v)).is_ok(),
            VTest::Set(vs) => vs.binary_search(&v).is_ok(),
        }
    }

    /// Admitted vertices in ascending id order.
    pub fn candidates(&self, g: &Graph) -> Vec<VertexId> {
        match self {
            VTest::Any => g.vertex_ids().collect(),
            VTest::Types(ts) => {
                let mut out: Vec<VertexId> = ts.iter().flat_map(|&t| g.vertices_of_type(t).iter().copied()).collect();
                if ts.len() > 1 {
                    out.sort_unstable();
                }
                out
            }
            VTest::Set(vs) => vs.iter().copied().filter(|v| v.index() < g.vertex_count()).collect(),
        }
    }

    /// Intersection with another test.
    pub fn and(self, other: &VTest, g: &Graph) -> VTest {
        match (self, other) {
            (x, VTest::Any) => x,
            (VTest::Any, y) => y.clone(),
            (x, y) => VTest::set(x.candidates(g).into_iter().filter(|&v| y.admits(g, v))),
        }
    }
}

/// One vertex position of a path pattern.
#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub test: VTest,
    /// Output column bound to this vertex.
    pub var: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct HopSpec {
    pub automaton: DarpeAutomaton,
    /// Every word has length one, so hits are incident edges.
    pub single: bool,
    /// Output column bound to the traversed edge (single hops only).
    pub edge_var: Option<usize>,
}

/// A compiled path pattern `S0:s0 -(D1)- S1:s1 ... -(Dn)- Sn:sn`.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub vars: Vec<String>,
    /// Whether each column holds an edge rather than a vertex.
    pub edge_cols: Vec<bool>,
    pub start: NodeSpec,
    pub hops: Vec<(HopSpec, NodeSpec)>,
    /// Automaton of the concatenated DARPE when segment lengths can vary,
    /// for the total-length minimality check.
    pub whole: Option<DarpeAutomaton>,
}

impl PathSpec {
    /// Compiles a parsed path pattern; `vtest` resolves each node's v-test
    /// (including any context-bound variable) to admissible vertices.
    pub fn compile(
        p: &PathPattern,
        catalog: &Catalog,
        graph: Option<&GraphDef>,
        mut vtest: impl FnMut(&crate::frontend::ast::VNode) -> VTest,
    ) -> Result<PathSpec, DarpeError> {
        let mut vars: Vec<String> = Vec::new();
        let mut edge_cols = Vec::new();
        let mut col = |name: &Option<String>, edge: bool| -> Option<usize> {
            let name = name.as_ref()?;
            Some(match vars.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vars.push(name.clone());
                    edge_cols.push(edge);
                    vars.len() - 1
                }
            })
        };
        let start = NodeSpec { test: vtest(&p.start), var: col(&p.start.var, false) };
        let mut hops = Vec::with_capacity(p.hops.len());
        for (hop, node) in &p.hops {
            let automaton = compile_darpe(&hop.darpe, catalog, graph)?;
            let single = hop.darpe.is_single_hop();
            let edge_var = if single { col(&hop.edge_var, true) } else { None };
            let node = NodeSpec { test: vtest(node), var: col(&node.var, false) };
            hops.push((HopSpec { automaton, single, edge_var }, node));
        }
        let whole = if p.hops.len() > 1 {
            let concat = Darpe::Concat(p.hops.iter().map(|(h, _)| h.darpe.clone()).collect());
            match fixed_length(&concat) {
                Some(_) => None,
                None => Some(compile_darpe(&concat, catalog, graph)?),
            }
        } else {
            None
        };
        Ok(PathSpec { vars, edge_cols, start, hops, whole })
    }
}

/// One reachable endpoint: shortest length and the number of shortest paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub target: VertexId,
    pub len: u32,
    pub count: u64,
    /// The traversed edge, for single-hop expansion.
    pub edge: Option<EdgeId>,
}

/// A DARPE match between two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchEntry {
    pub source: VertexId,
    pub target: VertexId,
    pub length: u32,
    pub multiplicity: u64,
}

#[inline]
fn for_each_step(g: &Graph, a: &DarpeAutomaton, q: u32, v: VertexId, mut f: impl FnMut(EdgeId, VertexId, u32)) {
    for grp in g.groups(v) {
        for (dir, list) in [(Dir::Forward, &grp.out), (Dir::Backward, &grp.inc), (Dir::Undirected, &grp.und)] {
            if list.is_empty() {
                continue;
            }
            if let Some(q2) = a.step(q, DirSymbol { etype: grp.etype, dir }) {
                for &(e, w) in list {
                    f(e, w, q2);
                }
            }
        }
    }
}

/// Incident edges whose label is a word of a single-hop automaton.
pub fn single_hop_hits(g: &Graph, a: &DarpeAutomaton, s: VertexId) -> Vec<Hit> {
    let mut out = Vec::new();
    if a.is_empty() {
        return out;
    }
    for_each_step(g, a, DarpeAutomaton::START, s, |e, w, q2| {
        if a.is_accepting(q2) {
            out.push(Hit { target: w, len: 1, count: 1, edge: Some(e) });
        }
    });
    out
}

/// Layered product BFS from `s`: for every vertex reachable along a word of
/// the language, its shortest length and the number of such shortest paths.
/// Targets appear in order of first discovery.
pub fn bfs_counts(g: &Graph, a: &DarpeAutomaton, s: VertexId) -> Vec<Hit> {
    bfs_impl(g, a, s, None)
}

/// Text dump of the product-BFS layers from `s`, for debugging.
pub fn dump_layers(g: &Graph, a: &DarpeAutomaton, s: VertexId) -> String {
    let mut out = String::new();
    bfs_impl(g, a, s, Some(&mut out));
    out
}

fn bfs_impl(g: &Graph, a: &DarpeAutomaton, s: VertexId, mut dump: Option<&mut String>) -> Vec<Hit> {
    let mut hits = Vec::new();
    if a.is_empty() {
        return hits;
    }
    // (vertex, state) -> (distance, shortest-path count)
    let mut seen: HashMap<(VertexId, u32), (u32, u64)> = HashMap::new();
    let mut best: HashMap<VertexId, usize> = HashMap::new();
    let start = (s, DarpeAutomaton::START);
    seen.insert(start, (0, 1));
    if a.is_accepting(DarpeAutomaton::START) {
        best.insert(s, 0);
        hits.push(Hit { target: s, len: 0, count: 1, edge: None });
    }
    let mut frontier = vec![start];
    let mut depth = 0u32;
    while !frontier.is_empty() {
        if let Some(out) = dump.as_deref_mut() {
            let layer: Vec<String> = frontier.iter().map(|&(v, q)| format!("({}, q{q}) x{}", g.pk(v), seen[&(v, q)].1)).collect();
            let _ = writeln!(out, "layer {depth}: {}", layer.join(", "));
        }
        let mut next = Vec::new();
        for &(v, q) in &frontier {
            let c = seen[&(v, q)].1;
            for_each_step(g, a, q, v, |_, w, q2| match seen.get_mut(&(w, q2)) {
                None => {
                    seen.insert((w, q2), (depth + 1, c));
                    next.push((w, q2));
                }
                Some((d, n)) if *d == depth + 1 => *n = n.saturating_add(c),
                Some(_) => {}
            });
        }
        depth += 1;
        for &(w, q2) in &next {
            if !a.is_accepting(q2) {
                continue;
            }
            let c = seen[&(w, q2)].1;
            match best.get(&w) {
                None => {
                    best.insert(w, hits.len());
                    hits.push(Hit { target: w, len: depth, count: c, edge: None });
                }
                Some(&i) if hits[i].len == depth => hits[i].count = hits[i].count.saturating_add(c),
                Some(_) => {}
            }
        }
        frontier = next;
    }
    hits
}

/// Shortest matches from each source to every admitted target. Sources are
/// processed in parallel; output follows source order, then discovery order.
pub fn match_darpe(g: &Graph, a: &DarpeAutomaton, sources: &[VertexId], target: &VTest) -> Vec<MatchEntry> {
    sources
        .par_iter()
        .map(|&s| {
            bfs_counts(g, a, s)
                .into_iter()
                .filter(|h| target.admits(g, h.target))
                .map(|h| MatchEntry { source: s, target: h.target, length: h.len, multiplicity: h.count })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

const UNBOUND: u32 = u32::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    vals: Vec<u32>,
    cur: VertexId,
    len: u32,
}

/// Binding table of a path pattern: one row per distinct binding of its
/// variables, with multiplicity equal to the number of legal segmentations.
pub fn match_path(g: &Graph, spec: &PathSpec) -> BindingTable {
    let sources = spec.start.test.candidates(g);
    let parts: Vec<BindingTable> = sources.par_iter().map(|&s| from_source(g, spec, s)).collect();
    let mut out = BindingTable::new(spec.vars.clone());
    out.reserve(parts.iter().map(BindingTable::len).sum());
    for p in parts {
        out.extend(p);
    }
    out
}

fn from_source(g: &Graph, spec: &PathSpec, s: VertexId) -> BindingTable {
    let width = spec.vars.len();
    let mut vals = vec![UNBOUND; width];
    if let Some(c) = spec.start.var {
        vals[c] = s.0;
    }
    let mut states: Vec<(State, u64)> = vec![(State { vals, cur: s, len: 0 }, 1)];
    let multi = spec.hops.len() > 1;
    let mut cache: HashMap<(usize, VertexId), Arc<Vec<Hit>>> = HashMap::new();
    for (i, (hop, node)) in spec.hops.iter().enumerate() {
        let mut next: Vec<(State, u64)> = Vec::new();
        let mut index: HashMap<State, usize> = HashMap::new();
        for (st, count) in &states {
            let hits = if hop.single {
                Arc::new(single_hop_hits(g, &hop.automaton, st.cur))
            } else {
                Arc::clone(cache.entry((i, st.cur)).or_insert_with(|| Arc::new(bfs_counts(g, &hop.automaton, st.cur))))
            };
            for h in hits.iter() {
                if !node.test.admits(g, h.target) {
                    continue;
                }
                let mut vals = st.vals.clone();
                let binds = [(hop.edge_var, h.edge.map(|e| e.0)), (node.var, Some(h.target.0))];
                if !binds.iter().all(|&(col, val)| match (col, val) {
                    (Some(c), Some(x)) => {
                        let ok = vals[c] == UNBOUND || vals[c] == x;
                        vals[c] = x;
                        ok
                    }
                    _ => true,
                }) {
                    continue;
                }
                let state = State { vals, cur: h.target, len: st.len + h.len };
                let c = count.saturating_mul(h.count);
                if multi {
                    if let Some(&k) = index.get(&state) {
                        next[k].1 = next[k].1.saturating_add(c);
                        continue;
                    }
                    index.insert(state.clone(), next.len());
                }
                next.push((state, c));
            }
        }
        states = next;
    }
    if let Some(whole) = &spec.whole {
        let dist: HashMap<VertexId, u32> = bfs_counts(g, whole, s).into_iter().map(|h| (h.target, h.len)).collect();
        states.retain(|(st, _)| dist.get(&st.cur) == Some(&st.len));
    }
    let mut out = BindingTable::new(spec.vars.clone());
    out.reserve(states.len());
    for (st, c) in states {
        let row = st.vals.iter().zip(&spec.edge_cols).map(|(&x, &edge)| {
            if edge {
                Value::Edge(EdgeId(x))
            } else {
                Value::Vertex(VertexId(x))
            }
        });
        out.push(row, c);
    }
    if multi {
        out.consolidate()
    } else {
        out
    }
}
