//! Small pinned graphs used by tests, the acceptance suite and the CLI demos.
//! Vertices have integer keys equal to their labels.

use std::sync::Arc;

use crate::catalog::Catalog;
use crate::graph::{Graph, VertexId};
use crate::value::Value;

/// One vertex type `V`, directed `E` and `F`, undirected `U`, all in graph `G`.
pub const SCHEMA: &str = "CREATE VERTEX V (id INT PRIMARY KEY)
CREATE DIRECTED EDGE E (FROM V, TO V)
CREATE DIRECTED EDGE F (FROM V, TO V)
CREATE UNDIRECTED EDGE U (FROM V, TO V)
CREATE GRAPH G (V, E, F, U)";

/// Edges of G1, all of type `E`: two shortest 1-to-5 paths, three
/// vertex-simple ones and four edge-simple ones.
pub const G1_EDGES: [(i64, i64); 14] = [
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (2, 6),
    (6, 4),
    (2, 9),
    (9, 10),
    (10, 11),
    (11, 12),
    (12, 4),
    (3, 7),
    (7, 8),
    (8, 3),
];

/// Edges of G2: the only `E>*.F>.E>*` path from 1 to 4 revisits 2 and 3.
pub const G2_EDGES: [(i64, &str, i64); 6] = [(1, "E", 2), (2, "E", 3), (3, "E", 4), (3, "F", 5), (5, "E", 6), (6, "E", 2)];

pub fn catalog() -> Arc<Catalog> {
    Arc::new(Catalog::from_ddl(SCHEMA).expect("fixture schema"))
}

/// Graph over [`SCHEMA`] with vertices `1..=n` and the given typed edges.
pub fn graph(n: i64, edges: impl IntoIterator<Item = (i64, &'static str, i64)>) -> Graph {
    let mut g = Graph::new(catalog());
    for i in 1..=n {
        g.add_vertex("V", Value::Int(i), &[]).expect("fresh key");
    }
    for (a, t, b) in edges {
        g.add_edge(t, VertexId(a as u32 - 1), VertexId(b as u32 - 1), &[]).expect("fixture edge");
    }
    g
}

pub fn g1() -> Graph {
    graph(12, G1_EDGES.iter().map(|&(a, b)| (a, "E", b)))
}

pub fn g2() -> Graph {
    graph(6, G2_EDGES)
}

/// The vertex labeled `i` in a fixture graph.
pub fn v(i: i64) -> VertexId {
    VertexId(i as u32 - 1)
}
