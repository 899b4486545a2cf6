//! An in-memory property-graph engine for a SQL-like query language with
//! accumulators and regular path patterns.
//!
//! Pipeline: [`frontend`] parses and checks queries against a
//! [`catalog::Catalog`]; [`eval`] runs them over a [`graph::Graph`],
//! using [`darpe`] for path matching and [`accum`] for aggregation.

pub mod accum;
pub mod binding;
pub mod catalog;
pub mod context;
pub mod darpe;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod frontend;
pub mod graph;
pub mod table;
pub mod value;

pub use catalog::Catalog;
pub use error::{Error, Result};
pub use eval::{run_query, EvalError, QueryResult, RunOptions};
pub use graph::{EdgeId, Graph, VertexId};
pub use table::Table;
pub use value::{Type, Value};
