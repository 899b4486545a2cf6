//! Direction-aware regular path expressions: compilation, shortest-path
//! matching with multiplicities, and a brute-force enumeration oracle.

pub mod automaton;
pub mod matcher;
pub mod oracle;

use thiserror::Error;

pub use automaton::{compile_darpe, hop_label, DarpeAutomaton, Dir, DirSymbol};
pub use matcher::{match_darpe, match_path, MatchEntry, NodeSpec, PathSpec, VTest};
pub use oracle::{enumerate_legal_paths, Legality, Path};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DarpeError {
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
    #[error("adornment of `{name}` contradicts its {} edge type", if *directed { "directed" } else { "undirected" })]
    Adornment { name: String, directed: bool },
    #[error("edge {edge} does not connect vertices {u} and {v}")]
    NotIncident { edge: u32, u: u32, v: u32 },
    #[error("path expression too large to compile")]
    TooLarge,
    #[error("enumeration oracle limited to {limit} vertices, graph has {actual}")]
    OracleGuard { limit: usize, actual: usize },
}
