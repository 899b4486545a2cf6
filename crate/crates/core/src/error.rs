//! Crate-wide error type wrapping each stage's errors.

use thiserror::Error;

use crate::accum::AccError;
use crate::catalog::CatalogError;
use crate::darpe::DarpeError;
use crate::eval::EvalError;
use crate::frontend::checker::CheckError;
use crate::frontend::SyntaxError;
use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Acc(#[from] AccError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Darpe(#[from] DarpeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
