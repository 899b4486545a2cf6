//! Lexing, parsing, pretty-printing and static checking of DDL and queries.

pub mod ast;
pub mod checker;
pub mod lexer;
pub mod parser;
pub mod printer;

use thiserror::Error;

use ast::{DdlStmt, Expr, Pos, Query};
pub use lexer::tokenize;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

pub fn parse_ddl(text: &str) -> Result<Vec<DdlStmt>, SyntaxError> {
    parser::Parser::new(tokenize(text)?).parse_ddl()
}

/// Parses exactly one query in any of the accepted forms.
pub fn parse_query(text: &str) -> Result<Query, SyntaxError> {
    parser::Parser::new(tokenize(text)?).parse_query()
}

/// Parses a file of `CREATE QUERY` definitions (or one bare query).
pub fn parse_queries(text: &str) -> Result<Vec<Query>, SyntaxError> {
    parser::Parser::new(tokenize(text)?).parse_queries()
}

pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = parser::Parser::new(tokenize(text)?);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a bare path expression such as `E>*.F>`.
pub fn parse_darpe(text: &str) -> Result<ast::Darpe, SyntaxError> {
    let mut p = parser::Parser::new(tokenize(text)?);
    let d = p.darpe_alt()?;
    p.finish()?;
    Ok(d)
}
