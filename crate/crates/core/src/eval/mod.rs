//! Query evaluation: the clause pipeline of query blocks, two-phase
//! accumulator aggregation, control flow and query invocation.
//!
//! Evaluation is deterministic: phase-1 executions may run on a worker pool,
//! but their acc-inputs are collected in binding order and reduced
//! sequentially, so results are bit-identical for any thread count.

mod acc;
mod block;
pub(crate) mod expr;
pub mod render;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use indexmap::IndexMap;
use thiserror::Error;

use crate::accum::{self, AccError, AccType};
use crate::catalog::GraphDef;
use crate::context::{Context, GlobalAcc, VertexAcc};
use crate::darpe::{DarpeError, VTest};
use crate::frontend::ast::{AccOp, BaseType, ForeachIter, ParamType, Pos, Query, Stmt, StmtKind};
use crate::frontend::checker::{check_query, param_type, CheckEnv};
use crate::graph::{Graph, VertexId};
use crate::table::Table;
use crate::value::{Type, Value};

use expr::{coerce_to, type_default, Frame};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("{pos}: `{name}` is not bound")]
    Unbound { pos: Pos, name: String },
    #[error("{pos}: division by zero")]
    DivisionByZero { pos: Pos },
    #[error("{pos}: logarithm of non-positive value {value}")]
    Log { pos: Pos, value: f64 },
    #[error("{pos}: integer overflow")]
    Overflow { pos: Pos },
    #[error("{pos}: {msg}")]
    Runtime { pos: Pos, msg: String },
    #[error("{pos}: {source}")]
    Acc { pos: Pos, source: AccError },
    #[error("{pos}: {source}")]
    Darpe { pos: Pos, source: DarpeError },
    #[error("query `{query}` takes {expected} arguments, {found} given")]
    Arity { query: String, expected: usize, found: usize },
    #[error("argument `{name}`: {msg}")]
    Argument { name: String, msg: String },
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
}

impl EvalError {
    pub(crate) fn unbound(pos: Pos, name: impl Into<String>) -> Self {
        EvalError::Unbound { pos, name: name.into() }
    }

    pub(crate) fn acc(pos: Pos) -> impl FnOnce(AccError) -> EvalError {
        move |source| EvalError::Acc { pos, source }
    }
}

/// One accumulator instance: a global by index, or a vertex accumulator
/// (by index) at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum AccRef {
    Global(u32),
    Vertex(u32, VertexId),
}

/// Read-only state shared by every execution inside one phase.
pub(crate) struct Runtime<'r> {
    pub g: &'r Graph,
    pub ctx: &'r Context,
    pub dg: Option<&'r GraphDef>,
}

impl Runtime<'_> {
    /// `{T.*}`; `_` stands for every vertex type of the default graph.
    pub fn seed(&self, types: &[String]) -> Table {
        let catalog = self.g.catalog();
        let test = if types.iter().any(|t| t == "_") {
            VTest::graph(catalog, self.dg)
        } else {
            VTest::types(catalog, types.iter().map(String::as_str))
        };
        let vt = (types.len() == 1 && types[0] != "_").then(|| types[0].clone());
        Table::vertex_set("seed", "v", vt, test.candidates(self.g))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads for phase 1 and path matching; 0 uses all cores.
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct QueryResult {
    /// Output tables by name, in the order they were produced.
    pub tables: IndexMap<String, Table>,
    pub ret: Option<Value>,
    pub ctx: Context,
    pub warnings: Vec<String>,
}

/// Parses and checks one query against the graph's catalog and the given
/// relational tables.
pub fn prepare(text: &str, g: &Graph, tables: &BTreeMap<String, Table>) -> crate::Result<Query> {
    let mut q = crate::frontend::parse_query(text)?;
    check(&mut q, g, tables)?;
    Ok(q)
}

pub fn check(q: &mut Query, g: &Graph, tables: &BTreeMap<String, Table>) -> crate::Result<()> {
    let mut env = CheckEnv::new(g.catalog());
    for (name, t) in tables {
        env.tables.insert(name.clone(), t.columns.iter().cloned().zip(t.types.iter().cloned()).collect());
    }
    check_query(q, &env)?;
    Ok(())
}

/// Runs a checked query. `tables` are the relational tables in scope;
/// `args` bind the parameters positionally.
pub fn run_query(
    g: &Graph,
    tables: &BTreeMap<String, Table>,
    q: &Query,
    args: Vec<Value>,
    opts: &RunOptions,
) -> Result<QueryResult, EvalError> {
    let name = q.name.clone().unwrap_or_else(|| "query".into());
    if args.len() != q.params.len() {
        return Err(EvalError::Arity { query: name, expected: q.params.len(), found: args.len() });
    }
    let dg = match &q.graph {
        Some(n) => Some(g.catalog().graph(n).ok_or_else(|| EvalError::UnknownGraph(n.clone()))?),
        None => None,
    };
    let mut ctx = Context { default_graph: q.graph.clone(), ..Context::default() };
    for (n, t) in tables {
        ctx.vars.insert(n.clone(), Value::Table(Arc::new(t.clone())));
    }
    for (p, a) in q.params.iter().zip(args) {
        ctx.vars.insert(p.name.clone(), check_arg(g, &p.ty, &p.name, a)?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| EvalError::Runtime { pos: q.pos, msg: format!("thread pool: {e}") })?;
    let mut it = Interp { g, dg, ctx, tables: IndexMap::new(), warnings: Mutex::new(Vec::new()), threads: pool.current_num_threads() };
    pool.install(|| -> Result<_, EvalError> {
        it.exec(&q.body)?;
        let ret = q.ret.as_ref().map(|r| it.eval(r)).transpose()?;
        Ok(QueryResult {
            tables: std::mem::take(&mut it.tables),
            ret,
            ctx: std::mem::take(&mut it.ctx),
            warnings: std::mem::take(&mut *it.warnings.lock().expect("warning list")),
        })
    })
}

fn check_arg(g: &Graph, ty: &ParamType, name: &str, a: Value) -> Result<Value, EvalError> {
    let want = param_type(ty);
    let a = coerce_to(&want, a);
    let ok = match (&want, &a) {
        (Type::Vertex(Some(t)), Value::Vertex(v)) => v.index() < g.vertex_count() && g.vertex_type_name(*v) == t,
        (Type::Vertex(None), Value::Vertex(v)) => v.index() < g.vertex_count(),
        (Type::Int, Value::Int(_)) | (Type::Float, Value::Float(_)) | (Type::Str, Value::Str(_)) => true,
        (Type::Bool, Value::Bool(_)) | (Type::DateTime, Value::DateTime(_)) => true,
        (Type::Set(_), Value::Set(_)) | (Type::Bag(_), Value::Bag(_)) | (Type::Map(..), Value::Map(_)) => true,
        (Type::Edge(_), Value::Edge(_)) | (Type::Tuple(_), Value::Tuple(_)) => true,
        _ => false,
    };
    if ok {
        Ok(a)
    } else {
        Err(EvalError::Argument { name: name.into(), msg: format!("expected {want}, found {}", a.type_name()) })
    }
}

/// Converts a command-line word to an argument of the declared type.
/// Vertex parameters are looked up by primary key; collections take
/// comma-separated elements.
pub fn parse_arg(g: &Graph, ty: &ParamType, name: &str, word: &str) -> Result<Value, EvalError> {
    let bad = |msg: String| EvalError::Argument { name: name.into(), msg };
    let base = |b: &BaseType, w: &str| -> Result<Value, EvalError> {
        let w = w.trim();
        Ok(match b {
            BaseType::Int | BaseType::Uint => Value::Int(w.parse().map_err(|_| bad(format!("`{w}` is not an int")))?),
            BaseType::Float | BaseType::Double => Value::Float(w.parse().map_err(|_| bad(format!("`{w}` is not a number")))?),
            BaseType::Bool => Value::Bool(w.parse().map_err(|_| bad(format!("`{w}` is not a bool")))?),
            BaseType::String => Value::str(w),
            BaseType::DateTime => {
                Value::DateTime(crate::value::parse_datetime(w).ok_or_else(|| bad(format!("`{w}` is not a datetime")))?)
            }
            BaseType::Vertex(vt) => Value::Vertex(lookup_vertex(g, vt.as_deref(), w).ok_or_else(|| bad(format!("no vertex `{w}`")))?),
            BaseType::Edge(_) | BaseType::Tuple(_) => return Err(bad("cannot be given on the command line".into())),
        })
    };
    let items = |b: &BaseType| -> Result<Vec<Value>, EvalError> {
        word.split(',').filter(|w| !w.trim().is_empty()).map(|w| base(b, w)).collect()
    };
    Ok(match ty {
        ParamType::Base(b) => base(b, word)?,
        ParamType::Set(b) => Value::set(items(b)?),
        ParamType::Bag(b) => Value::bag(items(b)?),
        ParamType::Map(..) => return Err(bad("map arguments cannot be given on the command line".into())),
    })
}

/// A vertex by primary-key text, trying each candidate type.
pub fn lookup_vertex(g: &Graph, vtype: Option<&str>, key: &str) -> Option<VertexId> {
    let catalog = g.catalog();
    let types: Vec<&str> = match vtype {
        Some(t) => vec![t],
        None => catalog.vertex_types().map(|t| t.name.as_str()).collect(),
    };
    types.into_iter().find_map(|t| {
        let def = catalog.vertex_type(t)?;
        let pk = crate::graph::coerce_attr(Value::str(key), def.pk().dtype)?;
        g.lookup(t, &pk)
    })
}

pub(crate) fn push_warning(w: &Mutex<Vec<String>>, msg: String) {
    log::warn!("{msg}");
    let mut w = w.lock().expect("warning list");
    if !w.contains(&msg) {
        w.push(msg);
    }
}

/// Outcome of a statement for the enclosing loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Next,
    Break,
    Continue,
}

/// Mutable top-level state of one query run.
pub(crate) struct Interp<'g> {
    pub g: &'g Graph,
    pub dg: Option<&'g GraphDef>,
    pub ctx: Context,
    pub tables: IndexMap<String, Table>,
    pub warnings: Mutex<Vec<String>>,
    pub threads: usize,
}

impl<'g> Interp<'g> {
    pub fn runtime(&self) -> Runtime<'_> {
        Runtime { g: self.g, ctx: &self.ctx, dg: self.dg }
    }

    pub fn eval(&self, e: &crate::frontend::ast::Expr) -> Result<Value, EvalError> {
        let rt = self.runtime();
        Frame::new(&rt, &[], &[]).eval(e)
    }

    fn truth(&self, e: &crate::frontend::ast::Expr) -> Result<bool, EvalError> {
        let rt = self.runtime();
        Frame::new(&rt, &[], &[]).truth(e)
    }

    pub fn exec(&mut self, body: &[Stmt]) -> Result<Flow, EvalError> {
        for s in body {
            match self.stmt(s)? {
                Flow::Next => {}
                flow => return Ok(flow),
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, EvalError> {
        let pos = s.pos;
        match &s.kind {
            StmtKind::AccDecl(d) => {
                let ast_ty = AccType::from_ast(&d.ty).map_err(EvalError::acc(pos))?;
                let ty = ast_ty.resolve(&|p| self.ctx.var(p).cloned()).map_err(EvalError::acc(pos))?;
                for n in &d.names {
                    let init = match &n.init {
                        Some(e) => accum::assign(&ty, &self.eval(e)?).map_err(EvalError::acc(n.pos))?,
                        None => accum::default_value(&ty),
                    };
                    if n.global {
                        self.ctx.gaccs.insert(n.name.clone(), GlobalAcc::new(ty.clone(), init));
                    } else {
                        let acc = VertexAcc::new(ty.clone(), init, self.g.vertex_count());
                        self.ctx.vaccs.insert(n.name.clone(), acc);
                    }
                }
            }
            StmtKind::VarDecl { ty, name, init } => {
                let t = ty.semantic();
                let v = match init {
                    Some(e) => coerce_to(&t, self.eval(e)?),
                    None => type_default(&t),
                };
                self.ctx.vars.insert(name.clone(), v);
            }
            StmtKind::Assign { name, expr, .. } => {
                let v = self.eval(expr)?;
                let v = match (self.ctx.vars.get(name), v) {
                    (Some(Value::Float(_)), Value::Int(i)) => Value::Float(i as f64),
                    (_, v) => v,
                };
                if let Value::Table(t) = &v {
                    let mut t = t.as_ref().clone();
                    t.name = name.clone();
                    self.ctx.vars.insert(name.clone(), Value::Table(Arc::new(t)));
                } else {
                    self.ctx.vars.insert(name.clone(), v);
                }
            }
            StmtKind::GAcc { name, op, expr } => {
                let v = self.eval(expr)?;
                let a = self.ctx.gaccs.get_mut(name).ok_or_else(|| EvalError::unbound(pos, format!("@@{name}")))?;
                match op {
                    AccOp::Set => a.cur = accum::assign(&a.ty, &v).map_err(EvalError::acc(pos))?,
                    AccOp::Add => accum::combine(&a.ty, &mut a.cur, &v).map_err(EvalError::acc(pos))?,
                }
            }
            StmtKind::VAcc { var, acc, op, expr } => {
                let x = self.ctx.var(var).and_then(Value::as_vertex).ok_or_else(|| EvalError::unbound(pos, var.clone()))?;
                let v = self.eval(expr)?;
                let a = self.ctx.vaccs.get_mut(acc).ok_or_else(|| EvalError::unbound(pos, format!("@{acc}")))?;
                let ty = a.ty.clone();
                let slot = &mut a.cur_mut()[x.index()];
                match op {
                    AccOp::Set => *slot = accum::assign(&ty, &v).map_err(EvalError::acc(pos))?,
                    AccOp::Add => accum::combine(&ty, slot, &v).map_err(EvalError::acc(pos))?,
                }
            }
            StmtKind::Block(b) => block::run_block(self, b)?,
            StmtKind::If { branches, else_body } => {
                for (c, body) in branches {
                    if self.truth(c)? {
                        return self.exec(body);
                    }
                }
                if let Some(b) = else_body {
                    return self.exec(b);
                }
            }
            StmtKind::Case { operand, whens, else_body } => {
                let op = operand.as_ref().map(|o| self.eval(o)).transpose()?;
                for (c, body) in whens {
                    let hit = match &op {
                        Some(o) => crate::value::sql_eq(o, &self.eval(c)?) == Some(true),
                        None => self.truth(c)?,
                    };
                    if hit {
                        return self.exec(body);
                    }
                }
                if let Some(b) = else_body {
                    return self.exec(b);
                }
            }
            StmtKind::While { cond, limit, body } => {
                let limit = match limit {
                    Some(l) => Some(self.eval(l)?.as_i64().unwrap_or(0).max(0) as u64),
                    None => None,
                };
                let mut n = 0u64;
                while limit.is_none_or(|l| n < l) && self.truth(cond)? {
                    n += 1;
                    if self.exec(body)? == Flow::Break {
                        break;
                    }
                }
            }
            StmtKind::Foreach { vars, iter, body } => {
                let items = match iter {
                    ForeachIter::Range(lo, hi) => {
                        let (lo, hi) = (self.eval(lo)?, self.eval(hi)?);
                        let (Some(lo), Some(hi)) = (lo.as_i64(), hi.as_i64()) else {
                            return Err(EvalError::Runtime { pos, msg: "RANGE bounds must be ints".into() });
                        };
                        (lo..=hi).map(Value::Int).collect()
                    }
                    ForeachIter::Expr(e) => {
                        let v = self.eval(e)?;
                        v.elements().ok_or(EvalError::Runtime { pos, msg: format!("cannot iterate over {}", v.type_name()) })?
                    }
                };
                let saved: Vec<(String, Option<Value>)> = vars.iter().map(|v| (v.clone(), self.ctx.vars.get(v).cloned())).collect();
                let mut result = Ok(Flow::Next);
                for item in items {
                    for (name, val) in vars.iter().zip(destructure(item, vars.len(), pos)?) {
                        self.ctx.vars.insert(name.clone(), val);
                    }
                    match self.exec(body) {
                        Ok(Flow::Break) => break,
                        Ok(_) => {}
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                for (name, old) in saved {
                    match old {
                        Some(v) => self.ctx.vars.insert(name, v),
                        None => self.ctx.vars.remove(&name),
                    };
                }
                result?;
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
        }
        Ok(Flow::Next)
    }
}

/// Splits a loop element over `n` loop variables.
pub(crate) fn destructure(item: Value, n: usize, pos: Pos) -> Result<Vec<Value>, EvalError> {
    if n == 1 {
        return Ok(vec![item]);
    }
    match item {
        Value::Tuple(t) if t.values.len() == n => Ok(t.values.clone()),
        other => Err(EvalError::Runtime { pos, msg: format!("cannot destructure {} into {n} variables", other.type_name()) }),
    }
}
