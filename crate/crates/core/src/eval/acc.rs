//! ACCUM and POST_ACCUM execution.
//!
//! Phase 1 interprets the statements once per binding against a frozen
//! context and emits acc-inputs tagged with the binding's multiplicity.
//! Phase 2 reduces them into the context.

use std::collections::HashMap;

use rayon::prelude::*;

use super::expr::{coerce_to, Frame};
use super::{destructure, AccRef, EvalError, Flow, Runtime};
use crate::accum::{self, AccType};
use crate::context::Context;
use crate::frontend::ast::{AccOp, ForeachIter, Pos, Stmt, StmtKind};
use crate::value::{sql_eq, Value};

/// Bindings per phase-1 work item.
const CHUNK: usize = 512;

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Add(Value),
    Set(Value),
}

#[derive(Debug, Clone)]
pub(crate) struct Input {
    pub target: AccRef,
    pub op: Op,
    pub mult: u64,
    pub pos: Pos,
}

/// Runs `stmts` for every row; row `i` is `(row(i), multiplicity)`.
/// Inputs come back in row order regardless of scheduling.
pub(crate) fn phase1<'a, F>(rt: &Runtime, vars: &[String], n: usize, row: F, stmts: &[Stmt]) -> Result<Vec<Input>, EvalError>
where
    F: Fn(usize) -> (&'a [Value], u64) + Sync,
{
    if stmts.is_empty() || n == 0 {
        return Ok(Vec::new());
    }
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let parts: Vec<Vec<Input>> = starts
        .par_iter()
        .map(|&s| {
            let mut out = Vec::new();
            for i in s..(s + CHUNK).min(n) {
                let (r, m) = row(i);
                let mut frame = Frame::new(rt, vars, r);
                let mut exec = Vec::new();
                body(&mut frame, stmts, &mut exec)?;
                out.extend(exec.into_iter().map(|(target, op, pos)| Input { target, op, mult: m, pos }));
            }
            Ok(out)
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(parts.into_iter().flatten().collect())
}

type Exec = Vec<(AccRef, Op, Pos)>;

fn body(f: &mut Frame, stmts: &[Stmt], out: &mut Exec) -> Result<Flow, EvalError> {
    let mark = f.locals.len();
    let mut flow = Flow::Next;
    for s in stmts {
        flow = stmt(f, s, out)?;
        if flow != Flow::Next {
            break;
        }
    }
    f.locals.truncate(mark);
    Ok(flow)
}

fn acc_type<'c>(ctx: &'c Context, r: AccRef) -> &'c AccType {
    match r {
        AccRef::Global(i) => &ctx.gaccs[i as usize].ty,
        AccRef::Vertex(i, _) => &ctx.vaccs[i as usize].ty,
    }
}

fn emit(f: &mut Frame, target: AccRef, op: AccOp, v: Value, pos: Pos, out: &mut Exec) -> Result<(), EvalError> {
    match op {
        AccOp::Add => out.push((target, Op::Add(v), pos)),
        AccOp::Set => {
            let ty = acc_type(f.rt.ctx, target);
            let seen = accum::read(ty, &accum::assign(ty, &v).map_err(EvalError::acc(pos))?);
            // A set supersedes this execution's earlier inputs to the instance.
            out.retain(|(t, _, _)| *t != target);
            out.push((target, Op::Set(v), pos));
            f.sets.push((target, seen));
        }
    }
    Ok(())
}

fn stmt(f: &mut Frame, s: &Stmt, out: &mut Exec) -> Result<Flow, EvalError> {
    let pos = s.pos;
    match &s.kind {
        StmtKind::VarDecl { ty, name, init } => {
            let t = ty.semantic();
            let v = match init {
                Some(e) => coerce_to(&t, f.eval(e)?),
                None => super::expr::type_default(&t),
            };
            f.locals.push((name.clone(), v));
        }
        StmtKind::Assign { name, expr, .. } => {
            let v = f.eval(expr)?;
            match f.locals.iter_mut().rev().find(|(n, _)| n == name) {
                Some((_, slot)) => {
                    *slot = match (&*slot, v) {
                        (Value::Float(_), Value::Int(i)) => Value::Float(i as f64),
                        (_, v) => v,
                    }
                }
                None => f.locals.push((name.clone(), v)),
            }
        }
        StmtKind::GAcc { name, op, expr } => {
            let idx = f.rt.ctx.gaccs.get_index_of(name).ok_or_else(|| EvalError::unbound(pos, format!("@@{name}")))?;
            let v = f.eval(expr)?;
            emit(f, AccRef::Global(idx as u32), *op, v, pos, out)?;
        }
        StmtKind::VAcc { var, acc, op, expr } => {
            let idx = f.rt.ctx.vaccs.get_index_of(acc).ok_or_else(|| EvalError::unbound(pos, format!("@{acc}")))?;
            let x = match f.lookup(var) {
                Some(Value::Vertex(x)) => *x,
                Some(other) => return Err(EvalError::Runtime { pos, msg: format!("`{var}` is a {}", other.type_name()) }),
                None => return Err(EvalError::unbound(pos, var.clone())),
            };
            let v = f.eval(expr)?;
            emit(f, AccRef::Vertex(idx as u32, x), *op, v, pos, out)?;
        }
        StmtKind::If { branches, else_body } => {
            for (c, b) in branches {
                if f.truth(c)? {
                    return body(f, b, out);
                }
            }
            if let Some(b) = else_body {
                return body(f, b, out);
            }
        }
        StmtKind::Case { operand, whens, else_body } => {
            let op = operand.as_ref().map(|o| f.eval(o)).transpose()?;
            for (c, b) in whens {
                let hit = match &op {
                    Some(o) => sql_eq(o, &f.eval(c)?) == Some(true),
                    None => f.truth(c)?,
                };
                if hit {
                    return body(f, b, out);
                }
            }
            if let Some(b) = else_body {
                return body(f, b, out);
            }
        }
        StmtKind::While { cond, limit, body: b } => {
            let limit = match limit {
                Some(l) => Some(f.eval(l)?.as_i64().unwrap_or(0).max(0) as u64),
                None => None,
            };
            let mut n = 0u64;
            while limit.is_none_or(|l| n < l) && f.truth(cond)? {
                n += 1;
                if body(f, b, out)? == Flow::Break {
                    break;
                }
            }
        }
        StmtKind::Foreach { vars, iter, body: b } => {
            let items: Vec<Value> = match iter {
                ForeachIter::Range(lo, hi) => match (f.eval(lo)?.as_i64(), f.eval(hi)?.as_i64()) {
                    (Some(lo), Some(hi)) => (lo..=hi).map(Value::Int).collect(),
                    _ => return Err(EvalError::Runtime { pos, msg: "RANGE bounds must be ints".into() }),
                },
                ForeachIter::Expr(e) => {
                    let v = f.eval(e)?;
                    v.elements().ok_or(EvalError::Runtime { pos, msg: format!("cannot iterate over {}", v.type_name()) })?
                }
            };
            let mark = f.locals.len();
            for item in items {
                f.locals.truncate(mark);
                for (name, val) in vars.iter().zip(destructure(item, vars.len(), pos)?) {
                    f.locals.push((name.clone(), val));
                }
                if body(f, b, out)? == Flow::Break {
                    break;
                }
            }
            f.locals.truncate(mark);
        }
        StmtKind::Break => return Ok(Flow::Break),
        StmtKind::Continue => return Ok(Flow::Continue),
        StmtKind::AccDecl(_) | StmtKind::Block(_) => {
            return Err(EvalError::Runtime { pos, msg: "statement not allowed inside ACCUM".into() })
        }
    }
    Ok(Flow::Next)
}

/// `A' <- A` for every accumulator instance.
pub(crate) fn refresh_primes(ctx: &mut Context) {
    for a in ctx.gaccs.values_mut() {
        a.prev = a.cur.clone();
    }
    for a in ctx.vaccs.values_mut() {
        a.refresh_prime();
    }
}

fn name_of(ctx: &Context, r: AccRef) -> String {
    match r {
        AccRef::Global(i) => format!("@@{}", ctx.gaccs.get_index(i as usize).map_or("?", |(n, _)| n.as_str())),
        AccRef::Vertex(i, _) => format!("@{}", ctx.vaccs.get_index(i as usize).map_or("?", |(n, _)| n.as_str())),
    }
}

/// Phase 2: the last set per instance becomes its base value, then every
/// add is combined in binding order.
pub(crate) fn apply(ctx: &mut Context, rt_warn: &dyn Fn(String), threads: usize, inputs: Vec<Input>) -> Result<(), EvalError> {
    let mut last_set: HashMap<AccRef, usize> = HashMap::new();
    let mut adds: HashMap<AccRef, u32> = HashMap::new();
    for (i, inp) in inputs.iter().enumerate() {
        match &inp.op {
            Op::Set(v) => {
                if let Some(&j) = last_set.get(&inp.target) {
                    if let Op::Set(w) = &inputs[j].op {
                        if w != v {
                            rt_warn(format!(
                                "{}: executions set {} to different values; the last in binding order wins",
                                inp.pos,
                                name_of(ctx, inp.target)
                            ));
                        }
                    }
                }
                last_set.insert(inp.target, i);
            }
            Op::Add(_) => {
                if threads > 1 && !acc_type(ctx, inp.target).order_invariant() {
                    let n = adds.entry(inp.target).or_default();
                    *n += 1;
                    if *n == 2 {
                        rt_warn(format!(
                            "{}: order-sensitive accumulator {} receives several inputs in one phase; combined in binding order",
                            inp.pos,
                            name_of(ctx, inp.target)
                        ));
                    }
                }
            }
        }
    }
    let mut sets: Vec<usize> = last_set.into_values().collect();
    sets.sort_unstable();
    for i in sets {
        let Input { target, op: Op::Set(v), pos, .. } = &inputs[i] else { unreachable!("indexed a set") };
        with_slot(ctx, *target, |ty, cur| {
            *cur = accum::assign(ty, v)?;
            Ok(())
        })
        .map_err(EvalError::acc(*pos))?;
    }
    for inp in &inputs {
        if let Op::Add(v) = &inp.op {
            with_slot(ctx, inp.target, |ty, cur| accum::combine_n(ty, cur, v, inp.mult)).map_err(EvalError::acc(inp.pos))?;
        }
    }
    Ok(())
}

fn with_slot<R>(ctx: &mut Context, r: AccRef, f: impl FnOnce(&AccType, &mut accum::AccumValue) -> R) -> R {
    match r {
        AccRef::Global(i) => {
            let a = &mut ctx.gaccs[i as usize];
            f(&a.ty, &mut a.cur)
        }
        AccRef::Vertex(i, v) => {
            let a = &mut ctx.vaccs[i as usize];
            f(&a.ty, &mut std::sync::Arc::make_mut(&mut a.cur)[v.index()])
        }
    }
}
