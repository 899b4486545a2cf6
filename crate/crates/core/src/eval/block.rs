//! The query-block pipeline: FROM, WHERE, ACCUM, then per output GROUP BY,
//! SELECT, POST_ACCUM, HAVING, ORDER BY and LIMIT.

use std::cmp::Ordering;
use std::sync::Arc;

use indexmap::IndexMap;
use rayon::prelude::*;

use super::acc;
use super::expr::{Frame, Group};
use super::{push_warning, EvalError, Interp, Runtime};
use crate::binding::BindingTable;
use crate::catalog::GraphDef;
use crate::darpe::{match_path, PathSpec, VTest};
use crate::frontend::ast::{Atom, Distinctness, OutTable, QueryBlock, SortDir, Stmt, VNode, VTestRes};
use crate::frontend::checker::{column_names, has_aggregate, output_name};
use crate::table::Table;
use crate::value::{order_cmp, Type, Value};

/// One SELECT row with the binding rows it came from.
struct OutRow {
    vals: Vec<Value>,
    /// Indices into the block's binding table; the first is the
    /// representative for non-aggregate references.
    rows: Vec<usize>,
    mult: u64,
}

pub(crate) fn run_block(it: &mut Interp, b: &QueryBlock) -> Result<(), EvalError> {
    let bt = {
        let rt = it.runtime();
        let mut bt = from(&rt, &b.from)?;
        if let Some(w) = &b.where_clause {
            let keep: Vec<bool> = (0..bt.len())
                .into_par_iter()
                .map(|i| Frame::new(&rt, &bt.vars, bt.row(i)).truth(w))
                .collect::<Result<_, _>>()?;
            bt.retain_rows(|i| keep[i]);
        }
        bt
    };

    let inputs = {
        let rt = it.runtime();
        acc::phase1(&rt, &bt.vars, bt.len(), |i| (bt.row(i), bt.multiplicity(i)), &b.accum)?
    };
    acc::refresh_primes(&mut it.ctx);
    let warnings = &it.warnings;
    acc::apply(&mut it.ctx, &|m| push_warning(warnings, m), it.threads, inputs)?;

    for i in 0..b.outputs.len() {
        let out = &b.outputs[i];
        let names = column_names(out);
        let rows = {
            let rt = it.runtime();
            let rows = select(&rt, &bt, out, b.group_by.get(i).map(Vec::as_slice).unwrap_or_default())?;
            if distinct(out, &rows) {
                dedup(rows)
            } else {
                rows
            }
        };
        if i == 0 && !b.post_accum.is_empty() {
            post_accum(it, out, &names, &rows, &b.post_accum)?;
        }
        let rt = it.runtime();
        let mut ext_vars = bt.vars.clone();
        ext_vars.extend(names.iter().cloned());
        let ext_row = |r: &OutRow| -> Vec<Value> {
            let mut v = match r.rows.first() {
                Some(&k) => bt.row(k).to_vec(),
                None => vec![Value::Null; bt.width()],
            };
            v.extend(r.vals.iter().cloned());
            v
        };
        let frame_eval = |r: &OutRow, f: &dyn Fn(&Frame) -> Result<Value, EvalError>| -> Result<Value, EvalError> {
            let row = ext_row(r);
            let mut frame = Frame::new(&rt, &ext_vars, &row);
            frame.group = Some(Group { table: &bt, rows: &r.rows });
            f(&frame)
        };

        let mut rows = rows;
        if let Some(h) = b.having.get(i) {
            let keep: Vec<bool> = rows
                .par_iter()
                .map(|r| frame_eval(r, &|f| f.truth(h).map(Value::Bool)).map(|v| v == Value::Bool(true)))
                .collect::<Result<_, _>>()?;
            let mut k = keep.into_iter();
            rows.retain(|_| k.next().unwrap_or(false));
        }
        if let Some(keys) = b.order_by.get(i).filter(|k| !k.is_empty()) {
            let sort_keys: Vec<Vec<Value>> = rows
                .par_iter()
                .map(|r| keys.iter().map(|k| frame_eval(r, &|f| f.eval(&k.expr))).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?;
            let mut idx: Vec<usize> = (0..rows.len()).collect();
            idx.sort_by(|&x, &y| {
                for (j, k) in keys.iter().enumerate() {
                    let o = order_cmp(&sort_keys[x][j], &sort_keys[y][j]);
                    let o = if k.dir == Some(SortDir::Desc) { o.reverse() } else { o };
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            });
            let mut slots: Vec<Option<OutRow>> = rows.into_iter().map(Some).collect();
            rows = idx.into_iter().map(|k| slots[k].take().expect("permutation")).collect();
        }
        let limit = match b.limit.get(i) {
            Some(l) => {
                let v = Frame::new(&rt, &[], &[]).eval(l)?;
                match v.as_i64() {
                    Some(n) if n >= 0 => Some(n as u64),
                    _ => return Err(EvalError::Runtime { pos: l.pos, msg: format!("LIMIT must be a non-negative int, found {v}") }),
                }
            }
            None => None,
        };

        let types: Vec<Type> = out.cols.iter().map(|c| c.expr.ty().clone()).collect();
        let name = output_name(b, i);
        let mut table = Table::new(name.clone(), names, types);
        'rows: for r in rows {
            for _ in 0..r.mult {
                if limit.is_some_and(|l| table.rows.len() as u64 >= l) {
                    break 'rows;
                }
                table.rows.push(r.vals.clone());
            }
        }
        drop(rt);
        it.ctx.vars.insert(name.clone(), Value::Table(Arc::new(table.clone())));
        it.tables.insert(name, table);
    }
    Ok(())
}

/// Whether an output is duplicate-free: DISTINCT, or a bare vertex
/// variable without ALL.
fn distinct(out: &OutTable, rows: &[OutRow]) -> bool {
    match out.distinct {
        Distinctness::Distinct => true,
        Distinctness::All => false,
        Distinctness::Default => {
            out.cols.len() == 1
                && out.cols[0].expr.as_var().is_some()
                && match out.cols[0].expr.ty() {
                    Type::Vertex(_) => true,
                    Type::Any => rows.iter().all(|r| matches!(r.vals[0], Value::Vertex(_))),
                    _ => false,
                }
        }
    }
}

/// Merges rows with equal values, keeping first-occurrence order.
fn dedup(rows: Vec<OutRow>) -> Vec<OutRow> {
    let mut index: IndexMap<Vec<Value>, Vec<usize>> = IndexMap::with_capacity(rows.len());
    for r in rows {
        index.entry(r.vals).or_default().extend(r.rows);
    }
    index.into_iter().map(|(vals, rows)| OutRow { vals, rows, mult: 1 }).collect()
}

fn select(rt: &Runtime, bt: &BindingTable, out: &OutTable, group_by: &[crate::frontend::ast::Expr]) -> Result<Vec<OutRow>, EvalError> {
    let grouped = !group_by.is_empty() || out.cols.iter().any(|c| has_aggregate(&c.expr));
    if !grouped {
        return (0..bt.len())
            .into_par_iter()
            .map(|i| {
                let f = Frame::new(rt, &bt.vars, bt.row(i));
                let vals = out.cols.iter().map(|c| f.eval(&c.expr)).collect::<Result<_, _>>()?;
                Ok(OutRow { vals, rows: vec![i], mult: bt.multiplicity(i) })
            })
            .collect();
    }
    let keys: Vec<Vec<Value>> = (0..bt.len())
        .into_par_iter()
        .map(|i| {
            let f = Frame::new(rt, &bt.vars, bt.row(i));
            group_by.iter().map(|k| f.eval(k)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut groups: IndexMap<Vec<Value>, Vec<usize>> = IndexMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    // Aggregation without GROUP BY yields one row even over no bindings.
    if groups.is_empty() && group_by.is_empty() {
        groups.insert(Vec::new(), Vec::new());
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups
        .into_par_iter()
        .map(|rows| {
            let empty: [Value; 0] = [];
            let (vars, row): (&[String], &[Value]) = match rows.first() {
                Some(&k) => (&bt.vars, bt.row(k)),
                None => (&[], &empty),
            };
            let mut f = Frame::new(rt, vars, row);
            f.group = Some(Group { table: bt, rows: &rows });
            let vals = out.cols.iter().map(|c| f.eval(&c.expr)).collect::<Result<_, _>>()?;
            drop(f);
            Ok(OutRow { vals, rows, mult: 1 })
        })
        .collect()
}

/// POST_ACCUM: one execution per distinct output row, with bare-variable
/// columns bound by their variable name and aliased columns by alias.
fn post_accum(it: &mut Interp, out: &OutTable, names: &[String], rows: &[OutRow], stmts: &[Stmt]) -> Result<(), EvalError> {
    let mut vars = Vec::new();
    let mut pick = Vec::new();
    for (j, c) in out.cols.iter().enumerate() {
        if let Some(v) = c.expr.as_var() {
            vars.push(v.to_string());
            pick.push(j);
        }
        if c.alias.is_some() {
            vars.push(names[j].clone());
            pick.push(j);
        }
    }
    let mut seen: IndexMap<Vec<Value>, ()> = IndexMap::new();
    for r in rows {
        seen.entry(pick.iter().map(|&j| r.vals[j].clone()).collect()).or_default();
    }
    let prows: Vec<Vec<Value>> = seen.into_keys().collect();
    let inputs = {
        let rt = it.runtime();
        acc::phase1(&rt, &vars, prows.len(), |i| (prows[i].as_slice(), 1), stmts)?
    };
    let warnings = &it.warnings;
    acc::apply(&mut it.ctx, &|m| push_warning(warnings, m), it.threads, inputs)
}

fn from(rt: &Runtime, atoms: &[Atom]) -> Result<BindingTable, EvalError> {
    let mut acc: Option<BindingTable> = None;
    for a in atoms {
        let t = match a {
            Atom::Rel { table, var, pos } => {
                let Some(Value::Table(t)) = rt.ctx.var(table) else {
                    return Err(EvalError::unbound(*pos, table.clone()));
                };
                let mut bt = BindingTable::new(vec![var.clone()]);
                bt.reserve(t.len());
                for e in t.elements() {
                    bt.push([e], 1);
                }
                bt
            }
            Atom::Graph { graph, pattern, pos } => {
                let catalog = rt.g.catalog();
                let gd = match graph {
                    Some(n) => Some(catalog.graph(n).ok_or_else(|| EvalError::UnknownGraph(n.clone()))?),
                    None => rt.dg,
                };
                let mut bt: Option<BindingTable> = None;
                for p in pattern {
                    let spec = PathSpec::compile(p, catalog, gd, |node| vtest(rt, gd, node))
                        .map_err(|source| EvalError::Darpe { pos: *pos, source })?;
                    let m = match_path(rt.g, &spec);
                    bt = Some(match bt {
                        Some(prev) => prev.join(&m),
                        None => m,
                    });
                }
                bt.unwrap_or_else(BindingTable::unit)
            }
        };
        acc = Some(match acc {
            Some(prev) => prev.join(&t),
            None => t,
        });
    }
    Ok(acc.unwrap_or_else(BindingTable::unit))
}

/// Admissible vertices of a pattern node; a variable already bound to a
/// vertex in the context pins the node to that vertex.
fn vtest(rt: &Runtime, gd: Option<&GraphDef>, node: &VNode) -> VTest {
    let catalog = rt.g.catalog();
    let names = |ns: &[String]| {
        if ns.is_empty() {
            VTest::graph(catalog, gd)
        } else {
            VTest::types(catalog, ns.iter().map(String::as_str))
        }
    };
    let base = match &node.res {
        Some(VTestRes::Any) => VTest::graph(catalog, gd),
        Some(VTestRes::Types(ns)) => names(ns),
        Some(VTestRes::VertexSet(n)) => match rt.ctx.var(n) {
            Some(Value::Table(t)) => VTest::set(t.vertices()),
            Some(v) => VTest::set(v.elements().unwrap_or_default().iter().filter_map(Value::as_vertex)),
            None => VTest::set([]),
        },
        None => names(&node.names),
    };
    match node.var.as_ref().and_then(|v| rt.ctx.var(v)) {
        Some(Value::Vertex(x)) => base.and(&VTest::set([*x]), rt.g),
        _ => base,
    }
}
