//! Static checking: name resolution and type inference over a parsed query.
//!
//! On success every expression carries its inferred type, every variable
//! reference records where it was introduced, every v-test records whether
//! it names vertex types or a vertex set, and aggregate calls are marked.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::*;
use super::printer::print_expr;
use crate::accum::{AccError, AccType};
use crate::catalog::{Catalog, GraphDef};
use crate::value::Type;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error("{pos}: unknown {what} `{name}`")]
    Unknown { pos: Pos, what: &'static str, name: String },
    #[error("{pos}: type mismatch: {msg}")]
    TypeMismatch { pos: Pos, msg: String },
    #[error("{pos}: edge variable `{var}` is only allowed on a single-hop path expression")]
    EdgeVarOnMultiHop { pos: Pos, var: String },
    #[error("{pos}: unsupported accumulator: {source}")]
    UnsupportedAccumulator { pos: Pos, source: AccError },
    #[error("{pos}: primed accumulator `{name}` read outside a loop body")]
    PrimeOutsideLoop { pos: Pos, name: String },
    #[error("{pos}: `{name}` is already declared")]
    Duplicate { pos: Pos, name: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

/// What the checker may assume about the evaluation context.
pub struct CheckEnv<'a> {
    pub catalog: &'a Catalog,
    /// Column schemas of tables already loaded into the context.
    pub tables: HashMap<String, Vec<(String, Type)>>,
}

impl<'a> CheckEnv<'a> {
    pub fn new(catalog: &'a Catalog) -> Self {
        CheckEnv { catalog, tables: HashMap::new() }
    }
}

/// Semantic type of a declared parameter.
pub fn param_type(t: &ParamType) -> Type {
    match t {
        ParamType::Base(b) => b.semantic(),
        ParamType::Set(b) => Type::Set(Box::new(b.semantic())),
        ParamType::Bag(b) => Type::Bag(Box::new(b.semantic())),
        ParamType::Map(k, v) => Type::Map(Box::new(k.semantic()), Box::new(v.semantic())),
    }
}

/// Output column names: the alias, else the variable, attribute or
/// accumulator name, else the printed expression; repeats get `_2`, `_3`.
pub fn column_names(out: &OutTable) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(out.cols.len());
    for c in &out.cols {
        let base = match (&c.alias, &c.expr.kind) {
            (Some(a), _) => a.clone(),
            (None, ExprKind::Var { name, .. }) => name.clone(),
            (None, ExprKind::Attr { name, .. }) => name.clone(),
            (None, ExprKind::VAcc { name, .. }) => format!("@{name}"),
            (None, ExprKind::GAcc { name, .. }) => format!("@@{name}"),
            (None, _) => print_expr(&c.expr),
        };
        let mut name = base.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        names.push(name);
    }
    names
}

/// Name of the table an output clause produces.
pub fn output_name(b: &QueryBlock, i: usize) -> String {
    match (&b.outputs[i].into, &b.assign_to) {
        (Some(n), _) => n.clone(),
        (None, Some(n)) => n.clone(),
        (None, None) => "Result".to_string(),
    }
}

const AGGREGATES: [&str; 5] = ["count", "sum", "min", "max", "avg"];

pub fn is_aggregate_name(name: &str) -> bool {
    AGGREGATES.iter().any(|a| a.eq_ignore_ascii_case(name))
}

/// Whether an expression contains an aggregate call.
pub fn has_aggregate(e: &Expr) -> bool {
    let mut found = false;
    visit(e, &mut |x| {
        if matches!(&x.kind, ExprKind::Call { agg: true, .. }) {
            found = true;
        }
    });
    found
}

fn visit(e: &Expr, f: &mut impl FnMut(&Expr)) {
    f(e);
    match &e.kind {
        ExprKind::Attr { base, .. } | ExprKind::VAcc { base, .. } => visit(base, f),
        ExprKind::Unary { expr, .. } | ExprKind::IsNull { expr, .. } => visit(expr, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            visit(lhs, f);
            visit(rhs, f);
        }
        ExprKind::Between { expr, lo, hi, .. } => {
            visit(expr, f);
            visit(lo, f);
            visit(hi, f);
        }
        ExprKind::In { expr, list: other, .. } | ExprKind::Like { expr, pattern: other, .. } => {
            visit(expr, f);
            visit(other, f);
        }
        ExprKind::Call { args, .. } | ExprKind::Tuple(args) | ExprKind::List(args) => args.iter().for_each(|a| visit(a, f)),
        ExprKind::Method { base, args, .. } => {
            visit(base, f);
            args.iter().for_each(|a| visit(a, f));
        }
        ExprKind::Case { operand, whens, else_expr } => {
            if let Some(o) = operand {
                visit(o, f);
            }
            for (c, r) in whens {
                visit(c, f);
                visit(r, f);
            }
            if let Some(x) = else_expr {
                visit(x, f);
            }
        }
        ExprKind::MapEntry { keys, values } => keys.iter().chain(values).for_each(|a| visit(a, f)),
        _ => {}
    }
}

#[derive(Debug, Clone)]
struct Sym {
    ty: Type,
    kind: VarKind,
    /// Candidate element types of a vertex or edge variable; `None` when
    /// any type is possible.
    types: Option<Vec<String>>,
}

impl Sym {
    fn new(ty: Type, kind: VarKind) -> Self {
        Sym { ty, kind, types: None }
    }
}

/// Block-local names, innermost last.
#[derive(Default, Clone)]
struct Scope {
    vars: Vec<(String, Sym)>,
    allow_agg: bool,
    /// Pattern variables hidden from POST_ACCUM, for a clearer error.
    hidden: Vec<String>,
    /// Inside ACCUM/POST_ACCUM (locals may be introduced).
    in_acc: bool,
}

impl Scope {
    fn get(&self, name: &str) -> Option<&Sym> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

struct Checker<'a> {
    catalog: &'a Catalog,
    graph: Option<&'a GraphDef>,
    globals: HashMap<String, Sym>,
    gaccs: HashMap<String, AccType>,
    vaccs: HashMap<String, AccType>,
    loop_depth: usize,
}

pub fn check_query(q: &mut Query, env: &CheckEnv) -> Result<(), CheckError> {
    let graph = match &q.graph {
        Some(g) => Some(
            env.catalog
                .graph(g)
                .ok_or_else(|| CheckError::Unknown { pos: q.pos, what: "graph", name: g.clone() })?,
        ),
        None => None,
    };
    let mut c = Checker {
        catalog: env.catalog,
        graph,
        globals: HashMap::new(),
        gaccs: HashMap::new(),
        vaccs: HashMap::new(),
        loop_depth: 0,
    };
    for (name, cols) in &env.tables {
        c.globals.insert(name.clone(), Sym::new(Type::Table(cols.clone()), VarKind::Table));
    }
    for p in &q.params {
        if c.globals.get(&p.name).is_some_and(|s| s.kind == VarKind::Param) {
            return Err(CheckError::Duplicate { pos: p.pos, name: p.name.clone() });
        }
        let ty = param_type(&p.ty);
        if let Type::Vertex(Some(t)) = &ty {
            c.vertex_type(t, p.pos)?;
        }
        c.globals.insert(p.name.clone(), Sym::new(ty, VarKind::Param));
    }
    for s in &mut q.body {
        c.stmt(s)?;
    }
    if let Some(r) = &mut q.ret {
        c.expr(r, &Scope::default())?;
    }
    Ok(())
}

fn mismatch(pos: Pos, msg: impl Into<String>) -> CheckError {
    CheckError::TypeMismatch { pos, msg: msg.into() }
}

fn unify(a: &Type, b: &Type) -> Option<Type> {
    use Type::*;
    Some(match (a, b) {
        (Any, t) | (t, Any) => t.clone(),
        (Int, Float) | (Float, Int) => Float,
        (Vertex(x), Vertex(y)) => Vertex(if x == y { x.clone() } else { None }),
        (Edge(x), Edge(y)) => Edge(if x == y { x.clone() } else { None }),
        (List(x), List(y)) => List(Box::new(unify(x, y)?)),
        (Set(x), Set(y)) => Set(Box::new(unify(x, y)?)),
        (Bag(x), Bag(y)) => Bag(Box::new(unify(x, y)?)),
        (Table(x), Table(y)) if x.len() == y.len() => a.clone(),
        (x, y) if x == y => x.clone(),
        _ => return None,
    })
}

fn is_bool(t: &Type) -> bool {
    matches!(t, Type::Bool | Type::Any)
}

fn is_int(t: &Type) -> bool {
    matches!(t, Type::Int | Type::Any)
}

fn is_set_like(t: &Type) -> bool {
    matches!(t, Type::Set(_) | Type::Bag(_) | Type::List(_) | Type::Table(_) | Type::Any)
}

impl<'a> Checker<'a> {
    fn vertex_type(&self, name: &str, pos: Pos) -> Result<(), CheckError> {
        let known = self.catalog.vertex_type(name).is_some()
            && self.graph.is_none_or(|g| g.vertex_types.contains(name));
        if known {
            Ok(())
        } else {
            Err(CheckError::Unknown { pos, what: "vertex type", name: name.to_string() })
        }
    }

    fn lookup<'s>(&'s self, name: &str, sc: &'s Scope, pos: Pos) -> Result<&'s Sym, CheckError> {
        if let Some(s) = sc.get(name) {
            return Ok(s);
        }
        if let Some(s) = self.globals.get(name) {
            return Ok(s);
        }
        if sc.hidden.iter().any(|h| h == name) {
            return Err(CheckError::Invalid {
                pos,
                msg: format!("`{name}` is not a bare SELECT column and is not visible in POST_ACCUM"),
            });
        }
        Err(CheckError::Unknown { pos, what: "name", name: name.to_string() })
    }

    fn acc(&self, name: &str, global: bool, pos: Pos) -> Result<&AccType, CheckError> {
        let (map, sigil) = if global { (&self.gaccs, "@@") } else { (&self.vaccs, "@") };
        map.get(name)
            .ok_or_else(|| CheckError::Unknown { pos, what: "accumulator", name: format!("{sigil}{name}") })
    }

    // ------------------------------------------------------------ statements

    fn declare_global(&mut self, name: &str, sym: Sym, pos: Pos) -> Result<(), CheckError> {
        if let Some(old) = self.globals.get(name) {
            if old.kind == VarKind::Param {
                return Err(CheckError::Duplicate { pos, name: name.to_string() });
            }
        }
        self.globals.insert(name.to_string(), sym);
        Ok(())
    }

    fn stmt(&mut self, s: &mut Stmt) -> Result<(), CheckError> {
        let pos = s.pos;
        let top = Scope::default();
        match &mut s.kind {
            StmtKind::AccDecl(d) => {
                let ty = AccType::from_ast(&d.ty).map_err(|source| CheckError::UnsupportedAccumulator { pos, source })?;
                if let AccType::Heap(h) = &ty {
                    if let crate::accum::HeapCapacity::Param(p) = &h.capacity {
                        let sym = self.lookup(p, &top, pos)?;
                        if !is_int(&sym.ty) {
                            return Err(mismatch(pos, format!("heap capacity `{p}` must be an int")));
                        }
                    }
                }
                for n in &mut d.names {
                    if let Some(init) = &mut n.init {
                        let t = self.expr(init, &top)?;
                        if !ty.accepts_assign(&t) {
                            return Err(mismatch(n.pos, format!("cannot initialize {ty} with {t}")));
                        }
                    }
                    let map = if n.global { &mut self.gaccs } else { &mut self.vaccs };
                    if map.insert(n.name.clone(), ty.clone()).is_some() {
                        let sigil = if n.global { "@@" } else { "@" };
                        return Err(CheckError::Duplicate { pos: n.pos, name: format!("{sigil}{}", n.name) });
                    }
                }
            }
            StmtKind::VarDecl { ty, name, init } => {
                let t = ty.semantic();
                if let Some(e) = init {
                    let et = self.expr(e, &top)?;
                    if !t.accepts(&et) {
                        return Err(mismatch(pos, format!("cannot assign {et} to {t} `{name}`")));
                    }
                }
                let name = name.clone();
                self.declare_global(&name, Sym::new(t, VarKind::Global), pos)?;
            }
            StmtKind::Assign { name, expr, res } => {
                let t = self.expr(expr, &top)?;
                if let Some(old) = self.globals.get(name.as_str()) {
                    if old.kind == VarKind::Param || old.kind == VarKind::Loop {
                        return Err(CheckError::Invalid { pos, msg: format!("cannot assign to `{name}`") });
                    }
                    if unify(&old.ty, &t).is_none() {
                        return Err(mismatch(pos, format!("cannot assign {t} to `{name}` of type {}", old.ty)));
                    }
                }
                let kind = if t.is_vertex_set() { VarKind::VertexSet } else { VarKind::Global };
                *res = Some(kind);
                let name = name.clone();
                self.declare_global(&name, Sym::new(t, kind), pos)?;
            }
            StmtKind::GAcc { name, op, expr } => {
                let t = self.expr(expr, &top)?;
                let acc = self.acc(name, true, pos)?;
                check_acc_input(acc, *op, &t, pos)?;
            }
            StmtKind::VAcc { var, acc, op, expr } => {
                let sym = self.lookup(var, &top, pos)?;
                if !matches!(sym.ty, Type::Vertex(_) | Type::Any) {
                    return Err(mismatch(pos, format!("`{var}` is not a vertex")));
                }
                let t = self.expr(expr, &top)?;
                let a = self.acc(acc, false, pos)?;
                check_acc_input(a, *op, &t, pos)?;
            }
            StmtKind::Block(b) => self.block(b)?,
            StmtKind::If { branches, else_body } => {
                for (c, body) in branches {
                    self.cond(c, &top)?;
                    self.stmts(body)?;
                }
                if let Some(b) = else_body {
                    self.stmts(b)?;
                }
            }
            StmtKind::While { cond, limit, body } => {
                self.cond(cond, &top)?;
                if let Some(l) = limit {
                    let t = self.expr(l, &top)?;
                    if !is_int(&t) {
                        return Err(mismatch(l.pos, format!("WHILE LIMIT must be an int, found {t}")));
                    }
                }
                self.loop_depth += 1;
                let r = self.stmts(body);
                self.loop_depth -= 1;
                r?;
            }
            StmtKind::Foreach { vars, iter, body } => {
                let elems = self.foreach_elems(vars, iter, &top, pos)?;
                let saved: Vec<_> = vars.iter().map(|v| (v.clone(), self.globals.get(v).cloned())).collect();
                for (v, t) in vars.iter().zip(elems) {
                    self.globals.insert(v.clone(), Sym::new(t, VarKind::Loop));
                }
                self.loop_depth += 1;
                let r = self.stmts(body);
                self.loop_depth -= 1;
                for (v, old) in saved {
                    match old {
                        Some(s) => self.globals.insert(v, s),
                        None => self.globals.remove(&v),
                    };
                }
                r?;
            }
            StmtKind::Case { operand, whens, else_body } => {
                let ot = match operand {
                    Some(o) => Some(self.expr(o, &top)?),
                    None => None,
                };
                for (c, body) in whens {
                    self.case_cond(c, ot.as_ref(), &top)?;
                    self.stmts(body)?;
                }
                if let Some(b) = else_body {
                    self.stmts(b)?;
                }
            }
            StmtKind::Break | StmtKind::Continue => {
                if self.loop_depth == 0 {
                    return Err(CheckError::Invalid { pos, msg: "BREAK/CONTINUE outside a loop".into() });
                }
            }
        }
        Ok(())
    }

    fn stmts(&mut self, body: &mut [Stmt]) -> Result<(), CheckError> {
        body.iter_mut().try_for_each(|s| self.stmt(s))
    }

    fn cond(&self, e: &mut Expr, sc: &Scope) -> Result<(), CheckError> {
        let t = self.expr(e, sc)?;
        if is_bool(&t) {
            Ok(())
        } else {
            Err(mismatch(e.pos, format!("condition must be bool, found {t}")))
        }
    }

    fn case_cond(&self, c: &mut Expr, operand: Option<&Type>, sc: &Scope) -> Result<(), CheckError> {
        match operand {
            None => self.cond(c, sc),
            Some(ot) => {
                let ct = self.expr(c, sc)?;
                if ot.comparable(&ct) {
                    Ok(())
                } else {
                    Err(mismatch(c.pos, format!("cannot compare {ot} with {ct}")))
                }
            }
        }
    }

    fn foreach_elems(&self, vars: &[String], iter: &mut ForeachIter, sc: &Scope, pos: Pos) -> Result<Vec<Type>, CheckError> {
        match iter {
            ForeachIter::Range(lo, hi) => {
                for e in [lo, hi] {
                    let t = self.expr(e, sc)?;
                    if !is_int(&t) {
                        return Err(mismatch(e.pos, format!("RANGE bound must be an int, found {t}")));
                    }
                }
                if vars.len() != 1 {
                    return Err(CheckError::Invalid { pos, msg: "RANGE binds exactly one variable".into() });
                }
                Ok(vec![Type::Int])
            }
            ForeachIter::Expr(e) => {
                let t = self.expr(e, sc)?;
                if !t.is_collection() {
                    return Err(mismatch(e.pos, format!("FOREACH needs a collection, found {t}")));
                }
                let el = t.element();
                if vars.len() == 1 {
                    return Ok(vec![el]);
                }
                match el {
                    Type::Tuple(fs) if fs.len() == vars.len() => Ok(fs.into_iter().map(|(_, t)| t).collect()),
                    Type::Any => Ok(vec![Type::Any; vars.len()]),
                    other => Err(mismatch(pos, format!("cannot destructure {other} into {} variables", vars.len()))),
                }
            }
        }
    }

    /// Statement inside ACCUM or POST_ACCUM; locals are pushed onto `sc`.
    fn acc_stmt(&self, s: &mut Stmt, sc: &mut Scope, loops: usize) -> Result<(), CheckError> {
        let pos = s.pos;
        match &mut s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                let t = ty.semantic();
                if let Some(e) = init {
                    let et = self.expr(e, sc)?;
                    if !t.accepts(&et) {
                        return Err(mismatch(pos, format!("cannot assign {et} to {t} `{name}`")));
                    }
                }
                sc.vars.push((name.clone(), Sym::new(t, VarKind::Local)));
            }
            StmtKind::Assign { name, expr, res } => {
                let t = self.expr(expr, sc)?;
                match sc.get(name) {
                    Some(sym) if sym.kind == VarKind::Local || sym.kind == VarKind::Loop => {
                        if !sym.ty.accepts(&t) {
                            return Err(mismatch(pos, format!("cannot assign {t} to `{name}` of type {}", sym.ty)));
                        }
                    }
                    Some(_) => return Err(CheckError::Invalid { pos, msg: format!("cannot assign to pattern variable `{name}`") }),
                    None if self.globals.contains_key(name.as_str()) => {
                        return Err(CheckError::Invalid {
                            pos,
                            msg: format!("global `{name}` cannot be assigned inside ACCUM; use an accumulator"),
                        })
                    }
                    None => sc.vars.push((name.clone(), Sym::new(t, VarKind::Local))),
                }
                *res = Some(VarKind::Local);
            }
            StmtKind::GAcc { name, op, expr } => {
                let t = self.expr(expr, sc)?;
                let acc = self.acc(name, true, pos)?;
                check_acc_input(acc, *op, &t, pos)?;
            }
            StmtKind::VAcc { var, acc, op, expr } => {
                let sym = self.lookup(var, sc, pos)?;
                if !matches!(sym.ty, Type::Vertex(_) | Type::Any) {
                    return Err(mismatch(pos, format!("`{var}` is not a vertex")));
                }
                let t = self.expr(expr, sc)?;
                let a = self.acc(acc, false, pos)?;
                check_acc_input(a, *op, &t, pos)?;
            }
            StmtKind::If { branches, else_body } => {
                for (c, body) in branches {
                    self.cond(c, sc)?;
                    self.acc_body(body, sc, loops)?;
                }
                if let Some(b) = else_body {
                    self.acc_body(b, sc, loops)?;
                }
            }
            StmtKind::Case { operand, whens, else_body } => {
                let ot = match operand {
                    Some(o) => Some(self.expr(o, sc)?),
                    None => None,
                };
                for (c, body) in whens {
                    self.case_cond(c, ot.as_ref(), sc)?;
                    self.acc_body(body, sc, loops)?;
                }
                if let Some(b) = else_body {
                    self.acc_body(b, sc, loops)?;
                }
            }
            StmtKind::While { cond, limit, body } => {
                self.cond(cond, sc)?;
                if let Some(l) = limit {
                    let t = self.expr(l, sc)?;
                    if !is_int(&t) {
                        return Err(mismatch(l.pos, format!("WHILE LIMIT must be an int, found {t}")));
                    }
                }
                self.acc_body(body, sc, loops + 1)?;
            }
            StmtKind::Foreach { vars, iter, body } => {
                let elems = self.foreach_elems(vars, iter, sc, pos)?;
                let mark = sc.vars.len();
                for (v, t) in vars.iter().zip(elems) {
                    sc.vars.push((v.clone(), Sym::new(t, VarKind::Loop)));
                }
                let r = self.acc_body(body, sc, loops + 1);
                sc.vars.truncate(mark);
                r?;
            }
            StmtKind::Break | StmtKind::Continue => {
                if loops == 0 {
                    return Err(CheckError::Invalid { pos, msg: "BREAK/CONTINUE outside a loop".into() });
                }
            }
            StmtKind::AccDecl(_) | StmtKind::Block(_) => {
                return Err(CheckError::Invalid { pos, msg: "statement not allowed inside ACCUM".into() })
            }
        }
        Ok(())
    }

    fn acc_body(&self, body: &mut [Stmt], sc: &mut Scope, loops: usize) -> Result<(), CheckError> {
        let mark = sc.vars.len();
        let r = body.iter_mut().try_for_each(|s| self.acc_stmt(s, sc, loops));
        sc.vars.truncate(mark);
        r
    }

    // ------------------------------------------------------------ blocks

    fn block(&mut self, b: &mut QueryBlock) -> Result<(), CheckError> {
        let mut sc = Scope::default();
        for atom in &mut b.from {
            self.atom(atom, &mut sc)?;
        }
        if let Some(w) = &mut b.where_clause {
            self.cond(w, &sc)?;
        }
        {
            let mut acc_sc = sc.clone();
            acc_sc.in_acc = true;
            self.acc_body(&mut b.accum, &mut acc_sc, 0)?;
        }
        let n = b.outputs.len();
        if b.group_by.len() > n || b.having.len() > n || b.order_by.len() > n || b.limit.len() > n {
            return Err(CheckError::Invalid { pos: b.pos, msg: "more clause entries than SELECT outputs".into() });
        }
        if n > 1 && !b.post_accum.is_empty() {
            return Err(CheckError::Invalid { pos: b.pos, msg: "POST_ACCUM is not allowed with multiple outputs".into() });
        }
        let mut out_types = Vec::with_capacity(n);
        for i in 0..n {
            let mut sel = sc.clone();
            sel.allow_agg = true;
            let mut col_types = Vec::new();
            for c in &mut b.outputs[i].cols {
                col_types.push(self.expr(&mut c.expr, &sel)?);
            }
            let names = column_names(&b.outputs[i]);
            if let Some(keys) = b.group_by.get_mut(i) {
                for k in keys {
                    self.expr(k, &sc)?;
                }
            }
            // HAVING and ORDER BY also see the output's column names.
            let mut post_sel = sel.clone();
            for (name, t) in names.iter().zip(&col_types) {
                if post_sel.get(name).is_none() {
                    post_sel.vars.push((name.clone(), Sym::new(t.clone(), VarKind::Column)));
                }
            }
            if let Some(h) = b.having.get_mut(i) {
                self.cond(h, &post_sel)?;
            }
            if let Some(keys) = b.order_by.get_mut(i) {
                for k in keys {
                    self.expr(&mut k.expr, &post_sel)?;
                }
            }
            if let Some(l) = b.limit.get_mut(i) {
                let t = self.expr(l, &Scope::default())?;
                if !is_int(&t) {
                    return Err(mismatch(l.pos, format!("LIMIT must be an int, found {t}")));
                }
            }
            out_types.push(names.into_iter().zip(col_types).collect::<Vec<_>>());
        }
        if !b.post_accum.is_empty() {
            let mut pa = Scope { in_acc: true, ..Scope::default() };
            let cols = &b.outputs[0].cols;
            for (c, (name, t)) in cols.iter().zip(&out_types[0]) {
                if let Some(v) = c.expr.as_var() {
                    if let Some(sym) = sc.get(v) {
                        pa.vars.push((v.to_string(), sym.clone()));
                    }
                }
                if c.alias.is_some() {
                    pa.vars.push((name.clone(), Sym::new(t.clone(), VarKind::Column)));
                }
            }
            pa.hidden = sc.vars.iter().map(|(n, _)| n.clone()).filter(|n| pa.get(n).is_none()).collect();
            self.acc_body(&mut b.post_accum, &mut pa, 0)?;
        }
        for (i, cols) in out_types.into_iter().enumerate() {
            let name = output_name(b, i);
            let ty = Type::Table(cols);
            let kind = if b.outputs[i].into.is_none() && b.assign_to.is_some() && ty.is_vertex_set() {
                VarKind::VertexSet
            } else {
                VarKind::Table
            };
            if let Some(old) = self.globals.get(&name) {
                if old.kind == VarKind::Param {
                    return Err(CheckError::Duplicate { pos: b.pos, name });
                }
            }
            self.globals.insert(name, Sym::new(ty, kind));
        }
        Ok(())
    }

    fn bind_var(&self, sc: &mut Scope, name: &str, sym: Sym, pos: Pos) -> Result<(), CheckError> {
        if let Some(old) = sc.get(name) {
            if std::mem::discriminant(&old.ty) != std::mem::discriminant(&sym.ty) {
                return Err(mismatch(pos, format!("`{name}` is bound to both {} and {}", old.ty, sym.ty)));
            }
            return Ok(());
        }
        if let Some(g) = self.globals.get(name) {
            // A context-bound vertex restricts the match instead of binding.
            if !matches!((&g.ty, &sym.ty), (Type::Vertex(_) | Type::Any, Type::Vertex(_))) {
                return Err(CheckError::Invalid { pos, msg: format!("pattern variable `{name}` shadows a {} name", g.ty) });
            }
        }
        sc.vars.push((name.to_string(), sym));
        Ok(())
    }

    fn atom(&self, atom: &mut Atom, sc: &mut Scope) -> Result<(), CheckError> {
        match atom {
            Atom::Rel { table, var, pos } => {
                let sym = self
                    .globals
                    .get(table.as_str())
                    .filter(|s| matches!(s.ty, Type::Table(_)))
                    .ok_or_else(|| CheckError::Unknown { pos: *pos, what: "table", name: table.clone() })?;
                let el = sym.ty.element();
                let (pos, var) = (*pos, var.clone());
                self.bind_var(sc, &var, Sym::new(el, VarKind::Pattern), pos)
            }
            Atom::Graph { graph, pattern, pos } => {
                let g = match graph {
                    Some(name) => Some(
                        self.catalog
                            .graph(name)
                            .ok_or_else(|| CheckError::Unknown { pos: *pos, what: "graph", name: name.clone() })?,
                    ),
                    None => self.graph,
                };
                for p in pattern {
                    self.path(p, g, sc)?;
                }
                Ok(())
            }
        }
    }

    fn vnode(&self, n: &mut VNode, g: Option<&GraphDef>, sc: &mut Scope) -> Result<(), CheckError> {
        let (res, types, vt) = if n.names.is_empty() {
            (VTestRes::Any, None, None)
        } else if n.names.len() == 1 && self.vertex_set_type(&n.names[0], sc).is_some() {
            let vt = self.vertex_set_type(&n.names[0], sc).unwrap();
            let types = vt.clone().map(|t| vec![t]);
            (VTestRes::VertexSet(n.names[0].clone()), types, vt)
        } else {
            for name in &n.names {
                let ok = self.catalog.vertex_type(name).is_some() && g.is_none_or(|g| g.vertex_types.contains(name));
                if !ok {
                    return Err(CheckError::Unknown { pos: n.pos, what: "vertex type or vertex set", name: name.clone() });
                }
            }
            let vt = if n.names.len() == 1 { Some(n.names[0].clone()) } else { None };
            (VTestRes::Types(n.names.clone()), Some(n.names.clone()), vt)
        };
        n.res = Some(res);
        if let Some(v) = &n.var {
            let sym = Sym { ty: Type::Vertex(vt), kind: VarKind::Pattern, types };
            self.bind_var(sc, v, sym, n.pos)?;
        }
        Ok(())
    }

    /// Element vertex type of a vertex-set name, `Some(None)` for untyped.
    fn vertex_set_type(&self, name: &str, sc: &Scope) -> Option<Option<String>> {
        let sym = sc.get(name).or_else(|| self.globals.get(name))?;
        match &sym.ty {
            Type::Table(cols) if cols.len() == 1 => match &cols[0].1 {
                Type::Vertex(t) => Some(t.clone()),
                Type::Any => Some(None),
                _ => None,
            },
            Type::Set(t) | Type::Bag(t) | Type::List(t) => match &**t {
                Type::Vertex(t) => Some(t.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    fn path(&self, p: &mut PathPattern, g: Option<&GraphDef>, sc: &mut Scope) -> Result<(), CheckError> {
        self.vnode(&mut p.start, g, sc)?;
        for (hop, node) in &mut p.hops {
            let mut etypes = Vec::new();
            let wildcard = self.darpe(&hop.darpe, g, hop.pos, &mut etypes)?;
            if let Some(ev) = &hop.edge_var {
                if !hop.darpe.is_single_hop() {
                    return Err(CheckError::EdgeVarOnMultiHop { pos: hop.pos, var: ev.clone() });
                }
                etypes.sort();
                etypes.dedup();
                let ty = Type::Edge(if etypes.len() == 1 && !wildcard { Some(etypes[0].clone()) } else { None });
                let types = if wildcard { None } else { Some(etypes) };
                self.bind_var(sc, ev, Sym { ty, kind: VarKind::Pattern, types }, hop.pos)?;
            }
            self.vnode(node, g, sc)?;
        }
        Ok(())
    }

    /// Validates edge types and adornments and collects the named edge
    /// types; returns whether a wildcard occurs.
    fn darpe(&self, d: &Darpe, g: Option<&GraphDef>, pos: Pos, out: &mut Vec<String>) -> Result<bool, CheckError> {
        match d {
            Darpe::Sym { name, adorn } => {
                let et = self
                    .catalog
                    .edge_type(name)
                    .filter(|_| g.is_none_or(|g| g.edge_types.contains(name)))
                    .ok_or_else(|| CheckError::Unknown { pos, what: "edge type", name: name.clone() })?;
                let legal = match adorn {
                    Adorn::Undirected => !et.directed,
                    Adorn::Forward | Adorn::Backward => et.directed,
                };
                if !legal {
                    let form = super::printer::print_darpe(d);
                    let kind = if et.directed { "directed" } else { "undirected" };
                    return Err(mismatch(pos, format!("`{form}` contradicts {kind} edge type {name}")));
                }
                out.push(name.clone());
                Ok(false)
            }
            Darpe::Wild { .. } => Ok(true),
            Darpe::Concat(xs) | Darpe::Alt(xs) => {
                let mut wild = false;
                for x in xs {
                    wild |= self.darpe(x, g, pos, out)?;
                }
                Ok(wild)
            }
            Darpe::Star { inner, bounds } => {
                if let Some(Bounds::Range(Some(lo), Some(hi))) = bounds {
                    if lo > hi {
                        return Err(CheckError::Invalid { pos, msg: format!("empty repetition range {lo}..{hi}") });
                    }
                }
                self.darpe(inner, g, pos, out)
            }
        }
    }

    // ------------------------------------------------------------ expressions

    fn expr(&self, e: &mut Expr, sc: &Scope) -> Result<Type, CheckError> {
        let pos = e.pos;
        let t = match &mut e.kind {
            ExprKind::Int(_) => Type::Int,
            ExprKind::Float(_) => Type::Float,
            ExprKind::Str(_) => Type::Str,
            ExprKind::Bool(_) => Type::Bool,
            ExprKind::Null => Type::Any,
            ExprKind::Var { name, res } => {
                let sym = self.lookup(name, sc, pos)?;
                *res = Some(sym.kind);
                sym.ty.clone()
            }
            ExprKind::Attr { base, name, res } => {
                let bt = self.expr(base, sc)?;
                let types = match base.as_var() {
                    Some(v) => self.lookup(v, sc, pos).ok().and_then(|s| s.types.clone()),
                    None => None,
                };
                let (t, r) = self.attr(&bt, types.as_deref(), name, pos)?;
                *res = Some(r);
                t
            }
            ExprKind::GAcc { name, primed } => {
                if *primed && self.loop_depth == 0 {
                    return Err(CheckError::PrimeOutsideLoop { pos, name: format!("@@{name}") });
                }
                self.acc(name, true, pos)?.read_type()
            }
            ExprKind::VAcc { base, name, primed } => {
                let bt = self.expr(base, sc)?;
                if !matches!(bt, Type::Vertex(_) | Type::Any) {
                    return Err(mismatch(pos, format!("vertex accumulator read on {bt}")));
                }
                if *primed && self.loop_depth == 0 {
                    return Err(CheckError::PrimeOutsideLoop { pos, name: format!("@{name}") });
                }
                self.acc(name, false, pos)?.read_type()
            }
            ExprKind::Unary { op, expr } => {
                let t = self.expr(expr, sc)?;
                match op {
                    UnOp::Neg if t.is_numeric() => t,
                    UnOp::Not if is_bool(&t) => Type::Bool,
                    _ => return Err(mismatch(pos, format!("operator {op:?} on {t}"))),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.expr(lhs, sc)?;
                let b = self.expr(rhs, sc)?;
                binary_type(*op, &a, &b).ok_or_else(|| mismatch(pos, format!("{a} {} {b}", op.symbol())))?
            }
            ExprKind::Between { expr, lo, hi, .. } => {
                let t = self.expr(expr, sc)?;
                for x in [lo, hi] {
                    let xt = self.expr(x, sc)?;
                    if !t.comparable(&xt) {
                        return Err(mismatch(pos, format!("cannot compare {t} with {xt}")));
                    }
                }
                Type::Bool
            }
            ExprKind::In { expr, list, .. } => {
                self.expr(expr, sc)?;
                let lt = self.expr(list, sc)?;
                if !lt.is_collection() && !matches!(lt, Type::Tuple(_)) {
                    return Err(mismatch(pos, format!("IN needs a collection, found {lt}")));
                }
                Type::Bool
            }
            ExprKind::Like { expr, pattern, .. } => {
                for x in [expr, pattern] {
                    let t = self.expr(x, sc)?;
                    if !matches!(t, Type::Str | Type::Any) {
                        return Err(mismatch(pos, format!("LIKE needs strings, found {t}")));
                    }
                }
                Type::Bool
            }
            ExprKind::IsNull { expr, .. } => {
                self.expr(expr, sc)?;
                Type::Bool
            }
            ExprKind::Call { name, args, agg } => self.call(name, args, agg, sc, pos)?,
            ExprKind::Method { base, name, args } => {
                let bt = self.expr(base, sc)?;
                let mut ats = Vec::new();
                for a in args.iter_mut() {
                    ats.push(self.expr(a, sc)?);
                }
                method_type(&bt, name, &ats).ok_or_else(|| CheckError::Unknown { pos, what: "method", name: format!("{bt}.{name}") })?
            }
            ExprKind::Case { operand, whens, else_expr } => {
                let ot = match operand {
                    Some(o) => Some(self.expr(o, sc)?),
                    None => None,
                };
                let mut out = Type::Any;
                for (c, r) in whens {
                    self.case_cond(c, ot.as_ref(), sc)?;
                    let rt = self.expr(r, sc)?;
                    out = unify(&out, &rt).ok_or_else(|| mismatch(r.pos, format!("CASE branches {out} and {rt}")))?;
                }
                if let Some(x) = else_expr {
                    let rt = self.expr(x, sc)?;
                    out = unify(&out, &rt).ok_or_else(|| mismatch(x.pos, format!("CASE branches {out} and {rt}")))?;
                }
                out
            }
            ExprKind::Tuple(xs) => {
                let mut fs = Vec::new();
                for x in xs {
                    fs.push((String::new(), self.expr(x, sc)?));
                }
                Type::Tuple(fs)
            }
            ExprKind::List(xs) => {
                let mut el = Type::Any;
                for x in xs {
                    let t = self.expr(x, sc)?;
                    el = unify(&el, &t).ok_or_else(|| mismatch(x.pos, format!("list elements {el} and {t}")))?;
                }
                Type::List(Box::new(el))
            }
            ExprKind::MapEntry { keys, values } => {
                let mut kt = Vec::new();
                for k in keys {
                    kt.push((String::new(), self.expr(k, sc)?));
                }
                let mut vt = Vec::new();
                for v in values {
                    vt.push((String::new(), self.expr(v, sc)?));
                }
                let one = |mut v: Vec<(String, Type)>| if v.len() == 1 { v.pop().unwrap().1 } else { Type::Tuple(v) };
                Type::Map(Box::new(one(kt)), Box::new(one(vt)))
            }
            ExprKind::Seed(types) => {
                for t in types.iter() {
                    if t != "_" {
                        self.vertex_type(t, pos)?;
                    }
                }
                let vt = if types.len() == 1 && types[0] != "_" { Some(types[0].clone()) } else { None };
                Type::vertex_set(vt)
            }
        };
        e.ty = Some(t.clone());
        Ok(t)
    }

    fn attr(&self, bt: &Type, types: Option<&[String]>, name: &str, pos: Pos) -> Result<(Type, AttrRes), CheckError> {
        let unknown = || CheckError::Unknown { pos, what: "attribute", name: name.to_string() };
        match bt {
            Type::Vertex(_) | Type::Edge(_) => {
                let vertex = matches!(bt, Type::Vertex(_));
                let lookup = |tn: &str| -> Option<Type> {
                    if vertex {
                        let d = self.catalog.vertex_type(tn)?;
                        d.attr_index(name).map(|i| d.attributes[i].dtype.semantic())
                    } else {
                        let d = self.catalog.edge_type(tn)?;
                        d.attr_index(name).map(|i| d.attributes[i].dtype.semantic())
                    }
                };
                let candidates: Vec<String> = match types {
                    Some(ts) => ts.to_vec(),
                    None => match bt {
                        Type::Vertex(Some(t)) | Type::Edge(Some(t)) => vec![t.clone()],
                        _ if vertex => self.catalog.vertex_types().map(|d| d.name.clone()).collect(),
                        _ => self.catalog.edge_types().map(|d| d.name.clone()).collect(),
                    },
                };
                let found: Vec<Type> = candidates.iter().filter_map(|t| lookup(t)).collect();
                let all = found.len() == candidates.len();
                let constrained = types.is_some() || matches!(bt, Type::Vertex(Some(_)) | Type::Edge(Some(_)));
                if found.is_empty() || (constrained && !all) {
                    if name.eq_ignore_ascii_case("type") {
                        return Ok((Type::Str, AttrRes::TypeName));
                    }
                    return Err(unknown());
                }
                let t = found.iter().skip(1).try_fold(found[0].clone(), |acc, t| unify(&acc, t)).unwrap_or(Type::Any);
                Ok((t, AttrRes::Attribute))
            }
            Type::Tuple(fs) => fs
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| (t.clone(), AttrRes::Field))
                .ok_or_else(unknown),
            Type::Any => Ok((Type::Any, AttrRes::Field)),
            _ => Err(mismatch(pos, format!("attribute `{name}` on {bt}"))),
        }
    }

    fn call(&self, name: &str, args: &mut [Expr], agg: &mut bool, sc: &Scope, pos: Pos) -> Result<Type, CheckError> {
        let lname = name.to_ascii_lowercase();
        if is_aggregate_name(&lname) && sc.allow_agg {
            if args.len() != 1 {
                return Err(CheckError::Invalid { pos, msg: format!("{name} takes one argument") });
            }
            let inner = Scope { allow_agg: false, ..sc.clone() };
            let t = self.expr(&mut args[0], &inner)?;
            *agg = true;
            return match lname.as_str() {
                "count" => Ok(Type::Int),
                "avg" if t.is_numeric() => Ok(Type::Float),
                "sum" if t.is_numeric() => Ok(t),
                "min" | "max" => Ok(t),
                _ => Err(mismatch(pos, format!("{name} over {t}"))),
            };
        }
        let mut ts = Vec::with_capacity(args.len());
        for a in args.iter_mut() {
            ts.push(self.expr(a, sc)?);
        }
        let arity = |n: usize| -> Result<(), CheckError> {
            if ts.len() == n {
                Ok(())
            } else {
                Err(CheckError::Invalid { pos, msg: format!("{name} takes {n} argument(s), got {}", ts.len()) })
            }
        };
        let numeric = |i: usize| -> Result<(), CheckError> {
            if ts[i].is_numeric() {
                Ok(())
            } else {
                Err(mismatch(pos, format!("{name} needs a number, found {}", ts[i])))
            }
        };
        let collection = |i: usize| -> Result<Type, CheckError> {
            if ts[i].is_collection() {
                Ok(ts[i].element())
            } else {
                Err(mismatch(pos, format!("{name} needs a collection, found {}", ts[i])))
            }
        };
        Ok(match lname.as_str() {
            "abs" => {
                arity(1)?;
                numeric(0)?;
                ts[0].clone()
            }
            "log" | "ln" | "exp" | "sqrt" => {
                arity(1)?;
                numeric(0)?;
                Type::Float
            }
            "pow" => {
                arity(2)?;
                numeric(0)?;
                numeric(1)?;
                Type::Float
            }
            "floor" | "ceil" | "round" => {
                arity(1)?;
                numeric(0)?;
                Type::Int
            }
            "lower" | "upper" | "trim" => {
                arity(1)?;
                Type::Str
            }
            "length" => {
                arity(1)?;
                Type::Int
            }
            "to_string" => {
                arity(1)?;
                Type::Str
            }
            "to_int" => {
                arity(1)?;
                Type::Int
            }
            "to_float" => {
                arity(1)?;
                Type::Float
            }
            "to_datetime" => {
                arity(1)?;
                Type::DateTime
            }
            "year" | "month" | "day" => {
                arity(1)?;
                if !matches!(ts[0], Type::DateTime | Type::Str | Type::Any) {
                    return Err(mismatch(pos, format!("{name} needs a datetime, found {}", ts[0])));
                }
                Type::Int
            }
            "coalesce" => {
                if ts.is_empty() {
                    return Err(CheckError::Invalid { pos, msg: "coalesce needs arguments".into() });
                }
                ts.iter()
                    .try_fold(Type::Any, |acc, t| unify(&acc, t))
                    .ok_or_else(|| mismatch(pos, "coalesce arguments disagree"))?
            }
            "count" | "size" => {
                arity(1)?;
                collection(0)?;
                Type::Int
            }
            "sum" | "min" | "max" => {
                arity(1)?;
                collection(0)?
            }
            "avg" => {
                arity(1)?;
                collection(0)?;
                Type::Float
            }
            _ => return Err(CheckError::Unknown { pos, what: "function", name: name.to_string() }),
        })
    }
}

fn check_acc_input(acc: &AccType, op: AccOp, t: &Type, pos: Pos) -> Result<(), CheckError> {
    let ok = match op {
        AccOp::Add => acc.accepts_input(t),
        AccOp::Set => acc.accepts_assign(t),
    };
    if ok {
        Ok(())
    } else {
        let sym = if op == AccOp::Add { "+=" } else { "=" };
        Err(mismatch(pos, format!("{acc} {sym} {t}")))
    }
}

fn binary_type(op: BinOp, a: &Type, b: &Type) -> Option<Type> {
    use Type::*;
    match op {
        BinOp::Or | BinOp::And => (is_bool(a) && is_bool(b)).then_some(Bool),
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => a.comparable(b).then_some(Bool),
        BinOp::Contains => match (a, b) {
            (Str | Any, Str | Any) => Some(Bool),
            (c, _) if c.is_collection() => Some(Bool),
            _ => None,
        },
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => match (a, b) {
            (Int, Int) => Some(Int),
            (Any, Any) => Some(Any),
            (x, y) if x.is_numeric() && y.is_numeric() => Some(if *x == Int || *y == Int { unify(x, y)? } else { Float }),
            (Str, Str | Any) | (Any, Str) if op == BinOp::Add => Some(Str),
            (x, y) if op == BinOp::Sub && is_set_like(x) && is_set_like(y) => Some(if *x == Any { y.clone() } else { x.clone() }),
            _ => None,
        },
        BinOp::BitAnd | BinOp::BitOr => (is_int(a) && is_int(b)).then_some(Int),
        BinOp::Union | BinOp::Intersect | BinOp::Minus => {
            (is_set_like(a) && is_set_like(b)).then(|| if *a == Any { b.clone() } else { a.clone() })
        }
    }
}

fn method_type(base: &Type, name: &str, args: &[Type]) -> Option<Type> {
    match (base, name.to_ascii_lowercase().as_str()) {
        (Type::Vertex(_) | Type::Any, "outdegree") => args.iter().all(|t| matches!(t, Type::Str | Type::Any)).then_some(Type::Int),
        (t, "size") if t.is_collection() && args.is_empty() => Some(Type::Int),
        (t, "contains") if t.is_collection() && args.len() == 1 => Some(Type::Bool),
        (Type::Map(_, v), "get") if args.len() == 1 => Some((**v).clone()),
        (Type::Any, "get") if args.len() == 1 => Some(Type::Any),
        _ => None,
    }
}
