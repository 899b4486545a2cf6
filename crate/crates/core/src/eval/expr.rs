//! Expression evaluation under a binding, with SQL three-valued logic for
//! NULL table cells.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{AccRef, EvalError, Runtime};
use crate::binding::BindingTable;
use crate::frontend::ast::{AttrRes, BinOp, Expr, ExprKind, UnOp};
use crate::graph::VertexId;
use crate::table::Table;
use crate::value::{datetime_year, format_datetime, order_cmp, parse_datetime, sql_cmp, sql_eq, Type, Value};

/// Binding rows an aggregate ranges over.
#[derive(Clone, Copy)]
pub(crate) struct Group<'r> {
    pub table: &'r BindingTable,
    pub rows: &'r [usize],
}

/// Evaluation scope: locals, then the binding row, then the context.
pub(crate) struct Frame<'r> {
    pub rt: &'r Runtime<'r>,
    pub vars: &'r [String],
    pub row: &'r [Value],
    pub group: Option<Group<'r>>,
    pub locals: Vec<(String, Value)>,
    /// Accumulator values set by `=` earlier in this execution, as read.
    pub sets: Vec<(AccRef, Value)>,
}

impl<'r> Frame<'r> {
    pub fn new(rt: &'r Runtime<'r>, vars: &'r [String], row: &'r [Value]) -> Self {
        Frame { rt, vars, row, group: None, locals: Vec::new(), sets: Vec::new() }
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Some(v);
        }
        if let Some(i) = self.vars.iter().position(|n| n == name) {
            return Some(&self.row[i]);
        }
        self.rt.ctx.var(name)
    }

    fn set_value(&self, r: AccRef) -> Option<&Value> {
        self.sets.iter().rev().find(|(k, _)| *k == r).map(|(_, v)| v)
    }

    pub fn read_gacc(&self, name: &str, primed: bool, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
        let idx = self.rt.ctx.gaccs.get_index_of(name).ok_or_else(|| EvalError::unbound(pos, format!("@@{name}")))?;
        if !primed {
            if let Some(v) = self.set_value(AccRef::Global(idx as u32)) {
                return Ok(v.clone());
            }
        }
        Ok(self.rt.ctx.read_gacc(name, primed).unwrap_or(Value::Null))
    }

    pub fn read_vacc(&self, v: VertexId, name: &str, primed: bool, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
        let idx = self.rt.ctx.vaccs.get_index_of(name).ok_or_else(|| EvalError::unbound(pos, format!("@{name}")))?;
        if !primed {
            if let Some(x) = self.set_value(AccRef::Vertex(idx as u32, v)) {
                return Ok(x.clone());
            }
        }
        self.rt.ctx.read_vacc(name, v, primed).ok_or(EvalError::Runtime { pos, msg: format!("no vertex {}", v.0) })
    }

    /// A condition; NULL counts as false.
    pub fn truth(&self, e: &Expr) -> Result<bool, EvalError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            Value::Null => Ok(false),
            other => Err(EvalError::Runtime { pos: e.pos, msg: format!("condition evaluated to {}", other.type_name()) }),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        let pos = e.pos;
        Ok(match &e.kind {
            ExprKind::Int(i) => Value::Int(*i),
            ExprKind::Float(f) => Value::Float(*f),
            ExprKind::Str(s) => Value::str(s),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Null => Value::Null,
            ExprKind::Var { name, .. } => self.lookup(name).cloned().ok_or_else(|| EvalError::unbound(pos, name.clone()))?,
            ExprKind::Attr { base, name, res } => {
                let b = self.eval(base)?;
                self.attr(&b, name, *res, pos)?
            }
            ExprKind::GAcc { name, primed } => self.read_gacc(name, *primed, pos)?,
            ExprKind::VAcc { base, name, primed } => match self.eval(base)? {
                Value::Vertex(v) => self.read_vacc(v, name, *primed, pos)?,
                Value::Null => Value::Null,
                other => return Err(EvalError::Runtime { pos, msg: format!("@{name} read on {}", other.type_name()) }),
            },
            ExprKind::Unary { op, expr } => match (op, self.eval(expr)?) {
                (_, Value::Null) => Value::Null,
                (UnOp::Neg, Value::Int(i)) => Value::Int(i.checked_neg().ok_or(EvalError::Overflow { pos })?),
                (UnOp::Neg, Value::Float(f)) => Value::Float(-f),
                (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
                (_, v) => return Err(EvalError::Runtime { pos, msg: format!("{op:?} on {}", v.type_name()) }),
            },
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                // Three-valued AND; false short-circuits.
                match self.eval(lhs)?.as_bool() {
                    Some(false) => Value::Bool(false),
                    l => match (l, self.eval(rhs)?.as_bool()) {
                        (_, Some(false)) => Value::Bool(false),
                        (Some(true), Some(true)) => Value::Bool(true),
                        _ => Value::Null,
                    },
                }
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => match self.eval(lhs)?.as_bool() {
                Some(true) => Value::Bool(true),
                l => match (l, self.eval(rhs)?.as_bool()) {
                    (_, Some(true)) => Value::Bool(true),
                    (Some(false), Some(false)) => Value::Bool(false),
                    _ => Value::Null,
                },
            },
            ExprKind::Binary { op, lhs, rhs } => binary(*op, &self.eval(lhs)?, &self.eval(rhs)?, pos)?,
            ExprKind::Between { expr, lo, hi, negated } => {
                let x = self.eval(expr)?;
                let (lo, hi) = (self.eval(lo)?, self.eval(hi)?);
                match (sql_cmp(&x, &lo), sql_cmp(&x, &hi)) {
                    (Some(a), Some(b)) => Value::Bool((a != Ordering::Less && b != Ordering::Greater) != *negated),
                    _ => Value::Null,
                }
            }
            ExprKind::In { expr, list, negated } => {
                let x = self.eval(expr)?;
                if x.is_null() {
                    return Ok(Value::Null);
                }
                let items = self.eval(list)?.elements().ok_or(EvalError::Runtime { pos, msg: "IN needs a collection".into() })?;
                Value::Bool(items.iter().any(|y| sql_eq(&x, y) == Some(true)) != *negated)
            }
            ExprKind::Like { expr, pattern, negated } => match (self.eval(expr)?, self.eval(pattern)?) {
                (Value::Str(s), Value::Str(p)) => Value::Bool(like(&s, &p) != *negated),
                _ => Value::Null,
            },
            ExprKind::IsNull { expr, negated } => Value::Bool(self.eval(expr)?.is_null() != *negated),
            ExprKind::Call { name, args, agg: true } => self.aggregate(name, &args[0], pos)?,
            ExprKind::Call { name, args, .. } => {
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                call(name, vals, pos)?
            }
            ExprKind::Method { base, name, args } => {
                let b = self.eval(base)?;
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                self.method(b, name, vals, pos)?
            }
            ExprKind::Case { operand, whens, else_expr } => {
                let op = operand.as_ref().map(|o| self.eval(o)).transpose()?;
                for (c, r) in whens {
                    let hit = match &op {
                        Some(o) => sql_eq(o, &self.eval(c)?) == Some(true),
                        None => self.truth(c)?,
                    };
                    if hit {
                        return self.eval(r);
                    }
                }
                match else_expr {
                    Some(x) => self.eval(x)?,
                    None => Value::Null,
                }
            }
            ExprKind::Tuple(xs) => Value::tuple(xs.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?),
            ExprKind::List(xs) => Value::list(xs.iter().map(|x| self.eval(x)).collect::<Result<Vec<_>, _>>()?),
            ExprKind::MapEntry { keys, values } => {
                let pack = |xs: &[Expr]| -> Result<Value, EvalError> {
                    let mut vs = xs.iter().map(|x| self.eval(x)).collect::<Result<Vec<_>, _>>()?;
                    Ok(if vs.len() == 1 { vs.pop().unwrap() } else { Value::tuple(vs) })
                };
                Value::tuple(vec![pack(keys)?, pack(values)?])
            }
            ExprKind::Seed(types) => Value::Table(Arc::new(self.rt.seed(types))),
        })
    }

    fn attr(&self, b: &Value, name: &str, res: Option<AttrRes>, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
        let g = self.rt.g;
        let missing = || EvalError::Runtime { pos, msg: format!("no attribute `{name}` on {}", b.type_name()) };
        Ok(match (b, res) {
            (Value::Null, _) => Value::Null,
            (Value::Vertex(v), Some(AttrRes::TypeName)) => Value::str(g.vertex_type_name(*v)),
            (Value::Edge(e), Some(AttrRes::TypeName)) => Value::str(g.edge_type_name(*e)),
            (Value::Vertex(v), _) => match g.vertex_attr(*v, name) {
                Some(x) => x.clone(),
                None if name.eq_ignore_ascii_case("type") => Value::str(g.vertex_type_name(*v)),
                None => return Err(missing()),
            },
            (Value::Edge(e), _) => match g.edge_attr(*e, name) {
                Some(x) => x.clone(),
                None if name.eq_ignore_ascii_case("type") => Value::str(g.edge_type_name(*e)),
                None => return Err(missing()),
            },
            (Value::Tuple(t), _) => t.field(name).cloned().ok_or_else(missing)?,
            _ => return Err(missing()),
        })
    }

    fn method(&self, b: Value, name: &str, args: Vec<Value>, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
        let bad = |msg: String| EvalError::Runtime { pos, msg };
        Ok(match (name.to_ascii_lowercase().as_str(), &b) {
            (_, Value::Null) => Value::Null,
            ("outdegree", Value::Vertex(v)) => {
                let types: Vec<&str> = args.iter().filter_map(Value::as_str).collect();
                Value::Int(self.rt.g.outdegree(*v, &types) as i64)
            }
            ("size", _) => Value::Int(b.elements().ok_or_else(|| bad(format!("size() on {}", b.type_name())))?.len() as i64),
            ("contains", Value::Map(m)) => Value::Bool(m.contains_key(&args[0])),
            ("contains", _) => {
                let items = b.elements().ok_or_else(|| bad(format!("contains() on {}", b.type_name())))?;
                Value::Bool(items.iter().any(|x| sql_eq(x, &args[0]) == Some(true)))
            }
            ("get", Value::Map(m)) => m.get(&args[0]).cloned().unwrap_or(Value::Null),
            _ => return Err(bad(format!("no method {name}() on {}", b.type_name()))),
        })
    }

    fn aggregate(&self, name: &str, arg: &Expr, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
        let Some(group) = self.group else {
            return Err(EvalError::Runtime { pos, msg: format!("aggregate {name} outside a group") });
        };
        let mut vals = Vec::with_capacity(group.rows.len());
        for &i in group.rows {
            let f = Frame::new(self.rt, &group.table.vars, group.table.row(i));
            let v = f.eval(arg)?;
            if !v.is_null() {
                vals.push((v, group.table.multiplicity(i)));
            }
        }
        aggregate(name, &vals, pos)
    }
}

/// SQL aggregate over non-NULL values with multiplicities.
pub(crate) fn aggregate(name: &str, vals: &[(Value, u64)], pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
    let total: u64 = vals.iter().map(|(_, m)| m).sum();
    Ok(match name.to_ascii_lowercase().as_str() {
        "count" => Value::Int(total as i64),
        _ if vals.is_empty() => Value::Null,
        "sum" if vals.iter().all(|(v, _)| matches!(v, Value::Int(_))) => {
            let mut s = 0i64;
            for (v, m) in vals {
                let x = v.as_i64().unwrap().checked_mul(*m as i64).ok_or(EvalError::Overflow { pos })?;
                s = s.checked_add(x).ok_or(EvalError::Overflow { pos })?;
            }
            Value::Int(s)
        }
        "sum" | "avg" => {
            let mut s = 0.0;
            for (v, m) in vals {
                let x = v.as_f64().ok_or(EvalError::Runtime { pos, msg: format!("{name} over {}", v.type_name()) })?;
                s += x * *m as f64;
            }
            if name.eq_ignore_ascii_case("avg") {
                Value::Float(s / total as f64)
            } else {
                Value::Float(s)
            }
        }
        "min" => vals.iter().map(|(v, _)| v).min_by(|a, b| order_cmp(a, b)).cloned().unwrap(),
        "max" => vals.iter().map(|(v, _)| v).max_by(|a, b| order_cmp(a, b)).cloned().unwrap(),
        other => return Err(EvalError::Runtime { pos, msg: format!("unknown aggregate {other}") }),
    })
}

fn num_op(op: BinOp, x: f64, y: f64, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
    Ok(Value::Float(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div | BinOp::Mod if y == 0.0 => return Err(EvalError::DivisionByZero { pos }),
        BinOp::Div => x / y,
        BinOp::Mod => x % y,
        _ => unreachable!("numeric operator"),
    }))
}

fn int_op(op: BinOp, x: i64, y: i64, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
    let r = match op {
        BinOp::Add => x.checked_add(y),
        BinOp::Sub => x.checked_sub(y),
        BinOp::Mul => x.checked_mul(y),
        BinOp::Div | BinOp::Mod if y == 0 => return Err(EvalError::DivisionByZero { pos }),
        BinOp::Div => x.checked_div(y),
        BinOp::Mod => x.checked_rem(y),
        BinOp::BitAnd => Some(x & y),
        BinOp::BitOr => Some(x | y),
        _ => unreachable!("integer operator"),
    };
    r.map(Value::Int).ok_or(EvalError::Overflow { pos })
}

pub(crate) fn binary(op: BinOp, a: &Value, b: &Value, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
    use BinOp::*;
    let cmp = |want: fn(Ordering) -> bool| sql_cmp(a, b).map_or(Value::Null, |o| Value::Bool(want(o)));
    Ok(match op {
        Eq => cmp(|o| o == Ordering::Equal),
        Ne => cmp(|o| o != Ordering::Equal),
        Lt => cmp(|o| o == Ordering::Less),
        Le => cmp(|o| o != Ordering::Greater),
        Gt => cmp(|o| o == Ordering::Greater),
        Ge => cmp(|o| o != Ordering::Less),
        _ if a.is_null() || b.is_null() => Value::Null,
        Contains => match (a, b) {
            (Value::Str(s), Value::Str(t)) => Value::Bool(s.contains(&**t)),
            (Value::Map(m), k) => Value::Bool(m.contains_key(k)),
            _ => match a.elements() {
                Some(items) => Value::Bool(items.iter().any(|x| sql_eq(x, b) == Some(true))),
                None => return Err(EvalError::Runtime { pos, msg: format!("CONTAINS on {}", a.type_name()) }),
            },
        },
        Add | Sub | Mul | Div | Mod | BitAnd | BitOr => match (a, b) {
            (Value::Int(x), Value::Int(y)) => int_op(op, *x, *y, pos)?,
            (Value::Int(_) | Value::Float(_), Value::Int(_) | Value::Float(_)) if !matches!(op, BitAnd | BitOr) => {
                num_op(op, a.as_f64().unwrap(), b.as_f64().unwrap(), pos)?
            }
            (Value::Str(x), Value::Str(y)) if op == Add => Value::str(&format!("{x}{y}")),
            (Value::DateTime(t), Value::Int(s)) if matches!(op, Add | Sub) => {
                Value::DateTime(if op == Add { t + s } else { t - s })
            }
            _ if op == Sub && a.elements().is_some() && b.elements().is_some() => set_op(Minus, a, b),
            _ => return Err(EvalError::Runtime { pos, msg: format!("{} {} {}", a.type_name(), op.symbol(), b.type_name()) }),
        },
        Union | Intersect | Minus => {
            if a.elements().is_none() || b.elements().is_none() {
                return Err(EvalError::Runtime { pos, msg: format!("{} {} {}", a.type_name(), op.symbol(), b.type_name()) });
            }
            set_op(op, a, b)
        }
        And | Or => unreachable!("handled with short-circuiting"),
    })
}

/// Set algebra. Vertex sets (tables) keep the left operand's order and
/// stay duplicate-free; set values use their own order.
fn set_op(op: BinOp, a: &Value, b: &Value) -> Value {
    let (xs, ys) = (a.elements().unwrap_or_default(), b.elements().unwrap_or_default());
    let right: BTreeSet<&Value> = ys.iter().collect();
    let mut seen = BTreeSet::new();
    let mut out: Vec<Value> = Vec::new();
    let mut push = |v: &Value, out: &mut Vec<Value>| {
        if seen.insert(v.clone()) {
            out.push(v.clone());
        }
    };
    match op {
        BinOp::Union => xs.iter().chain(&ys).for_each(|v| push(v, &mut out)),
        BinOp::Intersect => xs.iter().filter(|v| right.contains(v)).for_each(|v| push(v, &mut out)),
        _ => xs.iter().filter(|v| !right.contains(v)).for_each(|v| push(v, &mut out)),
    }
    match (a, b) {
        (Value::Table(t), _) | (_, Value::Table(t)) => {
            let mut res = Table::new(t.name.clone(), t.columns.clone(), t.types.clone());
            res.rows = out
                .into_iter()
                .map(|v| match v {
                    Value::Tuple(tu) if t.columns.len() > 1 => tu.values.clone(),
                    v => vec![v],
                })
                .collect();
            Value::Table(Arc::new(res))
        }
        (Value::List(_), _) => Value::list(out),
        (Value::Bag(_), _) => Value::bag(out),
        _ => Value::set(out),
    }
}

/// SQL LIKE: `%` matches any run, `_` one character; case-sensitive.
pub(crate) fn like(s: &str, p: &str) -> bool {
    let s: Vec<char> = s.chars().collect();
    let p: Vec<char> = p.chars().collect();
    let (mut i, mut j) = (0, 0);
    // Last `%` position in p and the s position it was tried against.
    let mut star: Option<(usize, usize)> = None;
    while i < s.len() {
        if j < p.len() && (p[j] == '_' || p[j] == s[i]) && p[j] != '%' {
            i += 1;
            j += 1;
        } else if j < p.len() && p[j] == '%' {
            star = Some((j, i));
            j += 1;
        } else if let Some((sj, si)) = star {
            j = sj + 1;
            i = si + 1;
            star = Some((sj, si + 1));
        } else {
            return false;
        }
    }
    p[j..].iter().all(|&c| c == '%')
}

fn call(name: &str, args: Vec<Value>, pos: crate::frontend::ast::Pos) -> Result<Value, EvalError> {
    let lname = name.to_ascii_lowercase();
    if lname != "coalesce" && args.iter().any(Value::is_null) {
        return Ok(Value::Null);
    }
    let bad = |msg: String| EvalError::Runtime { pos, msg };
    let num = |i: usize| args[i].as_f64().ok_or_else(|| bad(format!("{name} needs a number, found {}", args[i].type_name())));
    Ok(match lname.as_str() {
        "abs" => match &args[0] {
            Value::Int(i) => Value::Int(i.checked_abs().ok_or(EvalError::Overflow { pos })?),
            _ => Value::Float(num(0)?.abs()),
        },
        "log" | "ln" => {
            let x = num(0)?;
            if x <= 0.0 {
                return Err(EvalError::Log { pos, value: x });
            }
            Value::Float(x.ln())
        }
        "exp" => Value::Float(num(0)?.exp()),
        "sqrt" => Value::Float(num(0)?.sqrt()),
        "pow" => Value::Float(num(0)?.powf(num(1)?)),
        "floor" => Value::Int(num(0)?.floor() as i64),
        "ceil" => Value::Int(num(0)?.ceil() as i64),
        "round" => Value::Int(num(0)?.round() as i64),
        "lower" => Value::str(&args[0].to_string().to_lowercase()),
        "upper" => Value::str(&args[0].to_string().to_uppercase()),
        "trim" => Value::str(args[0].to_string().trim()),
        "length" => match &args[0] {
            Value::Str(s) => Value::Int(s.chars().count() as i64),
            v => Value::Int(v.elements().map_or(0, |e| e.len()) as i64),
        },
        "to_string" => match &args[0] {
            Value::DateTime(t) => Value::str(&format_datetime(*t)),
            v => Value::str(&v.to_string()),
        },
        "to_int" => match &args[0] {
            Value::Int(i) => Value::Int(*i),
            Value::Float(f) => Value::Int(*f as i64),
            Value::Str(s) => s.trim().parse().map(Value::Int).map_err(|_| bad(format!("to_int('{s}')")))?,
            Value::Bool(b) => Value::Int(*b as i64),
            v => return Err(bad(format!("to_int on {}", v.type_name()))),
        },
        "to_float" => match &args[0] {
            Value::Str(s) => s.trim().parse().map(Value::Float).map_err(|_| bad(format!("to_float('{s}')")))?,
            _ => Value::Float(num(0)?),
        },
        "to_datetime" => match &args[0] {
            Value::DateTime(t) => Value::DateTime(*t),
            Value::Str(s) => parse_datetime(s).map(Value::DateTime).ok_or_else(|| bad(format!("to_datetime('{s}')")))?,
            Value::Int(i) => Value::DateTime(*i),
            v => return Err(bad(format!("to_datetime on {}", v.type_name()))),
        },
        "year" | "month" | "day" => {
            let t = match &args[0] {
                Value::DateTime(t) => *t,
                Value::Str(s) => parse_datetime(s).ok_or_else(|| bad(format!("{name}('{s}')")))?,
                v => return Err(bad(format!("{name} on {}", v.type_name()))),
            };
            let date = format_datetime(t);
            match lname.as_str() {
                "year" => Value::Int(datetime_year(t)),
                "month" => Value::Int(date[5..7].parse().unwrap_or(1)),
                _ => Value::Int(date[8..10].parse().unwrap_or(1)),
            }
        }
        "coalesce" => args.into_iter().find(|v| !v.is_null()).unwrap_or(Value::Null),
        "count" | "size" => Value::Int(args[0].elements().ok_or_else(|| bad(format!("{name} needs a collection")))?.len() as i64),
        "sum" | "min" | "max" | "avg" => {
            let items = args[0].elements().ok_or_else(|| bad(format!("{name} needs a collection")))?;
            let vals: Vec<(Value, u64)> = items.into_iter().filter(|v| !v.is_null()).map(|v| (v, 1)).collect();
            aggregate(&lname, &vals, pos)?
        }
        _ => return Err(bad(format!("unknown function {name}"))),
    })
}

/// Default value of a declared global variable.
pub(crate) fn type_default(t: &Type) -> Value {
    match t {
        Type::Bool => Value::Bool(false),
        Type::Int => Value::Int(0),
        Type::Float => Value::Float(0.0),
        Type::Str => Value::str(""),
        Type::DateTime => Value::DateTime(0),
        Type::List(_) => Value::list([]),
        Type::Set(_) => Value::set([]),
        Type::Bag(_) => Value::bag([]),
        Type::Map(..) => Value::Map(Arc::new(BTreeMap::new())),
        _ => Value::Null,
    }
}

/// Converts a value to a declared type where SQL would (int to float,
/// string to datetime).
pub(crate) fn coerce_to(t: &Type, v: Value) -> Value {
    match (t, v) {
        (Type::Float, Value::Int(i)) => Value::Float(i as f64),
        (Type::DateTime, Value::Str(s)) => parse_datetime(&s).map_or(Value::Str(s), Value::DateTime),
        (_, v) => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ast::Pos;

    #[test]
    fn like_wildcards() {
        assert!(like("ACME", "ACME"));
        assert!(like("ACME Corp", "ACME%"));
        assert!(like("xACMEx", "%ACME%"));
        assert!(like("abc", "a_c"));
        assert!(!like("abc", "a_"));
        assert!(!like("acme", "ACME"));
        assert!(like("", "%"));
        assert!(like("aXbXc", "a%b%c"));
        assert!(!like("ab", "a%b%c"));
    }

    #[test]
    fn arithmetic_follows_sql() {
        let p = Pos::default();
        let sale = binary(BinOp::Mul, &Value::Int(2), &Value::Float(10.0), p).unwrap();
        let pct = binary(BinOp::Sub, &Value::Int(100), &Value::Float(25.0), p).unwrap();
        let prod = binary(BinOp::Mul, &sale, &pct, p).unwrap();
        assert_eq!(binary(BinOp::Div, &prod, &Value::Float(100.0), p).unwrap(), Value::Float(15.0));
        assert_eq!(binary(BinOp::Div, &Value::Int(7), &Value::Int(2), p).unwrap(), Value::Int(3));
        assert!(matches!(binary(BinOp::Div, &Value::Int(1), &Value::Int(0), p), Err(EvalError::DivisionByZero { .. })));
        assert_eq!(binary(BinOp::Eq, &Value::Null, &Value::Int(1), p).unwrap(), Value::Null);
    }

    #[test]
    fn builtins() {
        let p = Pos::default();
        let Value::Float(x) = call("log", vec![Value::Int(3)], p).unwrap() else { panic!() };
        assert!((x - 3f64.ln()).abs() < 1e-15);
        assert!(matches!(call("log", vec![Value::Int(0)], p), Err(EvalError::Log { .. })));
        assert_eq!(call("abs", vec![Value::Float(-2.5)], p).unwrap(), Value::Float(2.5));
        assert_eq!(call("count", vec![Value::list([Value::Int(1), Value::Int(1)])], p).unwrap(), Value::Int(2));
    }

    #[test]
    fn vertex_set_algebra_keeps_left_order() {
        let p = Pos::default();
        let t = |vs: &[u32]| Value::Table(Arc::new(Table::vertex_set("s", "v", None, vs.iter().map(|&i| VertexId(i)))));
        let Value::Table(d) = binary(BinOp::Minus, &t(&[3, 1, 2]), &t(&[1]), p).unwrap() else { panic!() };
        assert_eq!(d.vertices().collect::<Vec<_>>(), [VertexId(3), VertexId(2)]);
        let Value::Table(u) = binary(BinOp::Union, &t(&[2]), &t(&[1, 2]), p).unwrap() else { panic!() };
        assert_eq!(u.vertices().collect::<Vec<_>>(), [VertexId(2), VertexId(1)]);
    }
}
