//! Query contexts: names mapped to values, plus accumulator instances with
//! their primed (previous-block) copies.

use std::collections::BTreeMap;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::accum::{self, AccType, AccumValue};
use crate::graph::{Graph, VertexId};
use crate::value::Value;

/// A global accumulator instance; `prev` backs `@@A'`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalAcc {
    pub ty: AccType,
    pub cur: AccumValue,
    pub prev: AccumValue,
}

impl GlobalAcc {
    pub fn new(ty: AccType, init: AccumValue) -> Self {
        GlobalAcc { ty, prev: init.clone(), cur: init }
    }
}

/// One instance per vertex, indexed by vertex id. Shared until written.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAcc {
    pub ty: AccType,
    pub cur: Arc<Vec<AccumValue>>,
    pub prev: Arc<Vec<AccumValue>>,
}

impl VertexAcc {
    pub fn new(ty: AccType, init: AccumValue, n: usize) -> Self {
        let cur = Arc::new(vec![init; n]);
        VertexAcc { ty, prev: Arc::clone(&cur), cur }
    }

    pub fn cur_mut(&mut self) -> &mut Vec<AccumValue> {
        Arc::make_mut(&mut self.cur)
    }

    /// `A' <- A` for every instance.
    pub fn refresh_prime(&mut self) {
        self.prev = Arc::clone(&self.cur);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Context {
    /// Parameters, global variables, tables and vertex sets.
    pub vars: BTreeMap<String, Value>,
    pub gaccs: IndexMap<String, GlobalAcc>,
    pub vaccs: IndexMap<String, VertexAcc>,
    /// The default graph `DG`, when the query names one.
    pub default_graph: Option<String>,
}

/// A term readable from a context.
#[derive(Debug, Clone, PartialEq)]
pub enum Term<'a> {
    Const(Value),
    Var(&'a str),
    /// `x.attr` on a vertex or edge bound to `x`.
    Attr(&'a str, &'a str),
    /// `x.type`.
    TypeOf(&'a str),
    GAcc { name: &'a str, primed: bool },
    VAcc { var: &'a str, name: &'a str, primed: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("`{0}` is not defined")]
    Undefined(String),
    #[error("`{0}` is not bound to a vertex or edge")]
    NotElement(String),
    #[error("no attribute `{attr}` on `{var}`")]
    NoAttribute { var: String, attr: String },
}

/// Two contexts disagree on this name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("contexts disagree on `{0}`")]
pub struct Inconsistent(pub String);

impl Context {
    /// A fresh context with `updates` overwriting existing entries, in order.
    pub fn override_with(&self, updates: impl IntoIterator<Item = (String, Value)>) -> Context {
        let mut out = self.clone();
        out.vars.extend(updates);
        out
    }

    pub fn var(&self, name: &str) -> Option<&Value> {
        self.vars.get(name)
    }

    pub fn read_gacc(&self, name: &str, primed: bool) -> Option<Value> {
        let a = self.gaccs.get(name)?;
        Some(accum::read(&a.ty, if primed { &a.prev } else { &a.cur }))
    }

    pub fn read_vacc(&self, name: &str, v: VertexId, primed: bool) -> Option<Value> {
        let a = self.vaccs.get(name)?;
        let store = if primed { &a.prev } else { &a.cur };
        store.get(v.index()).map(|x| accum::read(&a.ty, x))
    }

    /// Value of a term; vertex and edge attributes come from `g`.
    pub fn read_term(&self, g: &Graph, t: &Term) -> Result<Value, ContextError> {
        let undefined = |n: &str| ContextError::Undefined(n.to_string());
        let var = |n: &str| self.vars.get(n).ok_or_else(|| undefined(n));
        match *t {
            Term::Const(ref v) => Ok(v.clone()),
            Term::Var(n) => var(n).cloned(),
            Term::Attr(n, attr) => {
                let found = match var(n)? {
                    Value::Vertex(v) => g.vertex_attr(*v, attr),
                    Value::Edge(e) => g.edge_attr(*e, attr),
                    Value::Tuple(t) => t.field(attr),
                    _ => return Err(ContextError::NotElement(n.into())),
                };
                found.cloned().ok_or_else(|| ContextError::NoAttribute { var: n.into(), attr: attr.into() })
            }
            Term::TypeOf(n) => match var(n)? {
                Value::Vertex(v) => Ok(Value::str(g.vertex_type_name(*v))),
                Value::Edge(e) => Ok(Value::str(g.edge_type_name(*e))),
                _ => Err(ContextError::NotElement(n.into())),
            },
            Term::GAcc { name, primed } => self.read_gacc(name, primed).ok_or_else(|| undefined(&format!("@@{name}"))),
            Term::VAcc { var: n, name, primed } => {
                let v = var(n)?.as_vertex().ok_or_else(|| ContextError::NotElement(n.into()))?;
                self.read_vacc(name, v, primed).ok_or_else(|| undefined(&format!("@{name}")))
            }
        }
    }
}

/// Union of contexts that agree on every shared name.
pub fn consistent_merge(ctxs: &[Context]) -> Result<Context, Inconsistent> {
    let mut out = Context::default();
    for c in ctxs {
        for (k, v) in &c.vars {
            match out.vars.get(k) {
                Some(old) if old != v => return Err(Inconsistent(k.clone())),
                Some(_) => {}
                None => {
                    out.vars.insert(k.clone(), v.clone());
                }
            }
        }
        for (k, a) in &c.gaccs {
            match out.gaccs.get(k) {
                Some(old) if old != a => return Err(Inconsistent(format!("@@{k}"))),
                Some(_) => {}
                None => {
                    out.gaccs.insert(k.clone(), a.clone());
                }
            }
        }
        for (k, a) in &c.vaccs {
            match out.vaccs.get(k) {
                Some(old) if old != a => return Err(Inconsistent(format!("@{k}"))),
                Some(_) => {}
                None => {
                    out.vaccs.insert(k.clone(), a.clone());
                }
            }
        }
        match (&out.default_graph, &c.default_graph) {
            (Some(a), Some(b)) if a != b => return Err(Inconsistent("DG".into())),
            (None, Some(b)) => out.default_graph = Some(b.clone()),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Type;

    fn ctx(pairs: &[(&str, i64)]) -> Context {
        Context::default().override_with(pairs.iter().map(|(k, v)| (k.to_string(), Value::Int(*v))))
    }

    #[test]
    fn override_is_last_writer_wins() {
        assert_eq!(ctx(&[("x", 1)]).override_with([("x".into(), Value::Int(2))]), ctx(&[("x", 2)]));
        assert_eq!(Context::default().override_with([("x".into(), Value::Int(1))]), ctx(&[("x", 1)]));
        let seq = ctx(&[]).override_with([("x".into(), Value::Int(1)), ("x".into(), Value::Int(3))]);
        assert_eq!(seq.var("x"), Some(&Value::Int(3)));
    }

    #[test]
    fn override_does_not_alias() {
        let mut base = ctx(&[("x", 1)]);
        base.vaccs.insert("a".into(), VertexAcc::new(AccType::Sum(Type::Int), AccumValue::Sum(Value::Int(0)), 2));
        let mut copy = base.override_with([]);
        copy.vaccs.get_mut("a").unwrap().cur_mut()[0] = AccumValue::Sum(Value::Int(9));
        copy.vars.insert("x".into(), Value::Int(5));
        assert_eq!(base.read_vacc("a", VertexId(0), false), Some(Value::Int(0)));
        assert_eq!(base.var("x"), Some(&Value::Int(1)));
    }

    #[test]
    fn merge_agreeing_and_conflicting() {
        assert_eq!(consistent_merge(&[ctx(&[("x", 1)]), ctx(&[("y", 2)])]).unwrap(), ctx(&[("x", 1), ("y", 2)]));
        assert_eq!(consistent_merge(&[ctx(&[("x", 1)]), ctx(&[("x", 1), ("y", 2)])]).unwrap(), ctx(&[("x", 1), ("y", 2)]));
        assert_eq!(consistent_merge(&[ctx(&[("x", 1)]), ctx(&[("x", 2)])]), Err(Inconsistent("x".into())));
    }

    #[test]
    fn primed_read_sees_previous_value() {
        let ty = AccType::Sum(Type::Int);
        let mut c = Context::default();
        c.gaccs.insert("A".into(), GlobalAcc::new(ty.clone(), accum::default_value(&ty)));
        let a = c.gaccs.get_mut("A").unwrap();
        a.prev = a.cur.clone();
        a.cur = AccumValue::Sum(Value::Int(5));
        assert_eq!(c.read_gacc("A", true), Some(Value::Int(0)));
        assert_eq!(c.read_gacc("A", false), Some(Value::Int(5)));
    }
}
