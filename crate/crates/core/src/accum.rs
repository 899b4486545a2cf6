//! Accumulator types, their internal values and the combine operator.
//!
//! An accumulator is a typed container that absorbs inputs through a
//! binary combiner. `combine` is a pure function of the type, the current
//! value and one input; every other operation is defined in terms of it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::frontend::ast::{AccTypeAst, BaseType, Capacity, ElemType, SortDir};
use crate::value::{order_cmp, parse_datetime, Type, Value};

/// Above this multiplicity, inputs are applied in closed form instead of
/// one combine per repetition.
pub const REPEAT_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AccError {
    #[error("accumulator {acc} cannot take input of type {found}")]
    TypeMismatch { acc: String, found: &'static str },
    #[error("unsupported accumulator type {0}")]
    Unsupported(String),
    #[error("heap capacity `{0}` is not bound to a non-negative integer")]
    Capacity(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeapCapacity {
    Fixed(usize),
    /// Bound to a query parameter; resolved before instantiation.
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapKey {
    /// Field name; empty when the heap holds bare values.
    pub name: String,
    /// Position within the tuple; `None` sorts on the whole element.
    pub field: Option<usize>,
    pub desc: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapSpec {
    pub capacity: HeapCapacity,
    pub elem: Type,
    pub keys: Vec<HeapKey>,
}

impl HeapSpec {
    fn cmp(&self, a: &Value, b: &Value) -> Ordering {
        for k in &self.keys {
            let (x, y) = match (k.field, a, b) {
                (Some(i), Value::Tuple(ta), Value::Tuple(tb)) => (&ta.values[i], &tb.values[i]),
                _ => (a, b),
            };
            let o = order_cmp(x, y);
            let o = if k.desc { o.reverse() } else { o };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapValType {
    Base(Type),
    Acc(Box<AccType>),
}

/// Semantic accumulator type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccType {
    Sum(Type),
    Min(Type),
    Max(Type),
    Avg,
    Or,
    And,
    Set(Type),
    Bag(Type),
    List(Type),
    Map(Type, MapValType),
    Heap(HeapSpec),
}

impl fmt::Display for AccType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccType::Sum(t) => write!(f, "SumAccum<{t}>"),
            AccType::Min(t) => write!(f, "MinAccum<{t}>"),
            AccType::Max(t) => write!(f, "MaxAccum<{t}>"),
            AccType::Avg => write!(f, "AvgAccum"),
            AccType::Or => write!(f, "OrAccum"),
            AccType::And => write!(f, "AndAccum"),
            AccType::Set(t) => write!(f, "SetAccum<{t}>"),
            AccType::Bag(t) => write!(f, "BagAccum<{t}>"),
            AccType::List(t) => write!(f, "ListAccum<{t}>"),
            AccType::Map(k, MapValType::Base(v)) => write!(f, "MapAccum<{k}, {v}>"),
            AccType::Map(k, MapValType::Acc(a)) => write!(f, "MapAccum<{k}, {a}>"),
            AccType::Heap(h) => write!(f, "HeapAccum<{}>", h.elem),
        }
    }
}

fn unsupported(what: &str) -> AccError {
    AccError::Unsupported(what.to_string())
}

impl AccType {
    /// Converts a declared type. Array, GroupBy and Bitwise accumulators
    /// are recognized by the grammar but not supported.
    pub fn from_ast(ast: &AccTypeAst) -> Result<AccType, AccError> {
        let sem = BaseType::semantic;
        Ok(match ast {
            AccTypeAst::Sum(t) => {
                let t = sem(t);
                if !matches!(t, Type::Int | Type::Float | Type::Str) {
                    return Err(unsupported(&format!("SumAccum<{t}>")));
                }
                AccType::Sum(t)
            }
            AccTypeAst::Min(t) | AccTypeAst::Max(t) => {
                let t = sem(t);
                if !matches!(t, Type::Int | Type::Float | Type::Str | Type::DateTime | Type::Vertex(_)) {
                    return Err(unsupported(&format!("Min/MaxAccum<{t}>")));
                }
                if matches!(ast, AccTypeAst::Min(_)) {
                    AccType::Min(t)
                } else {
                    AccType::Max(t)
                }
            }
            AccTypeAst::Avg(_) => AccType::Avg,
            AccTypeAst::Or(_) => AccType::Or,
            AccTypeAst::And(_) => AccType::And,
            AccTypeAst::BitwiseOr(_) => return Err(unsupported("BitwiseOrAccum")),
            AccTypeAst::BitwiseAnd(_) => return Err(unsupported("BitwiseAndAccum")),
            AccTypeAst::Array(_) => return Err(unsupported("ArrayAccum")),
            AccTypeAst::GroupBy { .. } => return Err(unsupported("GroupByAccum")),
            AccTypeAst::Set(t) => AccType::Set(sem(t)),
            AccTypeAst::Bag(t) => AccType::Bag(sem(t)),
            AccTypeAst::List(ElemType::Base(t)) => AccType::List(sem(t)),
            AccTypeAst::List(ElemType::Acc(_)) => return Err(unsupported("ListAccum of accumulators")),
            AccTypeAst::Map(k, v) => AccType::Map(
                sem(k),
                match v {
                    ElemType::Base(b) => MapValType::Base(sem(b)),
                    ElemType::Acc(a) => MapValType::Acc(Box::new(AccType::from_ast(a)?)),
                },
            ),
            AccTypeAst::Heap { tuple, capacity, keys } => {
                let elem = sem(tuple);
                let mut spec_keys = Vec::new();
                for (name, dir) in keys {
                    let field = match (&elem, name.is_empty()) {
                        (_, true) => None,
                        (Type::Tuple(fs), false) => match fs.iter().position(|(n, _)| n == name) {
                            Some(i) => Some(i),
                            None => return Err(unsupported(&format!("HeapAccum sort field `{name}`"))),
                        },
                        _ => return Err(unsupported(&format!("HeapAccum sort field `{name}` on non-tuple"))),
                    };
                    spec_keys.push(HeapKey { name: name.clone(), field, desc: *dir == Some(SortDir::Desc) });
                }
                if spec_keys.is_empty() {
                    spec_keys.push(HeapKey { name: String::new(), field: None, desc: false });
                }
                let capacity = match capacity {
                    Capacity::Const(n) => HeapCapacity::Fixed(
                        usize::try_from(*n).map_err(|_| AccError::Capacity(n.to_string()))?,
                    ),
                    Capacity::Param(p) => HeapCapacity::Param(p.clone()),
                };
                AccType::Heap(HeapSpec { capacity, elem, keys: spec_keys })
            }
        })
    }

    /// Replaces a parameter-bound heap capacity by its value.
    pub fn resolve(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<AccType, AccError> {
        Ok(match self {
            AccType::Heap(h) => match &h.capacity {
                HeapCapacity::Param(p) => {
                    let n = lookup(p)
                        .and_then(|v| v.as_i64())
                        .and_then(|n| usize::try_from(n).ok())
                        .ok_or_else(|| AccError::Capacity(p.clone()))?;
                    AccType::Heap(HeapSpec { capacity: HeapCapacity::Fixed(n), ..h.clone() })
                }
                HeapCapacity::Fixed(_) => self.clone(),
            },
            AccType::Map(k, MapValType::Acc(a)) => AccType::Map(k.clone(), MapValType::Acc(Box::new(a.resolve(lookup)?))),
            _ => self.clone(),
        })
    }

    /// Type of the value obtained by reading the accumulator.
    pub fn read_type(&self) -> Type {
        match self {
            AccType::Sum(t) | AccType::Min(t) | AccType::Max(t) => t.clone(),
            AccType::Avg => Type::Float,
            AccType::Or | AccType::And => Type::Bool,
            AccType::Set(t) => Type::Set(Box::new(t.clone())),
            AccType::Bag(t) => Type::Bag(Box::new(t.clone())),
            AccType::List(t) => Type::List(Box::new(t.clone())),
            AccType::Map(k, v) => Type::Map(Box::new(k.clone()), Box::new(v.read_type())),
            AccType::Heap(h) => Type::List(Box::new(h.elem.clone())),
        }
    }

    /// Whether a `+=` input of type `t` is accepted.
    pub fn accepts_input(&self, t: &Type) -> bool {
        match self {
            AccType::Sum(a) | AccType::Min(a) | AccType::Max(a) => a.accepts(t),
            AccType::Avg => t.is_numeric(),
            AccType::Or | AccType::And => matches!(t, Type::Bool | Type::Any),
            AccType::Set(a) | AccType::Bag(a) | AccType::List(a) => {
                a.accepts(t) || (t.is_collection() && a.accepts(&t.element()))
            }
            AccType::Map(k, v) => match t {
                Type::Map(tk, tv) => k.accepts(tk) && v.accepts_input(tv),
                Type::Tuple(fs) if fs.len() == 2 => k.accepts(&fs[0].1) && v.accepts_input(&fs[1].1),
                Type::Any => true,
                _ => false,
            },
            AccType::Heap(h) => h.elem.accepts(t) || (matches!(t, Type::List(_)) && h.elem.accepts(&t.element())),
        }
    }

    /// Whether the value of an `=` assignment of type `t` is accepted.
    pub fn accepts_assign(&self, t: &Type) -> bool {
        match self {
            AccType::Avg => t.is_numeric(),
            AccType::Set(a) | AccType::Bag(a) | AccType::List(a) => {
                matches!(t, Type::Any) || (t.is_collection() && a.accepts(&t.element()))
            }
            AccType::Heap(h) => matches!(t, Type::Any) || (t.is_collection() && h.elem.accepts(&t.element())),
            _ => self.read_type().accepts(t),
        }
    }

    /// Whether the final value is independent of input order.
    pub fn order_invariant(&self) -> bool {
        match self {
            AccType::Sum(t) => *t != Type::Str,
            AccType::List(_) => false,
            AccType::Map(_, MapValType::Base(_)) => false,
            AccType::Map(_, MapValType::Acc(a)) => a.order_invariant(),
            _ => true,
        }
    }
}

impl MapValType {
    fn read_type(&self) -> Type {
        match self {
            MapValType::Base(t) => t.clone(),
            MapValType::Acc(a) => a.read_type(),
        }
    }

    fn accepts_input(&self, t: &Type) -> bool {
        match self {
            MapValType::Base(b) => b.accepts(t),
            MapValType::Acc(a) => a.accepts_input(t),
        }
    }
}

/// One map entry: a plain value (overwritten on input) or a nested
/// accumulator (combined on input).
#[derive(Debug, Clone, PartialEq)]
pub enum MapSlot {
    Base(Value),
    Acc(AccumValue),
}

/// Internal accumulator state. Avg keeps the sum and count, never the
/// quotient; Heap contents stay sorted by the heap keys and within capacity.
#[derive(Debug, Clone, PartialEq)]
pub enum AccumValue {
    Sum(Value),
    /// `None` until the first input.
    Min(Option<Value>),
    Max(Option<Value>),
    Avg { sum: f64, count: u64 },
    Or(bool),
    And(bool),
    Set(BTreeSet<Value>),
    Bag(BTreeMap<Value, u64>),
    List(Vec<Value>),
    Map(BTreeMap<Value, MapSlot>),
    Heap(Vec<Value>),
}

pub fn default_value(ty: &AccType) -> AccumValue {
    match ty {
        AccType::Sum(Type::Float) => AccumValue::Sum(Value::Float(0.0)),
        AccType::Sum(Type::Str) => AccumValue::Sum(Value::str("")),
        AccType::Sum(_) => AccumValue::Sum(Value::Int(0)),
        AccType::Min(_) => AccumValue::Min(None),
        AccType::Max(_) => AccumValue::Max(None),
        AccType::Avg => AccumValue::Avg { sum: 0.0, count: 0 },
        AccType::Or => AccumValue::Or(false),
        AccType::And => AccumValue::And(true),
        AccType::Set(_) => AccumValue::Set(BTreeSet::new()),
        AccType::Bag(_) => AccumValue::Bag(BTreeMap::new()),
        AccType::List(_) => AccumValue::List(Vec::new()),
        AccType::Map(..) => AccumValue::Map(BTreeMap::new()),
        AccType::Heap(_) => AccumValue::Heap(Vec::new()),
    }
}

/// Converts a value to the accumulator's element type where an implicit
/// conversion exists (int to float, string to datetime).
fn coerce(v: &Value, t: &Type) -> Value {
    match (t, v) {
        (Type::Float, Value::Int(i)) => Value::Float(*i as f64),
        (Type::DateTime, Value::Str(s)) => parse_datetime(s).map_or_else(|| v.clone(), Value::DateTime),
        _ => v.clone(),
    }
}

fn mismatch(ty: &AccType, v: &Value) -> AccError {
    AccError::TypeMismatch { acc: ty.to_string(), found: v.type_name() }
}

fn is_collection_input(elem: &Type, v: &Value) -> bool {
    matches!(v, Value::List(_) | Value::Set(_) | Value::Bag(_) | Value::Table(_))
        && !matches!(elem, Type::List(_) | Type::Set(_) | Type::Bag(_))
}

fn capacity(h: &HeapSpec) -> Result<usize, AccError> {
    match &h.capacity {
        HeapCapacity::Fixed(n) => Ok(*n),
        HeapCapacity::Param(p) => Err(AccError::Capacity(p.clone())),
    }
}

fn heap_insert(h: &HeapSpec, items: &mut Vec<Value>, v: Value, cap: usize) {
    // Stable: equal keys keep insertion order.
    let at = items.partition_point(|x| h.cmp(x, &v) != Ordering::Greater);
    if at < cap {
        items.insert(at, v);
        items.truncate(cap);
    }
}

fn map_entries(v: &Value) -> Option<Vec<(Value, Value)>> {
    match v {
        Value::Map(m) => Some(m.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
        Value::Tuple(t) if t.values.len() == 2 => Some(vec![(t.values[0].clone(), t.values[1].clone())]),
        _ => None,
    }
}

/// `cur ← cur ⊕ input`.
pub fn combine(ty: &AccType, cur: &mut AccumValue, input: &Value) -> Result<(), AccError> {
    combine_n(ty, cur, input, 1)
}

/// Applies `input` with multiplicity `m`, equivalent to `m` successive
/// combines. Large multiplicities use a closed form.
pub fn combine_n(ty: &AccType, cur: &mut AccumValue, input: &Value, m: u64) -> Result<(), AccError> {
    if m == 0 {
        return Ok(());
    }
    match (ty, cur) {
        (AccType::Sum(t), AccumValue::Sum(s)) => {
            let input = coerce(input, t);
            match (&*s, &input) {
                (Value::Int(a), Value::Int(b)) => *s = Value::Int(a.wrapping_add(b.wrapping_mul(m as i64))),
                (Value::Float(a), Value::Float(b)) => {
                    if m <= REPEAT_LIMIT {
                        let mut acc = *a;
                        for _ in 0..m {
                            acc += b;
                        }
                        *s = Value::Float(acc);
                    } else {
                        *s = Value::Float(a + b * m as f64);
                    }
                }
                (Value::Str(a), Value::Str(b)) => {
                    let mut out = String::with_capacity(a.len() + b.len() * m as usize);
                    out.push_str(a);
                    for _ in 0..m {
                        out.push_str(b);
                    }
                    *s = Value::str(&out);
                }
                _ => return Err(mismatch(ty, &input)),
            }
        }
        (AccType::Min(t) | AccType::Max(t), slot @ (AccumValue::Min(_) | AccumValue::Max(_))) => {
            if input.is_null() {
                return Ok(());
            }
            let input = coerce(input, t);
            let want = if matches!(ty, AccType::Min(_)) { Ordering::Less } else { Ordering::Greater };
            let (AccumValue::Min(cur) | AccumValue::Max(cur)) = slot else { unreachable!() };
            match cur {
                Some(c) if order_cmp(&input, c) != want => {}
                _ => *cur = Some(input),
            }
        }
        (AccType::Avg, AccumValue::Avg { sum, count }) => {
            let x = input.as_f64().ok_or_else(|| mismatch(ty, input))?;
            if m <= REPEAT_LIMIT {
                for _ in 0..m {
                    *sum += x;
                }
            } else {
                *sum += x * m as f64;
            }
            *count += m;
        }
        (AccType::Or, AccumValue::Or(b)) => *b |= input.as_bool().ok_or_else(|| mismatch(ty, input))?,
        (AccType::And, AccumValue::And(b)) => *b &= input.as_bool().ok_or_else(|| mismatch(ty, input))?,
        (AccType::Set(t), AccumValue::Set(set)) => {
            if is_collection_input(t, input) {
                set.extend(input.elements().unwrap_or_default().iter().map(|x| coerce(x, t)));
            } else {
                set.insert(coerce(input, t));
            }
        }
        (AccType::Bag(t), AccumValue::Bag(bag)) => {
            let items = if is_collection_input(t, input) { input.elements().unwrap_or_default() } else { vec![input.clone()] };
            for x in items {
                *bag.entry(coerce(&x, t)).or_insert(0) += m;
            }
        }
        (AccType::List(t), AccumValue::List(list)) => {
            let items = if is_collection_input(t, input) { input.elements().unwrap_or_default() } else { vec![input.clone()] };
            for _ in 0..m {
                list.extend(items.iter().map(|x| coerce(x, t)));
            }
        }
        (AccType::Map(kt, vt), AccumValue::Map(map)) => {
            let entries = map_entries(input).ok_or_else(|| mismatch(ty, input))?;
            for (k, v) in entries {
                let k = coerce(&k, kt);
                match vt {
                    MapValType::Base(t) => {
                        map.insert(k, MapSlot::Base(coerce(&v, t)));
                    }
                    MapValType::Acc(inner) => {
                        let slot = map.entry(k).or_insert_with(|| MapSlot::Acc(default_value(inner)));
                        if let MapSlot::Acc(a) = slot {
                            combine_n(inner, a, &v, m)?;
                        }
                    }
                }
            }
        }
        (AccType::Heap(h), AccumValue::Heap(items)) => {
            let cap = capacity(h)?;
            let inputs = if matches!(input, Value::List(_)) { input.elements().unwrap_or_default() } else { vec![input.clone()] };
            for x in inputs {
                for _ in 0..m.min(cap as u64) {
                    heap_insert(h, items, x.clone(), cap);
                }
            }
        }
        (_, cur) => {
            return Err(AccError::TypeMismatch { acc: ty.to_string(), found: accum_kind(cur) });
        }
    }
    Ok(())
}

fn accum_kind(v: &AccumValue) -> &'static str {
    match v {
        AccumValue::Sum(_) => "sum state",
        AccumValue::Min(_) => "min state",
        AccumValue::Max(_) => "max state",
        AccumValue::Avg { .. } => "avg state",
        AccumValue::Or(_) => "or state",
        AccumValue::And(_) => "and state",
        AccumValue::Set(_) => "set state",
        AccumValue::Bag(_) => "bag state",
        AccumValue::List(_) => "list state",
        AccumValue::Map(_) => "map state",
        AccumValue::Heap(_) => "heap state",
    }
}

/// Folds a bag of inputs into `start`.
pub fn reduce_bag<'a>(
    ty: &AccType,
    start: AccumValue,
    inputs: impl IntoIterator<Item = &'a Value>,
) -> Result<AccumValue, AccError> {
    let mut cur = start;
    for v in inputs {
        combine(ty, &mut cur, v)?;
    }
    Ok(cur)
}

/// Value seen when reading the accumulator. Min/Max without input read as
/// the identity sentinel of their type; Avg without input reads 0.0.
pub fn read(ty: &AccType, v: &AccumValue) -> Value {
    match v {
        AccumValue::Sum(s) => s.clone(),
        AccumValue::Min(Some(x)) | AccumValue::Max(Some(x)) => x.clone(),
        AccumValue::Min(None) | AccumValue::Max(None) => {
            let min = matches!(v, AccumValue::Min(_));
            match ty {
                AccType::Min(t) | AccType::Max(t) => match t {
                    Type::Int => Value::Int(if min { i64::MAX } else { i64::MIN }),
                    Type::Float => Value::Float(if min { f64::INFINITY } else { f64::NEG_INFINITY }),
                    Type::Str => Value::str(""),
                    Type::DateTime => Value::DateTime(0),
                    _ => Value::Null,
                },
                _ => Value::Null,
            }
        }
        AccumValue::Avg { sum, count } => Value::Float(if *count == 0 { 0.0 } else { sum / *count as f64 }),
        AccumValue::Or(b) | AccumValue::And(b) => Value::Bool(*b),
        AccumValue::Set(s) => Value::set(s.iter().cloned()),
        AccumValue::Bag(b) => {
            Value::bag(b.iter().flat_map(|(x, n)| std::iter::repeat(x.clone()).take(*n as usize)))
        }
        AccumValue::List(l) => Value::list(l.iter().cloned()),
        AccumValue::Map(m) => {
            let inner = match ty {
                AccType::Map(_, MapValType::Acc(a)) => Some(&**a),
                _ => None,
            };
            let entries = m.iter().map(|(k, slot)| {
                let v = match (slot, inner) {
                    (MapSlot::Base(x), _) => x.clone(),
                    (MapSlot::Acc(a), Some(t)) => read(t, a),
                    (MapSlot::Acc(_), None) => Value::Null,
                };
                (k.clone(), v)
            });
            Value::Map(std::sync::Arc::new(entries.collect()))
        }
        AccumValue::Heap(items) => Value::list(items.iter().cloned()),
    }
}

/// State produced by a direct `=` assignment of a read-typed value.
pub fn assign(ty: &AccType, v: &Value) -> Result<AccumValue, AccError> {
    let mut out = default_value(ty);
    match (ty, &mut out) {
        (AccType::Sum(t), AccumValue::Sum(s)) => {
            let x = coerce(v, t);
            if !matches!((t, &x), (Type::Int, Value::Int(_)) | (Type::Float, Value::Float(_)) | (Type::Str, Value::Str(_))) {
                return Err(mismatch(ty, v));
            }
            *s = x;
        }
        (AccType::Min(t), AccumValue::Min(s)) | (AccType::Max(t), AccumValue::Max(s)) => *s = Some(coerce(v, t)),
        (AccType::Avg, AccumValue::Avg { sum, count }) => {
            *sum = v.as_f64().ok_or_else(|| mismatch(ty, v))?;
            *count = 1;
        }
        (AccType::Map(kt, vt), AccumValue::Map(map)) => {
            let entries = map_entries(v).ok_or_else(|| mismatch(ty, v))?;
            for (k, x) in entries {
                let slot = match vt {
                    MapValType::Base(t) => MapSlot::Base(coerce(&x, t)),
                    MapValType::Acc(inner) => MapSlot::Acc(assign(inner, &x)?),
                };
                map.insert(coerce(&k, kt), slot);
            }
        }
        (AccType::Set(_) | AccType::Bag(_) | AccType::List(_) | AccType::Heap(_), _) => {
            if v.elements().is_none() {
                return Err(mismatch(ty, v));
            }
            combine(ty, &mut out, v)?;
        }
        (AccType::Or | AccType::And, _) => {
            let b = v.as_bool().ok_or_else(|| mismatch(ty, v))?;
            out = if matches!(ty, AccType::Or) { AccumValue::Or(b) } else { AccumValue::And(b) };
        }
        _ => return Err(mismatch(ty, v)),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_query;
    use crate::frontend::ast::StmtKind;

    fn ty(decl: &str) -> AccType {
        let q = parse_query(&format!("WITH {decl} @@x BEGIN END")).unwrap();
        let StmtKind::AccDecl(d) = &q.body[0].kind else { panic!() };
        AccType::from_ast(&d.ty).unwrap()
    }

    #[test]
    fn defaults() {
        assert_eq!(read(&ty("SumAccum<float>"), &default_value(&ty("SumAccum<float>"))), Value::Float(0.0));
        assert_eq!(read(&AccType::And, &default_value(&AccType::And)), Value::Bool(true));
        assert_eq!(read(&AccType::Or, &default_value(&AccType::Or)), Value::Bool(false));
        let min = ty("MinAccum<int>");
        assert_eq!(read(&min, &default_value(&min)), Value::Int(i64::MAX));
        assert_eq!(read(&AccType::Avg, &default_value(&AccType::Avg)), Value::Float(0.0));
    }

    #[test]
    fn avg_keeps_sum_and_count() {
        let mut v = AccumValue::Avg { sum: 3.0, count: 2 };
        combine(&AccType::Avg, &mut v, &Value::Int(4)).unwrap();
        assert_eq!(v, AccumValue::Avg { sum: 7.0, count: 3 });
        assert_eq!(read(&AccType::Avg, &v), Value::Float(7.0 / 3.0));
    }

    #[test]
    fn map_of_sums_combines_recursively() {
        let t = ty("MapAccum<string, SumAccum<int>>");
        let mut v = default_value(&t);
        combine(&t, &mut v, &Value::tuple(vec![Value::str("a"), Value::Int(3)])).unwrap();
        let entry = Value::Map(std::sync::Arc::new([(Value::str("a"), Value::Int(2))].into_iter().collect()));
        combine(&t, &mut v, &entry).unwrap();
        let Value::Map(m) = read(&t, &v) else { panic!() };
        assert_eq!(m.get(&Value::str("a")), Some(&Value::Int(5)));
    }

    #[test]
    fn heap_truncates_by_spec() {
        let t = ty("HeapAccum<int>(2, DESC)");
        let mut v = default_value(&t);
        for x in [9, 7, 8] {
            combine(&t, &mut v, &Value::Int(x)).unwrap();
        }
        assert_eq!(v, AccumValue::Heap(vec![Value::Int(9), Value::Int(8)]));
    }

    #[test]
    fn heap_on_tuple_field() {
        let t = ty("HeapAccum<Tuple<float score, string name>>(2, score DESC, name ASC)");
        let mut v = default_value(&t);
        let row = |s: f64, n: &str| Value::tuple(vec![Value::Float(s), Value::str(n)]);
        for r in [row(1.0, "a"), row(3.0, "c"), row(3.0, "b"), row(2.0, "d")] {
            combine(&t, &mut v, &r).unwrap();
        }
        assert_eq!(v, AccumValue::Heap(vec![row(3.0, "b"), row(3.0, "c")]));
    }

    #[test]
    fn multiplicity_matches_repetition() {
        for t in [ty("SumAccum<int>"), AccType::Avg, ty("BagAccum<int>"), ty("ListAccum<int>"), ty("SetAccum<int>")] {
            let mut a = default_value(&t);
            combine_n(&t, &mut a, &Value::Int(3), 5).unwrap();
            let mut b = default_value(&t);
            for _ in 0..5 {
                combine(&t, &mut b, &Value::Int(3)).unwrap();
            }
            assert_eq!(a, b, "{t}");
        }
        let t = ty("SumAccum<int>");
        let mut a = default_value(&t);
        combine_n(&t, &mut a, &Value::Int(2), 10_000).unwrap();
        assert_eq!(read(&t, &a), Value::Int(20_000));
    }

    #[test]
    fn unsupported_types_rejected() {
        for d in ["ArrayAccum<SumAccum<int>>", "BitwiseOrAccum", "GroupByAccum<int a, SumAccum<int> s>"] {
            let q = parse_query(&format!("WITH {d} @@x BEGIN END")).unwrap();
            let StmtKind::AccDecl(decl) = &q.body[0].kind else { panic!() };
            assert!(matches!(AccType::from_ast(&decl.ty), Err(AccError::Unsupported(_))), "{d}");
        }
    }

    #[test]
    fn assignment_replaces_state() {
        let t = ty("SumAccum<float>");
        assert_eq!(assign(&t, &Value::Int(0)).unwrap(), AccumValue::Sum(Value::Float(0.0)));
        let s = ty("SetAccum<int>");
        let v = assign(&s, &Value::list([Value::Int(1), Value::Int(1), Value::Int(2)])).unwrap();
        assert_eq!(read(&s, &v), Value::set([Value::Int(1), Value::Int(2)]));
    }
}
