//! Runtime values and semantic types shared by the checker and the evaluator.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};

use crate::graph::{EdgeId, VertexId};
use crate::table::Table;

/// A runtime value.
///
/// `Eq`, `Ord` and `Hash` are structural (an `Int` never equals a `Float`);
/// SQL comparisons with numeric coercion go through [`sql_cmp`] and [`sql_eq`].
#[derive(Clone, Debug)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(Arc<str>),
    /// Seconds since the Unix epoch, UTC.
    DateTime(i64),
    Vertex(VertexId),
    Edge(EdgeId),
    Tuple(Arc<Tuple>),
    List(Arc<Vec<Value>>),
    Set(Arc<BTreeSet<Value>>),
    /// Sorted, so two bags with the same elements compare equal.
    Bag(Arc<Vec<Value>>),
    Map(Arc<BTreeMap<Value, Value>>),
    Table(Arc<Table>),
}

/// A tuple value; `names` is present for rows of relational tables and
/// for declared tuple types.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub names: Option<Arc<[Arc<str>]>>,
    pub values: Vec<Value>,
}

impl Tuple {
    pub fn unnamed(values: Vec<Value>) -> Self {
        Tuple { names: None, values }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        let names = self.names.as_ref()?;
        names.iter().position(|n| &**n == name).map(|i| &self.values[i])
    }
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(Arc::new(items.into_iter().collect()))
    }

    pub fn bag(items: impl IntoIterator<Item = Value>) -> Value {
        let mut v: Vec<Value> = items.into_iter().collect();
        v.sort();
        Value::Bag(Arc::new(v))
    }

    pub fn list(items: impl IntoIterator<Item = Value>) -> Value {
        Value::List(Arc::new(items.into_iter().collect()))
    }

    pub fn tuple(values: Vec<Value>) -> Value {
        Value::Tuple(Arc::new(Tuple::unnamed(values)))
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Float(_) => 3,
            Value::Str(_) => 4,
            Value::DateTime(_) => 5,
            Value::Vertex(_) => 6,
            Value::Edge(_) => 7,
            Value::Tuple(_) => 8,
            Value::List(_) => 9,
            Value::Set(_) => 10,
            Value::Bag(_) => 11,
            Value::Map(_) => 12,
            Value::Table(_) => 13,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            Value::Vertex(v) => Some(*v),
            _ => None,
        }
    }

    /// Elements of a collection value in iteration order. Maps yield
    /// `(key, value)` tuples; tables yield their first column when it is
    /// the only one, rows otherwise.
    pub fn elements(&self) -> Option<Vec<Value>> {
        Some(match self {
            Value::List(v) | Value::Bag(v) => v.as_ref().clone(),
            Value::Set(s) => s.iter().cloned().collect(),
            Value::Map(m) => m
                .iter()
                .map(|(k, v)| Value::tuple(vec![k.clone(), v.clone()]))
                .collect(),
            Value::Tuple(t) => t.values.clone(),
            Value::Table(t) => t.elements(),
            _ => return None,
        })
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Str(_) => "string",
            Value::DateTime(_) => "datetime",
            Value::Vertex(_) => "vertex",
            Value::Edge(_) => "edge",
            Value::Tuple(_) => "tuple",
            Value::List(_) => "list",
            Value::Set(_) => "set",
            Value::Bag(_) => "bag",
            Value::Map(_) => "map",
            Value::Table(_) => "table",
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Null, Null) => Ordering::Equal,
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Str(a), Str(b)) => a.cmp(b),
            (DateTime(a), DateTime(b)) => a.cmp(b),
            (Vertex(a), Vertex(b)) => a.cmp(b),
            (Edge(a), Edge(b)) => a.cmp(b),
            (Tuple(a), Tuple(b)) => a.values.cmp(&b.values),
            (List(a), List(b)) | (Bag(a), Bag(b)) => a.cmp(b),
            (Set(a), Set(b)) => a.cmp(b),
            (Map(a), Map(b)) => a.cmp(b),
            (Table(a), Table(b)) => a.rows.cmp(&b.rows),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Null => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Float(f) => f.to_bits().hash(state),
            Value::Str(s) => s.hash(state),
            Value::DateTime(d) => d.hash(state),
            Value::Vertex(v) => v.hash(state),
            Value::Edge(e) => e.hash(state),
            Value::Tuple(t) => t.values.hash(state),
            Value::List(v) | Value::Bag(v) => v.hash(state),
            Value::Set(s) => s.hash(state),
            Value::Map(m) => m.hash(state),
            Value::Table(t) => t.rows.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => write!(f, "NULL"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Str(s) => write!(f, "{s}"),
            Value::DateTime(d) => write!(f, "{}", format_datetime(*d)),
            Value::Vertex(v) => write!(f, "v{}", v.0),
            Value::Edge(e) => write!(f, "e{}", e.0),
            Value::Tuple(t) => write_seq(f, "(", ")", t.values.iter()),
            Value::List(v) | Value::Bag(v) => write_seq(f, "[", "]", v.iter()),
            Value::Set(s) => write_seq(f, "{", "}", s.iter()),
            Value::Map(m) => {
                write!(f, "{{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k} -> {v}")?;
                }
                write!(f, "}}")
            }
            Value::Table(t) => write!(f, "<table {} rows>", t.rows.len()),
        }
    }
}

fn write_seq<'a>(
    f: &mut fmt::Formatter<'_>,
    open: &str,
    close: &str,
    items: impl Iterator<Item = &'a Value>,
) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, v) in items.enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "{close}")
}

/// Parses `YYYY-MM-DD`, `YYYY-MM-DD HH:MM:SS` or the `T`-separated form.
pub fn parse_datetime(s: &str) -> Option<i64> {
    let s = s.trim();
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp())
}

pub fn format_datetime(secs: i64) -> String {
    match DateTime::from_timestamp(secs, 0) {
        Some(dt) => dt.format("%Y-%m-%d %H:%M:%S").to_string(),
        None => secs.to_string(),
    }
}

pub fn datetime_year(secs: i64) -> i64 {
    DateTime::from_timestamp(secs, 0).map_or(1970, |dt| dt.year() as i64)
}

/// SQL comparison. `None` when either side is NULL or the values are not
/// comparable. Numbers compare numerically; a datetime compared with an
/// integer compares its calendar year; strings coerce to datetimes.
pub fn sql_cmp(a: &Value, b: &Value) -> Option<Ordering> {
    use Value::*;
    match (a, b) {
        (Null, _) | (_, Null) => None,
        (Int(x), Int(y)) => Some(x.cmp(y)),
        (Int(_) | Float(_), Int(_) | Float(_)) => a.as_f64()?.partial_cmp(&b.as_f64()?),
        (DateTime(x), Int(y)) => Some(datetime_year(*x).cmp(y)),
        (Int(x), DateTime(y)) => Some(x.cmp(&datetime_year(*y))),
        (DateTime(x), Str(s)) => Some(x.cmp(&parse_datetime(s)?)),
        (Str(s), DateTime(y)) => Some(parse_datetime(s)?.cmp(y)),
        _ if a.rank() == b.rank() => Some(a.cmp(b)),
        _ => None,
    }
}

pub fn sql_eq(a: &Value, b: &Value) -> Option<bool> {
    sql_cmp(a, b).map(|o| o == Ordering::Equal)
}

/// Total order used by ORDER BY and by Min/Max/Heap: numeric across
/// int/float, structural otherwise, NULL first.
pub fn order_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Null, Value::Null) => Ordering::Equal,
        (Value::Null, _) => Ordering::Less,
        (_, Value::Null) => Ordering::Greater,
        _ => match sql_cmp(a, b) {
            Some(o) => o,
            None => a.cmp(b),
        },
    }
}

/// Semantic types inferred by the checker.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Type {
    /// Statically unknown (table cells of mixed content, NULL literals).
    Any,
    Bool,
    Int,
    Float,
    Str,
    DateTime,
    Vertex(Option<String>),
    Edge(Option<String>),
    Tuple(Vec<(String, Type)>),
    List(Box<Type>),
    Set(Box<Type>),
    Bag(Box<Type>),
    Map(Box<Type>, Box<Type>),
    /// Relational table or vertex set; columns with their types.
    Table(Vec<(String, Type)>),
}

impl Type {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Type::Int | Type::Float | Type::Any)
    }

    /// A table whose only column holds vertices.
    pub fn is_vertex_set(&self) -> bool {
        matches!(self, Type::Table(cols) if cols.len() == 1 && matches!(cols[0].1, Type::Vertex(_) | Type::Any))
    }

    pub fn vertex_set(vtype: Option<String>) -> Type {
        Type::Table(vec![("v".into(), Type::Vertex(vtype))])
    }

    pub fn is_collection(&self) -> bool {
        matches!(
            self,
            Type::List(_) | Type::Set(_) | Type::Bag(_) | Type::Map(..) | Type::Table(_) | Type::Any
        )
    }

    /// Element type seen when iterating a collection.
    pub fn element(&self) -> Type {
        match self {
            Type::List(t) | Type::Set(t) | Type::Bag(t) => (**t).clone(),
            Type::Map(k, v) => Type::Tuple(vec![("key".into(), (**k).clone()), ("value".into(), (**v).clone())]),
            Type::Table(cols) if cols.len() == 1 => cols[0].1.clone(),
            Type::Table(cols) => Type::Tuple(cols.clone()),
            _ => Type::Any,
        }
    }

    /// Whether a value of type `from` may be stored where `self` is expected.
    pub fn accepts(&self, from: &Type) -> bool {
        use Type::*;
        match (self, from) {
            (Any, _) | (_, Any) => true,
            (Float, Int) => true,
            (DateTime, Str) => true,
            (Vertex(a), Vertex(b)) | (Edge(a), Edge(b)) => a.is_none() || b.is_none() || a == b,
            (List(a), List(b)) | (Set(a), Set(b)) | (Bag(a), Bag(b)) => a.accepts(b),
            (Set(a) | Bag(a) | List(a), Table(cols)) if cols.len() == 1 => a.accepts(&cols[0].1),
            (Table(a), Table(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1.accepts(&y.1)),
            (Map(k1, v1), Map(k2, v2)) => k1.accepts(k2) && v1.accepts(v2),
            (Tuple(a), Tuple(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1.accepts(&y.1)),
            _ => self == from,
        }
    }

    /// Whether two types may be compared with `=`/`<`.
    pub fn comparable(&self, other: &Type) -> bool {
        use Type::*;
        match (self, other) {
            (Any, _) | (_, Any) => true,
            (a, b) if a.is_numeric() && b.is_numeric() => true,
            (DateTime, Int | Str | DateTime) | (Int | Str, DateTime) => true,
            (Vertex(_), Vertex(_)) | (Edge(_), Edge(_)) => true,
            (a, b) => a.accepts(b) || b.accepts(a),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Any => write!(f, "any"),
            Type::Bool => write!(f, "bool"),
            Type::Int => write!(f, "int"),
            Type::Float => write!(f, "float"),
            Type::Str => write!(f, "string"),
            Type::DateTime => write!(f, "datetime"),
            Type::Vertex(None) => write!(f, "vertex"),
            Type::Vertex(Some(t)) => write!(f, "vertex<{t}>"),
            Type::Edge(None) => write!(f, "edge"),
            Type::Edge(Some(t)) => write!(f, "edge<{t}>"),
            Type::Tuple(fs) => {
                write!(f, "tuple<")?;
                for (i, (n, t)) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t} {n}")?;
                }
                write!(f, ">")
            }
            Type::List(t) => write!(f, "list<{t}>"),
            Type::Set(t) => write!(f, "set<{t}>"),
            Type::Bag(t) => write!(f, "bag<{t}>"),
            Type::Map(k, v) => write!(f, "map<{k}, {v}>"),
            Type::Table(cols) => {
                write!(f, "table(")?;
                for (i, (n, t)) in cols.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{n} {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_eq_keeps_int_and_float_apart() {
        assert_ne!(Value::Int(1), Value::Float(1.0));
        assert_eq!(sql_eq(&Value::Int(1), &Value::Float(1.0)), Some(true));
    }

    #[test]
    fn null_compares_unknown() {
        assert_eq!(sql_cmp(&Value::Null, &Value::Int(1)), None);
        assert_eq!(order_cmp(&Value::Null, &Value::Int(1)), Ordering::Less);
    }

    #[test]
    fn datetime_against_year() {
        let d = parse_datetime("2017-03-01").unwrap();
        assert_eq!(sql_cmp(&Value::DateTime(d), &Value::Int(2016)), Some(Ordering::Greater));
        assert_eq!(sql_cmp(&Value::DateTime(d), &Value::str("2017-03-01 00:00:00")), Some(Ordering::Equal));
        assert_eq!(format_datetime(d), "2017-03-01 00:00:00");
    }

    #[test]
    fn bag_constructor_sorts() {
        assert_eq!(
            Value::bag([Value::Int(2), Value::Int(1)]),
            Value::bag([Value::Int(1), Value::Int(2)])
        );
    }
}
