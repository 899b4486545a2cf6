//! Rendering of values and tables as JSON or aligned text. Vertices render
//! as their primary key, edges as `source->target`.

use serde_json::{json, Map, Number};

use super::QueryResult;
use crate::graph::Graph;
use crate::table::Table;
use crate::value::{format_datetime, Value};

/// Display text of a value; strings are bare.
pub fn value_text(g: &Graph, v: &Value) -> String {
    let seq = |items: &mut dyn Iterator<Item = &Value>, open: &str, close: &str| {
        let parts: Vec<String> = items.map(|x| value_text(g, x)).collect();
        format!("{open}{}{close}", parts.join(", "))
    };
    match v {
        Value::Vertex(x) if x.index() < g.vertex_count() => value_text(g, g.pk(*x)),
        Value::Edge(e) if e.index() < g.edge_count() => {
            let (s, t) = g.endpoints(*e);
            format!("{}->{}", value_text(g, g.pk(s)), value_text(g, g.pk(t)))
        }
        Value::Tuple(t) => seq(&mut t.values.iter(), "(", ")"),
        Value::List(xs) | Value::Bag(xs) => seq(&mut xs.iter(), "[", "]"),
        Value::Set(xs) => seq(&mut xs.iter(), "{", "}"),
        Value::Map(m) => {
            let parts: Vec<String> = m.iter().map(|(k, x)| format!("{} -> {}", value_text(g, k), value_text(g, x))).collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

/// JSON form of a value. Non-finite floats become the strings `inf`,
/// `-inf` and `NaN`, which JSON cannot represent as numbers.
pub fn value_json(g: &Graph, v: &Value) -> serde_json::Value {
    match v {
        Value::Null => serde_json::Value::Null,
        Value::Bool(b) => json!(b),
        Value::Int(i) => json!(i),
        Value::Float(x) => match Number::from_f64(*x) {
            Some(n) => serde_json::Value::Number(n),
            None => json!(x.to_string()),
        },
        Value::Str(s) => json!(&**s),
        Value::DateTime(t) => json!(format_datetime(*t)),
        Value::Vertex(_) | Value::Edge(_) => match v {
            Value::Vertex(x) if x.index() < g.vertex_count() => value_json(g, g.pk(*x)),
            _ => json!(value_text(g, v)),
        },
        Value::Tuple(t) => match &t.names {
            Some(names) => {
                let obj: Map<String, serde_json::Value> =
                    names.iter().zip(&t.values).map(|(n, x)| (n.to_string(), value_json(g, x))).collect();
                serde_json::Value::Object(obj)
            }
            None => t.values.iter().map(|x| value_json(g, x)).collect(),
        },
        Value::List(xs) | Value::Bag(xs) => xs.iter().map(|x| value_json(g, x)).collect(),
        Value::Set(xs) => xs.iter().map(|x| value_json(g, x)).collect(),
        Value::Map(m) => {
            // Keys must be strings in JSON; non-string keys use their text.
            let obj: Map<String, serde_json::Value> = m
                .iter()
                .map(|(k, x)| {
                    let key = match k {
                        Value::Str(s) => s.to_string(),
                        other => value_text(g, other),
                    };
                    (key, value_json(g, x))
                })
                .collect();
            serde_json::Value::Object(obj)
        }
        Value::Table(t) => table_json(g, t),
    }
}

/// A table as an array of row objects keyed by column name.
pub fn table_json(g: &Graph, t: &Table) -> serde_json::Value {
    t.rows
        .iter()
        .map(|r| {
            let obj: Map<String, serde_json::Value> = t.columns.iter().zip(r).map(|(c, x)| (c.clone(), value_json(g, x))).collect();
            serde_json::Value::Object(obj)
        })
        .collect()
}

/// A table as left-aligned text columns under a header line.
pub fn table_text(g: &Graph, t: &Table) -> String {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|x| value_text(g, x)).collect()).collect();
    let widths: Vec<usize> = t
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |items: &[String]| -> String {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = format!("{} ({} rows)\n", t.name, t.len());
    out.push_str(&line(&t.columns));
    out.push('\n');
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    out.push('\n');
    for r in &cells {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

/// `{"tables": {name: rows}, "return": value}`.
pub fn result_json(g: &Graph, r: &QueryResult) -> serde_json::Value {
    let tables: Map<String, serde_json::Value> = r.tables.iter().map(|(n, t)| (n.clone(), table_json(g, t))).collect();
    let mut obj = Map::new();
    obj.insert("tables".into(), serde_json::Value::Object(tables));
    if let Some(v) = &r.ret {
        obj.insert("return".into(), value_json(g, v));
    }
    serde_json::Value::Object(obj)
}

/// Every output table, then the RETURN value if any.
pub fn result_text(g: &Graph, r: &QueryResult) -> String {
    let mut out = String::new();
    for t in r.tables.values() {
        out.push_str(&table_text(g, t));
        out.push('\n');
    }
    match &r.ret {
        Some(Value::Table(t)) => out.push_str(&format!("RETURN {}\n", t.name)),
        Some(v) => out.push_str(&format!("RETURN {}\n", value_text(g, v))),
        None => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::VertexId;

    #[test]
    fn vertices_render_as_keys() {
        let g = fixtures::graph(3, [(1, "E", 2)]);
        let mut t = Table::vertex_set("S", "v", None, [VertexId(1), VertexId(0)]);
        t.columns.push("score".into());
        t.rows[0].push(Value::Float(0.5));
        t.rows[1].push(Value::Float(f64::INFINITY));
        assert_eq!(table_json(&g, &t), json!([{"v": 2, "score": 0.5}, {"v": 1, "score": "inf"}]));
        let text = table_text(&g, &t);
        assert_eq!(text.lines().nth(1), Some("v  score"));
        assert_eq!(text.lines().nth(3), Some("2  0.5"));
    }
}
