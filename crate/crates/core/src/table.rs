//! Relational tables: CSV extents for relational atoms and the output of
//! SELECT clauses. A vertex set is a table with one vertex column.

use std::path::Path;
use std::sync::Arc;

use crate::graph::{GraphError, VertexId};
use crate::value::{Tuple, Type, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub types: Vec<Type>,
    /// Width-consistent rows; a bag, so duplicates are meaningful.
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>, types: Vec<Type>) -> Self {
        Table { name: name.into(), columns, types, rows: Vec::new() }
    }

    pub fn vertex_set(name: impl Into<String>, column: &str, vtype: Option<String>, vs: impl IntoIterator<Item = VertexId>) -> Self {
        let mut t = Table::new(name, vec![column.to_string()], vec![Type::Vertex(vtype)]);
        t.rows = vs.into_iter().map(|v| vec![Value::Vertex(v)]).collect();
        t
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn semantic_type(&self) -> Type {
        Type::Table(self.columns.iter().cloned().zip(self.types.iter().cloned()).collect())
    }

    /// Vertices in the first column, in row order, when that column holds vertices.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.rows.iter().filter_map(|r| r.first().and_then(Value::as_vertex))
    }

    /// Rows as iteration elements: the bare value for single-column tables,
    /// named tuples otherwise.
    pub fn elements(&self) -> Vec<Value> {
        if self.columns.len() == 1 {
            return self.rows.iter().map(|r| r[0].clone()).collect();
        }
        let names = self.row_names();
        self.rows.iter().map(|r| Value::Tuple(Arc::new(Tuple { names: Some(names.clone()), values: r.clone() }))).collect()
    }

    pub fn row_names(&self) -> Arc<[Arc<str>]> {
        self.columns.iter().map(|c| Arc::from(c.as_str())).collect()
    }

    /// Reads a CSV file with a header row. Column types are inferred:
    /// all-integer columns become int, all-numeric become float, otherwise
    /// string. Empty cells are NULL.
    pub fn from_csv(path: &Path, name: &str) -> Result<Table, GraphError> {
        let io_err = |msg: String| GraphError::Io { path: path.display().to_string(), msg };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| io_err(e.to_string()))?;
        let columns: Vec<String> = reader.headers().map_err(|e| io_err(e.to_string()))?.iter().map(str::to_string).collect();
        let mut raw: Vec<Vec<String>> = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| io_err(e.to_string()))?;
            raw.push(rec.iter().map(str::to_string).collect());
        }
        let types: Vec<Type> = (0..columns.len()).map(|c| infer_column(raw.iter().map(|r| r[c].as_str()))).collect();
        let rows = raw
            .into_iter()
            .map(|r| r.iter().zip(&types).map(|(cell, t)| parse_cell(cell, t)).collect())
            .collect();
        Ok(Table { name: name.into(), columns, types, rows })
    }
}

fn infer_column<'a>(cells: impl Iterator<Item = &'a str> + Clone) -> Type {
    let filled = cells.filter(|c| !c.is_empty());
    if filled.clone().next().is_none() {
        return Type::Str;
    }
    if filled.clone().all(|c| c.parse::<i64>().is_ok()) {
        Type::Int
    } else if filled.clone().all(|c| c.parse::<f64>().is_ok()) {
        Type::Float
    } else {
        Type::Str
    }
}

fn parse_cell(cell: &str, t: &Type) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    match t {
        Type::Int => cell.parse().map(Value::Int).unwrap_or(Value::Null),
        Type::Float => cell.parse().map(Value::Float).unwrap_or(Value::Null),
        _ => Value::str(cell),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn csv_typing_and_nulls() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "email,name,salary\na@x.com,Ann,100\nb@x.com,,200.5\nc@x.com,Cy,\n").unwrap();
        let t = Table::from_csv(f.path(), "Employee").unwrap();
        assert_eq!(t.columns, ["email", "name", "salary"]);
        assert_eq!(t.types, [Type::Str, Type::Str, Type::Float]);
        assert_eq!(t.len(), 3);
        assert_eq!(t.rows[1][1], Value::Null);
        assert_eq!(t.rows[2][2], Value::Null);
    }

    #[test]
    fn header_only_and_ragged() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "a,b\n").unwrap();
        let t = Table::from_csv(f.path(), "T").unwrap();
        assert!(t.is_empty());
        assert_eq!(t.columns, ["a", "b"]);
        let mut g = tempfile::NamedTempFile::new().unwrap();
        write!(g, "a,b\n1,2\n3\n").unwrap();
        assert!(Table::from_csv(g.path(), "T").is_err());
    }
}
