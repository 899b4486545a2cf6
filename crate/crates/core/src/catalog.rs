//! Schema catalog: vertex types, edge types and graph definitions.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::frontend::ast::{AttrDecl, DdlStmt};
use crate::value::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("duplicate type name `{0}`")]
    DuplicateType(String),
    #[error("duplicate graph name `{0}`")]
    DuplicateGraph(String),
    #[error("unresolved type `{name}` referenced by `{by}`")]
    Unresolved { name: String, by: String },
    #[error("edge `{edge}`: discriminator `{attr}` is not an attribute")]
    MissingDiscriminator { edge: String, attr: String },
    #[error("undirected edge `{0}` cannot declare a reverse edge")]
    UndirectedReverse(String),
    #[error("type `{owner}`: duplicate attribute `{attr}`")]
    DuplicateAttribute { owner: String, attr: String },
    #[error("vertex type `{0}` declares more than one primary key")]
    MultiplePrimaryKeys(String),
    #[error("edge `{0}` cannot declare a primary key")]
    EdgePrimaryKey(String),
    #[error("graph `{graph}`: endpoint type `{vtype}` of edge `{edge}` is not a member")]
    MissingEndpoint { graph: String, edge: String, vtype: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrType {
    Int,
    Uint,
    Float,
    Double,
    String,
    Boolean,
    Datetime,
}

impl AttrType {
    /// Case-insensitive type keyword; `DATE` is an alias of `DATETIME`.
    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word.to_ascii_lowercase().as_str() {
            "int" | "integer" => AttrType::Int,
            "uint" => AttrType::Uint,
            "float" => AttrType::Float,
            "double" => AttrType::Double,
            "string" => AttrType::String,
            "bool" | "boolean" => AttrType::Boolean,
            "datetime" | "date" => AttrType::Datetime,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            AttrType::Int => "INT",
            AttrType::Uint => "UINT",
            AttrType::Float => "FLOAT",
            AttrType::Double => "DOUBLE",
            AttrType::String => "STRING",
            AttrType::Boolean => "BOOL",
            AttrType::Datetime => "DATETIME",
        }
    }

    pub fn semantic(self) -> Type {
        match self {
            AttrType::Int | AttrType::Uint => Type::Int,
            AttrType::Float | AttrType::Double => Type::Float,
            AttrType::String => Type::Str,
            AttrType::Boolean => Type::Bool,
            AttrType::Datetime => Type::DateTime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeDef {
    pub name: String,
    pub dtype: AttrType,
    pub is_primary_key: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexTypeDef {
    pub name: String,
    pub attributes: Vec<AttributeDef>,
}

impl VertexTypeDef {
    /// Index of the primary-key attribute; exactly one exists by construction.
    pub fn pk_index(&self) -> usize {
        self.attributes
            .iter()
            .position(|a| a.is_primary_key)
            .expect("vertex type without primary key")
    }

    pub fn pk(&self) -> &AttributeDef {
        &self.attributes[self.pk_index()]
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeTypeDef {
    pub name: String,
    pub directed: bool,
    pub from_type: String,
    pub to_type: String,
    pub attributes: Vec<AttributeDef>,
    pub discriminators: Vec<String>,
    /// Set on the declaring edge type of a `WITH REVERSE EDGE` pair.
    pub reverse_name: Option<String>,
    /// Set on the registered inverse; names the declaring type.
    pub reverse_of: Option<String>,
}

impl EdgeTypeDef {
    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// The type paired with this one, in either role.
    pub fn partner(&self) -> Option<&str> {
        self.reverse_name.as_deref().or(self.reverse_of.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphDef {
    pub name: String,
    pub vertex_types: BTreeSet<String>,
    pub edge_types: BTreeSet<String>,
}

/// One component of an edge's composite key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyComponent {
    pub owner: String,
    pub attribute: String,
}

impl fmt::Display for KeyComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.attribute)
    }
}

/// The set of declared containers. Equality ignores declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Catalog {
    vertex_types: IndexMap<String, VertexTypeDef>,
    edge_types: IndexMap<String, EdgeTypeDef>,
    graphs: IndexMap<String, GraphDef>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses and applies every statement of a DDL script.
    pub fn from_ddl(text: &str) -> Result<Self, crate::Error> {
        let mut cat = Catalog::new();
        for stmt in crate::frontend::parse_ddl(text)? {
            cat = cat.apply_ddl(&stmt)?;
        }
        Ok(cat)
    }

    pub fn vertex_type(&self, name: &str) -> Option<&VertexTypeDef> {
        self.vertex_types.get(name)
    }

    pub fn edge_type(&self, name: &str) -> Option<&EdgeTypeDef> {
        self.edge_types.get(name)
    }

    pub fn graph(&self, name: &str) -> Option<&GraphDef> {
        self.graphs.get(name)
    }

    pub fn vertex_type_index(&self, name: &str) -> Option<usize> {
        self.vertex_types.get_index_of(name)
    }

    pub fn edge_type_index(&self, name: &str) -> Option<usize> {
        self.edge_types.get_index_of(name)
    }

    pub fn vertex_type_at(&self, idx: usize) -> &VertexTypeDef {
        &self.vertex_types[idx]
    }

    pub fn edge_type_at(&self, idx: usize) -> &EdgeTypeDef {
        &self.edge_types[idx]
    }

    pub fn vertex_types(&self) -> impl Iterator<Item = &VertexTypeDef> {
        self.vertex_types.values()
    }

    pub fn edge_types(&self) -> impl Iterator<Item = &EdgeTypeDef> {
        self.edge_types.values()
    }

    pub fn graphs(&self) -> impl Iterator<Item = &GraphDef> {
        self.graphs.values()
    }

    pub fn vertex_type_count(&self) -> usize {
        self.vertex_types.len()
    }

    pub fn edge_type_count(&self) -> usize {
        self.edge_types.len()
    }

    fn type_name_taken(&self, name: &str) -> bool {
        self.vertex_types.contains_key(name) || self.edge_types.contains_key(name)
    }

    /// Returns an extended copy of the catalog.
    pub fn apply_ddl(&self, stmt: &DdlStmt) -> Result<Catalog, CatalogError> {
        let mut next = self.clone();
        next.apply_in_place(stmt)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, stmt: &DdlStmt) -> Result<(), CatalogError> {
        match stmt {
            DdlStmt::CreateVertex { name, attrs } => self.create_vertex(name, attrs),
            DdlStmt::CreateEdge { name, directed, from, to, attrs, discriminators, reverse } => {
                self.create_edge(name, *directed, from, to, attrs, discriminators, reverse.as_deref())
            }
            DdlStmt::CreateGraph { name, members } => self.create_graph(name, members),
        }
    }

    fn create_vertex(&mut self, name: &str, attrs: &[AttrDecl]) -> Result<(), CatalogError> {
        if self.type_name_taken(name) {
            return Err(CatalogError::DuplicateType(name.into()));
        }
        let mut attributes = convert_attrs(name, attrs)?;
        match attributes.iter().filter(|a| a.is_primary_key).count() {
            0 => match attributes.iter_mut().find(|a| a.name == "id") {
                Some(a) => a.is_primary_key = true,
                None => attributes.insert(
                    0,
                    AttributeDef { name: "id".into(), dtype: AttrType::String, is_primary_key: true },
                ),
            },
            1 => {}
            _ => return Err(CatalogError::MultiplePrimaryKeys(name.into())),
        }
        self.vertex_types.insert(name.into(), VertexTypeDef { name: name.into(), attributes });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn create_edge(
        &mut self,
        name: &str,
        directed: bool,
        from: &str,
        to: &str,
        attrs: &[AttrDecl],
        discriminators: &[String],
        reverse: Option<&str>,
    ) -> Result<(), CatalogError> {
        if self.type_name_taken(name) {
            return Err(CatalogError::DuplicateType(name.into()));
        }
        for endpoint in [from, to] {
            if !self.vertex_types.contains_key(endpoint) {
                return Err(CatalogError::Unresolved { name: endpoint.into(), by: name.into() });
            }
        }
        let attributes = convert_attrs(name, attrs)?;
        if attributes.iter().any(|a| a.is_primary_key) {
            return Err(CatalogError::EdgePrimaryKey(name.into()));
        }
        for d in discriminators {
            if !attributes.iter().any(|a| &a.name == d) {
                return Err(CatalogError::MissingDiscriminator { edge: name.into(), attr: d.clone() });
            }
        }
        if let Some(r) = reverse {
            if !directed {
                return Err(CatalogError::UndirectedReverse(name.into()));
            }
            if r == name || self.type_name_taken(r) {
                return Err(CatalogError::DuplicateType(r.into()));
            }
        }
        let def = EdgeTypeDef {
            name: name.into(),
            directed,
            from_type: from.into(),
            to_type: to.into(),
            attributes: attributes.clone(),
            discriminators: discriminators.to_vec(),
            reverse_name: reverse.map(Into::into),
            reverse_of: None,
        };
        self.edge_types.insert(name.into(), def);
        if let Some(r) = reverse {
            let inverse = EdgeTypeDef {
                name: r.into(),
                directed: true,
                from_type: to.into(),
                to_type: from.into(),
                attributes,
                discriminators: discriminators.to_vec(),
                reverse_name: None,
                reverse_of: Some(name.into()),
            };
            self.edge_types.insert(r.into(), inverse);
        }
        Ok(())
    }

    fn create_graph(&mut self, name: &str, members: &[String]) -> Result<(), CatalogError> {
        if self.graphs.contains_key(name) {
            return Err(CatalogError::DuplicateGraph(name.into()));
        }
        let mut vertex_types = BTreeSet::new();
        let mut edge_types = BTreeSet::new();
        for m in members {
            if self.vertex_types.contains_key(m) {
                vertex_types.insert(m.clone());
            } else if let Some(e) = self.edge_types.get(m) {
                edge_types.insert(m.clone());
                if let Some(p) = e.partner() {
                    edge_types.insert(p.to_string());
                }
            } else {
                return Err(CatalogError::Unresolved { name: m.clone(), by: name.into() });
            }
        }
        for e in &edge_types {
            let def = &self.edge_types[e.as_str()];
            for vt in [&def.from_type, &def.to_type] {
                if !vertex_types.contains(vt) {
                    return Err(CatalogError::MissingEndpoint {
                        graph: name.into(),
                        edge: e.clone(),
                        vtype: vt.clone(),
                    });
                }
            }
        }
        self.graphs.insert(name.into(), GraphDef { name: name.into(), vertex_types, edge_types });
        Ok(())
    }

    /// Composite key of an edge type: source pk, target pk, then discriminators.
    pub fn edge_key(&self, edge_type: &str) -> Option<Vec<KeyComponent>> {
        let e = self.edge_types.get(edge_type)?;
        let pk = |vt: &str| {
            let def = &self.vertex_types[vt];
            KeyComponent { owner: vt.into(), attribute: def.pk().name.clone() }
        };
        let mut key = vec![pk(&e.from_type), pk(&e.to_type)];
        key.extend(
            e.discriminators
                .iter()
                .map(|d| KeyComponent { owner: e.name.clone(), attribute: d.clone() }),
        );
        Some(key)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

fn convert_attrs(owner: &str, attrs: &[AttrDecl]) -> Result<Vec<AttributeDef>, CatalogError> {
    let mut out: Vec<AttributeDef> = Vec::with_capacity(attrs.len());
    for a in attrs {
        if out.iter().any(|b| b.name == a.name) {
            return Err(CatalogError::DuplicateAttribute { owner: owner.into(), attr: a.name.clone() });
        }
        out.push(AttributeDef { name: a.name.clone(), dtype: a.dtype, is_primary_key: a.primary_key });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DDL: &str = "
        CREATE VERTEX Person (email STRING PRIMARY KEY, name STRING, dob DATE)
        CREATE VERTEX Tweet (id INT PRIMARY KEY, text STRING, timestamp DATE)
        CREATE VERTEX Company (name STRING PRIMARY KEY)
        CREATE DIRECTED EDGE Posts (FROM Person, TO Tweet)
        CREATE UNDIRECTED EDGE Connected (FROM Person, TO Person, since DATE, end DATE)
        CREATE DIRECTED EDGE Employment (FROM Company, TO Person, start DATE, end DATE) DISCRIMINATOR (start)
        CREATE VERTEX Account (number INT PRIMARY KEY, balance FLOAT)
        CREATE DIRECTED EDGE Debit (FROM Account, TO Account, amount FLOAT) WITH REVERSE EDGE Credit
        CREATE GRAPH LinkedInGraph (Person, Connected)
    ";

    #[test]
    fn person_primary_key() {
        let c = Catalog::from_ddl(DDL).unwrap();
        let p = c.vertex_type("Person").unwrap();
        assert_eq!(p.pk().name, "email");
        assert_eq!(p.attributes[2].dtype, AttrType::Datetime);
    }

    #[test]
    fn reverse_edge_swaps_endpoints_and_shares_attributes() {
        let c = Catalog::from_ddl(DDL).unwrap();
        let d = c.edge_type("Debit").unwrap();
        let r = c.edge_type("Credit").unwrap();
        assert_eq!((r.from_type.as_str(), r.to_type.as_str()), (d.to_type.as_str(), d.from_type.as_str()));
        assert_eq!(r.attributes, d.attributes);
        assert_eq!(r.reverse_of.as_deref(), Some("Debit"));
    }

    #[test]
    fn edge_keys() {
        let c = Catalog::from_ddl(DDL).unwrap();
        let k: Vec<String> = c.edge_key("Posts").unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(k, ["Person.email", "Tweet.id"]);
        let k: Vec<String> = c.edge_key("Employment").unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(k, ["Company.name", "Person.email", "Employment.start"]);
        let c2 = Catalog::from_ddl(
            "CREATE VERTEX A (k INT PRIMARY KEY, x INT)
             CREATE DIRECTED EDGE R (FROM A, TO A, a INT, b INT) DISCRIMINATOR (a, b)",
        )
        .unwrap();
        assert_eq!(c2.edge_key("R").unwrap().len(), 4);
    }

    #[test]
    fn errors() {
        let err = |t: &str| match Catalog::from_ddl(t) {
            Err(crate::Error::Catalog(e)) => e,
            other => panic!("expected catalog error, got {other:?}"),
        };
        assert!(matches!(err("CREATE GRAPH G (Person)"), CatalogError::Unresolved { .. }));
        assert!(matches!(
            err("CREATE VERTEX A (k INT PRIMARY KEY) CREATE VERTEX A (k INT PRIMARY KEY)"),
            CatalogError::DuplicateType(_)
        ));
        assert!(matches!(
            err("CREATE VERTEX A (k INT PRIMARY KEY) CREATE DIRECTED EDGE E (FROM A, TO B)"),
            CatalogError::Unresolved { .. }
        ));
        assert!(matches!(
            err("CREATE VERTEX A (k INT PRIMARY KEY) CREATE DIRECTED EDGE E (FROM A, TO A) DISCRIMINATOR (z)"),
            CatalogError::MissingDiscriminator { .. }
        ));
        assert!(matches!(
            err("CREATE VERTEX A (k INT PRIMARY KEY) CREATE UNDIRECTED EDGE E (FROM A, TO A) WITH REVERSE EDGE F"),
            CatalogError::UndirectedReverse(_)
        ));
    }

    #[test]
    fn implicit_id_key() {
        let c = Catalog::from_ddl("CREATE VERTEX Node ()").unwrap();
        let n = c.vertex_type("Node").unwrap();
        assert_eq!(n.pk().name, "id");
        assert_eq!(n.pk().dtype, AttrType::String);
    }

    #[test]
    fn graph_pulls_in_reverse_partner() {
        let c = Catalog::from_ddl(&format!("{DDL} CREATE GRAPH Bank (Account, Debit)")).unwrap();
        assert!(c.graph("Bank").unwrap().edge_types.contains("Credit"));
    }
}
