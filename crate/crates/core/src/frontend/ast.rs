//! Syntax tree for DDL scripts and queries.
//!
//! Positions compare equal unconditionally, so two trees are `==` when they
//! have the same shape regardless of where they were parsed from. Checker
//! annotations (`ty`, `res`) start as `None`.

use std::fmt;

use serde::Serialize;

use crate::catalog::AttrType;
use crate::value::Type;

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

// ---------------------------------------------------------------- DDL

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttrDecl {
    pub name: String,
    pub dtype: AttrType,
    pub primary_key: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DdlStmt {
    CreateVertex {
        name: String,
        attrs: Vec<AttrDecl>,
    },
    CreateEdge {
        name: String,
        directed: bool,
        from: String,
        to: String,
        attrs: Vec<AttrDecl>,
        discriminators: Vec<String>,
        reverse: Option<String>,
    },
    CreateGraph {
        name: String,
        members: Vec<String>,
    },
}

// ---------------------------------------------------------------- types

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BaseType {
    Int,
    Uint,
    Float,
    Double,
    String,
    Bool,
    DateTime,
    Vertex(Option<String>),
    Edge(Option<String>),
    Tuple(Vec<(BaseType, String)>),
}

impl BaseType {
    pub fn semantic(&self) -> Type {
        match self {
            BaseType::Int | BaseType::Uint => Type::Int,
            BaseType::Float | BaseType::Double => Type::Float,
            BaseType::String => Type::Str,
            BaseType::Bool => Type::Bool,
            BaseType::DateTime => Type::DateTime,
            BaseType::Vertex(t) => Type::Vertex(t.clone()),
            BaseType::Edge(t) => Type::Edge(t.clone()),
            BaseType::Tuple(fs) => Type::Tuple(fs.iter().map(|(t, n)| (n.clone(), t.semantic())).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ParamType {
    Base(BaseType),
    Set(BaseType),
    Bag(BaseType),
    Map(BaseType, BaseType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SortDir {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Capacity {
    Const(i64),
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ElemType {
    Base(BaseType),
    Acc(Box<AccTypeAst>),
}

/// Accumulator types as written. `None` type arguments are the optional
/// ones (`AvgAccum`, `OrAccum`, `AndAccum`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AccTypeAst {
    Sum(BaseType),
    Min(BaseType),
    Max(BaseType),
    Avg(Option<BaseType>),
    Or(Option<BaseType>),
    And(Option<BaseType>),
    BitwiseOr(Option<BaseType>),
    BitwiseAnd(Option<BaseType>),
    Set(BaseType),
    Bag(BaseType),
    List(ElemType),
    Map(BaseType, ElemType),
    Heap { tuple: BaseType, capacity: Capacity, keys: Vec<(String, Option<SortDir>)> },
    Array(ElemType),
    GroupBy { keys: Vec<(BaseType, String)>, accs: Vec<(AccTypeAst, String)> },
}

// ---------------------------------------------------------------- queries

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QueryForm {
    /// `CREATE QUERY name (params) FOR GRAPH g { ... }`
    Create,
    /// `WITH decls BEGIN statements END`
    With,
    /// A bare statement sequence, typically a single SELECT block.
    Bare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub ty: ParamType,
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Query {
    pub form: QueryForm,
    pub name: Option<String>,
    pub params: Vec<Param>,
    pub graph: Option<String>,
    pub body: Vec<Stmt>,
    pub ret: Option<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccDeclName {
    pub global: bool,
    pub name: String,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccDecl {
    pub ty: AccTypeAst,
    pub names: Vec<AccDeclName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AccOp {
    /// `=`
    Set,
    /// `+=`
    Add,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ForeachIter {
    Expr(Expr),
    /// Inclusive integer range.
    Range(Expr, Expr),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StmtKind {
    AccDecl(AccDecl),
    VarDecl { ty: BaseType, name: String, init: Option<Expr> },
    Assign { name: String, expr: Expr, res: Option<VarKind> },
    GAcc { name: String, op: AccOp, expr: Expr },
    VAcc { var: String, acc: String, op: AccOp, expr: Expr },
    Block(Box<QueryBlock>),
    If { branches: Vec<(Expr, Vec<Stmt>)>, else_body: Option<Vec<Stmt>> },
    While { cond: Expr, limit: Option<Expr>, body: Vec<Stmt> },
    Foreach { vars: Vec<String>, iter: ForeachIter, body: Vec<Stmt> },
    Case { operand: Option<Expr>, whens: Vec<(Expr, Vec<Stmt>)>, else_body: Option<Vec<Stmt>> },
    Break,
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Distinctness {
    /// No keyword: DISTINCT for a bare vertex variable, bag otherwise.
    Default,
    Distinct,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub expr: Expr,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutTable {
    pub distinct: Distinctness,
    pub cols: Vec<Column>,
    pub into: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderKey {
    pub expr: Expr,
    pub dir: Option<SortDir>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryBlock {
    /// Target of the `Name = SELECT ...` form.
    pub assign_to: Option<String>,
    pub outputs: Vec<OutTable>,
    pub from: Vec<Atom>,
    pub where_clause: Option<Expr>,
    pub accum: Vec<Stmt>,
    pub post_accum: Vec<Stmt>,
    /// Spelled `POST-ACCUM` in the source; kept for printing.
    pub post_accum_hyphen: bool,
    pub group_by: Vec<Vec<Expr>>,
    pub having: Vec<Expr>,
    pub order_by: Vec<Vec<OrderKey>>,
    pub limit: Vec<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Atom {
    Rel { table: String, var: String, pos: Pos },
    Graph { graph: Option<String>, pattern: Vec<PathPattern>, pos: Pos },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPattern {
    pub start: VNode,
    pub hops: Vec<(Hop, VNode)>,
}

/// What a v-test names, filled in by the checker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum VTestRes {
    Any,
    Types(Vec<String>),
    VertexSet(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VNode {
    /// Empty means the wildcard `_` (or no test).
    pub names: Vec<String>,
    pub var: Option<String>,
    pub res: Option<VTestRes>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hop {
    pub darpe: Darpe,
    pub edge_var: Option<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Adorn {
    /// `E`
    Undirected,
    /// `E>`
    Forward,
    /// `<E`
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bounds {
    Exact(u32),
    Range(Option<u32>, Option<u32>),
}

impl Bounds {
    pub fn lo_hi(self) -> (u32, Option<u32>) {
        match self {
            Bounds::Exact(n) => (n, Some(n)),
            Bounds::Range(lo, hi) => (lo.unwrap_or(0), hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Darpe {
    Sym { name: String, adorn: Adorn },
    /// `_`, `_>` or `<_`; `None` expands to every legal adornment.
    Wild { adorn: Option<Adorn> },
    Concat(Vec<Darpe>),
    Alt(Vec<Darpe>),
    Star { inner: Box<Darpe>, bounds: Option<Bounds> },
}

impl Darpe {
    /// A single hop: a symbol, a wildcard, or an alternation of those.
    pub fn is_single_hop(&self) -> bool {
        match self {
            Darpe::Sym { .. } | Darpe::Wild { .. } => true,
            Darpe::Alt(xs) => xs.iter().all(Darpe::is_single_hop),
            Darpe::Concat(xs) if xs.len() == 1 => xs[0].is_single_hop(),
            _ => false,
        }
    }
}

// ---------------------------------------------------------------- expressions

/// Where a plain name was introduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarKind {
    Param,
    Global,
    Pattern,
    Local,
    Loop,
    Column,
    VertexSet,
    Table,
}

/// What `x.name` denotes, filled in by the checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttrRes {
    Attribute,
    TypeName,
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Contains,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    BitAnd,
    BitOr,
    Union,
    Intersect,
    Minus,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "OR",
            BinOp::And => "AND",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Contains => "CONTAINS",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::Union => "UNION",
            BinOp::Intersect => "INTERSECT",
            BinOp::Minus => "MINUS",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Union | BinOp::Intersect | BinOp::Minus => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Contains => 5,
            BinOp::BitOr => 6,
            BinOp::BitAnd => 7,
            BinOp::Add | BinOp::Sub => 8,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 9,
        }
    }
}

/// NOT sits between AND and comparison; predicates share comparison level.
pub const PREC_NOT: u8 = 4;
pub const PREC_CMP: u8 = 5;
pub const PREC_UNARY: u8 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ty: Option<Type>,
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos, ty: None }
    }

    pub fn ty(&self) -> &Type {
        self.ty.as_ref().unwrap_or(&Type::Any)
    }

    /// The variable name when the expression is a bare variable.
    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var { name, .. } => Some(name),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprKind {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Null,
    Var { name: String, res: Option<VarKind> },
    Attr { base: Box<Expr>, name: String, res: Option<AttrRes> },
    GAcc { name: String, primed: bool },
    VAcc { base: Box<Expr>, name: String, primed: bool },
    Unary { op: UnOp, expr: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Between { expr: Box<Expr>, lo: Box<Expr>, hi: Box<Expr>, negated: bool },
    In { expr: Box<Expr>, list: Box<Expr>, negated: bool },
    Like { expr: Box<Expr>, pattern: Box<Expr>, negated: bool },
    IsNull { expr: Box<Expr>, negated: bool },
    /// Function call; `agg` is set by the checker for aggregate uses.
    Call { name: String, args: Vec<Expr>, agg: bool },
    Method { base: Box<Expr>, name: String, args: Vec<Expr> },
    Case { operand: Option<Box<Expr>>, whens: Vec<(Expr, Expr)>, else_expr: Option<Box<Expr>> },
    Tuple(Vec<Expr>),
    List(Vec<Expr>),
    /// `(k1, k2 -> v1, v2)`, the MapAccum/GroupByAccum input form.
    MapEntry { keys: Vec<Expr>, values: Vec<Expr> },
    /// `{T.*, ...}`; `_` stands for every vertex type.
    Seed(Vec<String>),
}
