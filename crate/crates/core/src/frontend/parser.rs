//! Recursive-descent parser for DDL scripts and queries.

use super::ast::*;
use super::lexer::{Keyword as K, Tok, Token};
use super::SyntaxError;
use crate::catalog::AttrType;

/// Statement separator context: top-level statements end with `;`,
/// ACCUM/POST_ACCUM statements are separated by `,`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Top,
    Acc,
}

pub struct Parser {
    toks: Vec<Token>,
    i: usize,
    end_pos: Pos,
}

fn acc_type_word(w: &str) -> bool {
    const NAMES: [&str; 15] = [
        "sumaccum", "minaccum", "maxaccum", "avgaccum", "oraccum", "andaccum", "bitwiseoraccum",
        "bitwiseandaccum", "setaccum", "bagaccum", "listaccum", "mapaccum", "heapaccum", "arrayaccum",
        "groupbyaccum",
    ];
    NAMES.iter().any(|n| w.eq_ignore_ascii_case(n))
}

fn base_type_word(w: &str) -> bool {
    const NAMES: [&str; 12] =
        ["int", "uint", "float", "double", "string", "bool", "boolean", "datetime", "vertex", "edge", "tuple", "integer"];
    NAMES.iter().any(|n| w.eq_ignore_ascii_case(n))
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        let end_pos = toks
            .last()
            .map(|t| Pos { line: t.pos.line, col: t.pos.col + t.lexeme.chars().count() as u32 })
            .unwrap_or(Pos { line: 1, col: 1 });
        Parser { toks, i: 0, end_pos }
    }

    // ------------------------------------------------------------ cursor

    fn peek(&self) -> Option<&Tok> {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.kind)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end_pos, |t| t.pos)
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == Some(t)
    }

    fn at_kw(&self, k: K) -> bool {
        self.peek() == Some(&Tok::Kw(k))
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(w))
    }

    fn is_eof(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.kind.clone());
        self.i += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: K) -> bool {
        self.eat(&Tok::Kw(k))
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let found = match self.toks.get(self.i) {
            Some(t) => t.kind.to_string(),
            None => "end of input".to_string(),
        };
        SyntaxError { pos: self.pos(), msg: format!("expected {expected}, found {found}") }
    }

    fn expect(&mut self, t: &Tok, expected: &str) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_kw(&mut self, k: K) -> Result<(), SyntaxError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(k.text()))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), SyntaxError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.error(&w.to_ascii_uppercase()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    /// An identifier or a reserved word used as a name (attribute names
    /// such as `end` or `type`).
    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.toks.get(self.i) {
            Some(Token { kind: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            Some(Token { kind: Tok::Kw(_), lexeme, .. }) => {
                let s = lexeme.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn int_literal(&mut self, what: &str) -> Result<i64, SyntaxError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.i += 1;
                Ok(n)
            }
            _ => Err(self.error(what)),
        }
    }

    fn bound(&mut self) -> Result<u32, SyntaxError> {
        let pos = self.pos();
        let n = self.int_literal("repetition bound")?;
        u32::try_from(n).map_err(|_| SyntaxError { pos, msg: format!("repetition bound {n} out of range") })
    }

    /// Fails unless every token has been consumed.
    pub fn finish(&self) -> Result<(), SyntaxError> {
        if self.is_eof() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    // ------------------------------------------------------------ DDL

    pub fn parse_ddl(&mut self) -> Result<Vec<DdlStmt>, SyntaxError> {
        let mut out = Vec::new();
        while !self.is_eof() {
            if self.eat(&Tok::Semi) {
                continue;
            }
            out.push(self.ddl_stmt()?);
        }
        Ok(out)
    }

    fn ddl_stmt(&mut self) -> Result<DdlStmt, SyntaxError> {
        self.expect_kw(K::Create)?;
        if self.eat_word("vertex") {
            let name = self.ident("vertex type name")?;
            self.expect(&Tok::LParen, "`(`")?;
            let attrs = if self.at(&Tok::RParen) { Vec::new() } else { self.attr_list()? };
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(DdlStmt::CreateVertex { name, attrs });
        }
        if self.at_kw(K::Graph) {
            self.i += 1;
            let name = self.ident("graph name")?;
            self.expect(&Tok::LParen, "`(`")?;
            let mut members = vec![self.ident("type name")?];
            while self.eat(&Tok::Comma) {
                members.push(self.ident("type name")?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(DdlStmt::CreateGraph { name, members });
        }
        let directed = if self.eat_word("directed") {
            true
        } else if self.eat_word("undirected") {
            false
        } else {
            return Err(self.error("VERTEX, DIRECTED, UNDIRECTED or GRAPH"));
        };
        self.expect_word("edge")?;
        let name = self.ident("edge type name")?;
        self.expect(&Tok::LParen, "`(`")?;
        self.expect_kw(K::From)?;
        let from = self.ident("source vertex type")?;
        self.expect(&Tok::Comma, "`,`")?;
        self.expect_word("to")?;
        let to = self.ident("target vertex type")?;
        let attrs = if self.eat(&Tok::Comma) { self.attr_list()? } else { Vec::new() };
        self.expect(&Tok::RParen, "`)`")?;
        let mut discriminators = Vec::new();
        if self.eat_word("discriminator") {
            self.expect(&Tok::LParen, "`(`")?;
            discriminators.push(self.name("attribute name")?);
            while self.eat(&Tok::Comma) {
                discriminators.push(self.name("attribute name")?);
            }
            self.expect(&Tok::RParen, "`)`")?;
        }
        let mut reverse = None;
        if self.eat_word("with") {
            self.expect_word("reverse")?;
            self.expect_word("edge")?;
            reverse = Some(self.ident("reverse edge name")?);
        }
        Ok(DdlStmt::CreateEdge { name, directed, from, to, attrs, discriminators, reverse })
    }

    fn attr_list(&mut self) -> Result<Vec<AttrDecl>, SyntaxError> {
        let mut out = vec![self.attr_decl()?];
        while self.eat(&Tok::Comma) {
            out.push(self.attr_decl()?);
        }
        Ok(out)
    }

    fn attr_decl(&mut self) -> Result<AttrDecl, SyntaxError> {
        let name = self.name("attribute name")?;
        let tpos = self.i;
        let word = self.name("attribute type")?;
        let dtype = AttrType::from_keyword(&word).ok_or_else(|| {
            self.i = tpos;
            self.error("attribute type")
        })?;
        let primary_key = if self.eat_word("primary") {
            self.expect_word("key")?;
            true
        } else {
            false
        };
        Ok(AttrDecl { name, dtype, primary_key })
    }

    // ------------------------------------------------------------ queries

    /// One or more `CREATE QUERY` definitions, or a single `WITH ... BEGIN
    /// ... END` / bare statement sequence.
    pub fn parse_queries(&mut self) -> Result<Vec<Query>, SyntaxError> {
        if !self.at_kw(K::Create) {
            return Ok(vec![self.parse_query()?]);
        }
        let mut out = Vec::new();
        while !self.is_eof() {
            if self.eat(&Tok::Semi) {
                continue;
            }
            out.push(self.create_query()?);
        }
        Ok(out)
    }

    pub fn parse_query(&mut self) -> Result<Query, SyntaxError> {
        let q = if self.at_kw(K::Create) {
            self.create_query()?
        } else if self.at_word("with") {
            self.with_query()?
        } else {
            let pos = self.pos();
            let body = self.stmts(Mode::Top)?;
            let ret = self.return_clause()?;
            Query { form: QueryForm::Bare, name: None, params: Vec::new(), graph: None, body, ret, pos }
        };
        while self.eat(&Tok::Semi) {}
        if !self.is_eof() {
            return Err(self.error("end of input"));
        }
        Ok(q)
    }

    fn return_clause(&mut self) -> Result<Option<Expr>, SyntaxError> {
        if !self.eat_kw(K::Return) {
            return Ok(None);
        }
        let e = self.expr()?;
        self.eat(&Tok::Semi);
        Ok(Some(e))
    }

    fn create_query(&mut self) -> Result<Query, SyntaxError> {
        let pos = self.pos();
        self.expect_kw(K::Create)?;
        self.expect_kw(K::Query)?;
        let name = self.ident("query name")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            params.push(self.param()?);
            while self.eat(&Tok::Comma) {
                params.push(self.param()?);
            }
        }
        self.expect(&Tok::RParen, "`)`")?;
        let graph = if self.eat_kw(K::For) {
            self.expect_kw(K::Graph)?;
            Some(self.ident("graph name")?)
        } else {
            None
        };
        self.expect(&Tok::LBrace, "`{`")?;
        let body = self.stmts(Mode::Top)?;
        let ret = self.return_clause()?;
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(Query { form: QueryForm::Create, name: Some(name), params, graph, body, ret, pos })
    }

    fn with_query(&mut self) -> Result<Query, SyntaxError> {
        let pos = self.pos();
        self.expect_word("with")?;
        let mut body = Vec::new();
        while !self.at_word("begin") {
            if self.is_eof() {
                return Err(self.error("BEGIN"));
            }
            let spos = self.pos();
            let kind = self.decl_or_var()?;
            body.push(Stmt { kind, pos: spos });
            self.eat(&Tok::Semi);
        }
        self.expect_word("begin")?;
        body.extend(self.stmts(Mode::Top)?);
        let ret = self.return_clause()?;
        self.expect_kw(K::End)?;
        Ok(Query { form: QueryForm::With, name: None, params: Vec::new(), graph: None, body, ret, pos })
    }

    fn param(&mut self) -> Result<Param, SyntaxError> {
        let pos = self.pos();
        let ty = if self.at_word("set") || self.at_word("bag") || self.at_word("map") {
            let w = self.ident("type")?.to_ascii_lowercase();
            self.expect(&Tok::Lt, "`<`")?;
            let a = self.base_type()?;
            let t = if w == "map" {
                self.expect(&Tok::Comma, "`,`")?;
                ParamType::Map(a, self.base_type()?)
            } else if w == "set" {
                ParamType::Set(a)
            } else {
                ParamType::Bag(a)
            };
            self.expect(&Tok::Gt, "`>`")?;
            t
        } else {
            ParamType::Base(self.base_type()?)
        };
        let name = self.ident("parameter name")?;
        Ok(Param { ty, name, pos })
    }

    fn base_type(&mut self) -> Result<BaseType, SyntaxError> {
        let w = match self.peek() {
            Some(Tok::Ident(w)) => w.to_ascii_lowercase(),
            _ => return Err(self.error("type")),
        };
        let t = match w.as_str() {
            "int" | "integer" => BaseType::Int,
            "uint" => BaseType::Uint,
            "float" => BaseType::Float,
            "double" => BaseType::Double,
            "string" => BaseType::String,
            "bool" | "boolean" => BaseType::Bool,
            "datetime" => BaseType::DateTime,
            "vertex" | "edge" => {
                self.i += 1;
                let arg = if self.eat(&Tok::Lt) {
                    let n = self.ident("type name")?;
                    self.expect(&Tok::Gt, "`>`")?;
                    Some(n)
                } else {
                    None
                };
                return Ok(if w == "vertex" { BaseType::Vertex(arg) } else { BaseType::Edge(arg) });
            }
            "tuple" => {
                self.i += 1;
                self.expect(&Tok::Lt, "`<`")?;
                let mut fields = Vec::new();
                loop {
                    let t = self.base_type()?;
                    let n = self.name("field name")?;
                    fields.push((t, n));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::Gt, "`>`")?;
                return Ok(BaseType::Tuple(fields));
            }
            _ => return Err(self.error("type")),
        };
        self.i += 1;
        Ok(t)
    }

    fn optional_type_arg(&mut self) -> Result<Option<BaseType>, SyntaxError> {
        if self.eat(&Tok::Lt) {
            let t = self.base_type()?;
            self.expect(&Tok::Gt, "`>`")?;
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    fn type_arg(&mut self) -> Result<BaseType, SyntaxError> {
        self.expect(&Tok::Lt, "`<`")?;
        let t = self.base_type()?;
        self.expect(&Tok::Gt, "`>`")?;
        Ok(t)
    }

    fn elem_type(&mut self) -> Result<ElemType, SyntaxError> {
        if matches!(self.peek(), Some(Tok::Ident(w)) if acc_type_word(w)) {
            Ok(ElemType::Acc(Box::new(self.acc_type()?)))
        } else {
            Ok(ElemType::Base(self.base_type()?))
        }
    }

    fn acc_type(&mut self) -> Result<AccTypeAst, SyntaxError> {
        let w = self.ident("accumulator type")?.to_ascii_lowercase();
        Ok(match w.as_str() {
            "sumaccum" => AccTypeAst::Sum(self.type_arg()?),
            "minaccum" => AccTypeAst::Min(self.type_arg()?),
            "maxaccum" => AccTypeAst::Max(self.type_arg()?),
            "avgaccum" => AccTypeAst::Avg(self.optional_type_arg()?),
            "oraccum" => AccTypeAst::Or(self.optional_type_arg()?),
            "andaccum" => AccTypeAst::And(self.optional_type_arg()?),
            "bitwiseoraccum" => AccTypeAst::BitwiseOr(self.optional_type_arg()?),
            "bitwiseandaccum" => AccTypeAst::BitwiseAnd(self.optional_type_arg()?),
            "setaccum" => AccTypeAst::Set(self.type_arg()?),
            "bagaccum" => AccTypeAst::Bag(self.type_arg()?),
            "listaccum" | "arrayaccum" => {
                self.expect(&Tok::Lt, "`<`")?;
                let e = self.elem_type()?;
                self.expect(&Tok::Gt, "`>`")?;
                if w == "listaccum" {
                    AccTypeAst::List(e)
                } else {
                    AccTypeAst::Array(e)
                }
            }
            "mapaccum" => {
                self.expect(&Tok::Lt, "`<`")?;
                let k = self.base_type()?;
                self.expect(&Tok::Comma, "`,`")?;
                let v = self.elem_type()?;
                self.expect(&Tok::Gt, "`>`")?;
                AccTypeAst::Map(k, v)
            }
            "heapaccum" => {
                let tuple = self.type_arg()?;
                self.expect(&Tok::LParen, "`(`")?;
                let capacity = match self.peek() {
                    Some(Tok::Int(n)) => {
                        let n = *n;
                        self.i += 1;
                        Capacity::Const(n)
                    }
                    Some(Tok::Ident(_)) => Capacity::Param(self.ident("capacity")?),
                    _ => return Err(self.error("heap capacity")),
                };
                let mut keys = Vec::new();
                while self.eat(&Tok::Comma) {
                    // A bare direction sorts on the element itself.
                    let f = if self.at_kw(K::Asc) || self.at_kw(K::Desc) { String::new() } else { self.name("sort field")? };
                    let dir = if self.eat_kw(K::Asc) {
                        Some(SortDir::Asc)
                    } else if self.eat_kw(K::Desc) {
                        Some(SortDir::Desc)
                    } else {
                        None
                    };
                    keys.push((f, dir));
                }
                self.expect(&Tok::RParen, "`)`")?;
                AccTypeAst::Heap { tuple, capacity, keys }
            }
            "groupbyaccum" => {
                self.expect(&Tok::Lt, "`<`")?;
                let mut keys = Vec::new();
                let mut accs = Vec::new();
                loop {
                    if matches!(self.peek(), Some(Tok::Ident(w)) if acc_type_word(w)) {
                        let a = self.acc_type()?;
                        accs.push((a, self.name("field name")?));
                    } else {
                        let t = self.base_type()?;
                        keys.push((t, self.name("field name")?));
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::Gt, "`>`")?;
                AccTypeAst::GroupBy { keys, accs }
            }
            _ => {
                self.i -= 1;
                return Err(self.error("accumulator type"));
            }
        })
    }

    /// Accumulator declaration or typed variable declaration.
    fn decl_or_var(&mut self) -> Result<StmtKind, SyntaxError> {
        if matches!(self.peek(), Some(Tok::Ident(w)) if acc_type_word(w)) {
            let ty = self.acc_type()?;
            let mut names = Vec::new();
            loop {
                let pos = self.pos();
                let (global, name) = match self.advance() {
                    Some(Tok::GlobalAcc { name, primed: false }) => (true, name),
                    Some(Tok::VertexAcc { name, primed: false }) => (false, name),
                    _ => {
                        self.i -= 1;
                        return Err(self.error("accumulator name"));
                    }
                };
                // ArrayAccum dimensions are accepted and dropped; the type is
                // rejected by the checker.
                while self.eat(&Tok::LBracket) {
                    if !self.at(&Tok::RBracket) {
                        self.expr()?;
                    }
                    self.expect(&Tok::RBracket, "`]`")?;
                }
                let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
                names.push(AccDeclName { global, name, init, pos });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            return Ok(StmtKind::AccDecl(AccDecl { ty, names }));
        }
        let ty = self.base_type()?;
        let name = self.ident("variable name")?;
        let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
        Ok(StmtKind::VarDecl { ty, name, init })
    }

    fn at_decl(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(w)) if acc_type_word(w) => true,
            Some(Tok::Ident(w)) if base_type_word(w) => {
                matches!(self.peek_at(1), Some(Tok::Ident(_)) | Some(Tok::Lt))
            }
            _ => false,
        }
    }

    fn at_stmt_end(&self) -> bool {
        matches!(
            self.peek(),
            None | Some(Tok::RBrace)
                | Some(Tok::Kw(K::End))
                | Some(Tok::Kw(K::Else))
                | Some(Tok::Kw(K::When))
                | Some(Tok::Kw(K::Return))
        )
    }

    fn stmts(&mut self, mode: Mode) -> Result<Vec<Stmt>, SyntaxError> {
        let mut out = Vec::new();
        match mode {
            Mode::Top => {
                while !self.at_stmt_end() {
                    if self.eat(&Tok::Semi) {
                        continue;
                    }
                    let s = self.stmt(mode)?;
                    let compound = matches!(
                        s.kind,
                        StmtKind::If { .. } | StmtKind::While { .. } | StmtKind::Foreach { .. } | StmtKind::Case { .. }
                    );
                    out.push(s);
                    if !compound && !self.at_stmt_end() {
                        self.expect(&Tok::Semi, "`;`")?;
                    }
                }
            }
            Mode::Acc => {
                if self.at_stmt_end() {
                    return Ok(out);
                }
                out.push(self.stmt(mode)?);
                while self.eat(&Tok::Comma) {
                    out.push(self.stmt(mode)?);
                }
            }
        }
        Ok(out)
    }

    fn stmt(&mut self, mode: Mode) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek() {
            Some(Tok::Kw(K::Select)) if mode == Mode::Top => StmtKind::Block(Box::new(self.block(None)?)),
            Some(Tok::Kw(K::If)) => self.if_stmt(mode)?,
            Some(Tok::Kw(K::While)) => self.while_stmt(mode)?,
            Some(Tok::Kw(K::Foreach)) => self.foreach_stmt(mode)?,
            Some(Tok::Kw(K::Case)) => self.case_stmt(mode)?,
            Some(Tok::Kw(K::Break)) => {
                self.i += 1;
                StmtKind::Break
            }
            Some(Tok::Kw(K::Continue)) => {
                self.i += 1;
                StmtKind::Continue
            }
            Some(Tok::GlobalAcc { primed: false, .. }) => {
                let Some(Tok::GlobalAcc { name, .. }) = self.advance() else { unreachable!() };
                let op = self.acc_op()?;
                StmtKind::GAcc { name, op, expr: self.expr()? }
            }
            _ if self.at_decl() => {
                let k = self.decl_or_var()?;
                if mode == Mode::Acc && matches!(k, StmtKind::AccDecl(_)) {
                    return Err(SyntaxError { pos, msg: "accumulator declarations are not allowed in ACCUM".into() });
                }
                k
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("statement")?;
                if self.at(&Tok::Dot) && matches!(self.peek_at(1), Some(Tok::VertexAcc { primed: false, .. })) {
                    self.i += 1;
                    let Some(Tok::VertexAcc { name: acc, .. }) = self.advance() else { unreachable!() };
                    let op = self.acc_op()?;
                    StmtKind::VAcc { var: name, acc, op, expr: self.expr()? }
                } else if self.eat(&Tok::Assign) {
                    if mode == Mode::Top && self.at_kw(K::Select) {
                        StmtKind::Block(Box::new(self.block(Some(name))?))
                    } else {
                        StmtKind::Assign { name, expr: self.expr()?, res: None }
                    }
                } else {
                    return Err(self.error("`=`, `+=` or `.@accumulator`"));
                }
            }
            _ => return Err(self.error("statement")),
        };
        Ok(Stmt { kind, pos })
    }

    fn acc_op(&mut self) -> Result<AccOp, SyntaxError> {
        if self.eat(&Tok::Assign) {
            Ok(AccOp::Set)
        } else if self.eat(&Tok::PlusAssign) {
            Ok(AccOp::Add)
        } else {
            Err(self.error("`=` or `+=`"))
        }
    }

    fn if_stmt(&mut self, mode: Mode) -> Result<StmtKind, SyntaxError> {
        self.expect_kw(K::If)?;
        let mut branches = Vec::new();
        let cond = self.expr()?;
        self.expect_kw(K::Then)?;
        branches.push((cond, self.stmts(mode)?));
        let mut else_body = None;
        while self.eat_kw(K::Else) {
            if self.eat_kw(K::If) {
                let cond = self.expr()?;
                self.expect_kw(K::Then)?;
                branches.push((cond, self.stmts(mode)?));
            } else {
                else_body = Some(self.stmts(mode)?);
                break;
            }
        }
        self.expect_kw(K::End)?;
        Ok(StmtKind::If { branches, else_body })
    }

    fn while_stmt(&mut self, mode: Mode) -> Result<StmtKind, SyntaxError> {
        self.expect_kw(K::While)?;
        let cond = self.expr()?;
        let limit = if self.eat_kw(K::Limit) { Some(self.expr()?) } else { None };
        self.expect_kw(K::Do)?;
        let body = self.stmts(mode)?;
        self.expect_kw(K::End)?;
        Ok(StmtKind::While { cond, limit, body })
    }

    fn foreach_stmt(&mut self, mode: Mode) -> Result<StmtKind, SyntaxError> {
        self.expect_kw(K::Foreach)?;
        let vars = if self.eat(&Tok::LParen) {
            let mut v = vec![self.ident("loop variable")?];
            while self.eat(&Tok::Comma) {
                v.push(self.ident("loop variable")?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            v
        } else {
            vec![self.ident("loop variable")?]
        };
        self.expect_kw(K::In)?;
        let iter = if self.eat_kw(K::Range) {
            let close = if self.eat(&Tok::LBracket) {
                Tok::RBracket
            } else {
                self.expect(&Tok::LParen, "`[` or `(`")?;
                Tok::RParen
            };
            let lo = self.expr()?;
            self.expect(&Tok::Comma, "`,`")?;
            let hi = self.expr()?;
            self.expect(&close, "closing bracket")?;
            ForeachIter::Range(lo, hi)
        } else {
            ForeachIter::Expr(self.expr()?)
        };
        self.expect_kw(K::Do)?;
        let body = self.stmts(mode)?;
        self.expect_kw(K::End)?;
        Ok(StmtKind::Foreach { vars, iter, body })
    }

    fn case_stmt(&mut self, mode: Mode) -> Result<StmtKind, SyntaxError> {
        self.expect_kw(K::Case)?;
        let operand = if self.at_kw(K::When) { None } else { Some(self.expr()?) };
        let mut whens = Vec::new();
        while self.eat_kw(K::When) {
            let c = self.expr()?;
            self.expect_kw(K::Then)?;
            whens.push((c, self.stmts(mode)?));
        }
        if whens.is_empty() {
            return Err(self.error("WHEN"));
        }
        let else_body = if self.eat_kw(K::Else) { Some(self.stmts(mode)?) } else { None };
        self.expect_kw(K::End)?;
        Ok(StmtKind::Case { operand, whens, else_body })
    }

    // ------------------------------------------------------------ query block

    fn block(&mut self, assign_to: Option<String>) -> Result<QueryBlock, SyntaxError> {
        let pos = self.pos();
        self.expect_kw(K::Select)?;
        let mut outputs = vec![self.out_table()?];
        while self.at(&Tok::Semi) {
            let save = self.i;
            self.i += 1;
            match self.out_table() {
                Ok(t) if t.into.is_some() && (self.at(&Tok::Semi) || self.at_kw(K::From)) => outputs.push(t),
                _ => {
                    self.i = save;
                    break;
                }
            }
        }
        if outputs.len() > 1 && outputs.iter().any(|o| o.into.is_none()) {
            return Err(SyntaxError { pos, msg: "every output of a multi-output SELECT needs INTO".into() });
        }
        if assign_to.is_some() && (outputs.len() > 1 || outputs[0].into.is_some()) {
            return Err(SyntaxError { pos, msg: "`Name = SELECT` cannot be combined with INTO".into() });
        }
        self.expect_kw(K::From)?;
        let mut from = vec![self.atom()?];
        while self.eat(&Tok::Comma) {
            from.push(self.atom()?);
        }
        let where_clause = if self.eat_kw(K::Where) { Some(self.expr()?) } else { None };
        let accum = if self.eat_kw(K::Accum) { self.stmts(Mode::Acc)? } else { Vec::new() };
        let mut post_accum_hyphen = false;
        let post_accum = if self.at_kw(K::PostAccum) {
            post_accum_hyphen = self.toks[self.i].lexeme.contains('-');
            self.i += 1;
            self.stmts(Mode::Acc)?
        } else {
            Vec::new()
        };
        let n = outputs.len();
        let mut group_by = Vec::new();
        if self.eat_kw(K::Group) {
            self.expect_kw(K::By)?;
            group_by.push(self.expr_list()?);
            while group_by.len() < n {
                match self.try_more(|p| p.expr_list()) {
                    Some(g) => group_by.push(g),
                    None => break,
                }
            }
        }
        let mut having = Vec::new();
        if self.eat_kw(K::Having) {
            having.push(self.expr()?);
            while having.len() < n {
                match self.try_more(|p| p.expr()) {
                    Some(h) => having.push(h),
                    None => break,
                }
            }
        }
        let mut order_by = Vec::new();
        if self.eat_kw(K::Order) {
            self.expect_kw(K::By)?;
            order_by.push(self.order_keys()?);
            while order_by.len() < n {
                match self.try_more(|p| p.order_keys()) {
                    Some(o) => order_by.push(o),
                    None => break,
                }
            }
        }
        let mut limit = Vec::new();
        if self.eat_kw(K::Limit) {
            limit.push(self.expr()?);
            while limit.len() < n {
                match self.try_more(|p| p.expr()) {
                    Some(l) => limit.push(l),
                    None => break,
                }
            }
        }
        Ok(QueryBlock {
            assign_to,
            outputs,
            from,
            where_clause,
            accum,
            post_accum,
            post_accum_hyphen,
            group_by,
            having,
            order_by,
            limit,
            pos,
        })
    }

    /// After `;`, tries one more entry of a semicolon-separated clause list.
    /// Succeeds only when the entry is followed by `;` or a later clause.
    fn try_more<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, SyntaxError>) -> Option<T> {
        if !self.at(&Tok::Semi) {
            return None;
        }
        let save = self.i;
        self.i += 1;
        if let Ok(v) = f(self) {
            if self.at(&Tok::Semi) || self.at_stmt_end() || self.at_kw(K::Having) || self.at_kw(K::Order) || self.at_kw(K::Limit) {
                return Some(v);
            }
        }
        self.i = save;
        None
    }

    fn out_table(&mut self) -> Result<OutTable, SyntaxError> {
        let distinct = if self.eat_kw(K::Distinct) {
            Distinctness::Distinct
        } else if self.eat_kw(K::All) {
            Distinctness::All
        } else {
            Distinctness::Default
        };
        let mut cols = vec![self.column()?];
        while self.eat(&Tok::Comma) {
            cols.push(self.column()?);
        }
        let into = if self.eat_kw(K::Into) { Some(self.ident("table name")?) } else { None };
        Ok(OutTable { distinct, cols, into })
    }

    fn column(&mut self) -> Result<Column, SyntaxError> {
        let expr = self.expr()?;
        let alias = if self.eat_kw(K::As) { Some(self.name("column alias")?) } else { None };
        Ok(Column { expr, alias })
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn order_keys(&mut self) -> Result<Vec<OrderKey>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            let expr = self.expr()?;
            let dir = if self.eat_kw(K::Asc) {
                Some(SortDir::Asc)
            } else if self.eat_kw(K::Desc) {
                Some(SortDir::Desc)
            } else {
                None
            };
            out.push(OrderKey { expr, dir });
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn starts_pattern_tail(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Some(Tok::Colon) | Some(Tok::Pipe))
            || (self.peek_at(k) == Some(&Tok::Dash) && self.peek_at(k + 1) == Some(&Tok::LParen))
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        let pos = self.pos();
        if let Some(Tok::Ident(first)) = self.peek() {
            let first = first.clone();
            if self.peek_at(1) == Some(&Tok::Kw(K::As)) {
                if matches!(self.peek_at(2), Some(Tok::Ident(_))) && !self.starts_pattern_tail(3) {
                    self.i += 2;
                    let var = self.ident("variable")?;
                    return Ok(Atom::Rel { table: first, var, pos });
                }
                self.i += 2;
                let p = self.path_pattern()?;
                return Ok(Atom::Graph { graph: Some(first), pattern: vec![p], pos });
            }
            if let Some(Tok::Ident(_)) = self.peek_at(1) {
                self.i += 1;
                if self.starts_pattern_tail(1) {
                    let p = self.path_pattern()?;
                    return Ok(Atom::Graph { graph: Some(first), pattern: vec![p], pos });
                }
                let var = self.ident("variable")?;
                return Ok(Atom::Rel { table: first, var, pos });
            }
        }
        let p = self.path_pattern()?;
        Ok(Atom::Graph { graph: None, pattern: vec![p], pos })
    }

    fn vnode(&mut self) -> Result<VNode, SyntaxError> {
        let pos = self.pos();
        let mut names = Vec::new();
        let wild = self.eat(&Tok::Underscore);
        if !wild && !self.at(&Tok::Colon) {
            let paren = self.eat(&Tok::LParen);
            names.push(self.ident("vertex type or vertex set")?);
            while self.eat(&Tok::Pipe) {
                names.push(self.ident("vertex type")?);
            }
            if paren {
                self.expect(&Tok::RParen, "`)`")?;
            }
        }
        let var = if self.eat(&Tok::Colon) { Some(self.ident("variable")?) } else { None };
        Ok(VNode { names, var, res: None, pos })
    }

    fn path_pattern(&mut self) -> Result<PathPattern, SyntaxError> {
        let start = self.vnode()?;
        let mut hops = Vec::new();
        while self.at(&Tok::Dash) && self.peek_at(1) == Some(&Tok::LParen) {
            let pos = self.pos();
            self.i += 2;
            let darpe = self.darpe_alt()?;
            let edge_var = if self.eat(&Tok::Colon) { Some(self.ident("edge variable")?) } else { None };
            self.expect(&Tok::RParen, "`)`")?;
            self.expect(&Tok::Dash, "`-`")?;
            let node = self.vnode()?;
            hops.push((Hop { darpe, edge_var, pos }, node));
        }
        Ok(PathPattern { start, hops })
    }

    pub fn darpe_alt(&mut self) -> Result<Darpe, SyntaxError> {
        let mut alts = vec![self.darpe_concat()?];
        while self.eat(&Tok::Pipe) {
            alts.push(self.darpe_concat()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Darpe::Alt(alts) })
    }

    fn darpe_concat(&mut self) -> Result<Darpe, SyntaxError> {
        let mut parts = vec![self.darpe_postfix()?];
        while self.eat(&Tok::Dot) {
            parts.push(self.darpe_postfix()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Darpe::Concat(parts) })
    }

    fn darpe_postfix(&mut self) -> Result<Darpe, SyntaxError> {
        let mut d = self.darpe_atom()?;
        while self.eat(&Tok::Star) {
            let bounds = match self.peek() {
                Some(Tok::Int(_)) => {
                    let lo = self.bound()?;
                    if self.eat(&Tok::DotDot) {
                        let hi = if matches!(self.peek(), Some(Tok::Int(_))) { Some(self.bound()?) } else { None };
                        Some(Bounds::Range(Some(lo), hi))
                    } else {
                        Some(Bounds::Exact(lo))
                    }
                }
                Some(Tok::DotDot) => {
                    self.i += 1;
                    Some(Bounds::Range(None, Some(self.bound()?)))
                }
                _ => None,
            };
            d = Darpe::Star { inner: Box::new(d), bounds };
        }
        Ok(d)
    }

    fn darpe_atom(&mut self) -> Result<Darpe, SyntaxError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let d = self.darpe_alt()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(d)
            }
            Some(Tok::Lt) => {
                self.i += 1;
                if self.eat(&Tok::Underscore) {
                    return Ok(Darpe::Wild { adorn: Some(Adorn::Backward) });
                }
                let name = self.ident("edge type")?;
                Ok(Darpe::Sym { name, adorn: Adorn::Backward })
            }
            Some(Tok::Underscore) => {
                self.i += 1;
                let adorn = if self.eat(&Tok::Gt) { Some(Adorn::Forward) } else { None };
                Ok(Darpe::Wild { adorn })
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("edge type")?;
                let adorn = if self.eat(&Tok::Gt) { Adorn::Forward } else { Adorn::Undirected };
                Ok(Darpe::Sym { name, adorn })
            }
            _ => Err(self.error("edge type, `<`, `_` or `(`")),
        }
    }

    // ------------------------------------------------------------ expressions

    pub fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.or_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Kw(K::Union)) => BinOp::Union,
                Some(Tok::Kw(K::Intersect)) => BinOp::Intersect,
                Some(Tok::Kw(K::Minus)) => BinOp::Minus,
                _ => return Ok(lhs),
            };
            self.i += 1;
            let rhs = self.or_expr()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn or_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.and_expr()?;
        while self.eat_kw(K::Or) {
            let rhs = self.and_expr()?;
            lhs = binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.not_expr()?;
        while self.eat_kw(K::And) {
            let rhs = self.not_expr()?;
            lhs = binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        if self.eat_kw(K::Not) {
            let e = self.not_expr()?;
            return Ok(Expr::new(ExprKind::Unary { op: UnOp::Not, expr: Box::new(e) }, pos));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.bitor_expr()?;
        let pos = lhs.pos;
        let op = match self.peek() {
            Some(Tok::Assign) | Some(Tok::EqEq) => Some(BinOp::Eq),
            Some(Tok::Ne) => Some(BinOp::Ne),
            Some(Tok::Lt) => Some(BinOp::Lt),
            Some(Tok::Le) => Some(BinOp::Le),
            Some(Tok::Gt) => Some(BinOp::Gt),
            Some(Tok::Ge) => Some(BinOp::Ge),
            Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("contains") => Some(BinOp::Contains),
            _ => None,
        };
        if let Some(op) = op {
            self.i += 1;
            let rhs = self.bitor_expr()?;
            return Ok(binary(op, lhs, rhs));
        }
        let negated = self.at_kw(K::Not)
            && matches!(self.peek_at(1), Some(Tok::Kw(K::Between)) | Some(Tok::Kw(K::In)) | Some(Tok::Kw(K::Like)));
        if negated {
            self.i += 1;
        }
        let e = Box::new(lhs);
        let kind = match self.peek() {
            Some(Tok::Kw(K::Between)) => {
                self.i += 1;
                let lo = self.bitor_expr()?;
                self.expect_kw(K::And)?;
                let hi = self.bitor_expr()?;
                ExprKind::Between { expr: e, lo: Box::new(lo), hi: Box::new(hi), negated }
            }
            Some(Tok::Kw(K::In)) => {
                self.i += 1;
                let list = self.bitor_expr()?;
                ExprKind::In { expr: e, list: Box::new(list), negated }
            }
            Some(Tok::Kw(K::Like)) => {
                self.i += 1;
                let pattern = self.bitor_expr()?;
                ExprKind::Like { expr: e, pattern: Box::new(pattern), negated }
            }
            Some(Tok::Kw(K::Is)) if !negated => {
                self.i += 1;
                let negated = self.eat_kw(K::Not);
                self.expect_kw(K::Null)?;
                ExprKind::IsNull { expr: e, negated }
            }
            _ => return Ok(*e),
        };
        Ok(Expr::new(kind, pos))
    }

    fn bitor_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.bitand_expr()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.bitand_expr()?;
            lhs = binary(BinOp::BitOr, lhs, rhs);
        }
        Ok(lhs)
    }

    fn bitand_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.add_expr()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.add_expr()?;
            lhs = binary(BinOp::BitAnd, lhs, rhs);
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                // `-(` after an operand starts an edge hop only inside FROM,
                // where expressions never appear.
                Some(Tok::Dash) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.i += 1;
            let rhs = self.mul_expr()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                Some(Tok::Percent) => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.i += 1;
            let rhs = self.unary_expr()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary_expr(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        if self.eat(&Tok::Dash) {
            let e = self.unary_expr()?;
            return Ok(Expr::new(ExprKind::Unary { op: UnOp::Neg, expr: Box::new(e) }, pos));
        }
        self.postfix_expr()
    }

    fn postfix_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        while self.at(&Tok::Dot) {
            let pos = e.pos;
            self.i += 1;
            if let Some(Tok::VertexAcc { name, primed }) = self.peek() {
                let (name, primed) = (name.clone(), *primed);
                self.i += 1;
                e = Expr::new(ExprKind::VAcc { base: Box::new(e), name, primed }, pos);
                continue;
            }
            let name = self.name("attribute name")?;
            if self.eat(&Tok::LParen) {
                let args = self.call_args()?;
                e = Expr::new(ExprKind::Method { base: Box::new(e), name, args }, pos);
            } else {
                e = Expr::new(ExprKind::Attr { base: Box::new(e), name, res: None }, pos);
            }
        }
        Ok(e)
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            args = self.expr_list()?;
            self.expect(&Tok::RParen, "`)`")?;
        }
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        let kind = match self.advance() {
            Some(Tok::Int(n)) => ExprKind::Int(n),
            Some(Tok::Float(x)) => ExprKind::Float(x),
            Some(Tok::Str(s)) => ExprKind::Str(s),
            Some(Tok::Kw(K::True)) => ExprKind::Bool(true),
            Some(Tok::Kw(K::False)) => ExprKind::Bool(false),
            Some(Tok::Kw(K::Null)) => ExprKind::Null,
            Some(Tok::GlobalAcc { name, primed }) => ExprKind::GAcc { name, primed },
            Some(Tok::Ident(name)) => {
                if self.eat(&Tok::LParen) {
                    ExprKind::Call { name, args: self.call_args()?, agg: false }
                } else {
                    ExprKind::Var { name, res: None }
                }
            }
            Some(Tok::LParen) => {
                let first = self.expr_list()?;
                if self.eat(&Tok::Arrow) {
                    let values = self.expr_list()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    ExprKind::MapEntry { keys: first, values }
                } else {
                    self.expect(&Tok::RParen, "`)`")?;
                    if first.len() == 1 {
                        return Ok(first.into_iter().next().unwrap());
                    }
                    ExprKind::Tuple(first)
                }
            }
            Some(Tok::LBracket) => {
                let items = if self.at(&Tok::RBracket) { Vec::new() } else { self.expr_list()? };
                self.expect(&Tok::RBracket, "`]`")?;
                ExprKind::List(items)
            }
            Some(Tok::LBrace) => {
                let mut types = Vec::new();
                loop {
                    let t = if self.eat(&Tok::Underscore) { "_".to_string() } else { self.ident("vertex type")? };
                    self.expect(&Tok::Dot, "`.`")?;
                    self.expect(&Tok::Star, "`*`")?;
                    types.push(t);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RBrace, "`}`")?;
                ExprKind::Seed(types)
            }
            Some(Tok::Kw(K::Case)) => {
                let operand = if self.at_kw(K::When) { None } else { Some(Box::new(self.expr()?)) };
                let mut whens = Vec::new();
                while self.eat_kw(K::When) {
                    let c = self.expr()?;
                    self.expect_kw(K::Then)?;
                    whens.push((c, self.expr()?));
                }
                if whens.is_empty() {
                    return Err(self.error("WHEN"));
                }
                let else_expr = if self.eat_kw(K::Else) { Some(Box::new(self.expr()?)) } else { None };
                self.expect_kw(K::End)?;
                ExprKind::Case { operand, whens, else_expr }
            }
            _ => {
                self.i -= 1;
                return Err(self.error("expression"));
            }
        };
        Ok(Expr::new(kind, pos))
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let pos = lhs.pos;
    Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, pos)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, parse_query};
    use super::*;

    fn sym(name: &str, adorn: Adorn) -> Darpe {
        Darpe::Sym { name: name.into(), adorn }
    }

    fn darpe_of(q: &str) -> Darpe {
        let q = parse_query(&format!("SELECT t FROM S:s -({q})- T:t")).unwrap();
        let StmtKind::Block(b) = &q.body[0].kind else { panic!() };
        let Atom::Graph { pattern, .. } = &b.from[0] else { panic!() };
        pattern[0].hops[0].0.darpe.clone()
    }

    #[test]
    fn darpe_precedence() {
        let d = darpe_of("E>.(F>|<G)*.<H.J");
        assert_eq!(
            d,
            Darpe::Concat(vec![
                sym("E", Adorn::Forward),
                Darpe::Star {
                    inner: Box::new(Darpe::Alt(vec![sym("F", Adorn::Forward), sym("G", Adorn::Backward)])),
                    bounds: None
                },
                sym("H", Adorn::Backward),
                sym("J", Adorn::Undirected),
            ])
        );
        assert_eq!(
            darpe_of("A.B|C"),
            Darpe::Alt(vec![Darpe::Concat(vec![sym("A", Adorn::Undirected), sym("B", Adorn::Undirected)]), sym("C", Adorn::Undirected)])
        );
    }

    #[test]
    fn darpe_bounds() {
        let star = |b| Darpe::Star { inner: Box::new(sym("E", Adorn::Forward)), bounds: b };
        assert_eq!(darpe_of("E>*2..3"), star(Some(Bounds::Range(Some(2), Some(3)))));
        assert_eq!(darpe_of("E>*..3"), star(Some(Bounds::Range(None, Some(3)))));
        assert_eq!(darpe_of("E>*2.."), star(Some(Bounds::Range(Some(2), None))));
        assert_eq!(darpe_of("E>*4"), star(Some(Bounds::Exact(4))));
    }

    #[test]
    fn multi_output_select() {
        let q = parse_query("SELECT a INTO T1; b INTO T2 FROM X:a -(E)- Y:b GROUP BY a; b").unwrap();
        let StmtKind::Block(b) = &q.body[0].kind else { panic!() };
        assert_eq!(b.outputs.len(), 2);
        assert_eq!(b.outputs[1].into.as_deref(), Some("T2"));
        assert_eq!(b.group_by.len(), 2);
    }

    #[test]
    fn expression_precedence() {
        let e = parse_expr("NOT a = 1 AND b OR c").unwrap();
        let ExprKind::Binary { op: BinOp::Or, lhs, .. } = e.kind else { panic!() };
        let ExprKind::Binary { op: BinOp::And, lhs, .. } = lhs.kind else { panic!() };
        let ExprKind::Unary { op: UnOp::Not, expr } = lhs.kind else { panic!() };
        assert!(matches!(expr.kind, ExprKind::Binary { op: BinOp::Eq, .. }));
        let e = parse_expr("-a * b + c").unwrap();
        let ExprKind::Binary { op: BinOp::Add, lhs, .. } = e.kind else { panic!() };
        let ExprKind::Binary { op: BinOp::Mul, lhs, .. } = lhs.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Unary { op: UnOp::Neg, .. }));
    }

    #[test]
    fn negated_predicates_and_map_entries() {
        assert!(matches!(parse_expr("x NOT LIKE 'A%'").unwrap().kind, ExprKind::Like { negated: true, .. }));
        assert!(matches!(parse_expr("x IS NOT NULL").unwrap().kind, ExprKind::IsNull { negated: true, .. }));
        assert!(matches!(parse_expr("(k -> 2)").unwrap().kind, ExprKind::MapEntry { .. }));
        assert!(matches!(parse_expr("{Page.*}").unwrap().kind, ExprKind::Seed(_)));
    }

    #[test]
    fn syntax_error_reports_expected_and_position() {
        let e = parse_query("SELECT x FROM").unwrap_err();
        assert!(e.msg.contains("expected"), "{}", e.msg);
        let e = parse_query("SELECT x\nFROM A:x WHERE )").unwrap_err();
        assert_eq!(e.pos.line, 2);
    }

    #[test]
    fn relational_and_graph_atoms() {
        let q = parse_query("SELECT e FROM Employee AS e, LinkedIn AS Person:p -(Connected:c)- Person:o, Emp f").unwrap();
        let StmtKind::Block(b) = &q.body[0].kind else { panic!() };
        assert!(matches!(&b.from[0], Atom::Rel { table, var, .. } if table == "Employee" && var == "e"));
        assert!(matches!(&b.from[1], Atom::Graph { graph: Some(g), .. } if g == "LinkedIn"));
        assert!(matches!(&b.from[2], Atom::Rel { table, .. } if table == "Emp"));
    }
}
