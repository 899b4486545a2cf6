//! Pretty-printer producing source text that parses back to the same tree.
//!
//! Parentheses are inserted only where operator precedence requires them.

use std::fmt::Write;

use super::ast::*;

const PREC_ATOM: u8 = 100;

pub fn print_ddl(stmts: &[DdlStmt]) -> String {
    let mut out = String::new();
    for s in stmts {
        match s {
            DdlStmt::CreateVertex { name, attrs } => {
                let _ = writeln!(out, "CREATE VERTEX {name} ({})", attr_list(attrs));
            }
            DdlStmt::CreateEdge { name, directed, from, to, attrs, discriminators, reverse } => {
                let dir = if *directed { "DIRECTED" } else { "UNDIRECTED" };
                let _ = write!(out, "CREATE {dir} EDGE {name} (FROM {from}, TO {to}");
                if !attrs.is_empty() {
                    let _ = write!(out, ", {}", attr_list(attrs));
                }
                out.push(')');
                if !discriminators.is_empty() {
                    let _ = write!(out, " DISCRIMINATOR ({})", discriminators.join(", "));
                }
                if let Some(r) = reverse {
                    let _ = write!(out, " WITH REVERSE EDGE {r}");
                }
                out.push('\n');
            }
            DdlStmt::CreateGraph { name, members } => {
                let _ = writeln!(out, "CREATE GRAPH {name} ({})", members.join(", "));
            }
        }
    }
    out
}

fn attr_list(attrs: &[AttrDecl]) -> String {
    let parts: Vec<String> = attrs
        .iter()
        .map(|a| {
            let pk = if a.primary_key { " PRIMARY KEY" } else { "" };
            format!("{} {}{pk}", a.name, a.dtype.keyword())
        })
        .collect();
    parts.join(", ")
}

pub fn print_base_type(t: &BaseType) -> String {
    match t {
        BaseType::Int => "int".into(),
        BaseType::Uint => "uint".into(),
        BaseType::Float => "float".into(),
        BaseType::Double => "double".into(),
        BaseType::String => "string".into(),
        BaseType::Bool => "bool".into(),
        BaseType::DateTime => "datetime".into(),
        BaseType::Vertex(None) => "vertex".into(),
        BaseType::Vertex(Some(n)) => format!("vertex<{n}>"),
        BaseType::Edge(None) => "edge".into(),
        BaseType::Edge(Some(n)) => format!("edge<{n}>"),
        BaseType::Tuple(fs) => {
            let parts: Vec<String> = fs.iter().map(|(t, n)| format!("{} {n}", print_base_type(t))).collect();
            format!("tuple<{}>", parts.join(", "))
        }
    }
}

fn elem_type(e: &ElemType) -> String {
    match e {
        ElemType::Base(b) => print_base_type(b),
        ElemType::Acc(a) => print_acc_type(a),
    }
}

fn opt_arg(name: &str, t: &Option<BaseType>) -> String {
    match t {
        Some(t) => format!("{name}<{}>", print_base_type(t)),
        None => name.to_string(),
    }
}

pub fn print_acc_type(t: &AccTypeAst) -> String {
    let b = print_base_type;
    match t {
        AccTypeAst::Sum(t) => format!("SumAccum<{}>", b(t)),
        AccTypeAst::Min(t) => format!("MinAccum<{}>", b(t)),
        AccTypeAst::Max(t) => format!("MaxAccum<{}>", b(t)),
        AccTypeAst::Avg(t) => opt_arg("AvgAccum", t),
        AccTypeAst::Or(t) => opt_arg("OrAccum", t),
        AccTypeAst::And(t) => opt_arg("AndAccum", t),
        AccTypeAst::BitwiseOr(t) => opt_arg("BitwiseOrAccum", t),
        AccTypeAst::BitwiseAnd(t) => opt_arg("BitwiseAndAccum", t),
        AccTypeAst::Set(t) => format!("SetAccum<{}>", b(t)),
        AccTypeAst::Bag(t) => format!("BagAccum<{}>", b(t)),
        AccTypeAst::List(e) => format!("ListAccum<{}>", elem_type(e)),
        AccTypeAst::Array(e) => format!("ArrayAccum<{}>", elem_type(e)),
        AccTypeAst::Map(k, v) => format!("MapAccum<{}, {}>", b(k), elem_type(v)),
        AccTypeAst::Heap { tuple, capacity, keys } => {
            let mut s = format!("HeapAccum<{}>(", b(tuple));
            match capacity {
                Capacity::Const(n) => s += &n.to_string(),
                Capacity::Param(p) => s += p,
            }
            for (f, dir) in keys {
                s += ", ";
                s += f;
                if let Some(d) = dir {
                    if !f.is_empty() {
                        s.push(' ');
                    }
                    s += sort_dir(*d);
                }
            }
            s + ")"
        }
        AccTypeAst::GroupBy { keys, accs } => {
            let mut parts: Vec<String> = keys.iter().map(|(t, n)| format!("{} {n}", b(t))).collect();
            parts.extend(accs.iter().map(|(a, n)| format!("{} {n}", print_acc_type(a))));
            format!("GroupByAccum<{}>", parts.join(", "))
        }
    }
}

fn sort_dir(d: SortDir) -> &'static str {
    match d {
        SortDir::Asc => "ASC",
        SortDir::Desc => "DESC",
    }
}

fn param_type(t: &ParamType) -> String {
    match t {
        ParamType::Base(b) => print_base_type(b),
        ParamType::Set(b) => format!("set<{}>", print_base_type(b)),
        ParamType::Bag(b) => format!("bag<{}>", print_base_type(b)),
        ParamType::Map(k, v) => format!("map<{}, {}>", print_base_type(k), print_base_type(v)),
    }
}

// ---------------------------------------------------------------- queries

pub fn print_query(q: &Query) -> String {
    let mut p = Printer { out: String::new(), indent: 0 };
    match q.form {
        QueryForm::Create => {
            let params: Vec<String> = q.params.iter().map(|p| format!("{} {}", param_type(&p.ty), p.name)).collect();
            let _ = write!(p.out, "CREATE QUERY {}({})", q.name.as_deref().unwrap_or("q"), params.join(", "));
            if let Some(g) = &q.graph {
                let _ = write!(p.out, " FOR GRAPH {g}");
            }
            p.out.push_str(" {\n");
            p.indent = 1;
            p.top_stmts(&q.body);
            p.ret(&q.ret);
            p.out.push_str("}\n");
        }
        QueryForm::With => {
            p.out.push_str("WITH\n");
            let split = q.body.iter().take_while(|s| matches!(s.kind, StmtKind::AccDecl(_) | StmtKind::VarDecl { .. })).count();
            p.indent = 1;
            p.top_stmts(&q.body[..split]);
            p.indent = 0;
            p.out.push_str("BEGIN\n");
            p.indent = 1;
            p.top_stmts(&q.body[split..]);
            p.ret(&q.ret);
            p.out.push_str("END\n");
        }
        QueryForm::Bare => {
            p.top_stmts(&q.body);
            p.ret(&q.ret);
        }
    }
    p.out
}

struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn pad(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("  ");
        }
    }

    fn ret(&mut self, ret: &Option<Expr>) {
        if let Some(e) = ret {
            self.pad();
            let _ = writeln!(self.out, "RETURN {};", print_expr(e));
        }
    }

    fn top_stmts(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.pad();
            let text = stmt(s, Some(self.indent));
            self.out.push_str(&text);
            self.out.push_str(";\n");
        }
    }
}

/// `indent` is `Some` for `;`-terminated statements, `None` inside ACCUM.
fn stmt(s: &Stmt, indent: Option<usize>) -> String {
    let body = |b: &[Stmt]| -> String {
        match indent {
            Some(n) => {
                let mut p = Printer { out: String::from("\n"), indent: n + 1 };
                p.top_stmts(b);
                p.pad_to(n);
                p.out
            }
            None => {
                let parts: Vec<String> = b.iter().map(|s| stmt(s, None)).collect();
                format!(" {} ", parts.join(", "))
            }
        }
    };
    match &s.kind {
        StmtKind::AccDecl(d) => {
            let names: Vec<String> = d
                .names
                .iter()
                .map(|n| {
                    let sigil = if n.global { "@@" } else { "@" };
                    match &n.init {
                        Some(e) => format!("{sigil}{} = {}", n.name, print_expr(e)),
                        None => format!("{sigil}{}", n.name),
                    }
                })
                .collect();
            format!("{} {}", print_acc_type(&d.ty), names.join(", "))
        }
        StmtKind::VarDecl { ty, name, init } => match init {
            Some(e) => format!("{} {name} = {}", print_base_type(ty), print_expr(e)),
            None => format!("{} {name}", print_base_type(ty)),
        },
        StmtKind::Assign { name, expr, .. } => format!("{name} = {}", print_expr(expr)),
        StmtKind::GAcc { name, op, expr } => format!("@@{name} {} {}", acc_op(*op), print_expr(expr)),
        StmtKind::VAcc { var, acc, op, expr } => format!("{var}.@{acc} {} {}", acc_op(*op), print_expr(expr)),
        StmtKind::Block(b) => print_block(b, indent.unwrap_or(0)),
        StmtKind::If { branches, else_body } => {
            let mut s = String::new();
            for (i, (c, b)) in branches.iter().enumerate() {
                if i > 0 {
                    s += "ELSE ";
                }
                let _ = write!(s, "IF {} THEN{}", print_expr(c), body(b));
            }
            if let Some(b) = else_body {
                let _ = write!(s, "ELSE{}", body(b));
            }
            s + "END"
        }
        StmtKind::While { cond, limit, body: b } => {
            let lim = limit.as_ref().map(|l| format!(" LIMIT {}", print_expr(l))).unwrap_or_default();
            format!("WHILE {}{lim} DO{}END", print_expr(cond), body(b))
        }
        StmtKind::Foreach { vars, iter, body: b } => {
            let v = if vars.len() == 1 { vars[0].clone() } else { format!("({})", vars.join(", ")) };
            let it = match iter {
                ForeachIter::Expr(e) => print_expr(e),
                ForeachIter::Range(lo, hi) => format!("RANGE[{}, {}]", print_expr(lo), print_expr(hi)),
            };
            format!("FOREACH {v} IN {it} DO{}END", body(b))
        }
        StmtKind::Case { operand, whens, else_body } => {
            let mut s = String::from("CASE");
            if let Some(o) = operand {
                let _ = write!(s, " {}", print_expr(o));
            }
            for (c, b) in whens {
                let _ = write!(s, " WHEN {} THEN{}", print_expr(c), body(b));
            }
            if let Some(b) = else_body {
                let _ = write!(s, "ELSE{}", body(b));
            }
            s + "END"
        }
        StmtKind::Break => "BREAK".into(),
        StmtKind::Continue => "CONTINUE".into(),
    }
}

impl Printer {
    fn pad_to(&mut self, n: usize) {
        self.indent = n;
        self.pad();
    }
}

fn acc_op(op: AccOp) -> &'static str {
    match op {
        AccOp::Set => "=",
        AccOp::Add => "+=",
    }
}

pub fn print_block(b: &QueryBlock, indent: usize) -> String {
    let nl = format!("\n{}", "  ".repeat(indent + 1));
    let mut s = String::new();
    if let Some(t) = &b.assign_to {
        let _ = write!(s, "{t} = ");
    }
    s += "SELECT ";
    let outs: Vec<String> = b
        .outputs
        .iter()
        .map(|o| {
            let mut t = String::new();
            match o.distinct {
                Distinctness::Distinct => t += "DISTINCT ",
                Distinctness::All => t += "ALL ",
                Distinctness::Default => {}
            }
            let cols: Vec<String> = o
                .cols
                .iter()
                .map(|c| match &c.alias {
                    Some(a) => format!("{} AS {a}", print_expr(&c.expr)),
                    None => print_expr(&c.expr),
                })
                .collect();
            t += &cols.join(", ");
            if let Some(i) = &o.into {
                let _ = write!(t, " INTO {i}");
            }
            t
        })
        .collect();
    s += &outs.join("; ");
    let atoms: Vec<String> = b.from.iter().map(print_atom).collect();
    let _ = write!(s, "{nl}FROM {}", atoms.join(", "));
    if let Some(w) = &b.where_clause {
        let _ = write!(s, "{nl}WHERE {}", print_expr(w));
    }
    let acc_list = |v: &[Stmt]| v.iter().map(|s| stmt(s, None)).collect::<Vec<_>>().join(", ");
    if !b.accum.is_empty() {
        let _ = write!(s, "{nl}ACCUM {}", acc_list(&b.accum));
    }
    if !b.post_accum.is_empty() {
        let kw = if b.post_accum_hyphen { "POST-ACCUM" } else { "POST_ACCUM" };
        let _ = write!(s, "{nl}{kw} {}", acc_list(&b.post_accum));
    }
    if !b.group_by.is_empty() {
        let gs: Vec<String> = b.group_by.iter().map(|g| expr_list(g)).collect();
        let _ = write!(s, "{nl}GROUP BY {}", gs.join("; "));
    }
    if !b.having.is_empty() {
        let _ = write!(s, "{nl}HAVING {}", b.having.iter().map(print_expr).collect::<Vec<_>>().join("; "));
    }
    if !b.order_by.is_empty() {
        let os: Vec<String> = b
            .order_by
            .iter()
            .map(|keys| {
                keys.iter()
                    .map(|k| match k.dir {
                        Some(d) => format!("{} {}", print_expr(&k.expr), sort_dir(d)),
                        None => print_expr(&k.expr),
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect();
        let _ = write!(s, "{nl}ORDER BY {}", os.join("; "));
    }
    if !b.limit.is_empty() {
        let _ = write!(s, "{nl}LIMIT {}", b.limit.iter().map(print_expr).collect::<Vec<_>>().join("; "));
    }
    s
}

pub fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Rel { table, var, .. } => format!("{table} AS {var}"),
        Atom::Graph { graph, pattern, .. } => {
            let ps: Vec<String> = pattern.iter().map(print_path).collect();
            match graph {
                Some(g) => format!("{g} AS {}", ps.join(", ")),
                None => ps.join(", "),
            }
        }
    }
}

fn print_vnode(n: &VNode) -> String {
    let test = match n.names.len() {
        0 => "_".to_string(),
        1 => n.names[0].clone(),
        _ => format!("({})", n.names.join("|")),
    };
    match &n.var {
        Some(v) => format!("{test}:{v}"),
        None => test,
    }
}

pub fn print_path(p: &PathPattern) -> String {
    let mut s = print_vnode(&p.start);
    for (hop, node) in &p.hops {
        let ev = hop.edge_var.as_ref().map(|e| format!(":{e}")).unwrap_or_default();
        let _ = write!(s, " -({}{ev})- {}", print_darpe(&hop.darpe), print_vnode(node));
    }
    s
}

fn darpe_prec(d: &Darpe) -> u8 {
    match d {
        Darpe::Alt(_) => 0,
        Darpe::Concat(_) => 1,
        Darpe::Star { .. } => 2,
        Darpe::Sym { .. } | Darpe::Wild { .. } => 3,
    }
}

fn darpe_wrap(d: &Darpe, min: u8) -> String {
    let s = print_darpe(d);
    if darpe_prec(d) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn print_darpe(d: &Darpe) -> String {
    match d {
        Darpe::Sym { name, adorn } => match adorn {
            Adorn::Undirected => name.clone(),
            Adorn::Forward => format!("{name}>"),
            Adorn::Backward => format!("<{name}"),
        },
        Darpe::Wild { adorn } => match adorn {
            None | Some(Adorn::Undirected) => "_".into(),
            Some(Adorn::Forward) => "_>".into(),
            Some(Adorn::Backward) => "<_".into(),
        },
        // Nested sequences keep their parentheses so the tree shape survives.
        Darpe::Concat(xs) => xs.iter().map(|x| darpe_wrap(x, 2)).collect::<Vec<_>>().join("."),
        Darpe::Alt(xs) => xs.iter().map(|x| darpe_wrap(x, 1)).collect::<Vec<_>>().join("|"),
        Darpe::Star { inner, bounds } => {
            let mut s = darpe_wrap(inner, 3);
            s.push('*');
            match bounds {
                None => {}
                Some(Bounds::Exact(n)) => s += &n.to_string(),
                Some(Bounds::Range(lo, hi)) => {
                    if let Some(l) = lo {
                        s += &l.to_string();
                    }
                    s += "..";
                    if let Some(h) = hi {
                        s += &h.to_string();
                    }
                }
            }
            s
        }
    }
}

// ---------------------------------------------------------------- expressions

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { op: UnOp::Not, .. } => PREC_NOT,
        ExprKind::Unary { op: UnOp::Neg, .. } => PREC_UNARY,
        ExprKind::Between { .. } | ExprKind::In { .. } | ExprKind::Like { .. } | ExprKind::IsNull { .. } => PREC_CMP,
        _ => PREC_ATOM,
    }
}

/// Prints `e`, parenthesized when its precedence is below `min`.
fn wrap(e: &Expr, min: u8) -> String {
    let s = print_expr(e);
    if prec(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn expr_list(es: &[Expr]) -> String {
    es.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("''"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn postfix_base(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Var { .. }
        | ExprKind::Attr { .. }
        | ExprKind::VAcc { .. }
        | ExprKind::GAcc { .. }
        | ExprKind::Call { .. }
        | ExprKind::Method { .. } => print_expr(e),
        _ => format!("({})", print_expr(e)),
    }
}

pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(n) => n.to_string(),
        ExprKind::Float(x) => format!("{x:?}"),
        ExprKind::Str(s) => quote(s),
        ExprKind::Bool(b) => if *b { "TRUE" } else { "FALSE" }.into(),
        ExprKind::Null => "NULL".into(),
        ExprKind::Var { name, .. } => name.clone(),
        ExprKind::Attr { base, name, .. } => format!("{}.{name}", postfix_base(base)),
        ExprKind::GAcc { name, primed } => format!("@@{name}{}", if *primed { "'" } else { "" }),
        ExprKind::VAcc { base, name, primed } => {
            format!("{}.@{name}{}", postfix_base(base), if *primed { "'" } else { "" })
        }
        ExprKind::Unary { op: UnOp::Not, expr } => format!("NOT {}", wrap(expr, PREC_NOT)),
        ExprKind::Unary { op: UnOp::Neg, expr } => {
            let inner = wrap(expr, PREC_UNARY);
            if inner.starts_with('-') {
                format!("-({inner})")
            } else {
                format!("-{inner}")
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            // Comparisons do not chain, so both operands must bind tighter.
            let lmin = if p == PREC_CMP { p + 1 } else { p };
            format!("{} {} {}", wrap(lhs, lmin), op.symbol(), wrap(rhs, p + 1))
        }
        ExprKind::Between { expr, lo, hi, negated } => format!(
            "{} {}BETWEEN {} AND {}",
            wrap(expr, PREC_CMP + 1),
            if *negated { "NOT " } else { "" },
            wrap(lo, PREC_CMP + 1),
            wrap(hi, PREC_CMP + 1)
        ),
        ExprKind::In { expr, list, negated } => {
            format!("{} {}IN {}", wrap(expr, PREC_CMP + 1), if *negated { "NOT " } else { "" }, wrap(list, PREC_CMP + 1))
        }
        ExprKind::Like { expr, pattern, negated } => format!(
            "{} {}LIKE {}",
            wrap(expr, PREC_CMP + 1),
            if *negated { "NOT " } else { "" },
            wrap(pattern, PREC_CMP + 1)
        ),
        ExprKind::IsNull { expr, negated } => {
            format!("{} IS {}NULL", wrap(expr, PREC_CMP + 1), if *negated { "NOT " } else { "" })
        }
        ExprKind::Call { name, args, .. } => format!("{name}({})", expr_list(args)),
        ExprKind::Method { base, name, args } => format!("{}.{name}({})", postfix_base(base), expr_list(args)),
        ExprKind::Case { operand, whens, else_expr } => {
            let mut s = String::from("CASE");
            if let Some(o) = operand {
                let _ = write!(s, " {}", print_expr(o));
            }
            for (c, r) in whens {
                let _ = write!(s, " WHEN {} THEN {}", print_expr(c), print_expr(r));
            }
            if let Some(x) = else_expr {
                let _ = write!(s, " ELSE {}", print_expr(x));
            }
            s + " END"
        }
        ExprKind::Tuple(xs) => format!("({})", expr_list(xs)),
        ExprKind::List(xs) => format!("[{}]", expr_list(xs)),
        ExprKind::MapEntry { keys, values } => format!("({} -> {})", expr_list(keys), expr_list(values)),
        ExprKind::Seed(ts) => {
            format!("{{{}}}", ts.iter().map(|t| format!("{t}.*")).collect::<Vec<_>>().join(", "))
        }
    }
}
