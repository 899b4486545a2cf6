use std::fmt;

use super::ast::Pos;
use super::SyntaxError;

macro_rules! keywords {
    ($($kw:ident => $text:literal),* $(,)?) => {
        /// Reserved words; matched case-insensitively.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword { $($kw),* }

        impl Keyword {
            pub fn lookup(word: &str) -> Option<Keyword> {
                $(if word.eq_ignore_ascii_case($text) { return Some(Keyword::$kw); })*
                None
            }

            pub fn text(self) -> &'static str {
                match self { $(Keyword::$kw => $text),* }
            }
        }
    };
}

keywords! {
    Create => "CREATE", Query => "QUERY", For => "FOR", Graph => "GRAPH",
    Select => "SELECT", Distinct => "DISTINCT", All => "ALL", Into => "INTO",
    From => "FROM", As => "AS", Where => "WHERE", Accum => "ACCUM",
    PostAccum => "POST_ACCUM", Group => "GROUP", By => "BY", Having => "HAVING",
    Order => "ORDER", Asc => "ASC", Desc => "DESC", Limit => "LIMIT",
    And => "AND", Or => "OR", Not => "NOT", In => "IN", Between => "BETWEEN",
    Like => "LIKE", Is => "IS", Null => "NULL", True => "TRUE", False => "FALSE",
    Case => "CASE", When => "WHEN", Then => "THEN", Else => "ELSE", End => "END",
    If => "IF", While => "WHILE", Do => "DO", Foreach => "FOREACH", Range => "RANGE",
    Break => "BREAK", Continue => "CONTINUE", Return => "RETURN",
    Union => "UNION", Intersect => "INTERSECT", Minus => "MINUS",
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Kw(Keyword),
    Int(i64),
    Float(f64),
    Str(String),
    GlobalAcc { name: String, primed: bool },
    VertexAcc { name: String, primed: bool },
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Plus,
    Dash,
    Star,
    Slash,
    Percent,
    Amp,
    Pipe,
    Lt,
    Gt,
    Le,
    Ge,
    Assign,
    EqEq,
    Ne,
    PlusAssign,
    Arrow,
    Underscore,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Kw(k) => write!(f, "{}", k.text()),
            Tok::Int(i) => write!(f, "number {i}"),
            Tok::Float(x) => write!(f, "number {x}"),
            Tok::Str(s) => write!(f, "string '{s}'"),
            Tok::GlobalAcc { name, .. } => write!(f, "@@{name}"),
            Tok::VertexAcc { name, .. } => write!(f, "@{name}"),
            other => write!(f, "`{}`", punct_text(other)),
        }
    }
}

pub(crate) fn punct_text(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Colon => ":",
        Tok::Dot => ".",
        Tok::DotDot => "..",
        Tok::Plus => "+",
        Tok::Dash => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Percent => "%",
        Tok::Amp => "&",
        Tok::Pipe => "|",
        Tok::Lt => "<",
        Tok::Gt => ">",
        Tok::Le => "<=",
        Tok::Ge => ">=",
        Tok::Assign => "=",
        Tok::EqEq => "==",
        Tok::Ne => "<>",
        Tok::PlusAssign => "+=",
        Tok::Arrow => "->",
        Tok::Underscore => "_",
        _ => "?",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: Tok,
    pub lexeme: String,
    pub pos: Pos,
}

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self, k: usize) -> u8 {
        self.src.get(self.i + k).copied().unwrap_or(0)
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.i];
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if c & 0xC0 != 0x80 {
            self.col += 1;
        }
        c
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { pos, msg: msg.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), SyntaxError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (c, _) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                (b'/', b'/') => {
                    while self.i < self.src.len() && self.peek(0) != b'\n' {
                        self.bump();
                    }
                }
                (b'/', b'*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        if self.i >= self.src.len() {
                            return Err(self.err(start, "unterminated comment"));
                        }
                        if self.peek(0) == b'*' && self.peek(1) == b'/' {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn ident_end(&self, from: usize) -> usize {
        let mut j = from;
        while j < self.src.len() && (self.src[j].is_ascii_alphanumeric() || self.src[j] == b'_') {
            j += 1;
        }
        j
    }

    fn take_until(&mut self, end: usize) -> &'a str {
        let start = self.i;
        while self.i < end {
            self.bump();
        }
        &self.text[start..end]
    }

    fn acc_name(&mut self, sigil: usize, pos: Pos) -> Result<(String, bool), SyntaxError> {
        for _ in 0..sigil {
            self.bump();
        }
        let end = self.ident_end(self.i);
        if end == self.i {
            return Err(self.err(pos, "expected accumulator name after `@`"));
        }
        let name = self.take_until(end).to_string();
        let primed = self.peek(0) == b'\'';
        if primed {
            self.bump();
        }
        Ok((name, primed))
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, SyntaxError> {
        let start = self.i;
        while self.peek(0).is_ascii_digit() {
            self.bump();
        }
        let mut float = false;
        // `2..3` is a range, not `2.` followed by `.3`.
        if self.peek(0) == b'.' && self.peek(1).is_ascii_digit() {
            float = true;
            self.bump();
            while self.peek(0).is_ascii_digit() {
                self.bump();
            }
        }
        if matches!(self.peek(0), b'e' | b'E')
            && (self.peek(1).is_ascii_digit() || (matches!(self.peek(1), b'+' | b'-') && self.peek(2).is_ascii_digit()))
        {
            float = true;
            self.bump();
            if matches!(self.peek(0), b'+' | b'-') {
                self.bump();
            }
            while self.peek(0).is_ascii_digit() {
                self.bump();
            }
        }
        let s = &self.text[start..self.i];
        if float {
            s.parse().map(Tok::Float).map_err(|_| self.err(pos, format!("bad number `{s}`")))
        } else {
            s.parse().map(Tok::Int).map_err(|_| self.err(pos, format!("integer out of range `{s}`")))
        }
    }

    fn string(&mut self, pos: Pos) -> Result<Tok, SyntaxError> {
        let quote = self.bump();
        let mut out = String::new();
        loop {
            if self.i >= self.src.len() {
                return Err(self.err(pos, "unterminated string"));
            }
            let start = self.i;
            let c = self.bump();
            if c == quote {
                if self.peek(0) == quote {
                    self.bump();
                    out.push(quote as char);
                    continue;
                }
                return Ok(Tok::Str(out));
            }
            if c == b'\\' && self.i < self.src.len() {
                let e = self.bump();
                out.push(match e {
                    b'n' => '\n',
                    b't' => '\t',
                    other => other as char,
                });
                continue;
            }
            // Copy a whole UTF-8 sequence.
            let mut end = self.i;
            while end < self.src.len() && self.src[end] & 0xC0 == 0x80 {
                end += 1;
            }
            while self.i < end {
                self.bump();
            }
            out.push_str(&self.text[start..end]);
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, SyntaxError> {
        self.skip_trivia()?;
        if self.i >= self.src.len() {
            return Ok(None);
        }
        let pos = self.pos();
        let start = self.i;
        let c = self.peek(0);
        let kind = match c {
            b'@' if self.peek(1) == b'@' => {
                let (name, primed) = self.acc_name(2, pos)?;
                Tok::GlobalAcc { name, primed }
            }
            b'@' => {
                let (name, primed) = self.acc_name(1, pos)?;
                Tok::VertexAcc { name, primed }
            }
            b'0'..=b'9' => self.number(pos)?,
            b'\'' | b'"' => self.string(pos)?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = self.ident_end(self.i);
                let word = self.take_until(end);
                if word == "_" {
                    Tok::Underscore
                } else if word.eq_ignore_ascii_case("post")
                    && self.peek(0) == b'-'
                    && self.text[self.i + 1..].get(..5).is_some_and(|w| w.eq_ignore_ascii_case("accum"))
                    && !self.src.get(self.i + 6).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
                {
                    for _ in 0..6 {
                        self.bump();
                    }
                    Tok::Kw(Keyword::PostAccum)
                } else if let Some(k) = Keyword::lookup(word) {
                    Tok::Kw(k)
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                let two = [c, self.peek(1)];
                let (tok, len) = match &two {
                    b".." => (Tok::DotDot, 2),
                    b"<=" => (Tok::Le, 2),
                    b">=" => (Tok::Ge, 2),
                    b"<>" | b"!=" => (Tok::Ne, 2),
                    b"==" => (Tok::EqEq, 2),
                    b"+=" => (Tok::PlusAssign, 2),
                    b"->" => (Tok::Arrow, 2),
                    _ => (
                        match c {
                            b'(' => Tok::LParen,
                            b')' => Tok::RParen,
                            b'{' => Tok::LBrace,
                            b'}' => Tok::RBrace,
                            b'[' => Tok::LBracket,
                            b']' => Tok::RBracket,
                            b',' => Tok::Comma,
                            b';' => Tok::Semi,
                            b':' => Tok::Colon,
                            b'.' => Tok::Dot,
                            b'+' => Tok::Plus,
                            b'-' => Tok::Dash,
                            b'*' => Tok::Star,
                            b'/' => Tok::Slash,
                            b'%' => Tok::Percent,
                            b'&' => Tok::Amp,
                            b'|' => Tok::Pipe,
                            b'<' => Tok::Lt,
                            b'>' => Tok::Gt,
                            b'=' => Tok::Assign,
                            _ => {
                                let ch = self.text[self.i..].chars().next().unwrap_or('?');
                                return Err(self.err(pos, format!("illegal character `{ch}`")));
                            }
                        },
                        1,
                    ),
                };
                for _ in 0..len {
                    self.bump();
                }
                tok
            }
        };
        Ok(Some(Token { kind, lexeme: self.text[start..self.i].to_string(), pos }))
    }
}

/// Splits source text into tokens, or reports the first lexical error.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer { src: text.as_bytes(), text, i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(t) = lx.next_token()? {
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn global_accumulator_update() {
        assert_eq!(
            kinds("@@totalRevenue += x"),
            vec![
                Tok::GlobalAcc { name: "totalRevenue".into(), primed: false },
                Tok::PlusAssign,
                Tok::Ident("x".into())
            ]
        );
    }

    #[test]
    fn directed_hop() {
        assert_eq!(
            kinds("-(Posts>)-"),
            vec![Tok::Dash, Tok::LParen, Tok::Ident("Posts".into()), Tok::Gt, Tok::RParen, Tok::Dash]
        );
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
        assert!(kinds("  // only a comment\n /* block */ ").is_empty());
    }

    #[test]
    fn primes_and_strings() {
        assert_eq!(
            kinds("v.@score' 'toys'"),
            vec![
                Tok::Ident("v".into()),
                Tok::Dot,
                Tok::VertexAcc { name: "score".into(), primed: true },
                Tok::Str("toys".into())
            ]
        );
    }

    #[test]
    fn bounds_and_floats() {
        assert_eq!(
            kinds("*2..3 1.5 100.0 2e3"),
            vec![Tok::Star, Tok::Int(2), Tok::DotDot, Tok::Int(3), Tok::Float(1.5), Tok::Float(100.0), Tok::Float(2000.0)]
        );
    }

    #[test]
    fn keywords_case_insensitive_and_post_accum_spellings() {
        assert_eq!(kinds("select Post-Accum POST_ACCUM"), vec![
            Tok::Kw(Keyword::Select),
            Tok::Kw(Keyword::PostAccum),
            Tok::Kw(Keyword::PostAccum)
        ]);
        assert_eq!(kinds("post - x"), vec![Tok::Ident("post".into()), Tok::Dash, Tok::Ident("x".into())]);
    }

    #[test]
    fn errors_carry_position() {
        let e = tokenize("x = 'abc").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 5));
        let e = tokenize("a\n  $").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 3));
        assert!(e.msg.contains("illegal"));
    }
}
