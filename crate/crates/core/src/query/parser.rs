//! Tokenizer and recursive-descent parser for the one-hop pattern language:
//!
//! ```text
//! query   := "MATCH" pattern ["WHERE" cond {"AND" cond}] "RETURN" var {"," var} ["LIMIT" int]
//! pattern := nodepat [ "-[" [":" rel] "]->" nodepat
//!                    | "<-[" [":" rel] "]-" nodepat
//!                    | "-[" [":" rel] "]-" nodepat ]
//! nodepat := "(" var [":" type] ")"
//! cond    := var "." attr op literal
//! ```
//!
//! Keywords are case-insensitive. Names that are not plain identifiers can
//! be written in backticks.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{CompareOp, Direction, Filter, Literal, NodePattern, Pattern, QueryAst};
use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Str(String),
    Num(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    Dash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("identifier {s:?}"),
            Tok::Quoted(s) => alloc::format!("quoted name `{s}`"),
            Tok::Str(s) => alloc::format!("string {s:?}"),
            Tok::Num(s) => alloc::format!("number {s}"),
            Tok::End => "end of input".to_string(),
            Tok::LParen => "\"(\"".to_string(),
            Tok::RParen => "\")\"".to_string(),
            Tok::LBracket => "\"[\"".to_string(),
            Tok::RBracket => "\"]\"".to_string(),
            Tok::Colon => "\":\"".to_string(),
            Tok::Comma => "\",\"".to_string(),
            Tok::Dot => "\".\"".to_string(),
            Tok::Dash => "\"-\"".to_string(),
            Tok::Lt => "\"<\"".to_string(),
            Tok::Le => "\"<=\"".to_string(),
            Tok::Gt => "\">\"".to_string(),
            Tok::Ge => "\">=\"".to_string(),
            Tok::Eq => "\"=\"".to_string(),
            Tok::Ne => "\"!=\"".to_string(),
        }
    }
}

fn syntax(position: usize, expected: &str, found: &str) -> QueryError {
    QueryError::Syntax {
        position,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => toks.push((Tok::LParen, start)),
            b')' => toks.push((Tok::RParen, start)),
            b'[' => toks.push((Tok::LBracket, start)),
            b']' => toks.push((Tok::RBracket, start)),
            b':' => toks.push((Tok::Colon, start)),
            b',' => toks.push((Tok::Comma, start)),
            b'.' => toks.push((Tok::Dot, start)),
            b'-' => toks.push((Tok::Dash, start)),
            b'=' => toks.push((Tok::Eq, start)),
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((Tok::Le, start));
                i += 1;
            }
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((Tok::Ne, start));
                i += 1;
            }
            b'<' => toks.push((Tok::Lt, start)),
            b'>' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((Tok::Ge, start));
                i += 1;
            }
            b'>' => toks.push((Tok::Gt, start)),
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((Tok::Ne, start));
                i += 1;
            }
            quote @ (b'"' | b'\'') => {
                let quote = quote as char;
                let mut s = String::new();
                let mut chars = text[i + 1..].char_indices();
                loop {
                    match chars.next() {
                        None => {
                            let closing = format!("closing '{quote}'");
                            return Err(syntax(start, &closing, "end of input"));
                        }
                        Some((off, ch)) if ch == quote => {
                            i = i + 1 + off;
                            break;
                        }
                        Some((off, '\\')) => match chars.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\'')) => s.push('\''),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 't')) => s.push('\t'),
                            Some((_, 'r')) => s.push('\r'),
                            _ => {
                                return Err(syntax(start + 1 + off, "escape sequence", "'\\'"))
                            }
                        },
                        Some((_, ch)) => s.push(ch),
                    }
                }
                toks.push((Tok::Str(s), start));
            }
            b'`' => {
                let mut s = String::new();
                let mut chars = text[i + 1..].char_indices().peekable();
                loop {
                    match chars.next() {
                        None => return Err(syntax(start, "closing '`'", "end of input")),
                        Some((off, '`')) => {
                            if matches!(chars.peek(), Some((_, '`'))) {
                                chars.next();
                                s.push('`');
                            } else {
                                i = i + 1 + off;
                                break;
                            }
                        }
                        Some((_, ch)) => s.push(ch),
                    }
                }
                toks.push((Tok::Quoted(s), start));
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                toks.push((Tok::Num(text[start..i].to_owned()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_owned()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, "token", &alloc::format!("{ch:?}")));
            }
        }
        i += 1;
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> QueryError {
        syntax(self.offset(), expected, &self.peek().describe())
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(kw))
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), QueryError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, QueryError> {
        match self.peek().clone() {
            Tok::Ident(s) if super::ast::is_plain_ident(&s) => {
                self.bump();
                Ok(s)
            }
            Tok::Quoted(s) if !s.is_empty() => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn node_pattern(&mut self) -> Result<NodePattern, QueryError> {
        self.expect(Tok::LParen, "\"(\"")?;
        let var = self.name("variable")?;
        let type_label = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.name("type label")?)
        } else {
            None
        };
        self.expect(Tok::RParen, "\")\"")?;
        Ok(NodePattern { var, type_label })
    }

    /// `"[" [":" rel] "]"`
    fn rel_pattern(&mut self) -> Result<Option<String>, QueryError> {
        self.expect(Tok::LBracket, "\"[\"")?;
        let rel = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.name("relation label")?)
        } else {
            None
        };
        self.expect(Tok::RBracket, "\"]\"")?;
        Ok(rel)
    }

    fn pattern(&mut self) -> Result<Pattern, QueryError> {
        let src = self.node_pattern()?;
        let (rel, direction) = match self.peek() {
            Tok::Dash => {
                self.bump();
                let rel = self.rel_pattern()?;
                self.expect(Tok::Dash, "\"-\"")?;
                if *self.peek() == Tok::Gt {
                    self.bump();
                    (rel, Direction::Out)
                } else {
                    (rel, Direction::Any)
                }
            }
            Tok::Lt => {
                self.bump();
                self.expect(Tok::Dash, "\"-\"")?;
                let rel = self.rel_pattern()?;
                self.expect(Tok::Dash, "\"-\"")?;
                (rel, Direction::In)
            }
            _ => return Ok(Pattern::Node(src)),
        };
        let dst = self.node_pattern()?;
        Ok(Pattern::Path { src, rel, direction, dst })
    }

    fn literal(&mut self) -> Result<Literal, QueryError> {
        let negative = if *self.peek() == Tok::Dash {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(digits) => {
                let at = self.offset();
                self.bump();
                let v: f64 = digits.parse().map_err(|_| syntax(at, "number", &digits))?;
                Ok(Literal::Number(if negative { -v } else { v }))
            }
            _ if negative => Err(self.error("number")),
            Tok::Str(s) => {
                self.bump();
                Ok(Literal::String(s))
            }
            Tok::Ident(s) if s.eq_ignore_ascii_case("true") => {
                self.bump();
                Ok(Literal::Bool(true))
            }
            Tok::Ident(s) if s.eq_ignore_ascii_case("false") => {
                self.bump();
                Ok(Literal::Bool(false))
            }
            _ => Err(self.error("literal")),
        }
    }

    fn condition(&mut self) -> Result<Filter, QueryError> {
        let var = self.name("variable")?;
        self.expect(Tok::Dot, "\".\"")?;
        let attr = self.name("attribute name")?;
        let op = match self.peek() {
            Tok::Eq => CompareOp::Eq,
            Tok::Ne => CompareOp::Ne,
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            Tok::Ident(s) if s.eq_ignore_ascii_case("CONTAINS") => CompareOp::Contains,
            _ => return Err(self.error("comparison operator")),
        };
        self.bump();
        let value = self.literal()?;
        Ok(Filter { var, attr, op, value })
    }

    fn query(&mut self) -> Result<QueryAst, QueryError> {
        self.keyword("MATCH")?;
        let pattern = self.pattern()?;
        let mut filters = Vec::new();
        if self.is_keyword("WHERE") {
            self.bump();
            filters.push(self.condition()?);
            while self.is_keyword("AND") {
                self.bump();
                filters.push(self.condition()?);
            }
        }
        self.keyword("RETURN")?;
        let mut return_vars = alloc::vec![self.name("variable")?];
        while *self.peek() == Tok::Comma {
            self.bump();
            return_vars.push(self.name("variable")?);
        }
        let limit = if self.is_keyword("LIMIT") {
            self.bump();
            match self.peek().clone() {
                Tok::Num(digits) if !digits.contains('.') => {
                    let at = self.offset();
                    let n: usize = digits
                        .parse()
                        .map_err(|_| syntax(at, "positive integer", &digits))?;
                    if n == 0 {
                        return Err(syntax(at, "positive integer", "0"));
                    }
                    self.bump();
                    Some(n)
                }
                _ => return Err(self.error("positive integer")),
            }
        } else {
            None
        };
        if *self.peek() != Tok::End {
            return Err(self.error("end of input"));
        }
        Ok(QueryAst { pattern, filters, return_vars, limit })
    }
}

/// Parses query text and checks that every filter and return variable is
/// bound by the pattern.
pub fn parse(text: &str) -> Result<QueryAst, QueryError> {
    let toks = tokenize(text)?;
    let ast = Parser { toks, pos: 0 }.query()?;
    validate(&ast)?;
    Ok(ast)
}

pub fn validate(ast: &QueryAst) -> Result<(), QueryError> {
    let bound = ast.pattern.vars();
    let used = ast
        .filters
        .iter()
        .map(|f| &f.var)
        .chain(ast.return_vars.iter());
    for var in used {
        if !bound.contains(&var.as_str()) {
            return Err(QueryError::UnboundVariable(var.clone()));
        }
    }
    if ast.limit == Some(0) {
        return Err(QueryError::InvalidLimit);
    }
    Ok(())
}
