//! A small closed DSL for naming catalog sets and boolean combinations.
//!
//! Grammar:
//!
//! ```text
//! expr    := ident | ident "(" args ")"
//! args    := (nat | expr) { "," (nat | expr) }
//! ident   := letter { letter | digit | "_" }
//! nat     := digit { digit }
//! ```
//!
//! Recognized idents are the builtin catalog plus the combinators
//! `union`, `intersect`, `complement`. The DSL is deliberately closed:
//! arbitrary predicates enter the library only through
//! [`ComputableSet::new`](super::ComputableSet::new), never through text.

use std::fmt;

use thiserror::Error;

use super::{builtin, ComputableSet, SetError, BUILTIN_NAMES};

/// Abstract syntax of a set expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    /// Catalog reference with integer parameters, e.g. `multiples(3)`.
    Builtin { name: String, params: Vec<u64> },
    /// n-ary union, at least two operands.
    Union(Vec<SetExpr>),
    /// n-ary intersection, at least two operands.
    Intersect(Vec<SetExpr>),
    Complement(Box<SetExpr>),
    /// Explicit finite element list.
    Finite(Vec<u64>),
}

impl SetExpr {
    /// Canonical printing; `parse_set_expr` round-trips it.
    pub fn print(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, head: &str, args: &[SetExpr]) -> fmt::Result {
            write!(f, "{head}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")
        }
        match self {
            SetExpr::Builtin { name, params } => {
                if params.is_empty() {
                    f.write_str(name)
                } else {
                    let printed: Vec<String> = params.iter().map(|p| p.to_string()).collect();
                    write!(f, "{name}({})", printed.join(","))
                }
            }
            SetExpr::Union(args) => join(f, "union", args),
            SetExpr::Intersect(args) => join(f, "intersect", args),
            SetExpr::Complement(inner) => write!(f, "complement({inner})"),
            SetExpr::Finite(elems) => {
                let printed: Vec<String> = elems.iter().map(|p| p.to_string()).collect();
                write!(f, "finite({})", printed.join(","))
            }
        }
    }
}

/// Syntax or validation error, with the byte offset it was detected at.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    input: &'a str,
    tokens: Vec<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    fn tokenize(input: &'a str) -> Result<Self, ParseError> {
        let bytes = input.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'(' => {
                    tokens.push((Token::LParen, i));
                    i += 1;
                }
                b')' => {
                    tokens.push((Token::RParen, i));
                    i += 1;
                }
                b',' => {
                    tokens.push((Token::Comma, i));
                    i += 1;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text = &input[start..i];
                    match text.parse::<u64>() {
                        Ok(n) => tokens.push((Token::Nat(n), start)),
                        Err(_) => return err(start, format!("number `{text}` out of range")),
                    }
                }
                b'a'..=b'z' | b'A'..=b'Z' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    tokens.push((Token::Ident(input[start..i].to_string()), start));
                }
                _ => return err(i, format!("unexpected character `{}`", &input[i..i + 1])),
            }
        }
        Ok(Lexer { input, tokens })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    pos: usize,
}

enum Arg {
    Nat(u64, usize),
    Expr(SetExpr, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.lexer.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.lexer.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_position(&self) -> usize {
        self.lexer.input.len()
    }

    fn parse_expr(&mut self) -> Result<(SetExpr, usize), ParseError> {
        match self.next() {
            Some((Token::Ident(name), at)) => {
                let args = if matches!(self.peek(), Some((Token::LParen, _))) {
                    self.next();
                    let args = self.parse_args()?;
                    match self.next() {
                        Some((Token::RParen, _)) => {}
                        Some((_, p)) => return err(p, "expected `,` or `)`"),
                        None => return err(self.end_position(), "unexpected end of input"),
                    }
                    Some(args)
                } else {
                    None
                };
                Ok((self.build_node(&name, at, args)?, at))
            }
            Some((Token::Nat(_), at)) => {
                err(at, "expected a set expression, found a number")
            }
            Some((_, at)) => err(at, "expected an identifier"),
            None => err(self.end_position(), "unexpected end of input"),
        }
    }

    fn parse_args(&mut self) -> Result<Vec<Arg>, ParseError> {
        let mut args = Vec::new();
        loop {
            match self.peek() {
                Some((Token::Nat(n), at)) => {
                    args.push(Arg::Nat(*n, *at));
                    self.next();
                }
                Some((Token::Ident(_), _)) => {
                    let (e, at) = self.parse_expr()?;
                    args.push(Arg::Expr(e, at));
                }
                Some((_, p)) => return err(*p, "expected an argument"),
                None => return err(self.end_position(), "unexpected end of input"),
            }
            match self.peek() {
                Some((Token::Comma, _)) => {
                    self.next();
                }
                _ => return Ok(args),
            }
        }
    }

    fn build_node(
        &self,
        name: &str,
        at: usize,
        args: Option<Vec<Arg>>,
    ) -> Result<SetExpr, ParseError> {
        match name {
            "union" | "intersect" => {
                let args = match args {
                    Some(a) => a,
                    None => return err(at, format!("`{name}` requires arguments")),
                };
                if args.len() < 2 {
                    return err(at, format!("`{name}` expects at least 2 arguments"));
                }
                let mut children = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Arg::Expr(e, _) => children.push(e),
                        Arg::Nat(_, p) => {
                            return err(p, format!("`{name}` expects set arguments"))
                        }
                    }
                }
                Ok(if name == "union" {
                    SetExpr::Union(children)
                } else {
                    SetExpr::Intersect(children)
                })
            }
            "complement" => {
                let args = match args {
                    Some(a) => a,
                    None => return err(at, "`complement` requires arguments"),
                };
                if args.len() != 1 {
                    return err(at, "`complement` expects exactly 1 argument");
                }
                match args.into_iter().next().unwrap() {
                    Arg::Expr(e, _) => Ok(SetExpr::Complement(Box::new(e))),
                    Arg::Nat(_, p) => err(p, "`complement` expects a set argument"),
                }
            }
            "finite" => {
                let args = match args {
                    Some(a) => a,
                    None => return err(at, "`finite` requires arguments"),
                };
                let mut elems = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Arg::Nat(n, _) => elems.push(n),
                        Arg::Expr(_, p) => {
                            return err(p, "`finite` expects number arguments")
                        }
                    }
                }
                Ok(SetExpr::Finite(elems))
            }
            _ => {
                if !BUILTIN_NAMES.contains(&name) {
                    return err(at, format!("unknown identifier `{name}`"));
                }
                let params: Vec<u64> = match args {
                    None => Vec::new(),
                    Some(args) => {
                        let mut params = Vec::with_capacity(args.len());
                        for a in args {
                            match a {
                                Arg::Nat(n, _) => params.push(n),
                                Arg::Expr(_, p) => {
                                    return err(
                                        p,
                                        format!("`{name}` expects number parameters"),
                                    )
                                }
                            }
                        }
                        params
                    }
                };
                // Validate name and parameters against the catalog now so
                // every parsed tree evaluates cleanly.
                if let Err(e) = builtin(name, &params) {
                    return err(at, e.to_string());
                }
                Ok(SetExpr::Builtin {
                    name: name.to_string(),
                    params,
                })
            }
        }
    }
}

/// Parses the DSL into a [`SetExpr`], validating identifiers and
/// parameters against the builtin catalog.
pub fn parse_set_expr(input: &str) -> Result<SetExpr, ParseError> {
    let lexer = Lexer::tokenize(input)?;
    let mut parser = Parser { lexer, pos: 0 };
    let (expr, _) = parser.parse_expr()?;
    if let Some((_, p)) = parser.peek() {
        return err(*p, "trailing input after expression");
    }
    Ok(expr)
}

/// Evaluates an expression to a [`ComputableSet`] whose membership is the
/// pointwise boolean combination of its children. The result is named by
/// the canonical printing of the expression.
pub fn eval_expr(e: &SetExpr) -> Result<ComputableSet, SetError> {
    let set = match e {
        SetExpr::Builtin { name, params } => builtin(name, params)?,
        SetExpr::Finite(elems) => builtin("finite", elems)?,
        SetExpr::Complement(inner) => eval_expr(inner)?.complement(),
        SetExpr::Union(children) => {
            let mut sets = children.iter().map(eval_expr);
            let mut acc = sets.next().expect("union node has children")?;
            for s in sets {
                acc = acc.union(&s?);
            }
            acc
        }
        SetExpr::Intersect(children) => {
            let mut sets = children.iter().map(eval_expr);
            let mut acc = sets.next().expect("intersect node has children")?;
            for s in sets {
                acc = acc.intersect(&s?);
            }
            acc
        }
    };
    Ok(set.renamed(e.print()))
}

impl ComputableSet {
    pub(crate) fn renamed(mut self, name: String) -> Self {
        self.name = name;
        self
    }
}
