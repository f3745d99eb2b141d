//! Recursive-descent parser for scalar field expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := number | variable | 'pi' | func '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

use super::{BinaryOp, Expr, Function};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownVariable(String),
    UnknownFunction(String),
    Arity {
        function: String,
        expected: usize,
        found: usize,
    },
    Empty,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::InvalidNumber(t) => write!(f, "invalid number `{t}`"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::UnknownFunction(n) => write!(f, "unknown function `{n}`"),
            ParseErrorKind::Arity {
                function,
                expected,
                found,
            } => write!(
                f,
                "function `{function}` takes {expected} argument(s), found {found}"
            ),
            ParseErrorKind::Empty => write!(f, "empty expression"),
        }
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(n) => write!(f, "{n}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Comma => write!(f, ","),
        }
    }
}

fn err(kind: ParseErrorKind, offset: usize) -> ParseError {
    ParseError { kind, offset }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme
                .parse()
                .map_err(|_| err(ParseErrorKind::InvalidNumber(lexeme.into()), start))?;
            if !value.is_finite() {
                return Err(err(ParseErrorKind::InvalidNumber(lexeme.into()), start));
            }
            tokens.push((Token::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((Token::Ident(text[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Token::Op(c),
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            _ => {
                let ch = text[start..].chars().next().unwrap_or(c);
                return Err(err(ParseErrorKind::UnexpectedToken(ch.to_string()), start));
            }
        };
        tokens.push((tok, start));
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    num_vars: usize,
    _text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.tokens.get(self.pos) {
            Some((t, o)) => err(ParseErrorKind::UnexpectedToken(t.to_string()), *o),
            None => err(ParseErrorKind::UnexpectedEnd, self.end),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(
                BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.next() {
            Some((Token::Number(v), _)) => Ok(Expr::Number(v)),
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.unexpected()),
                }
            }
            Some((Token::Ident(name), _)) => {
                if let Some(Token::LParen) = self.peek() {
                    self.pos += 1;
                    self.call(name, offset)
                } else {
                    self.variable(&name, offset)
                }
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.unexpected())
            }
            None => Err(err(ParseErrorKind::UnexpectedEnd, self.end)),
        }
    }

    fn variable(&self, name: &str, offset: usize) -> Result<Expr, ParseError> {
        if name == "pi" {
            return Ok(Expr::Number(std::f64::consts::PI));
        }
        let index = name
            .strip_prefix('x')
            .or_else(|| name.strip_prefix('u'))
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0'))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= self.num_vars);
        match index {
            Some(k) => Ok(Expr::Var(k - 1)),
            None => Err(err(ParseErrorKind::UnknownVariable(name.into()), offset)),
        }
    }

    fn call(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        let function = Function::from_name(&name)
            .ok_or_else(|| err(ParseErrorKind::UnknownFunction(name.clone()), offset))?;
        let mut args = Vec::new();
        if let Some(Token::RParen) = self.peek() {
            self.pos += 1;
        } else {
            loop {
                args.push(self.expr()?);
                match self.peek() {
                    Some(Token::Comma) => self.pos += 1,
                    Some(Token::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected()),
                }
            }
        }
        if args.len() != 1 {
            return Err(err(
                ParseErrorKind::Arity {
                    function: name,
                    expected: 1,
                    found: args.len(),
                },
                offset,
            ));
        }
        Ok(Expr::Call(function, Box::new(args.pop().unwrap())))
    }
}

/// Parses `text` with variables `x1..x{num_vars}` (or `u1..u{num_vars}`).
pub fn parse(text: &str, num_vars: usize) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(err(ParseErrorKind::Empty, 0));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        num_vars,
        _text: text,
    };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}
