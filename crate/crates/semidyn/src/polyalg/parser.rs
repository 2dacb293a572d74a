//! Expression grammar for polynomial input.
//!
//! Variables `z1..z9`; complex literals `a`, `bi`, `(a+bi)`; operators
//! `+ - * ^` with `^` taking a nonnegative integer power; standard
//! precedence; whitespace insignificant. Example: `(0.25)*z1 - z2^2`.

use super::{MultiPoly, PolyError};
use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Imaginary(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Token, usize, usize), ParseError> {
        while matches!(
            self.peek(),
            Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
        ) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek() else {
            return Ok((Token::End, line, col));
        };
        let tok = match b {
            b'+' => {
                self.bump();
                Token::Plus
            }
            b'-' => {
                self.bump();
                Token::Minus
            }
            b'*' => {
                self.bump();
                Token::Star
            }
            b'^' => {
                self.bump();
                Token::Caret
            }
            b'(' => {
                self.bump();
                Token::LParen
            }
            b')' => {
                self.bump();
                Token::RParen
            }
            b'i' => {
                self.bump();
                Token::Imaginary(1.0)
            }
            b'z' => {
                self.bump();
                match self.peek() {
                    Some(d @ b'1'..=b'9') => {
                        self.bump();
                        Token::Var((d - b'1') as usize)
                    }
                    _ => return Err(self.error("expected digit 1-9 after 'z'")),
                }
            }
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9') | Some(b'.')) {
                    self.bump();
                }
                // Optional exponent part.
                if matches!(self.peek(), Some(b'e') | Some(b'E')) {
                    let save = (self.pos, self.line, self.col);
                    self.bump();
                    if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                        self.bump();
                    }
                    if matches!(self.peek(), Some(b'0'..=b'9')) {
                        while matches!(self.peek(), Some(b'0'..=b'9')) {
                            self.bump();
                        }
                    } else {
                        (self.pos, self.line, self.col) = save;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    line,
                    col,
                    message: format!("malformed number literal '{text}'"),
                })?;
                if self.peek() == Some(b'i') {
                    self.bump();
                    Token::Imaginary(value)
                } else {
                    Token::Number(value)
                }
            }
            other => {
                return Err(self.error(format!("unexpected character '{}'", other as char)));
            }
        };
        Ok((tok, line, col))
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.tokens[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := unary ('*' unary)*
    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Token::Star {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    // power := atom ('^' uint)*
    fn power(&mut self) -> Result<MultiPoly, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Token::Caret {
            self.bump();
            let (line, col) = self.here();
            match self.bump() {
                Token::Number(v) => {
                    if v.fract() != 0.0 || !(0.0..=4096.0).contains(&v) {
                        return Err(ParseError {
                            line,
                            col,
                            message: format!(
                                "exponent must be a nonnegative integer <= 4096, got {v}"
                            ),
                        });
                    }
                    base = base.pow(v as u32);
                }
                other => {
                    return Err(ParseError {
                        line,
                        col,
                        message: format!(
                            "expected nonnegative integer exponent after '^', found {other:?}"
                        ),
                    });
                }
            }
        }
        Ok(base)
    }

    // atom := NUMBER | NUMBERi | VAR | '(' expr ')'
    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        match self.bump() {
            Token::Number(v) => Ok(MultiPoly::constant(self.nvars, Complex64::new(v, 0.0))),
            Token::Imaginary(v) => Ok(MultiPoly::constant(self.nvars, Complex64::new(0.0, v))),
            Token::Var(idx) => MultiPoly::variable(self.nvars, idx).map_err(|e| match e {
                PolyError::IndexOutOfRange { var, nvars } => {
                    self.error(format!("variable z{} exceeds dimension {nvars}", var + 1))
                }
                other => self.error(other.to_string()),
            }),
            Token::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Token::RParen => Ok(inner),
                    _ => Err(self.error("expected ')'")),
                }
            }
            other => Err(self.error(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse one polynomial expression in `nvars` variables.
pub fn parse_polynomial(src: &str, nvars: usize) -> Result<MultiPoly, ParseError> {
    let mut lexer = Lexer::new(src);
    let mut tokens = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let end = t.0 == Token::End;
        tokens.push(t);
        if end {
            break;
        }
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        nvars,
    };
    let poly = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("trailing input after expression"));
    }
    Ok(poly)
}
