//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := var | number | '(' expr ')'
//! number := float ('i')? | float ('+'|'-') float 'i'
//! ```
//!
//! Whitespace is insignificant. A leading sign is accepted at the start of
//! an `expr` (including inside parentheses). A complex literal binds as a
//! single `number`, so `1+2i^2` is `(1+2i)^2`.

use num_complex::Complex64;
use thiserror::Error;

use super::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    BadExponent(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", self.describe())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
}

impl ParseError {
    fn describe(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => format!("syntax error at {}: {msg}", self.position),
            ParseErrorKind::UnknownVariable(name) => {
                format!("unknown variable `{name}` at {}", self.position)
            }
            ParseErrorKind::BadExponent(msg) => {
                format!("bad exponent at {}: {msg}", self.position)
            }
        }
    }
}

/// Parses `text` as a polynomial in the ordered variables `variables`.
pub fn parse_poly<S: AsRef<str>>(text: &str, variables: &[S]) -> Result<Poly, ParseError> {
    let names: Vec<&str> = variables.iter().map(|s| s.as_ref()).collect();
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names: &names,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl<'a> Parser<'a> {
    fn n(&self) -> usize {
        self.names.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax(msg.into()),
            position: self.pos,
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        self.skip_ws();
        let negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            return Err(ParseError {
                kind: ParseErrorKind::BadExponent("negative exponent".into()),
                position: start,
            });
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected a non-negative integer exponent"));
        }
        if matches!(self.peek(), Some(b'.' | b'e' | b'E')) {
            return Err(ParseError {
                kind: ParseErrorKind::BadExponent("non-integer exponent".into()),
                position: start,
            });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let k: u32 = digits.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::BadExponent(format!("exponent `{digits}` too large")),
            position: start,
        })?;
        Ok(base.pow(k))
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let c = self.number()?;
                Ok(Poly::constant(self.n(), c))
            }
            Some(b) if is_ident_start(b) => {
                let start = self.pos;
                while matches!(self.peek(), Some(b) if is_ident_char(b)) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.names.iter().position(|v| *v == name) {
                    Some(i) => Ok(Poly::var(self.n(), i)),
                    None => Err(ParseError {
                        kind: ParseErrorKind::UnknownVariable(name.to_string()),
                        position: start,
                    }),
                }
            }
            Some(b) => Err(self.syntax(format!("unexpected `{}`", b as char))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    /// Consumes an unsigned float; returns `None` (without consuming) if
    /// there is none at the cursor.
    fn float(&mut self) -> Option<f64> {
        let start = self.pos;
        let mut mantissa_digits = 0;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
            mantissa_digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
                mantissa_digits += 1;
            }
        }
        if mantissa_digits == 0 {
            self.pos = start;
            return None;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
    }

    /// Consumes an imaginary-unit suffix `i` that is not the start of an
    /// identifier.
    fn imaginary_suffix(&mut self) -> bool {
        let save = self.pos;
        self.skip_ws();
        if self.peek() == Some(b'i')
            && !matches!(self.src.get(self.pos + 1), Some(&b) if is_ident_char(b))
        {
            self.pos += 1;
            true
        } else {
            self.pos = save;
            false
        }
    }

    fn number(&mut self) -> Result<Complex64, ParseError> {
        let re = self.float().ok_or_else(|| self.syntax("malformed number"))?;
        if self.imaginary_suffix() {
            return Ok(Complex64::new(0.0, re));
        }
        // float ('+'|'-') float 'i'
        let save = self.pos;
        self.skip_ws();
        let sign = match self.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => {
                self.pos = save;
                return Ok(Complex64::new(re, 0.0));
            }
        };
        self.pos += 1;
        self.skip_ws();
        if let Some(im) = self.float() {
            if self.imaginary_suffix() {
                return Ok(Complex64::new(re, sign * im));
            }
        }
        self.pos = save;
        Ok(Complex64::new(re, 0.0))
    }
}
