//! Text format for pure states, e.g. `(0.5+0.5i)|01> - 1/sqrt(2)|10>`.
//!
//! ```text
//! expr   := sign? term (sign term)*
//! term   := coeff? ket | coeff '*'? ket
//! ket    := '|' [01]+ '>'
//! coeff  := number | number 'i' | 'i' | '(' sign? number (sign number 'i')? ')'
//!         | number '/sqrt(' uint ')'
//! ```
//!
//! Whitespace between tokens is ignored. A leading or separating sign is
//! folded into the following coefficient. Duplicate kets are kept as written
//! and summed when the expression becomes a state.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::Result;
use crate::qstate::{make_state, BasisIndex, PureState};

/// Parse failure at a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Coefficient as written, with any preceding sign applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coeff {
    Real(f64),
    Imag(f64),
    Complex {
        re: f64,
        im: f64,
    },
    /// `num / sqrt(radicand)`.
    InvSqrt {
        num: f64,
        radicand: u64,
    },
}

impl Coeff {
    pub fn value(&self) -> Complex64 {
        match *self {
            Coeff::Real(x) => Complex64::new(x, 0.0),
            Coeff::Imag(y) => Complex64::new(0.0, y),
            Coeff::Complex { re, im } => Complex64::new(re, im),
            Coeff::InvSqrt { num, radicand } => Complex64::new(num / (radicand as f64).sqrt(), 0.0),
        }
    }

    fn negated(self) -> Self {
        match self {
            Coeff::Real(x) => Coeff::Real(-x),
            Coeff::Imag(y) => Coeff::Imag(-y),
            Coeff::Complex { re, im } => Coeff::Complex { re: -re, im: -im },
            Coeff::InvSqrt { num, radicand } => Coeff::InvSqrt { num: -num, radicand },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KetTerm {
    pub coeff: Coeff,
    pub bits: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KetExpression {
    pub terms: Vec<KetTerm>,
    pub n: usize,
}

impl KetExpression {
    /// `(coefficient value, bits)` per term, in written order.
    pub fn values(&self) -> Vec<(Complex64, &str)> {
        self.terms.iter().map(|t| (t.coeff.value(), t.bits.as_str())).collect()
    }

    /// Normalized state with duplicate kets summed.
    pub fn to_state(&self) -> Result<PureState> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((BasisIndex::from_bits(&t.bits)?, t.coeff.value())))
            .collect::<Result<Vec<_>>>()?;
        make_state(self.n, &terms)
    }

    /// Expression listing every nonzero amplitude of `state`.
    pub fn from_state(state: &PureState) -> Self {
        let terms = state
            .terms(0.0)
            .into_iter()
            .map(|(b, a)| KetTerm {
                coeff: Coeff::Complex { re: a.re, im: a.im },
                bits: b.bits(),
            })
            .collect();
        KetExpression { terms, n: state.n() }
    }
}

/// Canonical printer: `(re+imi)|bits>` joined by ` + `, with shortest
/// round-trip decimals so that re-parsing reproduces the values exactly.
impl fmt::Display for KetExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let z = t.coeff.value();
            let sign = if z.im.is_sign_negative() { '-' } else { '+' };
            write!(f, "({}{}{}i)|{}>", z.re, sign, z.im.abs(), t.bits)?;
        }
        Ok(())
    }
}

pub fn parse_ket(text: &str) -> std::result::Result<KetExpression, ParseError> {
    Parser {
        s: text.as_bytes(),
        pos: 0,
    }
    .expr()
}

/// Parses `text` and builds the state.
pub fn parse_state(text: &str) -> Result<PureState> {
    parse_ket(text)?.to_state()
}

/// One entry per non-blank, non-comment line: `(1-based line number, text, result)`.
/// Anything after `#` is a comment.
pub fn parse_lines(text: &str) -> Vec<(usize, String, std::result::Result<KetExpression, ParseError>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| (i + 1, body.to_string(), parse_ket(body)))
        })
        .collect()
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, at: usize, msg: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(ParseError {
            offset: at,
            message: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> std::result::Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(false)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn expr(mut self) -> std::result::Result<KetExpression, ParseError> {
        if self.peek().is_none() {
            return self.err(self.pos, "empty expression");
        }
        let mut terms = vec![];
        let mut negate = self.sign().unwrap_or(false);
        loop {
            self.skip_ws();
            let start = self.pos;
            let mut term = self.term()?;
            if negate {
                term.coeff = term.coeff.negated();
            }
            if let Some(first) = terms.first().map(|t: &KetTerm| t.bits.len()) {
                if term.bits.len() != first {
                    return self.err(start, format!("ket has {} qubits, expected {first}", term.bits.len()));
                }
            } else if term.bits.len() < 2 {
                return self.err(start, "at least 2 qubits required");
            }
            terms.push(term);
            match self.peek() {
                None => break,
                Some(_) => match self.sign() {
                    Some(neg) => negate = neg,
                    None => return self.err(self.pos, "expected '+', '-' or end of input"),
                },
            }
        }
        let n = terms[0].bits.len();
        Ok(KetExpression { terms, n })
    }

    fn term(&mut self) -> std::result::Result<KetTerm, ParseError> {
        let coeff = if self.peek() == Some(b'|') {
            Coeff::Real(1.0)
        } else {
            let c = self.coeff()?;
            self.eat(b'*');
            c
        };
        let bits = self.ket()?;
        Ok(KetTerm { coeff, bits })
    }

    fn ket(&mut self) -> std::result::Result<String, ParseError> {
        self.expect(b'|')?;
        let start = self.pos;
        while matches!(self.s.get(self.pos), Some(b'0' | b'1')) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, "empty or malformed ket");
        }
        let bits = std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .to_string();
        if self.s.get(self.pos) != Some(&b'>') {
            return self.err(self.pos, "expected '>' closing the ket");
        }
        self.pos += 1;
        Ok(bits)
    }

    fn coeff(&mut self) -> std::result::Result<Coeff, ParseError> {
        match self.peek() {
            Some(b'i') => {
                self.pos += 1;
                Ok(Coeff::Imag(1.0))
            }
            Some(b'(') => {
                self.pos += 1;
                let neg = self.sign() == Some(true);
                let first = self.number()?;
                let first = if neg { -first } else { first };
                if self.eat(b'i') {
                    self.expect(b')')?;
                    return Ok(Coeff::Complex { re: 0.0, im: first });
                }
                if self.eat(b')') {
                    return Ok(Coeff::Complex { re: first, im: 0.0 });
                }
                let at = self.pos;
                let Some(neg) = self.sign() else {
                    return self.err(at, "expected sign, 'i' or ')'");
                };
                let im = self.number()?;
                if !self.eat(b'i') {
                    return self.err(self.pos, "expected 'i' after imaginary part");
                }
                self.expect(b')')?;
                Ok(Coeff::Complex {
                    re: first,
                    im: if neg { -im } else { im },
                })
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let x = self.number()?;
                if self.eat(b'i') {
                    return Ok(Coeff::Imag(x));
                }
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if !self.s[self.pos..].starts_with(b"sqrt") {
                        return self.err(self.pos, "expected 'sqrt' after '/'");
                    }
                    self.pos += 4;
                    self.expect(b'(')?;
                    let at = self.peek().map(|_| self.pos).unwrap_or(self.pos);
                    let start = self.pos;
                    while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                        self.pos += 1;
                    }
                    let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
                    let radicand: u64 = match digits.parse() {
                        Ok(r) if r > 0 => r,
                        _ => return self.err(at, "expected a positive integer under sqrt"),
                    };
                    self.expect(b')')?;
                    return Ok(Coeff::InvSqrt { num: x, radicand });
                }
                Ok(Coeff::Real(x))
            }
            Some(_) => self.err(self.pos, "expected coefficient or ket"),
            None => self.err(self.pos, "unexpected end of input"),
        }
    }

    fn number(&mut self) -> std::result::Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let from = p.pos;
            while p.s.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
            p.pos - from
        };
        let mut count = digits(self);
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return self.err(start, "malformed number");
        }
        if matches!(self.s.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.s.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return self.err(save, "malformed exponent");
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => self.err(start, format!("number '{text}' is not a finite value")),
        }
    }
}
