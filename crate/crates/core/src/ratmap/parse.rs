//! Map literals.
//!
//! ```text
//! zeros: 0@2, root(3,1)@1; poles: -1, 2.5-1i@3; scale: 2
//! num: [-1, 0, 0, 1]; den: [1, 0, 0, 1]
//! ```
//!
//! Complex literals are sums of real terms, imaginary terms (`2i`, `-i`)
//! and `root(n,j)`, the `j`-th `n`-th root of unity, optionally scaled as
//! `2*root(n,j)`. Multiplicities default to 1; `den` defaults to `[1]`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::map::{build_scaled, RationalMap};
use super::poly::Poly;
use super::RatmapError;

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, message: impl Into<String>) -> RatmapError {
        RatmapError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), RatmapError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn ident(&mut self) -> Result<&'a str, RatmapError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a section name"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn integer(&mut self) -> Result<u32, RatmapError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| RatmapError::Parse {
                position: start,
                message: "expected an integer".into(),
            })
    }

    /// Unsigned decimal with optional fraction and exponent.
    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        let digits = |cur: &mut Self| {
            let s = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.pos += 1;
            }
            cur.pos > s
        };
        let mut any = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            any |= digits(self);
        }
        if !any {
            self.pos = start;
            return None;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = mark;
            }
        }
        self.text[start..self.pos].parse().ok()
    }

    fn root_of_unity(&mut self) -> Result<Complex64, RatmapError> {
        self.expect(b'(')?;
        let n = self.integer()?;
        if n == 0 {
            return Err(self.error("root order must be positive"));
        }
        self.expect(b',')?;
        let j = self.integer()?;
        self.expect(b')')?;
        Ok(Complex64::from_polar(
            1.0,
            TAU * f64::from(j % n) / f64::from(n),
        ))
    }

    fn term(&mut self) -> Result<Complex64, RatmapError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with("root") {
            self.pos += 4;
            return self.root_of_unity();
        }
        let value = self.number();
        self.skip_ws();
        match (value, self.peek()) {
            (Some(v), Some(b'i')) => {
                self.pos += 1;
                Ok(Complex64::new(0.0, v))
            }
            (None, Some(b'i')) => {
                self.pos += 1;
                Ok(Complex64::new(0.0, 1.0))
            }
            (Some(v), Some(b'*')) => {
                self.pos += 1;
                self.skip_ws();
                if !self.text[self.pos..].starts_with("root") {
                    return Err(self.error("expected root(n,j) after '*'"));
                }
                self.pos += 4;
                Ok(self.root_of_unity()? * v)
            }
            (Some(v), _) => Ok(Complex64::new(v, 0.0)),
            (None, _) => Err(self.error("expected a complex number")),
        }
    }

    fn complex(&mut self) -> Result<Complex64, RatmapError> {
        let mut total = Complex64::default();
        let mut first = true;
        loop {
            self.skip_ws();
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1.0
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1.0
                }
                _ if first => 1.0,
                _ => return Ok(total),
            };
            total += self.term()? * sign;
            first = false;
        }
    }

    fn located_list(&mut self) -> Result<Vec<(Complex64, u32)>, RatmapError> {
        let mut out = Vec::new();
        self.skip_ws();
        if matches!(self.peek(), None | Some(b';')) {
            return Ok(out);
        }
        loop {
            let z = self.complex()?;
            let m = if self.eat(b'@') { self.integer()? } else { 1 };
            out.push((z, m));
            if !self.eat(b',') {
                return Ok(out);
            }
        }
    }

    fn coefficient_list(&mut self) -> Result<Poly, RatmapError> {
        self.expect(b'[')?;
        let mut coeffs = Vec::new();
        if !self.eat(b']') {
            loop {
                coeffs.push(self.complex()?);
                if self.eat(b']') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        Ok(Poly::new(coeffs))
    }
}

/// Parses either the factored form or the coefficient form.
pub fn parse_map(text: &str) -> Result<RationalMap, RatmapError> {
    let mut cur = Cursor { text, pos: 0 };
    let mut zeros = None;
    let mut poles = None;
    let mut scale = None;
    let mut num = None;
    let mut den = None;
    while !cur.at_end() {
        let start = cur.pos;
        let name = cur.ident()?;
        cur.expect(b':')?;
        let duplicate = || RatmapError::Parse {
            position: start,
            message: format!("section {name} given twice"),
        };
        match name {
            "zeros" if zeros.is_none() => zeros = Some(cur.located_list()?),
            "poles" if poles.is_none() => poles = Some(cur.located_list()?),
            "scale" if scale.is_none() => scale = Some(cur.complex()?),
            "num" if num.is_none() => num = Some(cur.coefficient_list()?),
            "den" if den.is_none() => den = Some(cur.coefficient_list()?),
            "zeros" | "poles" | "scale" | "num" | "den" => return Err(duplicate()),
            _ => {
                return Err(RatmapError::Parse {
                    position: start,
                    message: format!("unknown section {name:?}"),
                })
            }
        }
        if !cur.at_end() {
            cur.expect(b';')?;
        }
    }
    let factored = zeros.is_some() || poles.is_some() || scale.is_some();
    if factored && (num.is_some() || den.is_some()) {
        return Err(RatmapError::Parse {
            position: 0,
            message: "mix of factored and coefficient sections".into(),
        });
    }
    match num {
        _ if factored => build_scaled(
            scale.unwrap_or(Complex64::new(1.0, 0.0)),
            &zeros.unwrap_or_default(),
            &poles.unwrap_or_default(),
        ),
        Some(num) => RationalMap::from_coefficients(num, den.unwrap_or_else(Poly::one)),
        None => Err(RatmapError::Parse {
            position: cur.pos,
            message: "expected zeros/poles or num/den sections".into(),
        }),
    }
}
