//! Plain-ASCII polynomial syntax: `+ - * / ^`, parentheses, integer and
//! decimal literals, identifiers. Division is only by nonzero constants.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ring::{is_identifier, RationalPoly, Ring};
use crate::{Error, Result};

pub const MAX_DEPTH: usize = 64;
pub const MAX_EXPONENT: u32 = 64;
pub const MAX_TERMS: usize = 20_000;
pub const MAX_DEGREE: u64 = 4096;
/// Bound on term pairs formed by a single multiplication.
const MAX_PRODUCT: usize = 1_000_000;
pub const MAX_INPUT: usize = 1 << 20;

impl Ring {
    pub fn parse(&self, input: &str) -> Result<RationalPoly> {
        if input.len() > MAX_INPUT {
            return Err(Error::Parse { pos: MAX_INPUT, message: "input too long".into() });
        }
        let mut p = Parser { ring: self, src: input.as_bytes(), pos: 0, depth: 0 };
        p.skip_ws();
        let f = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.fail("unexpected trailing input");
        }
        Ok(f)
    }
}

/// Identifiers appearing in `input`, sorted and deduplicated.
pub fn identifiers(input: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let b = input.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_alphabetic() || b[i] == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.insert(input[start..i].to_string());
        } else if b[i].is_ascii_digit() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                i += 1;
            }
        } else {
            i += 1;
        }
    }
    out
}

/// Parses `input` in the ring of its own identifiers, sorted by name.
pub fn parse_poly(input: &str) -> Result<RationalPoly> {
    Ring::new(identifiers(input))?.parse(input)
}

/// Parses several polynomials into one ring built from all their identifiers.
pub fn parse_polys<S: AsRef<str>>(inputs: &[S]) -> Result<(Ring, Vec<RationalPoly>)> {
    let names: BTreeSet<String> = inputs.iter().flat_map(|s| identifiers(s.as_ref())).collect();
    let ring = Ring::new(names)?;
    let polys = inputs.iter().map(|s| ring.parse(s.as_ref())).collect::<Result<_>>()?;
    Ok((ring, polys))
}

struct Parser<'a> {
    ring: &'a Ring,
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
        self.skip_ws();
    }

    fn guard(&self, f: RationalPoly) -> Result<RationalPoly> {
        if f.len() > MAX_TERMS {
            return self.fail("too many terms");
        }
        if f.total_degree().unwrap_or(0) > MAX_DEGREE {
            return self.fail("degree too large");
        }
        Ok(f)
    }

    fn mul(&self, a: &RationalPoly, b: &RationalPoly) -> Result<RationalPoly> {
        if a.len().saturating_mul(b.len()) > MAX_PRODUCT {
            return self.fail("product too large");
        }
        self.guard(a * b)
    }

    fn expr(&mut self) -> Result<RationalPoly> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.bump();
            let rhs = self.term()?;
            acc = self.guard(if op == b'+' { acc + rhs } else { acc - rhs })?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalPoly> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.bump();
            let at = self.pos;
            let rhs = self.unary()?;
            if op == b'*' {
                acc = self.mul(&acc, &rhs)?;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(Error::Parse { pos: at, message: "division by a non-constant or zero".into() });
                }
                let c = rhs.coefficient(&vec![0; self.ring.nvars()]);
                acc = acc.scale(&(BigRational::one() / c));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalPoly> {
        match self.peek() {
            Some(b'-') => {
                self.bump();
                self.nested(|p| p.unary()).map(|f| -f)
            }
            Some(b'+') => {
                self.bump();
                self.nested(|p| p.unary())
            }
            _ => self.power(),
        }
    }

    fn nested(&mut self, f: impl FnOnce(&mut Self) -> Result<RationalPoly>) -> Result<RationalPoly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("nesting too deep");
        }
        let out = f(self);
        self.depth -= 1;
        out
    }

    fn power(&mut self) -> Result<RationalPoly> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.bump();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("expected exponent");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let e: u32 = match digits.parse() {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => return Err(Error::Parse { pos: start, message: format!("exponent above {MAX_EXPONENT}") }),
        };
        self.skip_ws();
        let mut acc = self.ring.int(1);
        for _ in 0..e {
            acc = self.mul(&acc, &base)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<RationalPoly> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.nested(|p| p.expr())?;
                if self.peek() != Some(b')') {
                    return self.fail("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                debug_assert!(is_identifier(name));
                let v = self.ring.var(name)?;
                self.skip_ws();
                Ok(v)
            }
            Some(_) => self.fail("unexpected character"),
            None => self.fail("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<RationalPoly> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let mut text = String::from_utf8(self.src[start..self.pos].to_vec()).expect("ascii digits");
        let mut scale = 0usize;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let frac = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            scale = self.pos - frac;
            text.push_str(std::str::from_utf8(&self.src[frac..self.pos]).expect("ascii digits"));
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_') {
            return self.fail("identifier cannot start with a digit");
        }
        self.skip_ws();
        let num: BigInt = text.parse().expect("nonempty digit string");
        let den = num_traits::pow(BigInt::from(10), scale);
        let c = BigRational::new(num, den);
        Ok(if c.is_zero() { self.ring.zero() } else { self.ring.constant(c) })
    }
}
