use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::order::{self, MonomialOrder};
use crate::{Error, Result};

pub type Monomial = Vec<u32>;

/// An ordered list of variable names; the first name is the largest variable.
#[derive(Clone, Debug, Eq)]
pub struct Ring {
    vars: Arc<[String]>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ring {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vars: Vec<String> = names.into_iter().map(Into::into).collect();
        for (k, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::InvalidVariables(format!("`{v}` is not an identifier")));
            }
            if vars[..k].contains(v) {
                return Err(Error::InvalidVariables(format!("`{v}` repeated")));
            }
        }
        Ok(Ring { vars: vars.into() })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn zero(&self) -> RationalPoly {
        RationalPoly { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(&self, c: BigRational) -> RationalPoly {
        let mut p = self.zero();
        p.add_term(vec![0; self.nvars()], c);
        p
    }

    pub fn int(&self, c: i64) -> RationalPoly {
        self.constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn gen(&self, i: usize) -> RationalPoly {
        let mut m = vec![0; self.nvars()];
        m[i] = 1;
        self.monomial(m, BigRational::one())
    }

    pub fn var(&self, name: &str) -> Result<RationalPoly> {
        self.index(name).map(|i| self.gen(i)).ok_or_else(|| Error::UnknownVariable(name.into()))
    }

    pub fn monomial(&self, m: Monomial, c: BigRational) -> RationalPoly {
        assert_eq!(m.len(), self.nvars(), "exponent vector length");
        let mut p = self.zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(&self, terms: I) -> RationalPoly
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = self.zero();
        for (m, c) in terms {
            assert_eq!(m.len(), self.nvars(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }
}

/// A polynomial with exact rational coefficients. Zero coefficients are never
/// stored; `BigRational` keeps every coefficient in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    ring: Ring,
    terms: BTreeMap<Monomial, BigRational>,
}

impl RationalPoly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lex order of their exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Terms sorted in descending `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &BigRational)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| order.cmp(b.0, a.0));
        t
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| order::degree(m)).max()
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &BigRational)> {
        leading(&self.terms, order)
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&(BigRational::one() / c)),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        RationalPoly { ring: self.ring.clone(), terms }
    }

    /// `self · c · x^m`.
    pub fn mul_term(&self, m: &[u32], c: &BigRational) -> Self {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(k, v)| (order::product(k, m), v * c)).collect();
        RationalPoly { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.ring.int(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.ring.nvars(), "point dimension");
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &RationalPoly) -> Option<Self> {
        self.check_ring(d).ok()?;
        let o = MonomialOrder::Lex;
        let (dm, dc) = d.leading_term(o)?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rest = self.terms.clone();
        let mut q = self.ring.zero();
        while let Some((m, c)) = rest.pop_last() {
            if !order::divides(&dm, &m) {
                return None;
            }
            let s = order::quotient(&m, &dm);
            let f = c / &dc;
            for (gm, gc) in d.terms.iter().filter(|(gm, _)| **gm != dm) {
                add_into(&mut rest, order::product(gm, &s), -(gc * &f));
            }
            q.add_term(s, f);
        }
        Some(q)
    }

    pub(crate) fn check_ring(&self, other: &RationalPoly) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        add_into(&mut self.terms, m, c);
    }
}

pub(crate) fn add_into(terms: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub(crate) fn leading(
    terms: &BTreeMap<Monomial, BigRational>,
    order: MonomialOrder,
) -> Option<(&Monomial, &BigRational)> {
    match order {
        MonomialOrder::Lex => terms.last_key_value(),
        _ => terms.iter().max_by(|a, b| order.cmp(a.0, b.0)),
    }
}

fn combine(a: &RationalPoly, b: &RationalPoly, sign: bool) -> RationalPoly {
    a.check_ring(b).expect("polynomials from different rings");
    let mut out = a.clone();
    for (m, c) in &b.terms {
        add_into(&mut out.terms, m.clone(), if sign { c.clone() } else { -c.clone() });
    }
    out
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        combine(self, rhs, true)
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        combine(self, rhs, false)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        self.check_ring(rhs).expect("polynomials from different rings");
        let mut out = self.ring.zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(order::product(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&-BigRational::one())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $f(self, rhs: RationalPoly) -> RationalPoly { (&self).$f(&rhs) }
        }
        impl $tr<&RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $f(self, rhs: &RationalPoly) -> RationalPoly { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &[String], m: &[u32]) -> fmt::Result {
    let mut first = true;
    for (v, &e) in vars.iter().zip(m) {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(v)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Plain ASCII, terms in descending degrevlex order: `x21^2*x32 - 3/4*x41`.
impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms(MonomialOrder::DegRevLex).into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let constant = m.iter().all(|&e| e == 0);
            if constant {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, &self.ring.vars, m)?;
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let r = Ring::new(["x", "y"]).unwrap();
        let x = r.gen(0);
        let y = r.gen(1);
        let f = &x + &y;
        let g = &x - &y;
        assert_eq!((&f * &g).len(), 2);
        assert!((&f - &f).is_zero());
        assert_eq!((&f * &g).to_string(), "x^2 - y^2");
    }

    #[test]
    fn display_rationals() {
        let r = Ring::new(["x21", "x32", "x41"]).unwrap();
        let f = r.from_terms([(vec![2, 1, 0], q(1, 1)), (vec![0, 0, 1], q(-3, 4)), (vec![0, 0, 0], q(5, 2))]);
        assert_eq!(f.to_string(), "x21^2*x32 - 3/4*x41 + 5/2");
        assert_eq!((-f).to_string(), "-x21^2*x32 + 3/4*x41 - 5/2");
        assert_eq!(r.zero().to_string(), "0");
    }

    #[test]
    fn exact_division() {
        let r = Ring::new(["x", "y"]).unwrap();
        let a = &r.gen(0) + &r.int(2);
        let b = &r.gen(1) - &r.gen(0);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(p.div_exact(&(&r.gen(0) + &r.int(3))).is_none());
    }

    #[test]
    fn rejects_bad_names() {
        assert!(Ring::new(["x", "x"]).is_err());
        assert!(Ring::new(["1x"]).is_err());
    }
}
