//! Sparse multivariate polynomials with complex coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<C64>) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c.into())])
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, [(e, C64::new(1.0, 0.0))])
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: C64) {
        let zero = C64::new(0.0, 0.0);
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                if c != zero {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == zero {
                    slot.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, 1.0), |acc, _| &acc * self)
    }

    pub fn partial(&self, i: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * e[i] as f64)
            }),
        )
    }

    /// Homogenize with a new variable in position 0.
    pub fn homogenize(&self, degree: u32) -> Self {
        Self::from_terms(
            self.nvars + 1,
            self.terms.iter().map(|(e, c)| {
                let mut h = Vec::with_capacity(self.nvars + 1);
                h.push(degree - e.iter().sum::<u32>());
                h.extend_from_slice(e);
                (h, *c)
            }),
        )
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        let pw = power_table(x, self.max_exponent());
        self.eval_with(&pw)
    }

    fn eval_with(&self, pw: &[Vec<C64>]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().enumerate().filter(|(_, k)| **k > 0).fold(*c, |acc, (i, &k)| acc * pw[i][k as usize])
            })
            .sum()
    }

    /// Value and gradient, accumulated into `grad`.
    fn eval_grad_with(&self, pw: &[Vec<C64>], grad: &mut [C64]) -> C64 {
        let mut value = C64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let nz: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
            let mono = nz.iter().fold(*c, |acc, &i| acc * pw[i][e[i] as usize]);
            value += mono;
            for &i in &nz {
                let rest = nz
                    .iter()
                    .filter(|&&j| j != i)
                    .fold(*c, |acc, &j| acc * pw[j][e[j] as usize]);
                grad[i] += rest * pw[i][e[i] as usize - 1] * e[i] as f64;
            }
        }
        value
    }
}

fn power_table(x: &[C64], max: u32) -> Vec<Vec<C64>> {
    x.iter()
        .map(|&xi| {
            let mut row = Vec::with_capacity(max as usize + 1);
            let mut acc = C64::new(1.0, 0.0);
            row.push(acc);
            for _ in 0..max {
                acc *= xi;
                row.push(acc);
            }
            row
        })
        .collect()
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly { (&self).$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// Ordered list of polynomials in a common set of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    nvars: usize,
    polys: Vec<MultiPoly>,
    max_exp: u32,
}

impl PolySystem {
    pub fn new(polys: Vec<MultiPoly>) -> Result<Self> {
        let nvars = polys.first().map(|p| p.nvars()).unwrap_or(0);
        if let Some(bad) = polys.iter().find(|p| p.nvars() != nvars) {
            return Err(Error::ShapeMismatch {
                expected: format!("{nvars} variables"),
                found: bad.nvars().to_string(),
            });
        }
        Ok(Self::with_vars(nvars, polys))
    }

    pub fn with_vars(nvars: usize, polys: Vec<MultiPoly>) -> Self {
        assert!(polys.iter().all(|p| p.nvars() == nvars));
        let max_exp = polys.iter().map(|p| p.max_exponent()).max().unwrap_or(0);
        Self { nvars, polys, max_exp }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn is_square(&self) -> bool {
        self.polys.len() == self.nvars
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[C64]) -> DVector<C64> {
        let pw = power_table(x, self.max_exp);
        DVector::from_iterator(self.polys.len(), self.polys.iter().map(|p| p.eval_with(&pw)))
    }

    pub fn eval_and_jacobian(&self, x: &[C64]) -> (DVector<C64>, DMatrix<C64>) {
        let pw = power_table(x, self.max_exp);
        let mut jac = DMatrix::zeros(self.polys.len(), self.nvars);
        let mut grad = vec![C64::new(0.0, 0.0); self.nvars];
        let mut val = DVector::zeros(self.polys.len());
        for (r, p) in self.polys.iter().enumerate() {
            grad.iter_mut().for_each(|g| *g = C64::new(0.0, 0.0));
            val[r] = p.eval_grad_with(&pw, &mut grad);
            for (c, g) in grad.iter().enumerate() {
                jac[(r, c)] = *g;
            }
        }
        (val, jac)
    }

    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        self.eval_and_jacobian(x).1
    }

    /// Each polynomial homogenized to its own degree; new variable first.
    pub fn homogenize(&self) -> Self {
        Self::with_vars(self.nvars + 1, self.polys.iter().map(|p| p.homogenize(p.degree())).collect())
    }

    /// `R·self` for a real or complex `k × len` matrix `R`.
    pub fn combine(&self, r: &DMatrix<C64>) -> Result<Self> {
        if r.ncols() != self.polys.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} columns", self.polys.len()),
                found: r.ncols().to_string(),
            });
        }
        let polys = r
            .row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.polys)
                    .fold(MultiPoly::zero(self.nvars), |acc, (c, p)| &acc + &p.scale(*c))
            })
            .collect();
        Ok(Self::with_vars(self.nvars, polys))
    }
}

/// Real univariate polynomial from coefficients, highest degree first.
pub fn univariate(coeffs_high_first: &[f64]) -> MultiPoly {
    let deg = coeffs_high_first.len().saturating_sub(1);
    MultiPoly::from_terms(
        1,
        coeffs_high_first
            .iter()
            .enumerate()
            .map(|(k, &c)| (vec![(deg - k) as u32], C64::new(c, 0.0))),
    )
}

pub fn norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn slice_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
