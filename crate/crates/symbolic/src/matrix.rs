use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::ring::{RationalPoly, Ring};
use crate::{Error, Result};

/// Dense row-major matrix of polynomials over one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<RationalPoly>,
}

impl PolyMatrix {
    pub fn new(ring: Ring, rows: usize, cols: usize, entries: Vec<RationalPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape { expected: rows * cols, found: entries.len() });
        }
        if entries.iter().any(|e| *e.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        Ok(PolyMatrix { ring, rows, cols, entries })
    }

    pub fn from_rows(ring: Ring, rows: Vec<Vec<RationalPoly>>) -> Result<Self> {
        let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Shape { expected: c, found: bad.len() });
        }
        Self::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &RationalPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[RationalPoly] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone())).collect();
        PolyMatrix { ring: self.ring.clone(), rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn eval(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|e| e.eval(point)).collect()).collect()
    }
}

pub fn determinant(m: &PolyMatrix) -> Result<RationalPoly> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let rows: Vec<Vec<RationalPoly>> = (0..n).map(|r| m.row(r).to_vec()).collect();
    Ok(if n <= 4 { cofactor(&m.ring, &rows) } else { bareiss(&m.ring, rows) })
}

/// Laplace expansion along the first row, skipping zero entries.
fn cofactor(ring: &Ring, a: &[Vec<RationalPoly>]) -> RationalPoly {
    match a.len() {
        0 => ring.int(1),
        1 => a[0][0].clone(),
        n => {
            let mut det = ring.zero();
            for (c, e) in a[0].iter().enumerate().filter(|(_, e)| !e.is_zero()) {
                let minor: Vec<Vec<RationalPoly>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect())
                    .collect();
                let t = e * &cofactor(ring, &minor);
                det = if c % 2 == 0 { det + t } else { det - t };
            }
            debug_assert_eq!(a.len(), n);
            det
        }
    }
}

/// Fraction-free elimination; each division by the previous pivot is exact.
fn bareiss(ring: &Ring, mut a: Vec<Vec<RationalPoly>>) -> RationalPoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = ring.int(1);
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return ring.zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = ring.zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: RationalPoly,
}

impl Minor {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// All `r×r` minors; row subsets outer, column subsets inner, both ascending.
#[derive(Clone, Debug)]
pub struct MinorSet {
    pub size: usize,
    pub minors: Vec<Minor>,
}

impl MinorSet {
    pub fn len(&self) -> usize {
        self.minors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minors.is_empty()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Minor> {
        self.minors.iter().filter(|m| !m.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero().count()
    }

    /// Positions of identically zero minors.
    pub fn zero_indices(&self) -> Vec<usize> {
        self.minors.iter().positions(Minor::is_zero).collect()
    }

    /// Nonzero minors counted once per polynomial up to sign.
    pub fn distinct_nonzero_count(&self) -> usize {
        let mut seen: Vec<String> = self
            .nonzero()
            .map(|m| {
                let s = m.value.to_string();
                let n = (-&m.value).to_string();
                if s <= n { s } else { n }
            })
            .collect();
        seen.sort();
        seen.dedup();
        seen.len()
    }

    pub fn values(&self) -> Vec<RationalPoly> {
        self.minors.iter().map(|m| m.value.clone()).collect()
    }
}

pub fn symbolic_minors(m: &PolyMatrix, r: usize) -> Result<MinorSet> {
    if r == 0 || r > m.rows.min(m.cols) {
        return Err(Error::MinorSize { r, rows: m.rows, cols: m.cols });
    }
    let index: Vec<(Vec<usize>, Vec<usize>)> = (0..m.rows)
        .combinations(r)
        .cartesian_product((0..m.cols).combinations(r).collect::<Vec<_>>())
        .collect();
    let minors = index
        .into_par_iter()
        .map(|(rows, cols)| {
            let value = determinant(&m.submatrix(&rows, &cols))?;
            Ok(Minor { rows, cols, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MinorSet { size: r, minors })
}

/// Determinant of a rational matrix by Gaussian elimination.
pub fn rational_determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::from_integer(1.into());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let d = &a[k][j] * &f;
                a[i][j] -= d;
            }
        }
    }
    det
}
