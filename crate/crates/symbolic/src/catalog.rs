//! Structured matrices from graphs and the bundled example ideals.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::matrix::{symbolic_minors, PolyMatrix};
use crate::ring::{RationalPoly, Ring};
use crate::{Error, Result};

const SLINGSHOT_MATRIX: &str = include_str!("../data/slingshot_matrix.txt");
const SLINGSHOT_MINOR: &str = include_str!("../data/slingshot_minor.txt");
const SLINGSHOT_MEMBERS: &str = include_str!("../data/slingshot_members.txt");
const SLINGSHOT_PRIMES: &str = include_str!("../data/slingshot_primes.txt");
const ADJACENT_PRIMES: &str = include_str!("../data/adjacent_primes.txt");

pub const SLINGSHOT_EDGES: [(usize, usize); 7] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)];
pub const SLINGSHOT_CONFIG: [[i64; 2]; 5] = [[0, 0], [1, 0], [2, 1], [2, -1], [2, 0]];

/// Name of coordinate `k` of node `i`, both 1-based.
pub fn coordinate_name(i: usize, k: usize) -> String {
    format!("x{i}{k}")
}

/// Coordinates fixed to zero by the moving frame: node `i` keeps only its
/// first `i - 1` coordinates.
pub fn is_pinned(i: usize, k: usize) -> bool {
    k >= i
}

/// Ring of the free coordinates of `n` pinned nodes in dimension `d`.
pub fn pinned_ring(n: usize, d: usize) -> Result<Ring> {
    Ring::new((1..=n).flat_map(|i| (1..=d).filter(move |&k| !is_pinned(i, k)).map(move |k| coordinate_name(i, k))))
}

fn coordinate(ring: &Ring, i: usize, k: usize) -> Result<RationalPoly> {
    if is_pinned(i, k) {
        Ok(ring.zero())
    } else {
        ring.var(&coordinate_name(i, k))
    }
}

fn check_edges(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    match edges.iter().find(|&&(i, j)| i == j || i == 0 || j == 0 || i > n || j > n) {
        Some((i, j)) => Err(Error::Data(format!("bad member ({i}, {j}) for {n} nodes"))),
        None => Ok(()),
    }
}

/// Half the Jacobian of the member constraints, one row per member, `n·d`
/// columns, with pinned coordinates set to zero.
pub fn pinned_rigidity_matrix(ring: &Ring, n: usize, d: usize, edges: &[(usize, usize)]) -> Result<PolyMatrix> {
    check_edges(n, edges)?;
    let mut entries = vec![ring.zero(); edges.len() * n * d];
    for (row, &(i, j)) in edges.iter().enumerate() {
        for k in 1..=d {
            let diff = &coordinate(ring, i, k)? - &coordinate(ring, j, k)?;
            entries[row * n * d + (i - 1) * d + (k - 1)] = diff.clone();
            entries[row * n * d + (j - 1) * d + (k - 1)] = -diff;
        }
    }
    PolyMatrix::new(ring.clone(), edges.len(), n * d, entries)
}

/// `‖x_i − x_j‖² − ‖p_i − p_j‖²` for each member.
pub fn member_constraints(
    ring: &Ring,
    d: usize,
    edges: &[(usize, usize)],
    config: &[Vec<BigRational>],
) -> Result<Vec<RationalPoly>> {
    check_edges(config.len(), edges)?;
    edges
        .iter()
        .map(|&(i, j)| {
            let mut g = ring.zero();
            let mut len = BigRational::from_integer(0.into());
            for k in 1..=d {
                let diff = &coordinate(ring, i, k)? - &coordinate(ring, j, k)?;
                g = g + &diff * &diff;
                let delta = &config[i - 1][k - 1] - &config[j - 1][k - 1];
                len += &delta * &delta;
            }
            Ok(g - ring.constant(len))
        })
        .collect()
}

fn data_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn bracketed(line: &str) -> Result<Vec<&str>> {
    let inner = line
        .strip_prefix('[')
        .and_then(|l| l.strip_suffix(']'))
        .ok_or_else(|| Error::Data(format!("expected [..]: {line}")))?;
    Ok(inner.split(',').map(str::trim).collect())
}

pub struct Slingshot {
    pub ring: Ring,
    pub matrix: PolyMatrix,
    pub members: Vec<RationalPoly>,
}

impl Slingshot {
    /// Member constraints followed by the nonzero maximal minors.
    pub fn ideal(&self) -> Result<Vec<RationalPoly>> {
        let minors = symbolic_minors(&self.matrix, self.matrix.shape().0)?;
        Ok(self.members.iter().cloned().chain(minors.nonzero().map(|m| m.value.clone())).collect())
    }
}

/// The slingshot built from its graph and configuration.
pub fn slingshot() -> Result<Slingshot> {
    let ring = pinned_ring(5, 2)?;
    let matrix = pinned_rigidity_matrix(&ring, 5, 2, &SLINGSHOT_EDGES)?;
    let config: Vec<Vec<BigRational>> = SLINGSHOT_CONFIG
        .iter()
        .map(|p| p.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let members = member_constraints(&ring, 2, &SLINGSHOT_EDGES, &config)?;
    Ok(Slingshot { ring, matrix, members })
}

pub fn transcribed_slingshot_matrix(ring: &Ring) -> Result<PolyMatrix> {
    let rows = data_lines(SLINGSHOT_MATRIX)
        .map(|l| l.split(',').map(|e| ring.parse(e.trim())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::from_rows(ring.clone(), rows)
}

pub fn transcribed_slingshot_members(ring: &Ring) -> Result<Vec<RationalPoly>> {
    data_lines(SLINGSHOT_MEMBERS).map(|l| ring.parse(l)).collect()
}

/// The sample degree-7 minor.
pub fn displayed_slingshot_minor(ring: &Ring) -> Result<RationalPoly> {
    ring.parse(&data_lines(SLINGSHOT_MINOR).collect::<Vec<_>>().join(" "))
}

/// The eight associated primes of the slingshot ideal, as generator lists.
pub fn slingshot_primes(ring: &Ring) -> Result<Vec<Vec<RationalPoly>>> {
    data_lines(SLINGSHOT_PRIMES)
        .map(|l| bracketed(l)?.into_iter().map(|g| ring.parse(g)).collect())
        .collect()
}

/// Ring `x11..x1n, x21..x2n` of a generic `2×n` matrix.
pub fn two_row_ring(n: usize) -> Result<Ring> {
    Ring::new((1..=2).flat_map(|i| (1..=n).map(move |k| coordinate_name(i, k))))
}

/// The minor on columns `a < b` (1-based) of the generic two-row matrix.
pub fn two_row_minor(ring: &Ring, a: usize, b: usize) -> Result<RationalPoly> {
    let v = |i, k| ring.var(&coordinate_name(i, k));
    Ok(&v(1, a)? * &v(2, b)? - &v(1, b)? * &v(2, a)?)
}

pub fn adjacent_minors(ring: &Ring, n: usize) -> Result<Vec<RationalPoly>> {
    (1..n).map(|a| two_row_minor(ring, a, a + 1)).collect()
}

/// Generic `2×n` matrix of ring variables.
pub fn two_row_matrix(ring: &Ring, n: usize) -> Result<PolyMatrix> {
    let entries = (1..=2)
        .flat_map(|i| (1..=n).map(move |k| (i, k)))
        .map(|(i, k)| ring.var(&coordinate_name(i, k)))
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::new(ring.clone(), 2, n, entries)
}

/// Generator lists for the five associated primes of the adjacent minors of a
/// `2×5` matrix, with two-digit shorthand expanded to minors.
pub fn adjacent_primes(ring: &Ring) -> Result<Vec<Vec<RationalPoly>>> {
    data_lines(ADJACENT_PRIMES)
        .map(|l| {
            bracketed(l)?
                .into_iter()
                .map(|tok| match tok.as_bytes() {
                    [a @ b'1'..=b'9', b @ b'1'..=b'9'] => {
                        two_row_minor(ring, usize::from(a - b'0'), usize::from(b - b'0'))
                    }
                    _ => ring.parse(tok),
                })
                .collect()
        })
        .collect()
}
