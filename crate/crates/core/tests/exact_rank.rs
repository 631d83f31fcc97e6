//! Numerical ranks checked against fraction-exact row reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensegrity_core::linalg::{numerical_rank, DEFAULT_RANK_TOL};
use tensegrity_core::prestress::self_stress_basis;
use tensegrity_core::rigidity::jacobian_at;
use tensegrity_core::{Configuration, Framework, FrameworkGraph};

const PRISM_EDGES: [(usize, usize); 12] =
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 5), (2, 6), (3, 4), (3, 6), (4, 5), (4, 6), (5, 6)];

fn exact_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let inv = BigRational::one() / rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone() * &inv;
                for c in col..ncols {
                    let delta = rows[rank][c].clone() * &factor;
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dg` at integer-over-`den` coordinates, exactly.
fn exact_jacobian(edges: &[(usize, usize)], d: usize, num: &[i64], den: i64) -> Vec<Vec<BigRational>> {
    let n = num.len() / d;
    edges
        .iter()
        .map(|&(i, j)| {
            let mut row = vec![BigRational::zero(); n * d];
            for k in 0..d {
                let diff = BigRational::new(BigInt::from(2 * (num[(i - 1) * d + k] - num[(j - 1) * d + k])), BigInt::from(den));
                row[(i - 1) * d + k] = diff.clone();
                row[(j - 1) * d + k] = -diff;
            }
            row
        })
        .collect()
}

fn transpose(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    (0..m[0].len()).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

#[test]
fn square_has_trivial_left_nullspace() {
    let edges = [(1, 2), (2, 3), (3, 4), (1, 4)];
    let coords = [0, 0, 1, 0, 1, 1, 0, 1];
    let exact = exact_jacobian(&edges, 2, &coords, 1);
    assert_eq!(exact_rank(transpose(&exact)), 4);

    let g = FrameworkGraph::from_edges(4, 2, &edges).unwrap();
    let p = Configuration::new(4, 2, coords.iter().map(|&v| v as f64).collect()).unwrap();
    let fw = Framework::from_embedding(g, p).unwrap();
    assert!(self_stress_basis(&fw.system, &fw.embedding, DEFAULT_RANK_TOL).unwrap().is_empty());
    assert_eq!(numerical_rank(&jacobian_at(&fw.system, &fw.embedding).unwrap(), DEFAULT_RANK_TOL), 4);
}

#[test]
fn random_rational_prisms_have_full_rank() {
    let den = 97;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let g = FrameworkGraph::from_edges(6, 3, &PRISM_EDGES).unwrap();
    for _ in 0..10 {
        let num: Vec<i64> = (0..18).map(|_| rng.random_range(-den..=den)).collect();
        let exact = exact_rank(exact_jacobian(&PRISM_EDGES, 3, &num, den));
        let q = Configuration::new(6, 3, num.iter().map(|&v| v as f64 / den as f64).collect()).unwrap();
        let fw = Framework::from_embedding(g.clone(), q).unwrap();
        let jac = jacobian_at(&fw.system, &fw.embedding).unwrap();
        assert_eq!(numerical_rank(&jac, DEFAULT_RANK_TOL), exact);
        assert_eq!(exact, 12);
        assert!(self_stress_basis(&fw.system, &fw.embedding, DEFAULT_RANK_TOL).unwrap().is_empty());
    }
}

#[test]
fn flat_prism_drops_rank_exactly() {
    // All nodes in the plane z = 0: every out-of-plane motion is a flex.
    let num = [0, 0, 0, 4, 0, 0, 1, 3, 0, 2, 5, 0, 5, 2, 0, 3, 1, 0];
    let exact = exact_rank(exact_jacobian(&PRISM_EDGES, 3, &num, 1));
    let g = FrameworkGraph::from_edges(6, 3, &PRISM_EDGES).unwrap();
    let q = Configuration::new(6, 3, num.iter().map(|&v| v as f64).collect()).unwrap();
    let fw = Framework::from_embedding(g, q).unwrap();
    let jac = jacobian_at(&fw.system, &fw.embedding).unwrap();
    assert_eq!(numerical_rank(&jac, DEFAULT_RANK_TOL), exact);
    assert!(exact < 12);
}
