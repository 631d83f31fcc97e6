//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative singular-value cutoff for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Orthonormal nullspace basis together with the rank it was derived from.
#[derive(Clone, Debug)]
pub struct Nullspace {
    /// Columns span the nullspace.
    pub basis: DMatrix<f64>,
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    pub tol_rel: f64,
}

impl Nullspace {
    pub fn corank(&self) -> usize {
        self.basis.ncols()
    }
}

/// Right singular vectors whose singular values fall below `tol_rel·σ_max`.
///
/// Wide matrices are padded with zero rows so the SVD returns a full set of
/// right singular vectors.
pub fn numerical_nullspace(m: &DMatrix<f64>, tol_rel: f64) -> Nullspace {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Nullspace {
            basis: DMatrix::zeros(0, 0),
            rank: 0,
            singular_values: Vec::new(),
            tol_rel,
        };
    }
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol_rel * sigma_max;
    let rank = sigma.iter().take(rows.min(cols)).filter(|&&s| sigma_max > 0.0 && s > cutoff).count();
    let null_idx = &order[rank..];
    let mut basis = DMatrix::zeros(cols, null_idx.len());
    for (c, &k) in null_idx.iter().enumerate() {
        basis.set_column(c, &v_t.row(k).transpose());
    }
    Nullspace { basis, rank, singular_values: sigma.into_iter().take(rows.min(cols)).collect(), tol_rel }
}

pub fn numerical_rank(m: &DMatrix<f64>, tol_rel: f64) -> usize {
    numerical_nullspace(m, tol_rel).rank
}

/// Orthonormal basis of the column span, dropping directions with singular
/// value at or below `tol_rel·σ_max`.
pub fn orthonormal_span(m: &DMatrix<f64>, tol_rel: f64) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol_rel * sigma_max)
        .collect();
    let mut out = DMatrix::zeros(m.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        out.set_column(c, &u.column(k));
    }
    out
}

/// `v - Q Qᵀ v` for each column of `v`, with `q` orthonormal.
pub fn project_out(v: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}

/// Symmetric eigendecomposition with eigenvalues ascending.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    (values, vectors)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let (values, _) = sorted_symmetric_eigen(m);
    values[0]
}

/// Largest principal angle sine between two column spans; 0 when they agree.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orthonormal_span(a, 1e-10);
    let qb = orthonormal_span(b, 1e-10);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    let ra = project_out(&qa, &qb);
    let rb = project_out(&qb, &qa);
    ra.norm().max(rb.norm())
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_has_full_nullspace() {
        let ns = numerical_nullspace(&DMatrix::zeros(3, 5), DEFAULT_RANK_TOL);
        assert_eq!(ns.rank, 0);
        assert_eq!(ns.corank(), 5);
    }

    #[test]
    fn wide_and_tall_rank_plus_corank() {
        let wide = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 3.0, 4.0, 2.0, 4.0, 6.0, 8.0]);
        let ns = numerical_nullspace(&wide, DEFAULT_RANK_TOL);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.corank(), 3);
        assert!((&wide * &ns.basis).norm() < 1e-12);
        let gram = ns.basis.transpose() * &ns.basis;
        assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-12);

        let tall = wide.transpose();
        let ns = numerical_nullspace(&tall, DEFAULT_RANK_TOL);
        assert_eq!(ns.rank + ns.corank(), 2);
        assert_eq!(ns.corank(), 1);
    }

    #[test]
    fn span_drops_dependent_columns() {
        let m = DMatrix::from_column_slice(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(orthonormal_span(&m, 1e-10).ncols(), 2);
    }

    #[test]
    fn eigenvalues_ascending() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = sorted_symmetric_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!((&m * &vecs[1] - &vecs[1] * 3.0).norm() < 1e-12);
    }
}
