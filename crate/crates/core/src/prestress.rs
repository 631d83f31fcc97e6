//! Self stresses, stress and stiffness matrices, and the prestress test.
//!
//! A self stress is a left null vector `w` of `dg|_p`. Its stress matrix is
//! `Ω_w = (Aᵀ·diag(w)·A) ⊗ I_d` with `A` the signed incidence matrix. The
//! framework is prestress stable when some combination of self stresses
//! makes `Ω` positive definite on the flex space.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{Configuration, FrameworkGraph, MemberConstraintSystem, MemberKind};
use crate::linalg::{self, numerical_nullspace, DEFAULT_RANK_TOL};
use crate::rigidity::{decompose_nullspace, jacobian_at, weighted_laplacian};

/// Entries with magnitude below this (after max-abs normalization) count as
/// zero when reporting vanishing member stresses.
pub const ZERO_STRESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfStress {
    pub w: Vec<f64>,
    /// Member whose entry has the largest magnitude; that entry is `±1`.
    pub max_member: usize,
}

impl SelfStress {
    /// Rescale so that the max-abs entry is 1 and the first nonzero entry is
    /// positive.
    pub fn normalized(w: &[f64]) -> Self {
        let (max_member, peak) = w
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        if peak == 0.0 {
            return Self { w: w.to_vec(), max_member };
        }
        let first = w.iter().find(|v| v.abs() > ZERO_STRESS_TOL * peak).copied().unwrap_or(1.0);
        let scale = first.signum() / peak;
        Self { w: w.iter().map(|v| v * scale).collect(), max_member }
    }

    /// Copy rescaled so that member `index` has stress 1.
    pub fn scaled_to(&self, index: usize) -> Option<Vec<f64>> {
        let pivot = *self.w.get(index)?;
        (pivot != 0.0).then(|| self.w.iter().map(|v| v / pivot).collect())
    }
}

/// Basis of the self-stress space at `p`, each vector max-abs normalized.
pub fn self_stress_basis(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    tol_rel: f64,
) -> Result<Vec<SelfStress>> {
    let jac = jacobian_at(sys, p)?;
    let left = numerical_nullspace(&jac.transpose(), tol_rel);
    Ok(left
        .basis
        .column_iter()
        .map(|c| SelfStress::normalized(c.as_slice()))
        .collect())
}

/// `max |wᵀ·dg|` relative to `‖w‖·‖dg‖`.
pub fn equilibrium_defect(jac: &DMatrix<f64>, w: &[f64]) -> f64 {
    let wv = DVector::from_column_slice(w);
    let scale = wv.norm() * jac.norm();
    if scale == 0.0 {
        return 0.0;
    }
    let r = jac.transpose() * wv;
    r.amax() / scale
}

/// `(Aᵀ·diag(w)·A) ⊗ I_d`.
pub fn stress_matrix(graph: &FrameworkGraph, w: &[f64]) -> Result<DMatrix<f64>> {
    let lap = weighted_laplacian(graph, w)?;
    let d = graph.dimension();
    Ok(lap.kronecker(&DMatrix::<f64>::identity(d, d)))
}

/// Stiffness `K_c = dgᵀ·diag(c)·dg` and energy Hessian `H = Ω_w + K_c`.
pub fn stiffness_and_energy(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    c: &[f64],
    w: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = sys.graph().member_count();
    if c.len() != m {
        return Err(Error::ShapeMismatch {
            expected: format!("{m} member stiffnesses"),
            found: c.len().to_string(),
        });
    }
    if let Some((index, &value)) = c.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeWeight { index, value });
    }
    let jac = jacobian_at(sys, p)?;
    let k = jac.transpose() * DMatrix::from_diagonal(&DVector::from_column_slice(c)) * &jac;
    let k = (&k + k.transpose()) * 0.5;
    let h = stress_matrix(sys.graph(), w)? + &k;
    Ok((k, h))
}

/// `vᵀ·M·v`.
pub fn quadratic_form(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    v.dot(&(m * &v))
}

#[derive(Clone, Debug)]
pub struct PrestressOptions {
    pub seed: u64,
    pub starts: usize,
    pub iterations: usize,
    pub tol_rel: f64,
    /// Margin for the strict cable/strut sign checks.
    pub sign_margin: f64,
}

impl Default for PrestressOptions {
    fn default() -> Self {
        Self { seed: 0, starts: 20, iterations: 300, tol_rel: DEFAULT_RANK_TOL, sign_margin: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrestressCertificate {
    pub coefficients: Vec<f64>,
    pub stress: Vec<f64>,
    /// `Fᵀ·Ω·F`, row by row.
    pub reduced_matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub cables_positive: bool,
    pub struts_negative: bool,
    /// Members (1-based labels) whose stress vanishes.
    pub zero_members: Vec<String>,
}

impl PrestressCertificate {
    pub fn sign_feasible(&self) -> bool {
        self.cables_positive && self.struts_negative
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PrestressOutcome {
    InfinitesimallyRigid,
    NoSelfStress { flex_dim: usize },
    /// The search failed; this is not a proof that no certificate exists.
    NotFound { best_min_eigenvalue: f64, coefficients: Vec<f64> },
    Found(PrestressCertificate),
}

/// `(λ_min, unit eigenvector)` of `Σ a_i M_i`.
fn min_pair(blocks: &[DMatrix<f64>], a: &[f64]) -> (f64, DVector<f64>) {
    let mut s = DMatrix::zeros(blocks[0].nrows(), blocks[0].ncols());
    for (m, ai) in blocks.iter().zip(a) {
        s += m * *ai;
    }
    let (vals, vecs) = linalg::sorted_symmetric_eigen(&s);
    (vals[0], vecs[0].clone())
}

/// Projected supergradient ascent of the concave `a ↦ λ_min(Σ a_i M_i)` over
/// the unit ball from several seeded starts; returns the best point found.
fn maximize_min_eigenvalue(blocks: &[DMatrix<f64>], opts: &PrestressOptions) -> (f64, Vec<f64>) {
    let k = blocks.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    for _ in 0..opts.starts.max(1) {
        let mut a: DVector<f64> = DVector::from_fn(k, |_, _| StandardNormal.sample(&mut rng));
        a /= a.norm();
        for it in 0..opts.iterations {
            let (lam, u) = min_pair(blocks, a.as_slice());
            if lam > best.0 {
                best = (lam, a.as_slice().to_vec());
            }
            let g = DVector::from_fn(k, |i, _| u.dot(&(&blocks[i] * &u)));
            let gn = g.norm();
            if gn == 0.0 {
                break;
            }
            a += g * (0.5 / ((it + 1) as f64).sqrt() / gn);
            let an = a.norm();
            if an > 1.0 {
                a /= an;
            }
        }
        let (lam, _) = min_pair(blocks, a.as_slice());
        if lam > best.0 {
            best = (lam, a.as_slice().to_vec());
        }
    }
    // λ_min is positively homogeneous, so a positive optimum sits on the sphere.
    let norm = best.1.iter().map(|v| v * v).sum::<f64>().sqrt();
    if best.0 > 0.0 && norm > 0.0 {
        let a: Vec<f64> = best.1.iter().map(|v| v / norm).collect();
        return (best.0 / norm, a);
    }
    best
}

/// Search for a self stress making `Ω` positive definite on the flex space.
pub fn prestress_certificate(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    opts: &PrestressOptions,
) -> Result<PrestressOutcome> {
    let decomposition = decompose_nullspace(sys, p, opts.tol_rel)?;
    let flexes = &decomposition.flexes;
    if flexes.ncols() == 0 {
        return Ok(PrestressOutcome::InfinitesimallyRigid);
    }
    let basis = self_stress_basis(sys, p, opts.tol_rel)?;
    if basis.is_empty() {
        return Ok(PrestressOutcome::NoSelfStress { flex_dim: flexes.ncols() });
    }
    let graph = sys.graph();
    let blocks = basis
        .iter()
        .map(|s| Ok(flexes.transpose() * stress_matrix(graph, &s.w)? * flexes))
        .collect::<Result<Vec<_>>>()?;

    let (_, coefficients) = if blocks.len() == 1 {
        [1.0, -1.0]
            .iter()
            .map(|&a| (min_pair(&blocks, &[a]).0, vec![a]))
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .expect("two candidates")
    } else {
        maximize_min_eigenvalue(&blocks, opts)
    };

    // Re-verify from scratch, independently of the search.
    let mut stress = vec![0.0; graph.member_count()];
    for (s, a) in basis.iter().zip(&coefficients) {
        for (acc, v) in stress.iter_mut().zip(&s.w) {
            *acc += a * v;
        }
    }
    let reduced = flexes.transpose() * stress_matrix(graph, &stress)? * flexes;
    let (eigenvalues, _) = linalg::sorted_symmetric_eigen(&reduced);
    let min_eigenvalue = eigenvalues[0];
    let scale = reduced.norm().max(1.0);
    if min_eigenvalue <= opts.tol_rel * scale {
        return Ok(PrestressOutcome::NotFound { best_min_eigenvalue: min_eigenvalue, coefficients });
    }

    let peak = stress.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut cables_positive = true;
    let mut struts_negative = true;
    let mut zero_members = Vec::new();
    for (m, &s) in graph.members().iter().zip(&stress) {
        match m.kind {
            MemberKind::Cable => cables_positive &= s > opts.sign_margin,
            MemberKind::Strut => struts_negative &= s < -opts.sign_margin,
            MemberKind::Bar => {}
        }
        if s.abs() <= ZERO_STRESS_TOL * peak {
            zero_members.push(m.label());
        }
    }
    Ok(PrestressOutcome::Found(PrestressCertificate {
        coefficients,
        stress,
        reduced_matrix: reduced.row_iter().map(|r| r.iter().copied().collect()).collect(),
        eigenvalues,
        min_eigenvalue,
        cables_positive,
        struts_negative,
        zero_members,
    }))
}
