//! Linear algebra of frameworks.
//!
//! The Jacobian `dg` of the member constraints, the rigidity matrix `A`
//! with antipodal unit vectors in each row (related by `L·A = ½·dg` where
//! `L` is the diagonal of member lengths), the graph incidence matrix,
//! rigid motions, flexes and the rigidity verdicts built on top of them.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{Configuration, FrameworkGraph, MemberConstraintSystem};
use crate::linalg::{self, numerical_nullspace, orthonormal_span, project_out, DEFAULT_RANK_TOL};

/// Members shorter than this are treated as degenerate.
pub const MIN_MEMBER_LENGTH: f64 = 1e-12;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the Euclidean group acting on `R^d`, `binom(d+1, 2)`.
pub fn rigid_motion_group_dim(d: usize) -> usize {
    binomial(d + 1, 2)
}

/// `m × (n·d)` Jacobian of the member constraints at `x`.
pub fn jacobian_at(sys: &MemberConstraintSystem, x: &Configuration) -> Result<DMatrix<f64>> {
    let g = sys.graph();
    let d = g.dimension();
    x.check_shape(g.node_count(), d)?;
    let mut jac = DMatrix::zeros(g.member_count(), g.coordinate_count());
    for (row, m) in g.members().iter().enumerate() {
        let (xi, xj) = (x.node(m.i), x.node(m.j));
        for k in 0..d {
            let diff = xi[k] - xj[k];
            jac[(row, m.i * d + k)] = 2.0 * diff;
            jac[(row, m.j * d + k)] = -2.0 * diff;
        }
    }
    Ok(jac)
}

/// Signed incidence matrix: row `(i, j)` has `-1` in column `i` and `+1` in
/// column `j`, so `A·v` gives the differences `v_j - v_i` along members.
pub fn incidence_matrix(graph: &FrameworkGraph) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(graph.member_count(), graph.node_count());
    for (row, m) in graph.members().iter().enumerate() {
        a[(row, m.i)] = -1.0;
        a[(row, m.j)] = 1.0;
    }
    a
}

#[derive(Clone, Debug)]
pub struct RigidityMatrices {
    pub jacobian: DMatrix<f64>,
    pub rigidity: DMatrix<f64>,
    /// Diagonal of `L`, the member lengths at `x`.
    pub edge_lengths: DVector<f64>,
}

impl RigidityMatrices {
    /// `max |L·A - ½·dg|`.
    pub fn relation_defect(&self) -> f64 {
        let la = DMatrix::from_diagonal(&self.edge_lengths) * &self.rigidity;
        linalg::max_abs(&(la - &self.jacobian * 0.5))
    }
}

/// Jacobian, unit-vector rigidity matrix, member lengths and the incidence
/// matrix at `x`.
pub fn rigidity_and_incidence(
    sys: &MemberConstraintSystem,
    x: &Configuration,
) -> Result<(RigidityMatrices, DMatrix<f64>)> {
    let jacobian = jacobian_at(sys, x)?;
    let g = sys.graph();
    let d = g.dimension();
    let mut rigidity = DMatrix::zeros(g.member_count(), g.coordinate_count());
    let mut lengths = DVector::zeros(g.member_count());
    for (row, m) in g.members().iter().enumerate() {
        let len = x.squared_distance(m.i, m.j).sqrt();
        if len <= MIN_MEMBER_LENGTH {
            return Err(Error::DegenerateMember { i: m.i + 1, j: m.j + 1 });
        }
        lengths[row] = len;
        let (xi, xj) = (x.node(m.i), x.node(m.j));
        for k in 0..d {
            let u = (xi[k] - xj[k]) / len;
            rigidity[(row, m.i * d + k)] = u;
            rigidity[(row, m.j * d + k)] = -u;
        }
    }
    Ok((RigidityMatrices { jacobian, rigidity, edge_lengths: lengths }, incidence_matrix(g)))
}

/// Translations and infinitesimal rotations at `x`, orthonormalized.
///
/// Rotations apply the skew matrix `E_ab - E_ba` to every node. The returned
/// basis has fewer than `binom(d+1, 2)` columns when the nodes span a
/// lower-dimensional affine subspace.
pub fn rigid_motion_basis(x: &Configuration) -> DMatrix<f64> {
    let (n, d) = (x.node_count(), x.dimension());
    let total = rigid_motion_group_dim(d);
    let mut gen = DMatrix::zeros(n * d, total);
    let mut col = 0;
    for k in 0..d {
        for i in 0..n {
            gen[(i * d + k, col)] = 1.0;
        }
        col += 1;
    }
    for a in 0..d {
        for b in (a + 1)..d {
            for i in 0..n {
                let node = x.node(i);
                gen[(i * d + a, col)] = -node[b];
                gen[(i * d + b, col)] = node[a];
            }
            col += 1;
        }
    }
    orthonormal_span(&gen, 1e-10)
}

/// `Null dg|_p = R ⊕ F` with `F` the orthogonal complement of `R`.
#[derive(Clone, Debug)]
pub struct NullspaceDecomposition {
    pub rigid_motions: DMatrix<f64>,
    pub flexes: DMatrix<f64>,
    pub tol_rel: f64,
    pub rank: usize,
}

impl NullspaceDecomposition {
    pub fn corank(&self) -> usize {
        self.rigid_motions.ncols() + self.flexes.ncols()
    }
}

pub fn decompose_nullspace(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    tol_rel: f64,
) -> Result<NullspaceDecomposition> {
    let jac = jacobian_at(sys, p)?;
    let null = numerical_nullspace(&jac, tol_rel);
    let rigid = rigid_motion_basis(p);
    // Rigid motions are null vectors by construction, so the flexes are what
    // is left of the nullspace once they are removed.
    let flexes = if null.corank() > rigid.ncols() {
        let residual = project_out(&null.basis, &rigid);
        let span = orthonormal_span(&residual, 1e-6);
        let want = null.corank() - rigid.ncols();
        span.columns(0, want.min(span.ncols())).into_owned()
    } else {
        DMatrix::zeros(p.as_slice().len(), 0)
    };
    Ok(NullspaceDecomposition { rigid_motions: rigid, flexes, tol_rel, rank: null.rank })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    InfinitesimallyRigid,
    NotInfinitesimallyRigid,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol_rel: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { trials: 3, seed: 0, tol_rel: DEFAULT_RANK_TOL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub nodes: usize,
    pub dimension: usize,
    pub members: usize,
    pub rank_at_p: usize,
    pub corank_at_p: usize,
    pub generic_corank: usize,
    /// Corank at each sampled random configuration, in draw order.
    pub generic_samples: Vec<usize>,
    pub rigid_motion_dim: usize,
    pub expected_rigid_motion_dim: usize,
    /// Whether `binom(d+1,2) ≤ generic corank ≤ corank at p` is meaningful,
    /// i.e. the embedding spans a full-dimensional affine subspace.
    pub sandwich_applicable: bool,
    pub sandwich_holds: bool,
    pub verdict: RigidityVerdict,
    pub tol_rel: f64,
    pub seed: u64,
    /// Orthonormal rigid-motion basis, one vector per row.
    pub rigid_motions: Vec<Vec<f64>>,
    /// Orthonormal flex basis orthogonal to the rigid motions, one per row.
    pub flexes: Vec<Vec<f64>>,
    #[serde(skip)]
    pub decomposition: NullspaceDecomposition,
}

impl RigidityReport {
    pub fn flex_count(&self) -> usize {
        self.flexes.len()
    }
}

fn columns_as_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// Corank of `dg` at `trials` independent uniform random configurations.
///
/// Disagreeing samples trigger additional rounds of draws (up to three
/// rounds); all samples are returned so the caller can see any mismatch.
pub fn sample_generic_coranks(
    sys: &MemberConstraintSystem,
    trials: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<Vec<usize>> {
    let g = sys.graph();
    let mut samples = Vec::new();
    let mut stream = 0u64;
    for _round in 0..3 {
        for _ in 0..trials.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            stream += 1;
            let q = Configuration::random(g.node_count(), g.dimension(), &mut rng);
            let jac = jacobian_at(sys, &q)?;
            samples.push(numerical_nullspace(&jac, tol_rel).corank());
        }
        if samples.iter().all(|&c| c == samples[0]) {
            break;
        }
    }
    Ok(samples)
}

/// Ranks, coranks, rigid motions, flexes and the infinitesimal-rigidity
/// verdict at `p`.
pub fn rigidity_report(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    opts: &ReportOptions,
) -> Result<RigidityReport> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let g = sys.graph();
    let decomposition = decompose_nullspace(sys, p, opts.tol_rel)?;
    let samples = sample_generic_coranks(sys, opts.trials, opts.seed, opts.tol_rel)?;
    let generic = *samples.iter().min().expect("at least one sample");
    let corank_at_p = decomposition.corank();
    let rigid_dim = decomposition.rigid_motions.ncols();
    let expected = rigid_motion_group_dim(g.dimension());
    let sandwich_applicable = rigid_dim == expected;
    let verdict = if corank_at_p == rigid_dim {
        RigidityVerdict::InfinitesimallyRigid
    } else {
        RigidityVerdict::NotInfinitesimallyRigid
    };
    Ok(RigidityReport {
        nodes: g.node_count(),
        dimension: g.dimension(),
        members: g.member_count(),
        rank_at_p: decomposition.rank,
        corank_at_p,
        generic_corank: generic,
        generic_samples: samples,
        rigid_motion_dim: rigid_dim,
        expected_rigid_motion_dim: expected,
        sandwich_applicable,
        sandwich_holds: expected <= generic && generic <= corank_at_p,
        verdict,
        tol_rel: opts.tol_rel,
        seed: opts.seed,
        rigid_motions: columns_as_rows(&decomposition.rigid_motions),
        flexes: columns_as_rows(&decomposition.flexes),
        decomposition,
    })
}

/// Flattened indices `i·d + k` of the coordinates left free by the moving
/// frame: node `i < d` keeps only its first `i` coordinates.
pub fn free_coordinates(n: usize, d: usize) -> Vec<usize> {
    (0..n)
        .flat_map(|i| (0..d).filter(move |&k| i >= d || k < i).map(move |k| i * d + k))
        .collect()
}

/// Whether every coordinate fixed by the moving frame is within `tol` of 0.
pub fn check_pinned(x: &Configuration, tol: f64) -> Result<()> {
    let (n, d) = (x.node_count(), x.dimension());
    for i in 0..n.min(d) {
        for k in i..d {
            let v = x.node(i)[k];
            if v.abs() > tol {
                return Err(Error::NotPinned { node: i + 1, coordinate: k + 1, value: v });
            }
        }
    }
    Ok(())
}

/// Moving frame: translate node 1 to the origin and rotate so that node 2
/// lies on the first axis, node 3 in the first coordinate plane, and so on.
///
/// The rotation is the orthogonal factor of a Householder QR of
/// `[x_2 - x_1, …, x_n - x_1]` with LAPACK's sign convention
/// (`R_kk = -sign(a_kk)·‖a‖`, identity reflector when the sub-column is
/// already zero), so an already-pinned configuration is returned unchanged.
pub fn pin_moving_frame(x: &Configuration) -> Result<Configuration> {
    let (n, d) = (x.node_count(), x.dimension());
    let origin = x.node(0).to_vec();
    let cols = n - 1;
    let mut b = DMatrix::zeros(d, cols);
    for c in 0..cols {
        for k in 0..d {
            b[(k, c)] = x.node(c + 1)[k] - origin[k];
        }
    }
    let scale = b.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let reflections = d.saturating_sub(1).min(cols);
    for k in 0..reflections {
        let alpha = b[(k, k)];
        let xnorm = (k + 1..d).map(|r| b[(r, k)] * b[(r, k)]).sum::<f64>().sqrt();
        if xnorm != 0.0 {
            let beta = -alpha.signum() * alpha.hypot(xnorm);
            let tau = (beta - alpha) / beta;
            let denom = alpha - beta;
            let mut v = vec![0.0; d];
            v[k] = 1.0;
            for r in k + 1..d {
                v[r] = b[(r, k)] / denom;
            }
            b[(k, k)] = beta;
            for r in k + 1..d {
                b[(r, k)] = 0.0;
            }
            for c in k + 1..cols {
                let dot: f64 = (k..d).map(|r| v[r] * b[(r, c)]).sum();
                for r in k..d {
                    b[(r, c)] -= tau * v[r] * dot;
                }
            }
        }
        if b[(k, k)].abs() <= 1e-12 * scale {
            return Err(Error::DegenerateFrame);
        }
    }
    let mut coords = vec![0.0; n * d];
    for c in 0..cols {
        for k in 0..d {
            coords[(c + 1) * d + k] = b[(k, c)];
        }
    }
    Configuration::new(n, d, coords)
}

/// `Aᵀ·diag(w)·A` for the signed incidence matrix `A`.
pub fn weighted_laplacian(graph: &FrameworkGraph, weights: &[f64]) -> Result<DMatrix<f64>> {
    if weights.len() != graph.member_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} member weights", graph.member_count()),
            found: format!("{}", weights.len()),
        });
    }
    let n = graph.node_count();
    let mut lap = DMatrix::zeros(n, n);
    for (m, &w) in graph.members().iter().zip(weights) {
        lap[(m.i, m.i)] += w;
        lap[(m.j, m.j)] += w;
        lap[(m.i, m.j)] -= w;
        lap[(m.j, m.i)] -= w;
    }
    Ok(lap)
}

#[derive(Clone, Debug, Serialize)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Eigenpairs of the stiffness matrix `Aᵀ·diag(c)·A`, eigenvalues ascending.
pub fn laplacian_eigenpairs(graph: &FrameworkGraph, conductances: &[f64]) -> Result<Vec<Eigenpair>> {
    if let Some((index, &value)) = conductances.iter().enumerate().find(|(_, c)| **c < 0.0) {
        return Err(Error::NegativeWeight { index, value });
    }
    let lap = weighted_laplacian(graph, conductances)?;
    let (values, vectors) = linalg::sorted_symmetric_eigen(&lap);
    Ok(values
        .into_iter()
        .zip(vectors)
        .map(|(value, v)| Eigenpair { value, vector: v.iter().copied().collect() })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{load_framework, Framework};

    fn unit_bar_1d() -> Framework {
        let g = FrameworkGraph::from_edges(2, 1, &[(1, 2)]).unwrap();
        Framework::from_embedding(g, Configuration::new(2, 1, vec![0.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn single_bar_jacobian() {
        let fw = unit_bar_1d();
        let jac = jacobian_at(&fw.system, &fw.embedding).unwrap();
        assert_eq!(jac, DMatrix::from_row_slice(1, 2, &[-2.0, 2.0]));
    }

    #[test]
    fn rows_are_antipodal_unit_vectors() {
        let g = FrameworkGraph::from_edges(3, 2, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let p = Configuration::new(3, 2, vec![0.0, 0.0, 2.0, 0.5, -1.0, 3.0]).unwrap();
        let fw = Framework::from_embedding(g, p).unwrap();
        let (mats, inc) = rigidity_and_incidence(&fw.system, &fw.embedding).unwrap();
        for (row, m) in fw.graph.members().iter().enumerate() {
            let ui: Vec<f64> = (0..2).map(|k| mats.rigidity[(row, m.i * 2 + k)]).collect();
            let uj: Vec<f64> = (0..2).map(|k| mats.rigidity[(row, m.j * 2 + k)]).collect();
            assert!((ui[0].hypot(ui[1]) - 1.0).abs() < 1e-14);
            assert!((ui[0] + uj[0]).abs() < 1e-15 && (ui[1] + uj[1]).abs() < 1e-15);
            assert_eq!(inc.row(row).iter().filter(|v| **v == 1.0).count(), 1);
            assert_eq!(inc.row(row).iter().filter(|v| **v == -1.0).count(), 1);
        }
        assert!(mats.relation_defect() < 1e-12);
    }

    #[test]
    fn coincident_endpoints_are_degenerate() {
        let g = FrameworkGraph::from_edges(2, 2, &[(1, 2)]).unwrap();
        let fw = Framework::from_embedding(g, Configuration::new(2, 2, vec![0., 0., 1., 0.]).unwrap())
            .unwrap();
        let x = Configuration::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            rigidity_and_incidence(&fw.system, &x),
            Err(Error::DegenerateMember { i: 1, j: 2 })
        ));
    }

    #[test]
    fn network_net_flow() {
        // 4 nodes, edges 12, 13, 23, 24, 34; Aᵀ applied to the edge currents.
        let g = FrameworkGraph::from_edges(4, 1, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).unwrap();
        let a = incidence_matrix(&g);
        let currents = DVector::from_column_slice(&[-2.0, 1.0, 3.0, 4.0, 1.0]);
        let net = a.transpose() * currents;
        assert_eq!(net.as_slice(), &[1.0, -9.0, 3.0, 5.0]);
    }

    #[test]
    fn rigid_motion_dimensions() {
        let tri = Configuration::new(3, 2, vec![0.0, 0.0, 1.0, 0.0, 0.5, 0.8]).unwrap();
        assert_eq!(rigid_motion_basis(&tri).ncols(), 3);
        let point = Configuration::new(4, 3, vec![0.3, -0.2, 0.9].repeat(4)).unwrap();
        assert_eq!(rigid_motion_basis(&point).ncols(), 3);
        let line = Configuration::new(3, 3, vec![0., 0., 0., 1., 0., 0., 2., 0., 0.]).unwrap();
        assert_eq!(rigid_motion_basis(&line).ncols(), 5);
    }

    #[test]
    fn free_coordinate_counts() {
        assert_eq!(free_coordinates(6, 3).len(), 12);
        assert_eq!(free_coordinates(5, 2).len(), 7);
        assert_eq!(free_coordinates(3, 2), vec![2, 4, 5]);
    }

    #[test]
    fn pinned_configuration_is_fixed_point() {
        let x = Configuration::new(4, 3, vec![0., 0., 0., 2., 0., 0., -0.5, 1.5, 0., 0.3, 0.2, 0.7])
            .unwrap();
        let y = pin_moving_frame(&x).unwrap();
        assert_eq!(x, y);
        let flipped =
            Configuration::new(3, 2, vec![0., 0., -2., 0., 0.4, -1.0]).unwrap();
        assert_eq!(pin_moving_frame(&flipped).unwrap(), flipped);
    }

    #[test]
    fn degenerate_leading_nodes_rejected() {
        let x = Configuration::new(3, 3, vec![1., 1., 1., 1., 1., 1., 0., 0., 0.]).unwrap();
        assert!(matches!(pin_moving_frame(&x), Err(Error::DegenerateFrame)));
        let collinear =
            Configuration::new(4, 3, vec![0., 0., 0., 1., 1., 1., 2., 2., 2., 0., 1., 0.]).unwrap();
        assert!(matches!(pin_moving_frame(&collinear), Err(Error::DegenerateFrame)));
    }

    #[test]
    fn check_pinned_reports_offending_coordinate() {
        let x = Configuration::new(3, 2, vec![0., 0., 1., 0.5, 0., 1.]).unwrap();
        assert!(matches!(check_pinned(&x, 1e-12), Err(Error::NotPinned { node: 2, coordinate: 2, .. })));
    }

    #[test]
    fn molecule_eigenpairs() {
        let g = FrameworkGraph::from_edges(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let pairs = laplacian_eigenpairs(&g, &[1.0, 1.0]).unwrap();
        let expect = [(0.0, [1.0, 1.0, 1.0]), (1.0, [1.0, 0.0, -1.0]), (3.0, [-1.0, 2.0, -1.0])];
        for (pair, (val, vec)) in pairs.iter().zip(expect) {
            assert!((pair.value - val).abs() < 1e-10);
            let e = DVector::from_column_slice(&vec).normalize();
            let v = DVector::from_column_slice(&pair.vector);
            assert!((e.dot(&v).abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn disconnected_graph_has_double_zero() {
        let g = FrameworkGraph::from_edges(4, 1, &[(1, 2), (3, 4)]).unwrap();
        let pairs = laplacian_eigenpairs(&g, &[2.0, 0.5]).unwrap();
        assert!(pairs[0].value.abs() < 1e-12 && pairs[1].value.abs() < 1e-12);
        assert!(pairs[2].value > 0.5);
    }

    #[test]
    fn negative_conductance_rejected() {
        let g = FrameworkGraph::from_edges(2, 1, &[(1, 2)]).unwrap();
        assert!(matches!(laplacian_eigenpairs(&g, &[-1.0]), Err(Error::NegativeWeight { .. })));
    }

    #[test]
    fn square_has_one_flex() {
        let doc = r#"{"dimension": 2, "nodes": [[0,0],[1,0],[1,1],[0,1]],
            "members": [{"i":1,"j":2,"kind":"bar"},{"i":2,"j":3,"kind":"bar"},
                        {"i":3,"j":4,"kind":"bar"},{"i":1,"j":4,"kind":"bar"}]}"#;
        let fw = load_framework(doc).unwrap();
        let rep = rigidity_report(&fw.system, &fw.embedding, &ReportOptions::default()).unwrap();
        assert_eq!(rep.corank_at_p, 4);
        assert_eq!(rep.flex_count(), 1);
        assert_eq!(rep.verdict, RigidityVerdict::NotInfinitesimallyRigid);
    }

    #[test]
    fn zero_trials_rejected() {
        let fw = unit_bar_1d();
        let opts = ReportOptions { trials: 0, ..ReportOptions::default() };
        assert!(rigidity_report(&fw.system, &fw.embedding, &opts).is_err());
    }
}
