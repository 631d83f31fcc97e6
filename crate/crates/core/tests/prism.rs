use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensegrity_core::linalg::project_out;
use tensegrity_core::prestress::{
    prestress_certificate, quadratic_form, self_stress_basis, stiffness_and_energy, stress_matrix,
    PrestressOptions, PrestressOutcome,
};
use tensegrity_core::rigidity::{
    jacobian_at, pin_moving_frame, rigid_motion_basis, rigidity_and_incidence, rigidity_report,
    ReportOptions, RigidityVerdict,
};
use tensegrity_core::{load_framework, Configuration, Framework};

const FLEX: [f64; 18] = [
    0.000, 1.58, 0.263, -1.37, -0.789, 0.263, 1.37, -0.789, 0.263, -0.789, 1.37, -0.263, -0.789,
    -1.37, -0.263, 1.58, 0.000, -0.263,
];
const STRESS: [f64; 12] =
    [1.00, 1.00, -1.73, 1.73, 1.00, -1.73, 1.73, 1.73, -1.73, 1.00, 1.00, 1.00];

fn prism() -> Framework {
    load_framework(include_str!("../fixtures/3prism.json")).unwrap()
}

fn random_prism(seed: u64) -> Framework {
    let fw = prism();
    let q = Configuration::random(6, 3, &mut ChaCha8Rng::seed_from_u64(seed));
    fw.with_embedding(q).unwrap()
}

fn exact_flex(fw: &Framework) -> DVector<f64> {
    let rep = rigidity_report(&fw.system, &fw.embedding, &ReportOptions::default()).unwrap();
    assert_eq!(rep.flex_count(), 1);
    DVector::from_column_slice(&rep.flexes[0])
}

#[test]
fn ranks_at_p_and_generic() {
    let fw = prism();
    let rep = rigidity_report(&fw.system, &fw.embedding, &ReportOptions { trials: 5, ..Default::default() })
        .unwrap();
    assert_eq!(rep.corank_at_p, 7);
    assert_eq!(rep.rank_at_p, 11);
    assert_eq!(rep.generic_corank, 6);
    assert!(rep.generic_samples.iter().all(|&c| c == 6));
    assert!(rep.sandwich_applicable && rep.sandwich_holds);
    assert_eq!(rep.verdict, RigidityVerdict::NotInfinitesimallyRigid);

    let q = random_prism(11);
    let rep = rigidity_report(&q.system, &q.embedding, &ReportOptions::default()).unwrap();
    assert_eq!(rep.corank_at_p, 6);
    assert_eq!(rep.verdict, RigidityVerdict::InfinitesimallyRigid);
}

#[test]
fn unit_vector_relation() {
    let fw = prism();
    let (m, inc) = rigidity_and_incidence(&fw.system, &fw.embedding).unwrap();
    assert!(m.relation_defect() < 1e-12);
    assert_eq!(inc.shape(), (12, 6));
}

#[test]
fn flex_matches_printed_vector() {
    let fw = prism();
    let f = exact_flex(&fw);
    let printed = DVector::from_column_slice(&FLEX);
    let scale = 1.58 / f.amax();
    let sign = f.dot(&printed).signum();
    let scaled = f * scale * sign;
    let err = (&scaled - &printed).amax();
    assert!(err < 1e-2, "max entry error {err}");
    // The printed vector is itself (nearly) orthogonal to the rigid motions.
    let r = rigid_motion_basis(&fw.embedding);
    let residual = project_out(&DMatrix::from_column_slice(18, 1, &FLEX), &r);
    assert!((residual.column(0) - &printed).amax() < 1e-2);
}

#[test]
fn flex_and_rigid_motions_annihilated() {
    let fw = prism();
    let jac = jacobian_at(&fw.system, &fw.embedding).unwrap();
    let rep = rigidity_report(&fw.system, &fw.embedding, &ReportOptions::default()).unwrap();
    for v in rep.rigid_motions.iter().chain(&rep.flexes) {
        let r = &jac * DVector::from_column_slice(v);
        assert!(r.amax() < 1e-10 * jac.norm());
    }
    let c = vec![1.0; 12];
    let (k, _) = stiffness_and_energy(&fw.system, &fw.embedding, &c, &[0.0; 12]).unwrap();
    for v in rep.rigid_motions.iter().chain(&rep.flexes) {
        assert!(quadratic_form(&k, v) < 1e-10);
    }
}

#[test]
fn stress_matches_printed_table() {
    let fw = prism();
    let basis = self_stress_basis(&fw.system, &fw.embedding, 1e-8).unwrap();
    assert_eq!(basis.len(), 1);
    let w = basis[0].scaled_to(0).unwrap();
    for (a, b) in w.iter().zip(STRESS) {
        assert!((a - b).abs() < 1e-2, "{w:?}");
    }
    let q = random_prism(5);
    assert!(self_stress_basis(&q.system, &q.embedding, 1e-8).unwrap().is_empty());
}

#[test]
fn node_one_stress_block() {
    let fw = prism();
    let w: Vec<f64> = (1..=12).map(|k| k as f64 * 0.25 - 1.0).collect();
    let omega = stress_matrix(&fw.graph, &w).unwrap();
    let expect = w[0] + w[1] + w[2] + w[3];
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(omega[(a, b)], if a == b { expect } else { 0.0 });
        }
    }
}

/// The exact flex scaled so its largest entry is `1 + 1/√3`, against the
/// exact stress with unit entry on member (1,2), gives `48 + 24√3`.
#[test]
fn exact_energy_reconstruction() {
    let fw = prism();
    let f = exact_flex(&fw);
    let sign = f.dot(&DVector::from_column_slice(&FLEX)).signum();
    let peak = f.amax();
    let v = f * ((1.0 + 1.0 / 3f64.sqrt()) / peak) * sign;
    let basis = self_stress_basis(&fw.system, &fw.embedding, 1e-8).unwrap();
    let w = basis[0].scaled_to(0).unwrap();
    let omega = stress_matrix(&fw.graph, &w).unwrap();
    let e = quadratic_form(&omega, v.as_slice());
    assert!((e - (48.0 + 24.0 * 3f64.sqrt())).abs() < 1e-9, "{e}");
}

#[test]
fn prestress_certificate_outcomes() {
    let fw = prism();
    let out = prestress_certificate(&fw.system, &fw.embedding, &PrestressOptions::default()).unwrap();
    let PrestressOutcome::Found(cert) = out else { panic!("{out:?}") };
    assert_eq!(cert.coefficients.len(), 1);
    assert!(cert.min_eigenvalue > 1.0, "{}", cert.min_eigenvalue);
    assert!(cert.cables_positive && cert.struts_negative);
    assert!(cert.zero_members.is_empty());

    let q = random_prism(3);
    let out = prestress_certificate(&q.system, &q.embedding, &PrestressOptions::default()).unwrap();
    assert!(matches!(out, PrestressOutcome::InfinitesimallyRigid));
}

#[test]
fn moving_frame_matches_printed_matrix() {
    let fw = prism();
    let pinned = pin_moving_frame(&fw.embedding).unwrap();
    let expect = [
        [0.0, 0.0, 0.0],
        [1.7320508075688772, 0.0, 0.0],
        [0.8660254037844388, -1.5, 0.0],
        [1.3660254037844386, -1.3660254037844386, 3.0],
        [-0.1339745962155613, -0.5, 3.0],
        [1.3660254037844388, 0.3660254037844386, 3.0],
    ];
    for (i, row) in expect.iter().enumerate() {
        for k in 0..3 {
            assert!((pinned.node(i)[k] - row[k]).abs() < 1e-12, "node {} coord {k}", i + 1);
        }
    }
    // Pinning preserves member lengths and is idempotent.
    let res = fw.system.residuals(&pinned).unwrap();
    assert!(res.iter().all(|r| r.abs() < 1e-12));
    assert_eq!(pin_moving_frame(&pinned).unwrap(), pinned);
}
