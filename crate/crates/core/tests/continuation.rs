use nalgebra::DVector;
use tensegrity_core::continuation::poly::univariate;
use tensegrity_core::continuation::total_degree::{converged_endpoints, multiset_distance};
use tensegrity_core::continuation::{
    deform_framework, epsilon_rigidity_check, solve_total_degree, track_path, C64, DeformDirection,
    DeformOptions, EpsilonOptions, EpsilonVerdict, Homotopy, MultiPoly, PolySystem, SolveOptions,
    TrackerOptions,
};
use tensegrity_core::linalg::project_out;
use tensegrity_core::rigidity::{pin_moving_frame, rigid_motion_basis, rigidity_report, ReportOptions};
use tensegrity_core::{load_framework, Framework};

fn fixture(name: &str) -> Framework {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    load_framework(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pinned(name: &str) -> Framework {
    let fw = fixture(name);
    let p = pin_moving_frame(&fw.embedding).unwrap();
    fw.with_embedding(p).unwrap()
}

fn points(v: &[(f64, f64)]) -> Vec<Vec<C64>> {
    v.iter().map(|&(a, b)| vec![C64::new(a, b)]).collect()
}

#[test]
fn both_cubics() {
    let cases: [(&[f64], Vec<Vec<C64>>); 2] = [
        (&[1.0, -7.0, 17.0, -15.0], points(&[(3.0, 0.0), (2.0, 1.0), (2.0, -1.0)])),
        (&[1.0, -5.0, -7.0, 51.0], points(&[(-3.0, 0.0), (4.0, 1.0), (4.0, -1.0)])),
    ];
    for (coeffs, expect) in cases {
        let f = PolySystem::new(vec![univariate(coeffs)]).unwrap();
        let r = solve_total_degree(&f, &SolveOptions::default()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|p| p.is_converged()));
        assert!(multiset_distance(&converged_endpoints(&r), &expect) < 1e-8);
    }
}

#[test]
fn start_roots_of_unity_reach_shifted_cubic() {
    let f = PolySystem::new(vec![univariate(&[1.0, -5.0, -7.0, 51.0])]).unwrap();
    let g = PolySystem::new(vec![univariate(&[1.0, 0.0, 0.0, -1.0])]).unwrap();
    let h = Homotopy::new(f, g, C64::from_polar(1.0, 2.1)).unwrap();
    let got: Vec<Vec<C64>> = (0..3)
        .map(|k| {
            let x0 = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
            track_path(&h, &[x0], &TrackerOptions::default()).unwrap().endpoint
        })
        .collect();
    let expect = points(&[(-3.0, 0.0), (4.0, 1.0), (4.0, -1.0)]);
    assert!(multiset_distance(&got, &expect) < 1e-8);
}

#[test]
fn gamma_redraw_keeps_endpoints() {
    let x = MultiPoly::var(2, 0);
    let y = MultiPoly::var(2, 1);
    let one = MultiPoly::constant(2, 1.0);
    // x² + y² = 4, xy = 1: four real solutions.
    let f = PolySystem::new(vec![
        &(&(&x * &x) + &(&y * &y)) - &one.scale(4.0),
        &(&x * &y) - &one,
    ])
    .unwrap();
    let a = converged_endpoints(&solve_total_degree(&f, &SolveOptions { seed: 1, ..Default::default() }).unwrap());
    let b = converged_endpoints(&solve_total_degree(&f, &SolveOptions { seed: 2, ..Default::default() }).unwrap());
    assert_eq!(a.len(), 4);
    assert!(multiset_distance(&a, &b) < 1e-6);
}

#[test]
fn triangle_is_epsilon_rigid() {
    let fw = pinned("triangle");
    let rep = epsilon_rigidity_check(&fw.system, &fw.embedding, 0.1, &EpsilonOptions::default()).unwrap();
    assert_eq!(rep.path_count, 256);
    assert_eq!(rep.verdict, EpsilonVerdict::EpsilonLocallyRigid, "{rep:?}");
}

#[test]
fn hinge_deforms_through_sphere() {
    let fw = pinned("hinge");
    let rep = epsilon_rigidity_check(&fw.system, &fw.embedding, 0.1, &EpsilonOptions::default()).unwrap();
    assert_eq!(rep.verdict, EpsilonVerdict::DeformationFound, "{rep:?}");
    for w in &rep.witnesses {
        assert!(w.member_residual < 1e-8);
        // Node 3 stays on the unit circle about node 1 at distance ε from p.
        let n3 = &w.configuration[2];
        assert!((n3[0].hypot(n3[1]) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn prism_epsilon_check_exceeds_default_budget() {
    let fw = pinned("3prism");
    let err = epsilon_rigidity_check(&fw.system, &fw.embedding, 0.1, &EpsilonOptions::default()).unwrap_err();
    assert!(matches!(err, tensegrity_core::Error::PathBudget { paths: 67_108_864, .. }));
}

#[test]
fn prism_twists_both_ways() {
    let fw = pinned("3prism");
    let rep = rigidity_report(&fw.system, &fw.embedding, &ReportOptions::default()).unwrap();
    let flex = DVector::from_column_slice(&rep.flexes[0]);
    let rigid = rigid_motion_basis(&fw.embedding);
    let p = fw.embedding.to_vector();
    for eps in [0.05, -0.05] {
        let d = deform_framework(&fw.system, &fw.embedding, &DeformDirection::Flex, eps, 1, &DeformOptions::default())
            .unwrap();
        let step = &d.steps[0];
        assert!(step.track.is_converged(), "{:?}", step.track.status);
        assert!(step.real);
        assert!(step.member_residual > 1e-8 && step.member_residual < 1e-1, "{}", step.member_residual);
        let x = DVector::from_iterator(18, step.configuration.concat());
        let diff = nalgebra::DMatrix::from_column_slice(18, 1, (x - &p).as_slice());
        let disp = project_out(&diff, &rigid).column(0).into_owned();
        let cos = disp.dot(&flex) / (disp.norm() * flex.norm());
        assert!(cos.abs() > 0.9, "cos {cos}");
        let z: Vec<f64> = step.configuration[3..].iter().map(|n| n[2]).collect();
        assert!(z.iter().all(|&v| v < 3.0) || z.iter().all(|&v| v > 3.0), "{z:?}");
        println!("eps {eps}: cos {cos:.4} residual {:.3e} z {z:?}", step.member_residual);
    }
}

/// The pinned triangle's member equations have finitely many real solutions,
/// none of them on the 0.1-sphere around p.
#[test]
fn triangle_oracle_by_exhaustive_solve() {
    let fw = pinned("triangle");
    let ps = tensegrity_core::continuation::PinnedSystem::new(&fw.system);
    let y0 = ps.restrict(&fw.embedding);
    let sols = solve_total_degree(&ps.members, &SolveOptions::default()).unwrap();
    let real: Vec<Vec<f64>> = sols
        .iter()
        .filter(|r| r.is_converged() && r.is_real(1e-8))
        .map(|r| r.real_part())
        .collect();
    assert_eq!(real.len(), 4);
    for y in &real {
        let dist = y.iter().zip(&y0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 1e-8 || dist > 0.5, "{dist}");
    }
}

/// The hinge's free node sweeps the unit circle; the sphere meets it where
/// the chord from (0, 1) has length ε.
#[test]
fn hinge_witnesses_match_angle_parametrization() {
    let fw = pinned("hinge");
    let eps: f64 = 0.1;
    let rep = epsilon_rigidity_check(&fw.system, &fw.embedding, eps, &EpsilonOptions { seed: 4, ..Default::default() })
        .unwrap();
    let theta = 2.0 * (eps / 2.0).asin();
    let expect = [(-theta.sin(), theta.cos()), (theta.sin(), theta.cos())];
    assert!(!rep.witnesses.is_empty());
    for w in &rep.witnesses {
        let n3 = &w.configuration[2];
        assert!(expect.iter().any(|(x, y)| (n3[0] - x).abs() < 1e-8 && (n3[1] - y).abs() < 1e-8), "{n3:?}");
        assert_eq!(w.configuration[1], vec![1.0, 0.0]);
    }
}

/// Full total-degree run on the prism: 4^13 paths. Hours of compute.
#[test]
#[ignore]
fn prism_is_epsilon_rigid_stretch() {
    let fw = pinned("3prism");
    let opts = EpsilonOptions { path_budget: 70_000_000, ..Default::default() };
    let rep = epsilon_rigidity_check(&fw.system, &fw.embedding, 0.1, &opts).unwrap();
    assert_eq!(rep.verdict, EpsilonVerdict::EpsilonLocallyRigid);
}
