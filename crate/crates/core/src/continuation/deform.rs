//! Following a framework along a moving hyperplane `vᵀx - vᵀp = c`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::poly::{MultiPoly, PolySystem, C64};
use super::total_degree::complexify;
use super::tracker::{track_path, Homotopy, TrackResult, TrackStatus, TrackerOptions};
use crate::error::{Error, Result};
use crate::framework::{Configuration, MemberConstraintSystem};
use crate::linalg::{numerical_nullspace, DEFAULT_RANK_TOL};
use crate::rigidity::{check_pinned, free_coordinates, jacobian_at};

pub const DEFAULT_TAU_IMAG: f64 = 1e-6;

/// Member constraints restricted to the coordinates left free by the moving
/// frame.
#[derive(Clone, Debug)]
pub struct PinnedSystem {
    pub n: usize,
    pub d: usize,
    /// Flattened indices of the free coordinates, ascending.
    pub free: Vec<usize>,
    pub members: PolySystem,
}

impl PinnedSystem {
    pub fn new(sys: &MemberConstraintSystem) -> Self {
        let g = sys.graph();
        let (n, d) = (g.node_count(), g.dimension());
        let free = free_coordinates(n, d);
        let mut slot = vec![None; n * d];
        for (v, &c) in free.iter().enumerate() {
            slot[c] = Some(v);
        }
        let nv = free.len();
        let coord = |c: usize| match slot[c] {
            Some(v) => MultiPoly::var(nv, v),
            None => MultiPoly::zero(nv),
        };
        let polys = g
            .members()
            .iter()
            .zip(sys.rest_sq_lengths())
            .map(|(m, &len)| {
                let sq = (0..d).fold(MultiPoly::zero(nv), |acc, k| {
                    let diff = &coord(m.i * d + k) - &coord(m.j * d + k);
                    &acc + &(&diff * &diff)
                });
                &sq - &MultiPoly::constant(nv, len)
            })
            .collect();
        Self { n, d, free, members: PolySystem::with_vars(nv, polys) }
    }

    pub fn variable_count(&self) -> usize {
        self.free.len()
    }

    pub fn restrict(&self, x: &Configuration) -> Vec<f64> {
        self.free.iter().map(|&c| x.as_slice()[c]).collect()
    }

    pub fn lift(&self, y: &[f64]) -> Result<Configuration> {
        let mut coords = vec![0.0; self.n * self.d];
        for (&c, &v) in self.free.iter().zip(y) {
            coords[c] = v;
        }
        Configuration::new(self.n, self.d, coords)
    }

    /// Jacobian columns for the free coordinates.
    pub fn jacobian(&self, sys: &MemberConstraintSystem, x: &Configuration) -> Result<DMatrix<f64>> {
        let full = jacobian_at(sys, x)?;
        Ok(full.select_columns(self.free.iter()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeformDirection {
    /// Normal vector in pinned coordinates.
    Vector(Vec<f64>),
    Random,
    /// Nullspace vector of the pinned Jacobian, oriented so its largest
    /// entry is positive.
    Flex,
}

#[derive(Clone, Debug)]
pub struct DeformOptions {
    pub seed: u64,
    pub tau_imag: f64,
    pub tracker: TrackerOptions,
}

impl Default for DeformOptions {
    fn default() -> Self {
        Self { seed: 0, tau_imag: DEFAULT_TAU_IMAG, tracker: TrackerOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformStep {
    pub offset: f64,
    /// Real part of the endpoint in full coordinates.
    pub configuration: Vec<Vec<f64>>,
    pub real: bool,
    pub max_imag: f64,
    /// Largest member-constraint violation at the real part.
    pub member_residual: f64,
    pub track: TrackResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    pub direction: Vec<f64>,
    pub epsilon: f64,
    pub steps: Vec<DeformStep>,
}

fn direction_vector(
    pinned: &PinnedSystem,
    sys: &MemberConstraintSystem,
    p: &Configuration,
    direction: &DeformDirection,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let nv = pinned.variable_count();
    let v = match direction {
        DeformDirection::Vector(v) => {
            if v.len() != nv {
                return Err(Error::ShapeMismatch {
                    expected: format!("direction of length {nv}"),
                    found: v.len().to_string(),
                });
            }
            v.clone()
        }
        DeformDirection::Random => (0..nv).map(|_| StandardNormal.sample(rng)).collect(),
        DeformDirection::Flex => {
            let null = numerical_nullspace(&pinned.jacobian(sys, p)?, DEFAULT_RANK_TOL);
            if null.corank() == 0 {
                return Err(Error::NoFlex);
            }
            let col: Vec<f64> = null.basis.column(0).iter().copied().collect();
            let peak = col.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            col.iter().map(|x| x * peak.signum()).collect()
        }
    };
    if v.iter().all(|x| *x == 0.0) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("direction must be finite and nonzero".into()));
    }
    Ok(v)
}

/// `R·[g(x); vᵀx - vᵀp - c]`, squared up by the fixed matrix `R`.
fn hyperplane_system(
    pinned: &PinnedSystem,
    v: &[f64],
    vp: f64,
    offset: f64,
    r: &DMatrix<C64>,
) -> Result<PolySystem> {
    let nv = pinned.variable_count();
    let plane = MultiPoly::from_terms(
        nv,
        v.iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; nv];
                e[i] = 1;
                (e, C64::new(c, 0.0))
            })
            .chain([(vec![0; nv], C64::new(-vp - offset, 0.0))]),
    );
    let mut polys = pinned.members.polys().to_vec();
    polys.push(plane);
    PolySystem::with_vars(nv, polys).combine(r)
}

/// Track the point `p` through `steps` successive hyperplane offsets
/// `ε, 2ε, …`, re-anchoring at each endpoint. `p` must already be pinned.
pub fn deform_framework(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    direction: &DeformDirection,
    epsilon: f64,
    steps: usize,
    opts: &DeformOptions,
) -> Result<Deformation> {
    if !epsilon.is_finite() {
        return Err(Error::NonFinite("epsilon".into()));
    }
    let scale = p.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    check_pinned(p, 1e-9 * scale)?;
    let pinned = PinnedSystem::new(sys);
    let nv = pinned.variable_count();
    let eqs = pinned.members.len() + 1;
    if eqs < nv {
        return Err(Error::NotSquare { equations: eqs, variables: nv });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let v = direction_vector(&pinned, sys, p, direction, &mut rng)?;
    let r = if eqs == nv {
        DMatrix::identity(nv, nv)
    } else {
        DMatrix::from_fn(nv, eqs, |_, _| StandardNormal.sample(&mut rng))
    };
    let r = complexify(&r);
    let y0 = pinned.restrict(p);
    let vp: f64 = v.iter().zip(&y0).map(|(a, b)| a * b).sum();

    let mut x: Vec<C64> = y0.iter().map(|&c| C64::new(c, 0.0)).collect();
    let mut out = Vec::with_capacity(steps);
    for k in 1..=steps {
        let start = hyperplane_system(&pinned, &v, vp, (k - 1) as f64 * epsilon, &r)?;
        let target = hyperplane_system(&pinned, &v, vp, k as f64 * epsilon, &r)?;
        let h = Homotopy::real_parameter(target, start)?;
        let mut track = match track_path(&h, &x, &opts.tracker) {
            Ok(t) => t,
            Err(Error::BadStartPoint { .. }) => break,
            Err(e) => return Err(e),
        };
        let failed = !track.is_converged();
        if failed {
            track.status = TrackStatus::NoRealSolution;
        }
        let real_part = pinned.lift(&track.real_part())?;
        let residuals = sys.residuals(&real_part)?;
        out.push(DeformStep {
            offset: k as f64 * epsilon,
            configuration: real_part.rows(),
            real: track.is_real(opts.tau_imag),
            max_imag: track.max_imag,
            member_residual: residuals.iter().fold(0.0, |a, r| a.max(r.abs())),
            track,
        });
        if failed {
            break;
        }
        x = out.last().expect("just pushed").track.endpoint.clone();
    }
    Ok(Deformation { direction: v, epsilon, steps: out })
}

/// `|cos|` of the angle between two vectors, signed by `sign`.
pub fn signed_cosine(a: &DVector<f64>, b: &DVector<f64>, sign: f64) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    sign.signum() * a.dot(b) / denom
}
