//! ε-local rigidity via distance-critical points on a sum-of-squares
//! hypersurface.
//!
//! With `F(x) = Σ g_ij(x)² + s(x)²` and `s(x) = ‖x - p‖² - ε²`, any real point
//! of the member variety on the ε-sphere is a zero of `F`. For a small
//! `δ > 0` the level set `F = δ` is a compact smooth hypersurface hugging
//! those points, and every component of it carries a critical point of the
//! distance to a generic point `a`. We solve
//!
//! ```text
//!     F(x) - δ = 0,    x - a - λ·∇F(x) = 0
//! ```
//!
//! in `(x, λ)` by total degree (every equation has degree 4), then refine
//! real solutions by Gauss-Newton on `[g; s] = 0`. No real critical point,
//! or none that refines to the variety, means the sphere misses it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::deform::{PinnedSystem, DEFAULT_TAU_IMAG};
use super::poly::{MultiPoly, PolySystem, C64};
use super::total_degree::{solve_total_degree_report, SolveOptions, DEFAULT_PATH_BUDGET};
use super::tracker::TrackStatus;
use crate::error::{Error, Result};
use crate::framework::{Configuration, MemberConstraintSystem};
use crate::rigidity::check_pinned;

#[derive(Clone, Debug)]
pub struct EpsilonOptions {
    pub seed: u64,
    /// `δ = (delta_rel·ε)²`.
    pub delta_rel: f64,
    pub tau_imag: f64,
    pub tau_feas: f64,
    pub path_budget: u64,
    /// Fraction of step-underflow paths above which a negative answer is
    /// reported as inconclusive.
    pub failure_threshold: f64,
    pub refine_iters: usize,
    pub solve: SolveOptions,
}

impl Default for EpsilonOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            delta_rel: 1e-2,
            tau_imag: DEFAULT_TAU_IMAG,
            tau_feas: 1e-8,
            path_budget: DEFAULT_PATH_BUDGET,
            failure_threshold: 0.05,
            refine_iters: 100,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonVerdict {
    EpsilonLocallyRigid,
    DeformationFound,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub configuration: Vec<Vec<f64>>,
    pub member_residual: f64,
    /// `‖x - p‖ - ε`.
    pub sphere_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonReport {
    pub verdict: EpsilonVerdict,
    pub epsilon: f64,
    pub variables: usize,
    pub path_count: u128,
    pub converged: usize,
    pub diverged: usize,
    pub step_underflow: usize,
    pub real_critical_points: usize,
    pub witnesses: Vec<Witness>,
}

/// Total-degree path count `4^(N+1)` for `N` pinned variables.
pub fn epsilon_path_count(variables: usize) -> u128 {
    4u128.saturating_pow(variables as u32 + 1)
}

fn critical_point_system(pinned: &PinnedSystem, y0: &[f64], epsilon: f64, a: &[f64], delta: f64) -> PolySystem {
    let nv = pinned.variable_count();
    let tot = nv + 1;
    let lift = |p: &MultiPoly| {
        MultiPoly::from_terms(
            tot,
            p.terms().map(|(e, c)| {
                let mut e2 = e.clone();
                e2.push(0);
                (e2, *c)
            }),
        )
    };
    let mut sphere = MultiPoly::constant(tot, -epsilon * epsilon);
    for (i, &c) in y0.iter().enumerate() {
        let diff = &MultiPoly::var(tot, i) - &MultiPoly::constant(tot, c);
        sphere = &sphere + &(&diff * &diff);
    }
    let sos = pinned
        .members
        .polys()
        .iter()
        .map(lift)
        .chain([sphere])
        .fold(MultiPoly::zero(tot), |acc, g| &acc + &(&g * &g));
    let lambda = MultiPoly::var(tot, nv);
    let mut polys = vec![&sos - &MultiPoly::constant(tot, delta)];
    for i in 0..nv {
        let lagrange = &(&MultiPoly::var(tot, i) - &MultiPoly::constant(tot, a[i])) - &(&lambda * &sos.partial(i));
        polys.push(lagrange);
    }
    PolySystem::with_vars(tot, polys)
}

/// Gauss-Newton on `[g; s] = 0` from `y`.
fn refine(pinned: &PinnedSystem, y0: &[f64], epsilon: f64, y: &[f64], iters: usize) -> Vec<f64> {
    let nv = pinned.variable_count();
    let mut y = DVector::from_column_slice(y);
    for _ in 0..iters {
        let yc: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
        let (g, jg) = pinned.members.eval_and_jacobian(&yc);
        let m = g.len();
        let mut r = DVector::zeros(m + 1);
        let mut j = DMatrix::zeros(m + 1, nv);
        for k in 0..m {
            r[k] = g[k].re;
            for c in 0..nv {
                j[(k, c)] = jg[(k, c)].re;
            }
        }
        r[m] = y.iter().zip(y0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() - epsilon * epsilon;
        for c in 0..nv {
            j[(m, c)] = 2.0 * (y[c] - y0[c]);
        }
        let Ok(step) = j.svd(true, true).solve(&(-&r), 1e-14) else { break };
        y += &step;
        if step.norm() <= 1e-15 * (1.0 + y.norm()) {
            break;
        }
    }
    y.as_slice().to_vec()
}

/// Decide whether the member variety meets the ε-sphere around `p` in real
/// points. `p` must already be pinned.
pub fn epsilon_rigidity_check(
    sys: &MemberConstraintSystem,
    p: &Configuration,
    epsilon: f64,
    opts: &EpsilonOptions,
) -> Result<EpsilonReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let scale = p.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    check_pinned(p, 1e-9 * scale)?;
    let pinned = PinnedSystem::new(sys);
    let nv = pinned.variable_count();
    let count = epsilon_path_count(nv);
    if count > opts.path_budget as u128 {
        return Err(Error::PathBudget { paths: count, budget: opts.path_budget });
    }

    let y0 = pinned.restrict(p);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a: Vec<f64> = y0
        .iter()
        .map(|c| c + epsilon * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();
    let delta = (opts.delta_rel * epsilon).powi(2);
    let system = critical_point_system(&pinned, &y0, epsilon, &a, delta);
    let solve = SolveOptions { seed: opts.seed, path_budget: opts.path_budget, ..opts.solve.clone() };
    let report = solve_total_degree_report(&system, &solve)?;

    let mut witnesses = Vec::new();
    let mut real_critical = 0;
    for r in report.converged() {
        if !r.is_real(opts.tau_imag * (1.0 + r.endpoint.iter().map(|c| c.norm()).fold(0.0, f64::max))) {
            continue;
        }
        real_critical += 1;
        let y = refine(&pinned, &y0, epsilon, &r.real_part()[..nv], opts.refine_iters);
        let x = pinned.lift(&y)?;
        let member_residual = sys.residuals(&x)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dist = y.iter().zip(&y0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let sphere_residual = dist - epsilon;
        if member_residual < opts.tau_feas && sphere_residual.abs() < opts.tau_feas {
            witnesses.push(Witness { configuration: x.rows(), member_residual, sphere_residual });
        }
    }

    let underflow = report.count(TrackStatus::StepUnderflow);
    let verdict = if !witnesses.is_empty() {
        EpsilonVerdict::DeformationFound
    } else if underflow as f64 > opts.failure_threshold * report.paths.len() as f64 {
        EpsilonVerdict::Inconclusive
    } else {
        EpsilonVerdict::EpsilonLocallyRigid
    };
    Ok(EpsilonReport {
        verdict,
        epsilon,
        variables: nv,
        path_count: count,
        converged: report.count(TrackStatus::Converged),
        diverged: report.count(TrackStatus::Diverged),
        step_underflow: underflow,
        real_critical_points: real_critical,
        witnesses,
    })
}
