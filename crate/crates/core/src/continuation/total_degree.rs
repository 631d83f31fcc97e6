//! Total-degree homotopy: one path per root of `x_i^{d_i} = 1`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::poly::{slice_norm, MultiPoly, PolySystem, C64};
use super::tracker::{
    endpoint_tolerance, max_imag, newton_polish, track_path, Homotopy, TrackResult, TrackStatus,
    TrackerOptions,
};
use crate::error::{Error, Result};

pub const DEFAULT_PATH_BUDGET: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub tracker: TrackerOptions,
    /// Track in projective space on a random affine chart, so paths heading
    /// to infinity stay bounded.
    pub projective: bool,
    pub path_budget: u64,
    /// `|x_0|/‖X‖` below this marks a projective endpoint as at infinity.
    pub infinity_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tracker: TrackerOptions::default(),
            projective: true,
            path_budget: DEFAULT_PATH_BUDGET,
            infinity_tol: 1e-8,
        }
    }
}

/// `Π d_i`.
pub fn bezout_count(f: &PolySystem) -> u128 {
    f.degrees().iter().map(|&d| d as u128).product()
}

pub fn random_gamma<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..TAU))
}

/// The `index`-th start root in mixed radix over the degrees.
fn start_root(degrees: &[u32], mut index: u128) -> Vec<C64> {
    degrees
        .iter()
        .map(|&d| {
            let k = (index % d as u128) as f64;
            index /= d as u128;
            C64::from_polar(1.0, TAU * k / d as f64)
        })
        .collect()
}

fn start_system(degrees: &[u32], nvars: usize, offset: usize) -> Vec<MultiPoly> {
    degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let xi = MultiPoly::var(nvars, i + offset).pow(d);
            if offset == 0 {
                &xi - &MultiPoly::constant(nvars, 1.0)
            } else {
                &xi - &MultiPoly::var(nvars, 0).pow(d)
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub path_count: u128,
    pub gamma: C64,
    pub projective: bool,
    pub paths: Vec<TrackResult>,
}

impl SolveReport {
    pub fn converged(&self) -> impl Iterator<Item = &TrackResult> {
        self.paths.iter().filter(|r| r.is_converged())
    }

    pub fn count(&self, status: TrackStatus) -> usize {
        self.paths.iter().filter(|r| r.status == status).count()
    }
}

/// Check the system is square with positive degrees and fits the budget.
pub fn check_solvable(f: &PolySystem, budget: u64) -> Result<u128> {
    if !f.is_square() {
        return Err(Error::NotSquare { equations: f.len(), variables: f.nvars() });
    }
    if f.is_empty() {
        return Err(Error::InvalidArgument("empty system".into()));
    }
    if let Some(i) = f.degrees().iter().position(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!("equation {} is constant", i + 1)));
    }
    let count = bezout_count(f);
    if count > budget as u128 {
        return Err(Error::PathBudget { paths: count, budget });
    }
    Ok(count)
}

/// Solve a square system by a total-degree homotopy; results are in
/// start-root order.
pub fn solve_total_degree(f: &PolySystem, opts: &SolveOptions) -> Result<Vec<TrackResult>> {
    Ok(solve_total_degree_report(f, opts)?.paths)
}

pub fn solve_total_degree_report(f: &PolySystem, opts: &SolveOptions) -> Result<SolveReport> {
    let count = check_solvable(f, opts.path_budget)?;
    let degrees = f.degrees();
    let n = f.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let gamma = random_gamma(&mut rng);

    let paths = if opts.projective {
        let patch: Vec<C64> =
            (0..=n).map(|_| C64::from_polar(1.0, rng.random_range(0.0..TAU))).collect();
        let patch_poly = MultiPoly::from_terms(
            n + 1,
            (0..=n)
                .map(|i| {
                    let mut e = vec![0; n + 1];
                    e[i] = 1;
                    (e, patch[i])
                })
                .chain([(vec![0; n + 1], C64::new(-1.0, 0.0))]),
        );
        let mut target = f.homogenize().polys().to_vec();
        target.push(patch_poly.clone());
        let mut start = start_system(&degrees, n + 1, 1);
        start.push(patch_poly);
        let h = Homotopy::new(
            PolySystem::with_vars(n + 1, target),
            PolySystem::with_vars(n + 1, start),
            gamma,
        )?;
        (0..count)
            .into_par_iter()
            .map(|k| {
                let mut x = vec![C64::new(1.0, 0.0)];
                x.extend(start_root(&degrees, k));
                let s: C64 = x.iter().zip(&patch).map(|(a, b)| a * b).sum();
                let x: Vec<C64> = x.iter().map(|v| v / s).collect();
                let r = track_path(&h, &x, &opts.tracker)?;
                Ok(dehomogenize(f, r, opts))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let h = Homotopy::new(f.clone(), PolySystem::with_vars(n, start_system(&degrees, n, 0)), gamma)?;
        (0..count)
            .into_par_iter()
            .map(|k| track_path(&h, &start_root(&degrees, k), &opts.tracker))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SolveReport { path_count: count, gamma, projective: opts.projective, paths })
}

fn dehomogenize(f: &PolySystem, r: TrackResult, opts: &SolveOptions) -> TrackResult {
    let x0 = r.endpoint[0];
    let scale = slice_norm(&r.endpoint);
    let trajectory = r.trajectory.map(|tr| {
        tr.into_iter()
            .map(|p| {
                let z = p.x[0];
                super::tracker::TrajectoryPoint { t: p.t, x: p.x[1..].iter().map(|v| v / z).collect() }
            })
            .collect()
    });
    let affine: Vec<C64> = r.endpoint[1..].iter().map(|v| v / x0).collect();
    let at_infinity = x0.norm() <= opts.infinity_tol * scale;
    // Paths that reached the endgame at a finite point get a second chance on
    // the affine system, where badly scaled charts no longer matter.
    let finished = r.t_reached <= opts.tracker.t_cutoff
        && matches!(r.status, TrackStatus::Converged | TrackStatus::Diverged);
    let (endpoint, status) = if finished && !at_infinity {
        let polished = newton_polish(f, &affine, opts.tracker.polish_iters);
        let res = slice_norm(f.eval(&polished).as_slice());
        let moved = slice_norm(&polished.iter().zip(&affine).map(|(a, b)| a - b).collect::<Vec<_>>());
        let ok = res <= endpoint_tolerance(opts.tracker.tol_end, &polished, f.max_degree())
            && moved <= opts.tracker.t_cutoff.sqrt() * (1.0 + slice_norm(&affine));
        (polished, if ok { TrackStatus::Converged } else { TrackStatus::Diverged })
    } else if r.status == TrackStatus::Converged {
        (affine, TrackStatus::Diverged)
    } else {
        (affine, r.status)
    };
    let residual = slice_norm(f.eval(&endpoint).as_slice());
    TrackResult {
        max_imag: max_imag(&endpoint),
        residual,
        endpoint,
        status,
        trajectory,
        ..r
    }
}

/// Endpoints of converged paths.
pub fn converged_endpoints(results: &[TrackResult]) -> Vec<Vec<C64>> {
    results.iter().filter(|r| r.is_converged()).map(|r| r.endpoint.clone()).collect()
}

/// Greedy matching distance between two point multisets: the largest
/// distance in an optimal-ish pairing, or infinity if the sizes differ.
pub fn multiset_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for p in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, q)| (j, slice_norm(&p.iter().zip(q).map(|(x, y)| x - y).collect::<Vec<_>>())))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Real `k × m` matrix as complex.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}
