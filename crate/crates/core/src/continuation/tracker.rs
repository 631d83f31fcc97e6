//! Predictor-corrector tracking of `h(x, t) = (1 - t)·f(x) + γ·t·g(x)` from
//! `t = 1` down to `t = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::poly::{norm, slice_norm, PolySystem, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Homotopy {
    target: PolySystem,
    start: PolySystem,
    gamma: C64,
}

impl Homotopy {
    pub fn new(target: PolySystem, start: PolySystem, gamma: C64) -> Result<Self> {
        if target.nvars() != start.nvars() || target.len() != start.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} equations in {} variables", target.len(), target.nvars()),
                found: format!("{} equations in {} variables", start.len(), start.nvars()),
            });
        }
        if !target.is_square() {
            return Err(Error::NotSquare { equations: target.len(), variables: target.nvars() });
        }
        if (gamma.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("|gamma| must be 1, got {}", gamma.norm())));
        }
        Ok(Self { target, start, gamma })
    }

    /// Straight-line homotopy without the γ factor.
    pub fn real_parameter(target: PolySystem, start: PolySystem) -> Result<Self> {
        Self::new(target, start, C64::new(1.0, 0.0))
    }

    pub fn target(&self) -> &PolySystem {
        &self.target
    }

    pub fn start(&self) -> &PolySystem {
        &self.start
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    pub fn eval(&self, x: &[C64], t: f64) -> DVector<C64> {
        self.target.eval(x) * C64::new(1.0 - t, 0.0) + self.start.eval(x) * (self.gamma * t)
    }

    /// `(h, ∂h/∂x, ∂h/∂t)`.
    fn eval_all(&self, x: &[C64], t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let (f, jf) = self.target.eval_and_jacobian(x);
        let (g, jg) = self.start.eval_and_jacobian(x);
        let a = C64::new(1.0 - t, 0.0);
        let b = self.gamma * t;
        let h = &f * a + &g * b;
        let jh = jf * a + jg * b;
        let ht = g * self.gamma - f;
        (h, jh, ht)
    }

    /// Davidenko right-hand side `dx/dt = -(∂h/∂x)⁻¹·∂h/∂t`.
    fn velocity(&self, x: &DVector<C64>, t: f64) -> Option<DVector<C64>> {
        let (_, jh, ht) = self.eval_all(x.as_slice(), t);
        jh.lu().solve(&(-ht))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Euler,
    Rk4,
}

#[derive(Clone, Debug)]
pub struct TrackerOptions {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub t_cutoff: f64,
    /// Newton corrector stops once `‖Δx‖ ≤ corrector_tol·(1 + ‖x‖)`.
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    /// Consecutive accepted steps before the step size doubles.
    pub expand_after: usize,
    pub divergence_norm: f64,
    pub tol_start: f64,
    pub tol_end: f64,
    pub polish_iters: usize,
    pub max_steps: usize,
    pub predictor: Predictor,
    pub record_trajectory: bool,
}

impl Default for TrackerOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            max_step: 0.1,
            min_step: 1e-12,
            t_cutoff: 1e-4,
            corrector_tol: 1e-10,
            max_corrector_iters: 3,
            expand_after: 5,
            divergence_norm: 1e10,
            tol_start: 1e-8,
            tol_end: 1e-8,
            polish_iters: 50,
            max_steps: 50_000,
            predictor: Predictor::Rk4,
            record_trajectory: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Converged,
    /// The path left every bounded region, or its endpoint is not a regular
    /// finite solution of the target.
    Diverged,
    StepUnderflow,
    NoRealSolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackResult {
    pub endpoint: Vec<C64>,
    pub status: TrackStatus,
    pub residual: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Parameter value reached before the endgame polish.
    pub t_reached: f64,
    pub max_imag: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl TrackResult {
    pub fn is_converged(&self) -> bool {
        self.status == TrackStatus::Converged
    }

    pub fn is_real(&self, tau_imag: f64) -> bool {
        self.max_imag < tau_imag
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.endpoint.iter().map(|c| c.re).collect()
    }
}

pub fn max_imag(x: &[C64]) -> f64 {
    x.iter().fold(0.0, |a, c| a.max(c.im.abs()))
}

/// Residual bound `tol·(1 + ‖x‖^deg)` used to accept an endpoint.
pub fn endpoint_tolerance(tol: f64, x: &[C64], degree: u32) -> f64 {
    tol * (1.0 + slice_norm(x).powi(degree as i32))
}

fn corrector(
    h: &Homotopy,
    x: &DVector<C64>,
    t: f64,
    opts: &TrackerOptions,
) -> Option<DVector<C64>> {
    let mut x = x.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..opts.max_corrector_iters {
        let (val, jac, _) = h.eval_all(x.as_slice(), t);
        let dx = jac.lu().solve(&(-val))?;
        let step = norm(&dx);
        if !step.is_finite() || step > 0.5 * prev {
            return None;
        }
        x += dx;
        if step <= opts.corrector_tol * (1.0 + norm(&x)) {
            return Some(x);
        }
        prev = step;
    }
    None
}

fn predict(h: &Homotopy, x: &DVector<C64>, t: f64, dt: f64, kind: Predictor) -> Option<DVector<C64>> {
    let k1 = h.velocity(x, t)?;
    match kind {
        Predictor::Euler => Some(x + k1 * C64::new(dt, 0.0)),
        Predictor::Rk4 => {
            let half = C64::new(dt / 2.0, 0.0);
            let k2 = h.velocity(&(x + &k1 * half), t + dt / 2.0)?;
            let k3 = h.velocity(&(x + &k2 * half), t + dt / 2.0)?;
            let k4 = h.velocity(&(x + &k3 * C64::new(dt, 0.0)), t + dt)?;
            Some(x + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0))
        }
    }
}

/// Newton on the target system until the update stalls; returns the best
/// point seen.
pub fn newton_polish(f: &PolySystem, x: &[C64], iters: usize) -> Vec<C64> {
    let mut x = DVector::from_column_slice(x);
    let mut best = (norm(&f.eval(x.as_slice())), x.clone());
    for _ in 0..iters {
        let (val, jac) = f.eval_and_jacobian(x.as_slice());
        let Some(dx) = jac.lu().solve(&(-val)) else { break };
        let step = norm(&dx);
        if !step.is_finite() {
            break;
        }
        x += dx;
        let r = norm(&f.eval(x.as_slice()));
        if r < best.0 {
            best = (r, x.clone());
        }
        if step <= 1e-15 * (1.0 + norm(&x)) || r == 0.0 {
            break;
        }
    }
    best.1.as_slice().to_vec()
}

/// Track one path from `x0` (a root of the start system) to `t = 0`.
pub fn track_path(h: &Homotopy, x0: &[C64], opts: &TrackerOptions) -> Result<TrackResult> {
    if x0.len() != h.target.nvars() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} coordinates", h.target.nvars()),
            found: x0.len().to_string(),
        });
    }
    let start_res = norm(&h.eval(x0, 1.0));
    if !(start_res <= endpoint_tolerance(opts.tol_start, x0, h.start.max_degree())) {
        return Err(Error::BadStartPoint { residual: start_res });
    }

    let mut x = DVector::from_column_slice(x0);
    let mut t = 1.0;
    let mut dt = opts.initial_step;
    let mut accepted_run = 0;
    let (mut steps, mut rejected) = (0, 0);
    let mut trajectory = opts.record_trajectory.then(|| vec![TrajectoryPoint { t, x: x0.to_vec() }]);
    let mut status = None;

    while t > opts.t_cutoff {
        if steps + rejected >= opts.max_steps {
            status = Some(TrackStatus::StepUnderflow);
            break;
        }
        let step = dt.min(t - opts.t_cutoff);
        let t_new = t - step;
        let corrected = predict(h, &x, t, -step, opts.predictor).and_then(|xp| corrector(h, &xp, t_new, opts));
        match corrected {
            Some(xc) => {
                x = xc;
                t = t_new;
                steps += 1;
                accepted_run += 1;
                if let Some(tr) = trajectory.as_mut() {
                    tr.push(TrajectoryPoint { t, x: x.as_slice().to_vec() });
                }
                if norm(&x) > opts.divergence_norm {
                    status = Some(TrackStatus::Diverged);
                    break;
                }
                if accepted_run >= opts.expand_after {
                    dt = (dt * 2.0).min(opts.max_step);
                    accepted_run = 0;
                }
            }
            None => {
                rejected += 1;
                accepted_run = 0;
                dt /= 2.0;
                if dt < opts.min_step {
                    status = Some(TrackStatus::StepUnderflow);
                    break;
                }
            }
        }
    }
    let t_reached = t;

    let endpoint = if status.is_none() {
        newton_polish(&h.target, x.as_slice(), opts.polish_iters)
    } else {
        x.as_slice().to_vec()
    };
    let residual = norm(&h.target.eval(&endpoint));
    // A regular path is within O(t_cutoff) of its endpoint; a long polish jump
    // means the path was heading elsewhere, typically to infinity.
    let jump = slice_norm(&endpoint.iter().zip(x.iter()).map(|(a, b)| a - b).collect::<Vec<_>>());
    let jump_ok = jump <= opts.t_cutoff.sqrt() * (1.0 + norm(&x));
    let status = status.unwrap_or_else(|| {
        if jump_ok && residual <= endpoint_tolerance(opts.tol_end, &endpoint, h.target.max_degree()) {
            TrackStatus::Converged
        } else {
            TrackStatus::Diverged
        }
    });
    if let Some(tr) = trajectory.as_mut() {
        tr.push(TrajectoryPoint { t: 0.0, x: endpoint.clone() });
    }
    Ok(TrackResult {
        max_imag: max_imag(&endpoint),
        endpoint,
        status,
        residual,
        steps,
        rejected_steps: rejected,
        t_reached,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::poly::univariate;

    fn sys1(coeffs: &[f64]) -> PolySystem {
        PolySystem::new(vec![univariate(coeffs)]).unwrap()
    }

    fn gamma() -> C64 {
        C64::from_polar(1.0, 0.7)
    }

    #[test]
    fn cubic_from_root_one() {
        let h = Homotopy::new(sys1(&[1.0, -7.0, 17.0, -15.0]), sys1(&[1.0, 0.0, 0.0, -1.0]), gamma()).unwrap();
        let r = track_path(&h, &[C64::new(1.0, 0.0)], &TrackerOptions::default()).unwrap();
        assert_eq!(r.status, TrackStatus::Converged);
        let roots = [C64::new(3.0, 0.0), C64::new(2.0, 1.0), C64::new(2.0, -1.0)];
        assert!(roots.iter().any(|z| (r.endpoint[0] - z).norm() < 1e-8), "{:?}", r.endpoint);
    }

    #[test]
    fn identity_homotopy_is_stationary() {
        let f = sys1(&[1.0, 0.0, -2.0]);
        let h = Homotopy::new(f.clone(), f, gamma()).unwrap();
        let x0 = C64::new(2f64.sqrt(), 0.0);
        // With γ ≠ 1 the combination (1-t) + γt never vanishes, so roots stay put.
        let r = track_path(&h, &[x0], &TrackerOptions::default()).unwrap();
        assert!((r.endpoint[0] - x0).norm() < 1e-10);
        assert!(r.is_converged());
    }

    #[test]
    fn bad_start_point_rejected() {
        let h = Homotopy::new(sys1(&[1.0, -2.0]), sys1(&[1.0, -1.0]), gamma()).unwrap();
        assert!(matches!(
            track_path(&h, &[C64::new(5.0, 0.0)], &TrackerOptions::default()),
            Err(Error::BadStartPoint { .. })
        ));
    }

    #[test]
    fn gamma_must_be_unit() {
        assert!(Homotopy::new(sys1(&[1.0, -2.0]), sys1(&[1.0, -1.0]), C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn euler_predictor_and_trajectory() {
        let h = Homotopy::new(sys1(&[1.0, -4.0]), sys1(&[1.0, -1.0]), gamma()).unwrap();
        let opts = TrackerOptions { predictor: Predictor::Euler, record_trajectory: true, ..Default::default() };
        let r = track_path(&h, &[C64::new(1.0, 0.0)], &opts).unwrap();
        assert!((r.endpoint[0] - C64::new(4.0, 0.0)).norm() < 1e-10);
        let tr = r.trajectory.unwrap();
        assert_eq!(tr.first().unwrap().t, 1.0);
        assert_eq!(tr.last().unwrap().t, 0.0);
        assert!(tr.windows(2).all(|w| w[1].t < w[0].t));
    }

    #[test]
    fn root_at_infinity_is_not_converged() {
        // Target 0·x² + x - 1 drops a root; start x² - 1 has two roots.
        let target = sys1(&[0.0, 1.0, -1.0]);
        let h = Homotopy::new(target, sys1(&[1.0, 0.0, -1.0]), gamma()).unwrap();
        let results: Vec<_> = [1.0, -1.0]
            .iter()
            .map(|&s| track_path(&h, &[C64::new(s, 0.0)], &TrackerOptions::default()).unwrap())
            .collect();
        assert_eq!(results.iter().filter(|r| r.is_converged()).count(), 1);
    }
}
