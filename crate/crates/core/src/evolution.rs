//! One step of the discretized curve evolution and the smoothing driver.
//!
//! The intrinsic PDE splits point motion into a curvature-driven normal
//! velocity, an attracting normal velocity toward the original curve, and a
//! tangential velocity that redistributes points asymptotically uniformly.
//! Space is discretized with flowing finite volumes over the moving grid;
//! time stepping is semi-implicit: the diffusion term is implicit and the
//! advection term uses inflow-implicit/outflow-explicit splitting, falling
//! back to a first-order implicit upwind row wherever two consecutive
//! elements meet at an angle sharper than 120 degrees. Every row is
//! strictly diagonally dominant regardless of the time step, so both
//! coordinate systems are solved with the Thomas algorithm.

use crate::geom::Vec2;
use crate::intersect::{
    adaptive_params, detect_self_intersections, thin_points, IntersectionSpan,
};
use crate::ledger::{LedgerError, SegmentLedger};
use crate::trajectory::{resample, DiscreteCurve, Trajectory};
use thiserror::Error;

/// Interior angle threshold below which a vertex is treated as a
/// singularity and its row switches to the upwind scheme. The test is
/// `dot(h_i, h_{i+1}) / (|h_i||h_{i+1}|) < cos(60deg)`, which is the same
/// as the angle between the elements at their shared vertex being below
/// 120 degrees.
const SINGULAR_DOT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("non-finite system entry at row {row} (collapsed element; thin points)")]
    NonFinite { row: usize },
}

#[derive(Debug, Error)]
pub enum SmoothError {
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Parameters of the smoothing evolution.
///
/// In non-adaptive runs the curvature weight is `delta_min` and the
/// attraction weight `lambda_max` everywhere; adaptive runs ramp
/// `delta_max`/`lambda_max` around detected self-intersections and use zero
/// outside. Once no self-intersections remain, `extra_steps` more steps run
/// with `delta_min`/`lambda_max` everywhere to relax leftover sharp angles.
#[derive(Debug, Clone)]
pub struct EvolutionParams {
    pub delta_min: f64,
    pub delta_max: f64,
    pub lambda_max: f64,
    /// Time-step length.
    pub tau: f64,
    /// Speed of convergence to uniform point redistribution.
    pub omega: f64,
    pub extra_steps: usize,
    pub adaptive: bool,
    pub max_steps: usize,
    /// Record detected spans per step (debug output).
    pub record_spans: bool,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            delta_min: 0.003,
            delta_max: 0.01,
            lambda_max: 20.0,
            tau: 1e-6,
            omega: 50.0,
            extra_steps: 50,
            adaptive: false,
            max_steps: 200_000,
            record_spans: false,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.delta_min >= 0.0 && self.delta_max > self.delta_min) {
            return Err(format!(
                "need 0 <= delta_min < delta_max, got {} and {}",
                self.delta_min, self.delta_max
            ));
        }
        if self.lambda_max <= 0.0 {
            return Err(format!("lambda_max must be positive, got {}", self.lambda_max));
        }
        if self.tau <= 0.0 {
            return Err(format!("tau must be positive, got {}", self.tau));
        }
        if self.omega < 0.0 {
            return Err(format!("omega must be non-negative, got {}", self.omega));
        }
        Ok(())
    }
}

/// Discrete curvature per element, aligned with grid indices (entry 0
/// unused). The turning between elements `i-1` and `i+1` is divided by
/// `2 h_i`; the sign comes from the wedge product of the two elements.
/// The first and last elements copy their inner neighbor.
pub fn compute_curvature(points: &[Vec2]) -> Vec<f64> {
    let n_pts = points.len();
    let mut k = vec![0.0; n_pts];
    if n_pts < 4 {
        return k;
    }
    for i in 2..n_pts - 1 {
        let prev = points[i - 1] - points[i - 2];
        let next = points[i + 1] - points[i];
        let len_prev = prev.norm();
        let len_next = next.norm();
        let len_cur = points[i].distance(points[i - 1]);
        if len_prev <= 0.0 || len_next <= 0.0 || len_cur <= 0.0 {
            continue;
        }
        let arg = (prev.dot(next) / (len_prev * len_next)).clamp(-1.0, 1.0);
        let wedge = prev.wedge(next);
        let sign = if wedge > 0.0 {
            1.0
        } else if wedge < 0.0 {
            -1.0
        } else {
            0.0
        };
        k[i] = sign * arg.acos() / (2.0 * len_cur);
    }
    k[1] = k[2];
    k[n_pts - 1] = k[n_pts - 2];
    k
}

/// Tangential velocities at grid points from the asymptotically uniform
/// redistribution recurrence. Both endpoint velocities are zero; the
/// average-flux and uniformity terms make the recurrence close back to zero
/// at the far endpoint.
pub fn compute_tangential_velocity(h: &[f64], k: &[f64], beta: &[f64], omega: f64) -> Vec<f64> {
    let n_pts = h.len();
    let mut alpha = vec![0.0; n_pts];
    if n_pts < 3 {
        return alpha;
    }
    let total: f64 = h[1..].iter().sum();
    if total <= 0.0 {
        return alpha;
    }
    let avg = total / (n_pts - 1) as f64;
    let mut flux_total = 0.0;
    for i in 1..n_pts {
        flux_total += h[i] * k[i] * beta[i];
    }
    let mean_flux = flux_total / total;
    for i in 1..n_pts - 1 {
        alpha[i] = alpha[i - 1] + h[i] * k[i] * beta[i] - h[i] * mean_flux + omega * (avg - h[i]);
    }
    alpha[n_pts - 1] = 0.0;
    alpha
}

/// Rows where the vertex between elements `i` and `i+1` counts as singular
/// and must use the upwind scheme. Entry `i` refers to grid point `i`;
/// endpoints are always false.
pub fn singular_rows(points: &[Vec2], hbar: f64) -> Vec<bool> {
    let n_pts = points.len();
    let mut singular = vec![false; n_pts];
    let tiny = 1e-12 * hbar;
    for i in 1..n_pts.saturating_sub(1) {
        let back = points[i] - points[i - 1];
        let fwd = points[i + 1] - points[i];
        let lb = back.norm();
        let lf = fwd.norm();
        if lb < tiny || lf < tiny {
            singular[i] = true;
            continue;
        }
        singular[i] = back.dot(fwd) / (lb * lf) < SINGULAR_DOT_THRESHOLD;
    }
    singular
}

/// The assembled tridiagonal system for one evolution step. Row `r`
/// (0-based) corresponds to interior grid point `r + 1`; both coordinates
/// share the matrix. Boundary contributions of the fixed endpoints are
/// already folded into the right-hand sides.
#[derive(Debug, Clone)]
pub struct StepSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs_x: Vec<f64>,
    pub rhs_y: Vec<f64>,
    pub upwind: Vec<bool>,
}

/// Assembles the step system from explicit step-`m` quantities.
///
/// `alpha`, `delta`, `lambda`, `w` are per grid point; elements of the
/// current curve supply the finite-volume measures.
pub fn assemble_step_system(
    curve: &DiscreteCurve,
    alpha: &[f64],
    delta: &[f64],
    lambda: &[f64],
    w: &[f64],
    tau: f64,
) -> Result<StepSystem, EvolveError> {
    let points = &curve.points;
    let n = curve.interior_count();
    let h = curve.element_lengths();
    let singular = singular_rows(points, curve.hbar);

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs_x = vec![0.0; n];
    let mut rhs_y = vec![0.0; n];
    let mut upwind = vec![false; n];

    for i in 1..=n {
        let r = i - 1;
        let b_in_minus = (-alpha[i]).max(0.0);
        let b_out_minus = (-alpha[i]).min(0.0);
        let b_in_plus = alpha[i].max(0.0);
        let b_out_plus = alpha[i].min(0.0);
        let mass = (h[i] + h[i + 1]) / (2.0 * tau);
        let attract = lambda[i] * w[i] * ((points[i + 1] - points[i - 1]) * 0.5).perp();

        let mut rhs = points[i] * mass + attract;
        if singular[i] {
            upwind[r] = true;
            sub[r] = -delta[i] / h[i] - b_in_minus;
            sup[r] = -delta[i] / h[i + 1] - b_in_plus;
            diag[r] = mass + delta[i] / h[i] + delta[i] / h[i + 1] + b_in_minus + b_in_plus;
        } else {
            sub[r] = -delta[i] / h[i] - b_in_minus / 2.0;
            sup[r] = -delta[i] / h[i + 1] - b_in_plus / 2.0;
            diag[r] = mass
                + delta[i] / h[i]
                + delta[i] / h[i + 1]
                + b_in_minus / 2.0
                + b_in_plus / 2.0;
            rhs += (points[i] - points[i + 1]) * (-b_out_plus / 2.0)
                + (points[i] - points[i - 1]) * (-b_out_minus / 2.0);
        }
        rhs_x[r] = rhs.x;
        rhs_y[r] = rhs.y;

        if !(sub[r].is_finite() && diag[r].is_finite() && sup[r].is_finite() && rhs.is_finite()) {
            return Err(EvolveError::NonFinite { row: i });
        }
    }

    // Fixed endpoints contribute known values to the first and last rows.
    if n > 0 {
        rhs_x[0] -= sub[0] * points[0].x;
        rhs_y[0] -= sub[0] * points[0].y;
        rhs_x[n - 1] -= sup[n - 1] * points[n + 1].x;
        rhs_y[n - 1] -= sup[n - 1] * points[n + 1].y;
    }

    Ok(StepSystem {
        sub,
        diag,
        sup,
        rhs_x,
        rhs_y,
        upwind,
    })
}

/// Thomas algorithm for a tridiagonal system; `sub[0]` and `sup[n-1]` are
/// ignored. Requires a strictly diagonally dominant matrix, which the step
/// assembly guarantees.
pub fn solve_thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Advances the curve by one step; endpoints are returned unchanged.
pub fn evolve_step(
    curve: &DiscreteCurve,
    alpha: &[f64],
    delta: &[f64],
    lambda: &[f64],
    w: &[f64],
    tau: f64,
) -> Result<Vec<Vec2>, EvolveError> {
    let n = curve.interior_count();
    if n == 0 {
        return Ok(curve.points.clone());
    }
    let system = assemble_step_system(curve, alpha, delta, lambda, w, tau)?;
    let xs = solve_thomas(&system.sub, &system.diag, &system.sup, &system.rhs_x);
    let ys = solve_thomas(&system.sub, &system.diag, &system.sup, &system.rhs_y);
    let mut out = curve.points.clone();
    for i in 1..=n {
        out[i] = Vec2::new(xs[i - 1], ys[i - 1]);
    }
    Ok(out)
}

/// Outcome of smoothing a single trajectory.
#[derive(Debug, Clone)]
pub struct SmoothResult {
    pub curve: DiscreteCurve,
    pub ledger: SegmentLedger,
    /// Total evolution steps performed.
    pub steps: usize,
    /// False when the step cap was reached before the stopping criterion.
    pub converged: bool,
    /// Detected spans per step when `record_spans` was set.
    pub spans_per_step: Vec<(usize, Vec<IntersectionSpan>)>,
}

/// Runs the full smoothing loop on one trajectory.
///
/// Each step thins overly dense points, detects self-intersections, picks
/// per-point weights, updates the segment ledger, and advances the curve.
/// When a step finds no self-intersections the loop switches to the final
/// phase: exactly `extra_steps` further steps with `delta_min`/`lambda_max`
/// everywhere, then stop.
pub fn smooth_trajectory(
    traj: &Trajectory,
    hbar: f64,
    params: &EvolutionParams,
) -> Result<SmoothResult, SmoothError> {
    let (mut curve, mut ledger) = resample(traj, hbar);
    let mut spans_per_step = Vec::new();
    let mut extra: Option<usize> = None;
    let mut steps = 0usize;
    let mut converged = false;

    loop {
        thin_points(&mut curve, &mut ledger, hbar);

        if extra.is_none() {
            let spans = detect_self_intersections(&curve.points, hbar);
            if params.record_spans && !spans.is_empty() {
                spans_per_step.push((steps, spans.clone()));
            }
            if spans.is_empty() {
                extra = Some(params.extra_steps);
            } else if params.adaptive {
                step_once(
                    &mut curve,
                    &mut ledger,
                    params,
                    Some(&spans),
                )?;
                steps += 1;
                if steps >= params.max_steps {
                    break;
                }
                continue;
            }
        }

        if extra == Some(0) {
            converged = true;
            break;
        }

        step_once(&mut curve, &mut ledger, params, None)?;
        steps += 1;
        if let Some(count) = extra.as_mut() {
            *count -= 1;
            if *count == 0 {
                converged = true;
                break;
            }
        }
        if steps >= params.max_steps {
            break;
        }
    }

    Ok(SmoothResult {
        curve,
        ledger,
        steps,
        converged,
        spans_per_step,
    })
}

/// One evolution step: weights, curvature, attracting field, ledger length
/// update, tangential velocities, implicit solve, then ledger
/// renormalization and endpoint relocation on the moved curve.
fn step_once(
    curve: &mut DiscreteCurve,
    ledger: &mut SegmentLedger,
    params: &EvolutionParams,
    spans: Option<&[IntersectionSpan]>,
) -> Result<(), SmoothError> {
    let n_pts = curve.points.len();
    let (delta, lambda) = match spans {
        Some(spans) => adaptive_params(spans, n_pts, params.delta_max, params.lambda_max),
        None => (
            vec![params.delta_min; n_pts],
            vec![params.lambda_max; n_pts],
        ),
    };

    let h = curve.element_lengths();
    let k = compute_curvature(&curve.points);
    let attract = ledger.build_attracting_field(curve);
    let mut beta = vec![0.0; n_pts];
    for i in 1..n_pts {
        beta[i] = -delta[i] * k[i] + lambda[i] * attract.w[i];
    }

    ledger.evolve_lengths(&h, &k, &beta, params.tau);
    let alpha = compute_tangential_velocity(&h, &k, &beta, params.omega);
    curve.points = evolve_step(curve, &alpha, &delta, &lambda, &attract.w, params.tau)?;
    ledger.normalize_discrete_lengths(curve)?;
    ledger.relocate_endpoints(curve)?;
    Ok(())
}
