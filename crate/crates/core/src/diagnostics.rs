//! Post-processing of trajectories: blow-up time bounds and estimates, rate
//! fitting, the blow-up node, and grid-refinement studies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{self, Grid};
use crate::integrator::{self, integrate, IntegratorConfig, Monitor, Status, Trajectory};
use crate::model::{check_blowup_criteria, CriteriaReport, ProblemSpec, Regime};
use crate::profile::ProblemFamily;

/// Fraction of the final sup-norm that opens the fit window.
pub const FIT_WINDOW_FRACTION: f64 = 0.1;
/// Minimum number of monitors inside the fit window.
pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeBounds {
    /// `1 / ((p - 1) (sum_j u_j(0)^2)^((p - 1) / 2))`, with the plain node sum.
    pub lower: f64,
    /// `1 / ((p - 1) k ||U(0)||_2^(p - 1))` with the h-weighted norm; only
    /// defined when `k > 0`.
    pub upper: Option<f64>,
    /// `k = (p - 1)/(p + 1) - c ||U(0)||_{p+1}^(-beta)`.
    pub k_tilde: f64,
    /// Why `upper` is missing.
    pub upper_unavailable: Option<&'static str>,
}

/// Closed-form lower and upper bounds on the blow-up time of the
/// semidiscrete solution.
pub fn blowup_time_bounds(spec: &ProblemSpec, grid: &Grid) -> Result<TimeBounds> {
    let p = spec.p();
    let u0 = spec.u0().interior();
    let sum_sq: f64 = u0.iter().map(|v| v * v).sum();
    if sum_sq == 0.0 {
        return Err(Error::invalid_argument(
            "blow-up time bounds are undefined for zero initial data",
        ));
    }
    let lower = 1.0 / ((p - 1.0) * sum_sq.powf(0.5 * (p - 1.0)));

    let constants = spec.critical_constants();
    let norm_p1 = grid::weighted_norm(u0, grid.h(), p + 1.0);
    let norm_2 = grid::weighted_norm(u0, grid.h(), 2.0);
    let k_tilde = (p - 1.0) / (p + 1.0) - constants.c * norm_p1.powf(-constants.beta);

    let (upper, upper_unavailable) = if spec.regime() == Regime::Supercritical {
        (None, Some("q exceeds 2p/(p+1)"))
    } else if k_tilde <= 0.0 {
        (None, Some("k <= 0: damping too strong for the initial data"))
    } else {
        (Some(1.0 / ((p - 1.0) * k_tilde * norm_2.powf(p - 1.0))), None)
    };
    Ok(TimeBounds {
        lower,
        upper,
        k_tilde,
        upper_unavailable,
    })
}

fn fit_window(monitors: &[Monitor]) -> Result<Vec<&Monitor>> {
    let last = monitors.last().ok_or_else(|| Error::no_trend("no monitors recorded"))?;
    let floor = FIT_WINDOW_FRACTION * last.sup_norm;
    let window: Vec<&Monitor> = monitors.iter().filter(|m| m.sup_norm >= floor).collect();
    if window.len() < MIN_FIT_POINTS {
        return Err(Error::no_trend(format!(
            "only {} monitors in the top decade of the sup-norm, need {MIN_FIT_POINTS}",
            window.len()
        )));
    }
    Ok(window)
}

/// Least-squares line `y = slope * x + intercept`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Blow-up time from the asymptotic law `sup_norm ~ C (T - t)^(-1/(p-1))`.
///
/// `sup_norm^(-(p-1))` is then asymptotically linear in `t`; the estimate
/// is the root of its least-squares line over the monitors whose sup-norm
/// is at least 10% of the final one.
pub fn estimate_blowup_time(monitors: &[Monitor], p: f64) -> Result<f64> {
    let window = fit_window(monitors)?;
    let t_ref = window[window.len() - 1].t;
    // Shift times so the fit resolves differences far below t itself.
    let x: Vec<f64> = window.iter().map(|m| m.t - t_ref).collect();
    let y: Vec<f64> = window.iter().map(|m| m.sup_norm.powf(-(p - 1.0))).collect();
    let (slope, intercept) = least_squares(&x, &y);
    if !(slope < 0.0) || !intercept.is_finite() {
        return Err(Error::no_trend(format!(
            "transformed sup-norm is not decreasing (slope {slope})"
        )));
    }
    Ok(t_ref - intercept / slope)
}

/// Slope of `log(sup_norm)` against `log(t_est - t)` over the fit window.
pub fn fit_rate_exponent(monitors: &[Monitor], t_est: f64) -> Result<f64> {
    let window = fit_window(monitors)?;
    let (x, y): (Vec<f64>, Vec<f64>) = window
        .iter()
        .filter(|m| t_est - m.t > 0.0 && m.sup_norm > 0.0)
        .map(|m| ((t_est - m.t).ln(), m.sup_norm.ln()))
        .unzip();
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::no_trend(format!(
            "only {} monitors precede the estimated blow-up time",
            x.len()
        )));
    }
    let (slope, _) = least_squares(&x, &y);
    if !slope.is_finite() {
        return Err(Error::no_trend("degenerate rate fit"));
    }
    Ok(slope)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupPoint {
    pub index: usize,
    pub x: f64,
    /// Another node shares the maximum; `index` is the lowest of them.
    pub tie: bool,
}

/// Node holding the maximum of the final state of a blown-up trajectory.
pub fn blowup_point(traj: &Trajectory, grid: &Grid) -> Result<BlowupPoint> {
    if !traj.status.is_blowup() {
        return Err(Error::invalid_state(format!(
            "trajectory did not blow up (status: {})",
            traj.status.as_str()
        )));
    }
    traj.final_state.check_aligned(grid)?;
    let (index, tie) = integrator::argmax(traj.final_state.values());
    Ok(BlowupPoint {
        index,
        x: grid.x(index),
        tie,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub status: Status,
    pub t_stop: f64,
    pub t_est: Option<f64>,
    pub bounds: Option<TimeBounds>,
    pub rate_exponent: Option<f64>,
    /// `-1 / (p - 1)`.
    pub rate_expected: f64,
    pub blowup_point: Option<BlowupPoint>,
    pub min_value_overall: f64,
    pub criteria: CriteriaReport,
}

/// Collects every diagnostic for one trajectory.
///
/// Estimates that need a blown-up trajectory are left empty otherwise, as
/// are estimates whose fit fails.
pub fn analyze(traj: &Trajectory, spec: &ProblemSpec, grid: &Grid) -> BlowupReport {
    let p = spec.p();
    let (t_est, rate_exponent, point) = if traj.status.is_blowup() {
        let t_est = estimate_blowup_time(&traj.monitors, p).ok();
        let rate = t_est.and_then(|t| fit_rate_exponent(&traj.monitors, t).ok());
        (t_est, rate, blowup_point(traj, grid).ok())
    } else {
        (None, None, None)
    };
    BlowupReport {
        status: traj.status,
        t_stop: traj.t_stop(),
        t_est,
        bounds: blowup_time_bounds(spec, grid).ok(),
        rate_exponent,
        rate_expected: -1.0 / (p - 1.0),
        blowup_point: point,
        min_value_overall: traj.min_value_overall,
        criteria: check_blowup_criteria(spec, grid),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub t_check: f64,
    pub grids: Vec<usize>,
    pub h: Vec<f64>,
    /// Sup-norm error against the reference at `t_check`; `None` when the
    /// run stopped early.
    pub errors: Vec<Option<f64>>,
    /// Observed order between consecutive grids,
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`; `None` when undefined.
    pub orders: Vec<Option<f64>>,
    pub statuses: Vec<Status>,
    pub reference_n: usize,
    pub reference_status: Status,
}

impl ConvergenceReport {
    /// Every run, reference included, reached `t_check`.
    pub fn complete(&self) -> bool {
        self.reference_status == Status::ReachedHorizon && self.statuses.iter().all(|s| *s == Status::ReachedHorizon)
    }
}

/// Grid-refinement study at a fixed time before blow-up.
///
/// The reference solution lives on a grid with `4 * max(n_list)` interior
/// nodes and is interpolated to the coarse nodes with four-point Lagrange
/// interpolation, whose `O(h_ref^4)` error is negligible against the
/// second-order discretization error being measured.
pub fn convergence_study(
    family: &ProblemFamily,
    n_list: &[usize],
    t_check: f64,
    cfg: &IntegratorConfig,
) -> Result<ConvergenceReport> {
    if n_list.len() < 3 {
        return Err(Error::invalid_argument(format!(
            "convergence study needs at least 3 grids, got {}",
            n_list.len()
        )));
    }
    if !(t_check > 0.0) || !t_check.is_finite() {
        return Err(Error::invalid_argument("t_check must be positive"));
    }
    let reference_n = 4 * n_list.iter().copied().max().unwrap_or(1);
    let run_cfg = IntegratorConfig {
        t_max: t_check,
        snapshot_times: Vec::new(),
        monitor_stride: usize::MAX,
        ..cfg.clone()
    };

    let mut all: Vec<usize> = n_list.to_vec();
    all.push(reference_n);
    let runs: Vec<(Grid, Trajectory)> = all
        .par_iter()
        .map(|&n| {
            let grid = Grid::new(n)?;
            let spec = family.instantiate(&grid)?;
            let traj = integrate(&spec, &grid, &run_cfg)?;
            Ok((grid, traj))
        })
        .collect::<Result<_>>()?;

    let (ref_grid, ref_traj) = &runs[runs.len() - 1];
    let reference_ok = ref_traj.status == Status::ReachedHorizon;
    let mut errors = Vec::with_capacity(n_list.len());
    let mut statuses = Vec::with_capacity(n_list.len());
    let mut h = Vec::with_capacity(n_list.len());
    for (grid, traj) in &runs[..runs.len() - 1] {
        h.push(grid.h());
        statuses.push(traj.status);
        if reference_ok && traj.status == Status::ReachedHorizon {
            let u = traj.final_state.values();
            let err = (1..=grid.n_interior())
                .map(|j| (u[j] - interpolate(ref_grid, ref_traj.final_state.values(), grid.x(j))).abs())
                .fold(0.0, f64::max);
            errors.push(Some(err));
        } else {
            errors.push(None);
        }
    }
    let orders = (0..errors.len() - 1)
        .map(|i| match (errors[i], errors[i + 1]) {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 && h[i] != h[i + 1] => Some((a / b).ln() / (h[i] / h[i + 1]).ln()),
            _ => None,
        })
        .collect();
    Ok(ConvergenceReport {
        t_check,
        grids: n_list.to_vec(),
        h,
        errors,
        orders,
        statuses,
        reference_n,
        reference_status: ref_traj.status,
    })
}

/// Four-point Lagrange interpolation of node values at `x`.
fn interpolate(grid: &Grid, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let pos = (x + 1.0) / grid.h();
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return values[(nearest as usize).min(n - 1)];
    }
    let base = (pos.floor() as usize).saturating_sub(1).min(n - 4);
    let nodes = &grid.nodes()[base..base + 4];
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for k in 0..4 {
            if k != i {
                w *= (x - nodes[k]) / (nodes[i] - nodes[k]);
            }
        }
        acc += w * values[base + i];
    }
    acc
}
