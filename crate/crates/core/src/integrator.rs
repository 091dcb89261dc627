//! Adaptive explicit integration of the semidiscrete system.
//!
//! The stepper is the Dormand–Prince 5(4) pair with a proportional-integral
//! step-size controller. Local errors are measured in the max norm over
//! interior nodes, so the node that blows up always drives the step size.
//! Boundary entries are never integrated and stay exactly zero.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::model::{energy_of, ProblemSpec};

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller (Hairer, Nørsett & Wanner, II.4).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub t_max: f64,
    /// Sup-norm level at which the run is declared blown up.
    pub blowup_threshold: f64,
    /// Sorted capture times; steps are shortened to land on them exactly.
    pub snapshot_times: Vec<f64>,
    /// Accepted steps between monitor records.
    pub monitor_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            dt_init: 1e-9,
            dt_min: 1e-30,
            t_max: 1.0,
            blowup_threshold: 1e8,
            snapshot_times: Vec::new(),
            monitor_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::invalid_argument("tolerances must be positive"));
        }
        if !positive(self.dt_init) || !positive(self.dt_min) {
            return Err(Error::invalid_argument("step sizes must be positive"));
        }
        if self.dt_min > self.dt_init {
            return Err(Error::invalid_argument("dt_min must not exceed dt_init"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::invalid_argument("t_max must be a nonnegative real"));
        }
        if !positive(self.blowup_threshold) {
            return Err(Error::invalid_argument("blow-up threshold must be positive"));
        }
        if self.monitor_stride == 0 {
            return Err(Error::invalid_argument("monitor stride must be at least 1"));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::invalid_argument("snapshot times must be finite and nonnegative"));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid_argument("snapshot times must be strictly increasing"));
        }
        Ok(())
    }

    /// Slack used when checking sign and monotonicity properties along a run.
    pub fn positivity_slack(&self) -> f64 {
        1e3 * self.abs_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitor {
    pub t: f64,
    pub sup_norm: f64,
    pub energy: f64,
    /// Smallest interior value.
    pub min_value: f64,
    /// Interior node holding the largest value (lowest index on ties).
    pub argmax: usize,
    pub argmax_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: GridFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    /// The sup-norm reached the blow-up threshold at `t_stop`.
    BlewUp {
        t_stop: f64,
    },
    ReachedHorizon,
    /// The step size collapsed below `dt_min` (or below the resolution of
    /// `t`) at `t_stop` before the threshold was reached.
    StepUnderflow {
        t_stop: f64,
    },
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::BlewUp { .. } => "blew_up",
            Status::ReachedHorizon => "reached_horizon",
            Status::StepUnderflow { .. } => "step_underflow",
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Status::BlewUp { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub monitors: Vec<Monitor>,
    pub snapshots: Vec<Snapshot>,
    pub status: Status,
    pub final_time: f64,
    pub final_state: GridFunction,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Step size proposed for the next step; used by [`resume`].
    pub next_dt: f64,
    /// Smallest interior value over every accepted step, not just monitors.
    pub min_value_overall: f64,
}

impl Trajectory {
    pub fn t_stop(&self) -> f64 {
        self.final_time
    }
}

/// Integrates from `t = 0` until blow-up, the horizon, or step underflow.
pub fn integrate(spec: &ProblemSpec, grid: &Grid, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    spec.u0().check_aligned(grid)?;
    if spec.b().len() != grid.len() {
        return Err(Error::invalid_argument("coefficient samples do not match the grid"));
    }
    let u0 = spec.u0().values().to_vec();
    let sup0 = sup(&u0);
    if cfg.blowup_threshold <= sup0 {
        return Err(Error::invalid_argument(format!(
            "blow-up threshold {} must exceed the initial sup-norm {sup0}",
            cfg.blowup_threshold
        )));
    }
    let mut run = Run::new(spec, grid, cfg);
    run.record_monitor(0.0, &u0);
    let start_min = interior_min(&u0);
    let out = run.advance(u0, 0.0, cfg.dt_init, start_min)?;
    Ok(out)
}

/// Continues a trajectory that stopped at its horizon with a new configuration.
///
/// Monitors and snapshots are appended; resuming with a horizon that is
/// already reached returns the trajectory unchanged.
pub fn resume(traj: &Trajectory, spec: &ProblemSpec, grid: &Grid, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if traj.status != Status::ReachedHorizon {
        return Err(Error::invalid_state(format!(
            "only trajectories that reached their horizon can be resumed (status: {})",
            traj.status.as_str()
        )));
    }
    cfg.validate()?;
    traj.final_state.check_aligned(grid)?;
    if cfg.t_max <= traj.final_time {
        return Ok(traj.clone());
    }
    let mut run = Run::new(spec, grid, cfg);
    run.monitors = traj.monitors.clone();
    run.snapshots = traj.snapshots.clone();
    run.accepted = traj.accepted_steps;
    run.rejected = traj.rejected_steps;
    run.next_snapshot = cfg
        .snapshot_times
        .iter()
        .position(|&s| s > traj.final_time)
        .unwrap_or(cfg.snapshot_times.len());
    let dt = traj.next_dt.clamp(cfg.dt_min, f64::MAX);
    run.advance(
        traj.final_state.values().to_vec(),
        traj.final_time,
        dt,
        traj.min_value_overall,
    )
}

struct Run<'a> {
    spec: &'a ProblemSpec,
    grid: &'a Grid,
    cfg: &'a IntegratorConfig,
    monitors: Vec<Monitor>,
    snapshots: Vec<Snapshot>,
    next_snapshot: usize,
    accepted: usize,
    rejected: usize,
}

impl<'a> Run<'a> {
    fn new(spec: &'a ProblemSpec, grid: &'a Grid, cfg: &'a IntegratorConfig) -> Self {
        Self {
            spec,
            grid,
            cfg,
            monitors: Vec::new(),
            snapshots: Vec::new(),
            next_snapshot: 0,
            accepted: 0,
            rejected: 0,
        }
    }

    fn record_monitor(&mut self, t: f64, u: &[f64]) {
        if self.monitors.last().is_some_and(|m| m.t >= t) {
            return;
        }
        let (argmax, _) = argmax(u);
        self.monitors.push(Monitor {
            t,
            sup_norm: sup(u),
            energy: energy_of(u, self.grid.h(), self.spec.p()),
            min_value: interior_min(u),
            argmax,
            argmax_x: self.grid.x(argmax),
        });
    }

    fn capture_snapshots(&mut self, t: f64, u: &[f64]) {
        while let Some(&ts) = self.cfg.snapshot_times.get(self.next_snapshot) {
            if ts > t {
                break;
            }
            if ts == t {
                self.snapshots.push(Snapshot {
                    t,
                    u: GridFunction::from_values(self.grid, u.to_vec()).expect("aligned state"),
                });
            }
            self.next_snapshot += 1;
        }
    }

    fn advance(mut self, mut u: Vec<f64>, mut t: f64, mut dt: f64, mut min_overall: f64) -> Result<Trajectory> {
        let n = u.len();
        let h = self.grid.h();
        let cfg = self.cfg;
        let spec = self.spec;
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
        let mut stage = vec![0.0; n];
        let mut u_new = vec![0.0; n];
        let mut err_old: f64 = 1e-4;
        let mut fsal_valid = false;
        let mut since_monitor = 0usize;

        self.capture_snapshots(t, &u);

        let status = loop {
            if t >= cfg.t_max {
                break Status::ReachedHorizon;
            }
            // Land exactly on the horizon and on requested snapshot times.
            let mut target = cfg.t_max;
            if let Some(&ts) = cfg.snapshot_times.get(self.next_snapshot) {
                target = target.min(ts);
            }
            let mut step = dt;
            let mut lands = false;
            if t + step >= target {
                step = target - t;
                lands = true;
            }
            if step < cfg.dt_min || t + step == t {
                break Status::StepUnderflow { t_stop: t };
            }

            if !fsal_valid {
                spec.rhs_into(&u, h, &mut k[0]);
            }
            dp_stages(spec, h, &u, step, &mut k, &mut stage, &mut u_new);

            let finite = u_new.iter().all(|v| v.is_finite()) && k[6].iter().all(|v| v.is_finite());
            if !finite {
                self.rejected += 1;
                fsal_valid = true;
                dt = 0.5 * step;
                if dt < cfg.dt_min {
                    break Status::StepUnderflow { t_stop: t };
                }
                continue;
            }

            let err = error_norm(&u, &u_new, &k, step, cfg.rel_tol, cfg.abs_tol);
            if err <= 1.0 {
                let fac = err.powf(EXPO) / err_old.powf(BETA);
                let fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                err_old = err.max(1e-4);
                t = if lands { target } else { t + step };
                std::mem::swap(&mut u, &mut u_new);
                // FSAL: the last stage is the derivative at the new point.
                k.swap(0, 6);
                fsal_valid = true;
                self.accepted += 1;
                since_monitor += 1;
                min_overall = min_overall.min(interior_min(&u));
                // Keep the step size proposed before truncating to a landing point.
                dt = if lands && step < dt {
                    dt.max(step / fac)
                } else {
                    step / fac
                };

                self.capture_snapshots(t, &u);
                if sup(&u) >= cfg.blowup_threshold {
                    break Status::BlewUp { t_stop: t };
                }
                if since_monitor >= cfg.monitor_stride {
                    self.record_monitor(t, &u);
                    since_monitor = 0;
                }
            } else {
                self.rejected += 1;
                fsal_valid = true;
                let fac = (err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN);
                dt = step / fac;
                if dt < cfg.dt_min {
                    break Status::StepUnderflow { t_stop: t };
                }
            }
        };

        self.record_monitor(t, &u);
        Ok(Trajectory {
            monitors: self.monitors,
            snapshots: self.snapshots,
            status,
            final_time: t,
            final_state: GridFunction::from_values(self.grid, u).expect("aligned state"),
            accepted_steps: self.accepted,
            rejected_steps: self.rejected,
            next_dt: dt,
            min_value_overall: min_overall,
        })
    }
}

fn dp_stages(
    spec: &ProblemSpec,
    h: f64,
    u: &[f64],
    dt: f64,
    k: &mut [Vec<f64>; 7],
    stage: &mut [f64],
    u_new: &mut [f64],
) {
    let n = u.len();
    macro_rules! combine {
        ($out:expr, $($a:expr => $i:expr),+) => {
            for j in 0..n {
                $out[j] = u[j] + dt * (0.0 $(+ $a * k[$i][j])+);
            }
        };
    }
    combine!(stage, A21 => 0);
    spec.rhs_into(stage, h, &mut k[1]);
    combine!(stage, A31 => 0, A32 => 1);
    spec.rhs_into(stage, h, &mut k[2]);
    combine!(stage, A41 => 0, A42 => 1, A43 => 2);
    spec.rhs_into(stage, h, &mut k[3]);
    combine!(stage, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
    spec.rhs_into(stage, h, &mut k[4]);
    combine!(stage, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
    spec.rhs_into(stage, h, &mut k[5]);
    combine!(u_new, A71 => 0, A73 => 2, A74 => 3, A75 => 4, A76 => 5);
    spec.rhs_into(u_new, h, &mut k[6]);
}

fn error_norm(u: &[f64], u_new: &[f64], k: &[Vec<f64>; 7], dt: f64, rtol: f64, atol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 1..u.len() - 1 {
        let e = dt * (E1 * k[0][j] + E3 * k[2][j] + E4 * k[3][j] + E5 * k[4][j] + E6 * k[5][j] + E7 * k[6][j]);
        let scale = atol + rtol * u[j].abs().max(u_new[j].abs());
        worst = worst.max((e / scale).abs());
    }
    worst
}

fn sup(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn interior_min(u: &[f64]) -> f64 {
    u[1..u.len() - 1].iter().copied().fold(f64::INFINITY, f64::min)
}

/// Interior argmax, lowest index on ties; also reports whether a tie occurred.
pub(crate) fn argmax(u: &[f64]) -> (usize, bool) {
    let mut best = 1;
    let mut tie = false;
    for j in 2..u.len() - 1 {
        if u[j] > u[best] {
            best = j;
            tie = false;
        } else if u[j] == u[best] {
            tie = true;
        }
    }
    (best, tie)
}
