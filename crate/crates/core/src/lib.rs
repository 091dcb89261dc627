//! Semidiscrete (method-of-lines) simulation of finite-time blow-up for
//!
//! ```text
//! u_t = u_xx + |u|^p - b(x) |u_x|^q   on (-1, 1),   u(-1, t) = u(1, t) = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: the uniform grid on `[-1, 1]`, finite-difference operators and
//!   discrete norms.
//! * [`model`]: problem data, the right-hand side of the ODE system, the
//!   discrete energy and the blow-up criteria built on it.
//! * [`integrator`]: adaptive Dormand–Prince integration with blow-up
//!   detection, monitors and snapshots.
//! * [`diagnostics`]: blow-up time bounds and estimates, rate fitting,
//!   blow-up point and grid-refinement studies.
//! * [`profile`], [`preset`] and [`experiment`]: closed-form inputs, the
//!   catalogue of reference experiments, and run/sweep orchestration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod integrator;
pub mod model;
pub mod preset;
pub mod profile;

pub use diagnostics::{
    analyze, blowup_point, blowup_time_bounds, convergence_study, estimate_blowup_time, fit_rate_exponent, BlowupPoint,
    BlowupReport, ConvergenceReport, TimeBounds,
};
pub use error::{Error, Result};
pub use experiment::{run, sweep, RunOutcome, RunSpec, SweepParameter, SweepResult, SweepRow};
pub use grid::{
    backward_difference, build_grid, central_difference, discrete_norm, forward_difference, mesh_rule,
    second_difference, Grid, GridFunction, NormOrder,
};
pub use integrator::{integrate, resume, IntegratorConfig, Monitor, Snapshot, Status, Trajectory};
pub use model::{
    check_blowup_criteria, critical_constants, energy, lipschitz_bound, rhs, CriteriaReport, CriticalConstants,
    ProblemSpec, Regime, ThresholdCondition,
};
pub use preset::{find_preset, presets, Preset};
pub use profile::{InitialSampling, ProblemFamily, Profile};
