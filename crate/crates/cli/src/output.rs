//! CSV serialization of runs, sweeps, criteria and convergence studies.

use std::path::Path;

use anyhow::{Context, Result};
use blowuplab::{
    BlowupReport, ConvergenceReport, CriteriaReport, Grid, GridFunction, SweepRow, ThresholdCondition, Trajectory,
};
use csv::Writer;

pub const MONITORS_HEADER: [&str; 5] = ["t", "sup_norm", "energy", "min_value", "argmax_x"];
pub const SNAPSHOTS_HEADER: [&str; 3] = ["t", "x", "u"];
pub const REPORT_HEADER: [&str; 11] = [
    "status",
    "t_stop",
    "T_est",
    "T_lower",
    "T_upper",
    "rate_exponent",
    "blowup_x",
    "energy_negative",
    "threshold_passed",
    "initial_derivative_nonneg",
    "theorem_applies",
];
pub const SUMMARY_HEADER: [&str; 6] = ["value", "status", "t_stop", "T_est", "min_value_overall", "blowup_x"];
pub const CRITERIA_HEADER: [&str; 15] = [
    "regime",
    "q_crit",
    "b_crit",
    "b_inf",
    "c",
    "beta",
    "norm_threshold",
    "energy0",
    "energy_negative",
    "norm_p1",
    "threshold_kind",
    "threshold_passed",
    "min_initial_derivative",
    "initial_derivative_nonneg",
    "theorem_applies",
];
pub const CONVERGENCE_HEADER: [&str; 5] = ["N", "h", "error", "order", "flag"];

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn flag(v: bool) -> String {
    v.to_string()
}

fn writer(path: &Path) -> Result<Writer<std::fs::File>> {
    Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_monitors(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(MONITORS_HEADER)?;
    for m in &traj.monitors {
        w.write_record([
            num(m.t),
            num(m.sup_norm),
            num(m.energy),
            num(m.min_value),
            num(m.argmax_x),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format profiles: the initial state, every requested snapshot and
/// the final state, each time written once.
pub fn write_snapshots(path: &Path, grid: &Grid, u0: &GridFunction, traj: &Trajectory) -> Result<()> {
    let mut states: Vec<(f64, &GridFunction)> = vec![(0.0, u0)];
    states.extend(traj.snapshots.iter().map(|s| (s.t, &s.u)));
    states.push((traj.final_time, &traj.final_state));
    states.dedup_by(|b, a| a.0 == b.0);

    let mut w = writer(path)?;
    w.write_record(SNAPSHOTS_HEADER)?;
    for (t, u) in states {
        for (x, v) in grid.nodes().iter().zip(u.values()) {
            w.write_record([num(t), num(*x), num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_report(path: &Path, r: &BlowupReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(REPORT_HEADER)?;
    w.write_record([
        r.status.as_str().to_string(),
        num(r.t_stop),
        opt(r.t_est),
        opt(r.bounds.as_ref().map(|b| b.lower)),
        opt(r.bounds.as_ref().and_then(|b| b.upper)),
        opt(r.rate_exponent),
        opt(r.blowup_point.map(|b| b.x)),
        flag(r.criteria.energy_negative),
        flag(r.criteria.threshold.passed()),
        flag(r.criteria.initial_derivative_nonneg),
        flag(r.criteria.theorem_applies()),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        match &row.outcome {
            Ok(o) => w.write_record([
                num(row.value),
                o.status.as_str().to_string(),
                num(o.t_stop),
                opt(o.t_est),
                num(o.min_value_overall),
                opt(o.blowup_x),
            ])?,
            Err(_) => w.write_record([
                num(row.value),
                "failed".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?,
        }
    }
    w.flush()?;
    Ok(())
}

fn threshold_fields(t: &ThresholdCondition) -> (&'static str, Option<f64>, bool) {
    match *t {
        ThresholdCondition::Norm { norm_p1, passed, .. } => ("norm", Some(norm_p1), passed),
        ThresholdCondition::Coefficient { passed, .. } => ("coefficient", None, passed),
        ThresholdCondition::NotApplicable => ("not_applicable", None, false),
    }
}

pub fn write_criteria(path: &Path, r: &CriteriaReport) -> Result<()> {
    let (kind, norm_p1, passed) = threshold_fields(&r.threshold);
    let mut w = writer(path)?;
    w.write_record(CRITERIA_HEADER)?;
    w.write_record([
        r.regime.as_str().to_string(),
        num(r.constants.q_crit),
        num(r.constants.b_crit),
        num(r.b_inf),
        num(r.constants.c),
        num(r.constants.beta),
        opt(r.constants.norm_threshold),
        num(r.energy0),
        flag(r.energy_negative),
        opt(norm_p1),
        kind.to_string(),
        flag(passed),
        num(r.min_initial_derivative),
        flag(r.initial_derivative_nonneg),
        flag(r.theorem_applies()),
    ])?;
    w.flush()?;
    Ok(())
}

/// Row flag: `ok`, `order_undefined`, or the status of a run that stopped
/// before the check time.
pub fn convergence_flags(r: &ConvergenceReport) -> Vec<String> {
    (0..r.grids.len())
        .map(|i| {
            if r.statuses[i] != blowuplab::Status::ReachedHorizon {
                format!("stopped_early:{}", r.statuses[i].as_str())
            } else if r.reference_status != blowuplab::Status::ReachedHorizon {
                format!("reference_stopped_early:{}", r.reference_status.as_str())
            } else if i > 0 && r.orders[i - 1].is_none() {
                "order_undefined".to_string()
            } else {
                "ok".to_string()
            }
        })
        .collect()
}

pub fn write_convergence(path: &Path, r: &ConvergenceReport) -> Result<()> {
    let flags = convergence_flags(r);
    let mut w = writer(path)?;
    w.write_record(CONVERGENCE_HEADER)?;
    for (i, flag) in flags.into_iter().enumerate() {
        let order = if i == 0 { None } else { r.orders[i - 1] };
        w.write_record([r.grids[i].to_string(), num(r.h[i]), opt(r.errors[i]), opt(order), flag])?;
    }
    w.flush()?;
    Ok(())
}
