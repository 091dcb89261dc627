//! Single runs and parameter sweeps over a problem family.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::diagnostics::{analyze, BlowupReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrator::{integrate, IntegratorConfig, Status, Trajectory};
use crate::model::ProblemSpec;
use crate::profile::{ProblemFamily, Profile};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub family: ProblemFamily,
    pub n: usize,
    pub integrator: IntegratorConfig,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub grid: Grid,
    pub spec: ProblemSpec,
    pub trajectory: Trajectory,
    pub report: BlowupReport,
}

pub fn run(rs: &RunSpec) -> Result<RunOutcome> {
    let grid = Grid::new(rs.n)?;
    let spec = rs.family.instantiate(&grid)?;
    let trajectory = integrate(&spec, &grid, &rs.integrator)?;
    let report = analyze(&trajectory, &spec, &grid);
    Ok(RunOutcome {
        grid,
        spec,
        trajectory,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Constant damping coefficient `b`.
    BConst,
    Q,
    P,
    N,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::BConst => "b_const",
            SweepParameter::Q => "q",
            SweepParameter::P => "p",
            SweepParameter::N => "N",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(&self, base: &RunSpec, value: f64) -> Result<RunSpec> {
        let mut rs = base.clone();
        match self {
            SweepParameter::BConst => rs.family.b = Profile::Constant(value),
            SweepParameter::Q => rs.family.q = value,
            SweepParameter::P => rs.family.p = value,
            SweepParameter::N => {
                if !(value >= 1.0) || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(Error::invalid_argument(format!(
                        "N must be a positive integer, got {value}"
                    )));
                }
                rs.n = value as usize;
            }
        }
        Ok(rs)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b_const" | "b" => Ok(SweepParameter::BConst),
            "q" => Ok(SweepParameter::Q),
            "p" => Ok(SweepParameter::P),
            "N" | "n" => Ok(SweepParameter::N),
            other => Err(Error::invalid_argument(format!(
                "unknown sweep parameter '{other}' (expected b_const, q, p or N)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `Err` holds the message of a run that could not be set up or failed.
    pub outcome: std::result::Result<SweepResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub status: Status,
    pub t_stop: f64,
    pub t_est: Option<f64>,
    pub min_value_overall: f64,
    pub blowup_x: Option<f64>,
}

/// Runs `base` once per value, in parallel. Rows keep the order of `values`.
pub fn sweep(base: &RunSpec, param: SweepParameter, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::invalid_argument("sweep needs at least one value"));
    }
    Ok(values
        .par_iter()
        .map(|&value| {
            let outcome = param
                .apply(base, value)
                .and_then(|rs| run(&rs))
                .map(|o| SweepResult {
                    status: o.report.status,
                    t_stop: o.report.t_stop,
                    t_est: o.report.t_est,
                    min_value_overall: o.report.min_value_overall,
                    blowup_x: o.report.blowup_point.map(|b| b.x),
                })
                .map_err(|e| e.to_string());
            SweepRow { value, outcome }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunSpec {
        RunSpec {
            family: ProblemFamily::new(
                3.0,
                1.3,
                Profile::Constant(1.0),
                Profile::SymmetricSine { amplitude: 20.0 },
            ),
            n: 21,
            integrator: IntegratorConfig::default(),
        }
    }

    #[test]
    fn parameter_names_round_trip() {
        for p in [
            SweepParameter::BConst,
            SweepParameter::Q,
            SweepParameter::P,
            SweepParameter::N,
        ] {
            assert_eq!(p.as_str().parse::<SweepParameter>().unwrap(), p);
        }
        assert!("r".parse::<SweepParameter>().is_err());
    }

    #[test]
    fn invalid_values_mark_rows_failed() {
        let rows = sweep(&small(), SweepParameter::Q, &[1.3, 0.5]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].outcome.as_ref().unwrap().status.is_blowup());
        assert!(rows[1].outcome.is_err());
        assert!(sweep(&small(), SweepParameter::N, &[2.5]).unwrap()[0].outcome.is_err());
        assert!(sweep(&small(), SweepParameter::N, &[]).is_err());
    }
}
