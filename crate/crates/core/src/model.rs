//! Problem data and the semidiscrete system
//!
//! ```text
//! du_j/dt = δ²u_j + |u_j|^p - b_j |δu_j|^q,   j = 1..N,   u_0 = u_{N+1} = 0
//! ```
//!
//! together with the discrete energy and the sufficient conditions for
//! finite-time blow-up derived from it.

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{self, Grid, GridFunction};

/// Relative tolerance used to decide `q == 2p / (p + 1)`.
const CRITICAL_Q_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    p: f64,
    q: f64,
    b: GridFunction,
    u0: GridFunction,
    b_inf: f64,
}

impl ProblemSpec {
    /// Validates and bundles the problem data sampled on `grid`.
    ///
    /// `q` above the critical exponent `2p / (p + 1)` is accepted with a
    /// warning; the blow-up criteria then report the theorem as inapplicable.
    pub fn new(p: f64, q: f64, b: GridFunction, u0: GridFunction, grid: &Grid) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::invalid_argument(format!("p must be > 1, got {p}")));
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::invalid_argument(format!("q must be > 1, got {q}")));
        }
        b.check_aligned(grid)?;
        u0.check_aligned(grid)?;
        if let Some(v) = b.values().iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid_argument(format!(
                "coefficient b must be finite and nonnegative, found {v}"
            )));
        }
        if let Some(v) = u0.values().iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid_argument(format!(
                "initial data must be finite and nonnegative, found {v}"
            )));
        }
        if !u0.is_dirichlet() {
            return Err(Error::invalid_argument(
                "initial data must vanish at both boundary nodes",
            ));
        }
        let q_crit = 2.0 * p / (p + 1.0);
        if q > q_crit * (1.0 + CRITICAL_Q_RTOL) {
            warn!("q = {q} exceeds 2p/(p+1) = {q_crit}; blow-up criteria do not apply");
        }
        let b_inf = b.sup_norm();
        Ok(Self { p, q, b, u0, b_inf })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn b(&self) -> &GridFunction {
        &self.b
    }

    pub fn u0(&self) -> &GridFunction {
        &self.u0
    }

    pub fn b_inf(&self) -> f64 {
        self.b_inf
    }

    pub fn q_crit(&self) -> f64 {
        2.0 * self.p / (self.p + 1.0)
    }

    pub fn regime(&self) -> Regime {
        regime(self.p, self.q)
    }

    /// Copy with different initial data on the same grid.
    pub fn with_initial(&self, u0: GridFunction, grid: &Grid) -> Result<Self> {
        Self::new(self.p, self.q, self.b.clone(), u0, grid)
    }

    /// Mirror image of the problem under `x -> -x`.
    pub fn reflected(&self) -> Self {
        Self {
            b: self.b.reflected(),
            u0: self.u0.reflected(),
            ..self.clone()
        }
    }

    /// Allocation-free right-hand side over full node vectors.
    ///
    /// `du` has the same length as `u`; its boundary entries are set to zero.
    pub(crate) fn rhs_into(&self, u: &[f64], h: f64, du: &mut [f64]) {
        let n = u.len();
        let inv_h2 = 1.0 / (h * h);
        let inv_2h = 0.5 / h;
        let b = self.b.values();
        let int_p = small_integer(self.p);
        du[0] = 0.0;
        du[n - 1] = 0.0;
        for j in 1..n - 1 {
            let (l, c, r) = (u[j - 1], u[j], u[j + 1]);
            let source = match int_p {
                Some(k) => c.abs().powi(k),
                None => c.abs().powf(self.p),
            };
            let slope = ((r - l) * inv_2h).abs();
            let damping = if b[j] == 0.0 || slope == 0.0 {
                0.0
            } else {
                b[j] * slope.powf(self.q)
            };
            du[j] = grid::second_diff(l, c, r, inv_h2) + source - damping;
        }
    }
}

fn small_integer(p: f64) -> Option<i32> {
    (p.fract() == 0.0 && p <= 16.0).then_some(p as i32)
}

/// Position of `q` relative to the critical exponent `2p / (p + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

fn regime(p: f64, q: f64) -> Regime {
    let q_crit = 2.0 * p / (p + 1.0);
    if (q - q_crit).abs() <= CRITICAL_Q_RTOL * q_crit {
        Regime::Critical
    } else if q < q_crit {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// Time derivative of every interior node.
pub fn rhs(u: &GridFunction, spec: &ProblemSpec, grid: &Grid) -> Result<Vec<f64>> {
    u.check_aligned(grid)?;
    spec.b.check_aligned(grid)?;
    if let Some(v) = u.values().iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid_state(format!("non-finite state entry {v}")));
    }
    if !u.is_dirichlet() {
        return Err(Error::invalid_argument("state must vanish at both boundary nodes"));
    }
    let mut du = vec![0.0; u.len()];
    spec.rhs_into(u.values(), grid.h(), &mut du);
    du.pop();
    du.remove(0);
    Ok(du)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalConstants {
    /// `2p / (p + 1)`.
    pub q_crit: f64,
    /// `((p - 1) / 2) (2 / (p + 1))^(1 / (p + 1))`.
    pub b_crit: f64,
    /// `b_inf (2 / (p + 1))^(q / 2)`.
    pub c: f64,
    /// `p - q (p + 1) / 2`; exactly zero at the critical exponent.
    pub beta: f64,
    /// `(c (p + 1) / (p - 1))^(1 / beta)`, undefined when `beta == 0`
    /// and meaningless when `beta < 0`.
    pub norm_threshold: Option<f64>,
}

pub fn critical_constants(p: f64, q: f64, b_inf: f64) -> CriticalConstants {
    let q_crit = 2.0 * p / (p + 1.0);
    let b_crit = 0.5 * (p - 1.0) * (2.0 / (p + 1.0)).powf(1.0 / (p + 1.0));
    let c = b_inf * (2.0 / (p + 1.0)).powf(0.5 * q);
    let beta = match regime(p, q) {
        Regime::Critical => 0.0,
        _ => p - 0.5 * q * (p + 1.0),
    };
    let norm_threshold = (beta > 0.0).then(|| (c * (p + 1.0) / (p - 1.0)).powf(1.0 / beta));
    CriticalConstants {
        q_crit,
        b_crit,
        c,
        beta,
        norm_threshold,
    }
}

impl ProblemSpec {
    pub fn critical_constants(&self) -> CriticalConstants {
        critical_constants(self.p, self.q, self.b_inf)
    }
}

/// Discrete energy
/// `J = (1/2) sum_{j=1}^{N+1} (u_j - u_{j-1})^2 / h - 1/(p+1) sum_{j=1}^{N+1} h |u_j|^(p+1)`.
pub fn energy(u: &GridFunction, grid: &Grid, p: f64) -> f64 {
    energy_of(u.values(), grid.h(), p)
}

pub(crate) fn energy_of(u: &[f64], h: f64, p: f64) -> f64 {
    let mut gradient = 0.0;
    let mut potential = 0.0;
    for w in u.windows(2) {
        let d = w[1] - w[0];
        gradient += d * d;
        potential += w[1].abs().powf(p + 1.0);
    }
    0.5 * gradient / h - h * potential / (p + 1.0)
}

/// Outcome of the regime-specific condition of the blow-up theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdCondition {
    /// `q < q_crit`: needs `||U0||_{p+1} > norm_threshold`.
    Norm { norm_p1: f64, threshold: f64, passed: bool },
    /// `q == q_crit`: needs `b_inf < b_crit`.
    Coefficient { b_inf: f64, b_crit: f64, passed: bool },
    /// `q > q_crit`: outside the theorem.
    NotApplicable,
}

impl ThresholdCondition {
    pub fn passed(&self) -> bool {
        match self {
            ThresholdCondition::Norm { passed, .. } | ThresholdCondition::Coefficient { passed, .. } => *passed,
            ThresholdCondition::NotApplicable => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub regime: Regime,
    pub constants: CriticalConstants,
    pub b_inf: f64,
    pub energy0: f64,
    pub energy_negative: bool,
    pub norm_p1: f64,
    pub threshold: ThresholdCondition,
    /// Smallest entry of `δ²U0 + U0^p - b |δU0|^q` over interior nodes.
    pub min_initial_derivative: f64,
    /// Every entry of the initial derivative is nonnegative, so the solution
    /// is nondecreasing in time.
    pub initial_derivative_nonneg: bool,
}

impl CriteriaReport {
    /// All hypotheses of the blow-up theorem hold.
    pub fn theorem_applies(&self) -> bool {
        self.energy_negative && self.threshold.passed() && self.initial_derivative_nonneg
    }
}

/// Evaluates every hypothesis of the blow-up theorem on the initial data.
pub fn check_blowup_criteria(spec: &ProblemSpec, grid: &Grid) -> CriteriaReport {
    let p = spec.p;
    let constants = spec.critical_constants();
    let energy0 = energy(&spec.u0, grid, p);
    let norm_p1 = grid::weighted_norm(spec.u0.interior(), grid.h(), p + 1.0);
    let threshold = match spec.regime() {
        Regime::Subcritical => {
            let threshold = constants.norm_threshold.unwrap_or(0.0);
            ThresholdCondition::Norm {
                norm_p1,
                threshold,
                passed: norm_p1 > threshold,
            }
        }
        Regime::Critical => ThresholdCondition::Coefficient {
            b_inf: spec.b_inf,
            b_crit: constants.b_crit,
            passed: spec.b_inf < constants.b_crit,
        },
        Regime::Supercritical => ThresholdCondition::NotApplicable,
    };
    let mut du = vec![0.0; grid.len()];
    spec.rhs_into(spec.u0.values(), grid.h(), &mut du);
    let min_initial_derivative = du[1..du.len() - 1].iter().copied().fold(f64::INFINITY, f64::min);
    CriteriaReport {
        regime: spec.regime(),
        constants,
        b_inf: spec.b_inf,
        energy0,
        energy_negative: energy0 < 0.0,
        norm_p1,
        threshold,
        min_initial_derivative,
        initial_derivative_nonneg: min_initial_derivative >= 0.0,
    }
}

/// Local Lipschitz constant of the right-hand side on the l2 ball of
/// radius `radius` around a centre of norm `center_norm2`:
///
/// `L_h = 4/h + (p / h^((p-1)/2) + q b_inf / h^((3q-1)/2)) (2 ||X*||_2 + r)^(p-1)`.
pub fn lipschitz_bound(radius: f64, center_norm2: f64, grid: &Grid, spec: &ProblemSpec) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::invalid_argument("radius must be positive"));
    }
    if !(center_norm2 >= 0.0) {
        return Err(Error::invalid_argument("centre norm must be nonnegative"));
    }
    let (p, q, h) = (spec.p, spec.q, grid.h());
    let growth = p / h.powf(0.5 * (p - 1.0)) + q * spec.b_inf / h.powf(0.5 * (3.0 * q - 1.0));
    Ok(4.0 / h + growth * (2.0 * center_norm2 + radius).powf(p - 1.0))
}
