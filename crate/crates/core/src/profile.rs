//! Closed-form coefficient and initial-data profiles on `[-1, 1]`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::model::ProblemSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `amplitude * sin(pi (x + 1) / 2)`, evaluated as `amplitude * cos(pi x / 2)`
    /// so that samples at mirrored nodes are bitwise equal.
    SymmetricSine {
        amplitude: f64,
    },
    /// `amplitude * x^2 (1 - x^2) exp(x - 1)`.
    NonsymmetricBump {
        amplitude: f64,
    },
    /// `scale * exp(-x^3)`.
    ExpNegCube {
        scale: f64,
    },
    /// `scale * exp(x^3)`.
    ExpCube {
        scale: f64,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::SymmetricSine { amplitude } => amplitude * (FRAC_PI_2 * x).cos(),
            Profile::NonsymmetricBump { amplitude } => amplitude * x * x * (1.0 - x * x) * (x - 1.0).exp(),
            Profile::ExpNegCube { scale } => scale * (-x * x * x).exp(),
            Profile::ExpCube { scale } => scale * (x * x * x).exp(),
        }
    }

    /// Position of the maximum on `[-1, 1]`, where it is known in closed form.
    pub fn argmax(&self) -> Option<f64> {
        match *self {
            Profile::SymmetricSine { .. } => Some(0.0),
            // d/dx [x^2 (1 - x^2) e^x] = x e^x (2 + x - 4x^2 - x^3): positive root of
            // x^3 + 4x^2 - x - 2 in (0, 1).
            Profile::NonsymmetricBump { .. } => {
                let f = |x: f64| x * x * x + 4.0 * x * x - x - 2.0;
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            }
            _ => None,
        }
    }

    /// Parses the names used in configuration files (`sin`, `nonsym`,
    /// `exp_neg_cube`, `exp_cube`, `zero`, or a number for a constant).
    pub fn parse(name: &str, scale: f64) -> Result<Self> {
        let name = name.trim();
        if let Ok(c) = name.parse::<f64>() {
            return Ok(Profile::Constant(c * scale));
        }
        Ok(match name {
            "sin" => Profile::SymmetricSine { amplitude: scale },
            "nonsym" => Profile::NonsymmetricBump { amplitude: scale },
            "exp_neg_cube" => Profile::ExpNegCube { scale },
            "exp_cube" => Profile::ExpCube { scale },
            "constant" => Profile::Constant(scale),
            "zero" => Profile::Constant(0.0),
            other => return Err(Error::invalid_argument(format!(
                "unknown profile '{other}' (expected a number, sin, nonsym, exp_neg_cube, exp_cube, constant or zero)"
            ))),
        })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "{c}"),
            Profile::SymmetricSine { amplitude } => write!(f, "{amplitude}*sin(pi(x+1)/2)"),
            Profile::NonsymmetricBump { amplitude } => write!(f, "{amplitude}*x^2(1-x^2)exp(x-1)"),
            Profile::ExpNegCube { scale } => write!(f, "{scale}*exp(-x^3)"),
            Profile::ExpCube { scale } => write!(f, "{scale}*exp(x^3)"),
        }
    }
}

/// How initial data is transferred onto a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialSampling {
    /// Exact node values, so the initial error vanishes.
    #[default]
    Point,
    /// Cell averages over `[x_j - h/2, x_j + h/2]` (Simpson's rule), which
    /// differ from node values by `O(h^2)`.
    CellAverage,
}

/// A problem given by closed forms, instantiable on any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFamily {
    pub p: f64,
    pub q: f64,
    pub b: Profile,
    pub u0: Profile,
    pub sampling: InitialSampling,
}

impl ProblemFamily {
    pub fn new(p: f64, q: f64, b: Profile, u0: Profile) -> Self {
        Self {
            p,
            q,
            b,
            u0,
            sampling: InitialSampling::Point,
        }
    }

    pub fn with_sampling(mut self, sampling: InitialSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn sample_initial(&self, grid: &Grid) -> GridFunction {
        match self.sampling {
            InitialSampling::Point => GridFunction::sample_dirichlet(grid, |x| self.u0.eval(x)),
            InitialSampling::CellAverage => {
                let half = 0.5 * grid.h();
                GridFunction::sample_dirichlet(grid, |x| {
                    let (a, m, b) = (self.u0.eval(x - half), self.u0.eval(x), self.u0.eval(x + half));
                    (a + 4.0 * m + b) / 6.0
                })
            }
        }
    }

    pub fn instantiate(&self, grid: &Grid) -> Result<ProblemSpec> {
        let b = GridFunction::sample(grid, |x| self.b.eval(x));
        ProblemSpec::new(self.p, self.q, b, self.sample_initial(grid), grid)
    }
}
