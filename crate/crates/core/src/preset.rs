//! Named reference experiments.
//!
//! Each `figN` preset reproduces one reference figure. All use `p = 3`;
//! the remaining presets are small configurations used by tests and
//! benchmarks.

use crate::integrator::IntegratorConfig;
use crate::profile::{ProblemFamily, Profile};

/// Grid size used by the figure presets (`h ≈ 0.01`, `x = 0` is a node).
pub const DEFAULT_N: usize = 201;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub family: ProblemFamily,
    pub n: usize,
    pub integrator: IntegratorConfig,
    pub expect_blowup: bool,
    /// False for the runs that are known to lose positivity.
    pub expect_positive: bool,
}

impl Preset {
    fn figure(name: &'static str, description: &'static str, q: f64, b: Profile, u0: Profile) -> Self {
        Self {
            name,
            description,
            family: ProblemFamily::new(3.0, q, b, u0),
            n: DEFAULT_N,
            integrator: IntegratorConfig::default(),
            expect_blowup: true,
            expect_positive: true,
        }
    }

    fn negative(mut self) -> Self {
        self.expect_positive = false;
        self
    }
}

const NONSYM: Profile = Profile::NonsymmetricBump { amplitude: 1e3 };
const SINE: Profile = Profile::SymmetricSine { amplitude: 1e3 };

pub fn presets() -> Vec<Preset> {
    let c = Profile::Constant;
    let mut out = vec![
        Preset::figure("fig1", "nonsymmetric data, q=1.3, b=1: evolution", 1.3, c(1.0), NONSYM),
        Preset::figure(
            "fig2",
            "nonsymmetric data, q=1.3, b=1: blow-up at the maximum",
            1.3,
            c(1.0),
            NONSYM,
        ),
        Preset::figure("fig3", "nonsymmetric data, q=1.3, b=1: energy", 1.3, c(1.0), NONSYM),
        Preset::figure("fig4", "symmetric data, q=1.3, b=1: initial data", 1.3, c(1.0), SINE),
        Preset::figure("fig5", "symmetric data, q=1.3, b=1: blow-up at x=0", 1.3, c(1.0), SINE),
        Preset::figure("fig6", "symmetric data, q=1.3, b=1: energy", 1.3, c(1.0), SINE),
        Preset::figure("fig7", "symmetric data, critical q=1.5, b=1", 1.5, c(1.0), SINE),
        Preset::figure("fig8", "q=1.3, b=1", 1.3, c(1.0), SINE),
        Preset::figure("fig9", "q=1.3, b=10", 1.3, c(10.0), SINE),
        Preset::figure("fig10", "q=1.3, b=100", 1.3, c(100.0), SINE),
        Preset::figure("fig11", "q=1.3, b=1000", 1.3, c(1000.0), SINE),
        Preset::figure("fig12", "critical q=1.5, b=1", 1.5, c(1.0), SINE),
        Preset::figure("fig13", "critical q=1.5, b=1.48", 1.5, c(1.48), SINE),
        Preset::figure("fig14", "critical q=1.5, b=1.49: loses positivity", 1.5, c(1.49), SINE).negative(),
        Preset::figure(
            "fig15",
            "critical q=1.5, b=exp(-x^3)",
            1.5,
            Profile::ExpNegCube { scale: 1.0 },
            SINE,
        ),
        Preset::figure(
            "fig16",
            "critical q=1.5, b=1e3 exp(x^3): loses positivity",
            1.5,
            Profile::ExpCube { scale: 1e3 },
            SINE,
        )
        .negative(),
    ];
    out.push(Preset {
        name: "scalar",
        description: "single node, b=0, u0=2: u' = -2u + u^3",
        family: ProblemFamily::new(3.0, 1.5, c(0.0), c(2.0)),
        n: 1,
        integrator: IntegratorConfig {
            blowup_threshold: 1e5,
            ..IntegratorConfig::default()
        },
        expect_blowup: true,
        expect_positive: true,
    });
    out.push(Preset {
        name: "undamped",
        description: "symmetric data, b=0, q=1.3: nondecreasing in time",
        family: ProblemFamily::new(3.0, 1.3, c(0.0), SINE),
        n: DEFAULT_N,
        integrator: IntegratorConfig::default(),
        expect_blowup: true,
        expect_positive: true,
    });
    out.push(Preset {
        name: "smooth",
        description: "small symmetric data, q=1.5, b=1: decays, no blow-up",
        family: ProblemFamily::new(3.0, 1.5, c(1.0), Profile::SymmetricSine { amplitude: 1.0 }),
        n: 101,
        integrator: IntegratorConfig {
            t_max: 0.1,
            ..IntegratorConfig::default()
        },
        expect_blowup: false,
        expect_positive: true,
    });
    out
}

pub fn find_preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
