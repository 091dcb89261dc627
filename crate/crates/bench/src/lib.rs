//! Benchmark fixtures shared by the criterion targets.

use blowuplab::{find_preset, Grid, GridFunction, IntegratorConfig, ProblemSpec, RunSpec};

/// Preset instantiated on its default grid.
pub fn preset_problem(name: &str) -> (Grid, ProblemSpec) {
    let preset = find_preset(name).expect("known preset");
    let grid = Grid::new(preset.n).expect("valid grid");
    let spec = preset.family.instantiate(&grid).expect("valid preset");
    (grid, spec)
}

/// Run specification for a preset at `n` interior nodes.
pub fn preset_run(name: &str, n: usize) -> RunSpec {
    let preset = find_preset(name).expect("known preset");
    RunSpec {
        family: preset.family,
        n,
        integrator: IntegratorConfig {
            monitor_stride: 16,
            ..preset.integrator
        },
    }
}

/// A state halfway to blow-up, useful for right-hand-side timings.
pub fn scaled_initial(spec: &ProblemSpec, grid: &Grid, factor: f64) -> GridFunction {
    let v: Vec<f64> = spec.u0().values().iter().map(|x| x * factor).collect();
    GridFunction::from_values(grid, v).expect("aligned")
}
