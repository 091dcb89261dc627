use blowuplab::{
    analyze, blowup_point, check_blowup_criteria, convergence_study, estimate_blowup_time, find_preset, integrate,
    Error, Grid, InitialSampling, IntegratorConfig, ProblemFamily, Profile, Status,
};

fn preset_run(name: &str) -> (Grid, blowuplab::ProblemSpec, blowuplab::Trajectory) {
    let p = find_preset(name).unwrap();
    let grid = Grid::new(p.n).unwrap();
    let spec = p.family.instantiate(&grid).unwrap();
    let traj = integrate(&spec, &grid, &p.integrator).unwrap();
    (grid, spec, traj)
}

#[test]
fn estimate_follows_stop_time() {
    for name in ["fig2", "fig5", "fig7", "fig11", "fig16", "scalar"] {
        let (g, s, traj) = preset_run(name);
        let r = analyze(&traj, &s, &g);
        let t_est = r.t_est.unwrap();
        assert!(t_est >= r.t_stop, "{name}: {t_est} < {}", r.t_stop);
        assert!(t_est - r.t_stop < 1e-3 * r.t_stop, "{name}");
        assert_eq!(r.rate_expected, -0.5);
    }
}

#[test]
fn estimate_stable_under_subsampling_on_a_run() {
    let (_, s, traj) = preset_run("fig2");
    let full = estimate_blowup_time(&traj.monitors, s.p()).unwrap();
    let mut half: Vec<_> = traj.monitors.iter().copied().step_by(2).collect();
    if half.last().map(|m| m.t) != traj.monitors.last().map(|m| m.t) {
        half.push(*traj.monitors.last().unwrap());
    }
    let sub = estimate_blowup_time(&half, s.p()).unwrap();
    assert!(((full - sub) / full).abs() < 1e-3);
}

#[test]
fn blowup_point_reflects_with_the_problem() {
    let (g, s, traj) = preset_run("fig2");
    let mirrored = s.reflected();
    let p = find_preset("fig2").unwrap();
    let mtraj = integrate(&mirrored, &g, &p.integrator).unwrap();
    let a = blowup_point(&traj, &g).unwrap();
    let b = blowup_point(&mtraj, &g).unwrap();
    assert_eq!(b.index, g.reflect_index(a.index));
    assert_eq!(b.x, -a.x);
}

#[test]
fn blowup_point_examples() {
    let (g, _, traj) = preset_run("scalar");
    assert_eq!(blowup_point(&traj, &g).unwrap().index, 1);

    let (g, _, traj) = preset_run("fig5");
    let bp = blowup_point(&traj, &g).unwrap();
    assert_eq!((bp.x, bp.tie), (0.0, false));

    let (g, _, traj) = preset_run("smooth");
    assert_eq!(traj.status, Status::ReachedHorizon);
    assert!(matches!(blowup_point(&traj, &g), Err(Error::InvalidState(_))));
}

#[test]
fn non_blowup_report_leaves_estimates_empty() {
    let (g, s, traj) = preset_run("smooth");
    let r = analyze(&traj, &s, &g);
    assert!(r.t_est.is_none() && r.rate_exponent.is_none() && r.blowup_point.is_none());
    assert!(r.bounds.is_some());
}

#[test]
fn criteria_on_presets() {
    let (g, s, _) = preset_run("fig4");
    let r = check_blowup_criteria(&s, &g);
    assert!(r.energy0 < 0.0 && r.energy_negative);

    let (g, s, _) = preset_run("fig7");
    let r = check_blowup_criteria(&s, &g);
    assert!(r.b_inf >= r.constants.b_crit);
    assert!((r.constants.b_crit - 0.8409).abs() < 1e-4);
    assert!(!r.theorem_applies());
}

#[test]
fn refinement_reaches_second_order() {
    let fam = ProblemFamily::new(
        3.0,
        1.5,
        Profile::Constant(1.0),
        Profile::SymmetricSine { amplitude: 1.0 },
    );
    let r = convergence_study(&fam, &[25, 50, 100], 0.1, &IntegratorConfig::default()).unwrap();
    assert!(r.complete());
    assert_eq!(r.reference_n, 400);
    assert_eq!((r.errors.len(), r.orders.len(), r.h.len()), (3, 2, 3));
    assert!(r.errors.iter().all(|e| e.unwrap() > 0.0));
    assert!(r.orders.iter().all(|o| o.unwrap() >= 1.8), "{:?}", r.orders);
}

#[test]
fn cell_averaged_data_stays_second_order() {
    let fam = ProblemFamily::new(
        3.0,
        1.5,
        Profile::Constant(1.0),
        Profile::SymmetricSine { amplitude: 1.0 },
    )
    .with_sampling(InitialSampling::CellAverage);
    let r = convergence_study(&fam, &[25, 50, 100], 0.1, &IntegratorConfig::default()).unwrap();
    assert!(
        r.orders.iter().all(|o| (o.unwrap() - 2.0).abs() < 0.3),
        "{:?}",
        r.orders
    );
}

#[test]
fn check_time_past_blowup_is_flagged() {
    let fam = ProblemFamily::new(
        3.0,
        1.3,
        Profile::Constant(1.0),
        Profile::SymmetricSine { amplitude: 20.0 },
    );
    let r = convergence_study(&fam, &[11, 21, 41], 1.0, &IntegratorConfig::default()).unwrap();
    assert!(!r.complete());
    assert!(r.statuses.iter().all(|s| s.is_blowup()));
    assert!(r.errors.iter().all(|e| e.is_none()));
    assert!(r.orders.iter().all(|o| o.is_none()));
}
