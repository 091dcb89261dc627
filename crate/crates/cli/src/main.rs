mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blowuplab::{convergence_study, presets, run, sweep, SweepParameter, ThresholdCondition};
use clap::{CommandFactory, Parser, Subcommand};
use log::{info, warn};

use crate::config::{RawConfig, RunConfig};

const DEFAULT_OUT: &str = "out";

#[derive(Debug, Parser)]
#[command(
    name = "blowuplab",
    version,
    about = "Blow-up experiments for u_t = u_xx + |u|^p - b(x)|u_x|^q"
)]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides out_dir and BLOWUPLAB_OUT).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Configuration override, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Start from a named experiment (see `presets`).
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Only report errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one configuration; writes monitors.csv, snapshots.csv and report.csv.
    Run,
    /// Repeat a run over parameter values; writes summary.csv.
    Sweep {
        /// One of b_const, q, p, N.
        #[arg(long)]
        param: SweepParameter,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// Evaluate the blow-up criteria of the initial data; writes criteria.csv.
    Criteria,
    /// Grid-refinement study; writes convergence.csv.
    Converge {
        /// Comma-separated interior node counts (overrides n_list).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n_list: Option<Vec<usize>>,
        /// Comparison time (overrides t_check; defaults to t_max).
        #[arg(long)]
        t_check: Option<f64>,
    },
    /// List the available presets.
    Presets,
}

/// Configuration holds no problem to run.
#[derive(Debug)]
struct EmptyConfig;

impl std::fmt::Display for EmptyConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("empty configuration: give --preset NAME, a preset or u0 key in --config, or --set u0=...")
    }
}

impl std::error::Error for EmptyConfig {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<EmptyConfig>() {
                eprintln!("\n{}", Cli::command().render_usage());
                eprintln!("Run `blowuplab --help` or `blowuplab presets` for more.");
            }
            ExitCode::FAILURE
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    if let Some(name) = &cli.preset {
        raw.set("preset", name)?;
    }
    for pair in &cli.set {
        raw.set_pair(pair).with_context(|| format!("--set {pair}"))?;
    }
    if raw.is_empty_problem() {
        return Err(EmptyConfig.into());
    }
    RunConfig::resolve(&raw)
}

/// `--out`, then `out_dir` from the configuration, then `BLOWUPLAB_OUT`.
fn output_dir(cli: &Cli, cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os("BLOWUPLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Presets => {
            list_presets(cli.quiet);
            Ok(())
        }
        Command::Run => cmd_run(cli),
        Command::Sweep { param, values } => cmd_sweep(cli, *param, values),
        Command::Criteria => cmd_criteria(cli),
        Command::Converge { n_list, t_check } => cmd_converge(cli, n_list.as_deref(), *t_check),
    }
}

fn list_presets(quiet: bool) {
    if quiet {
        return;
    }
    for p in presets() {
        println!(
            "{:<9} N={:<4} p={} q={} b={} u0={}  {}",
            p.name, p.n, p.family.p, p.family.q, p.family.b, p.family.u0, p.description
        );
    }
}

fn describe(cfg: &RunConfig) -> String {
    let f = &cfg.run.family;
    format!(
        "{}p={} q={} b={} u0={} N={}",
        cfg.preset.as_deref().map(|p| format!("{p}: ")).unwrap_or_default(),
        f.p,
        f.q,
        f.b,
        f.u0,
        cfg.run.n
    )
}

fn cmd_run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let dir = output_dir(cli, &cfg)?;
    info!("run {}", describe(&cfg));
    let out = run(&cfg.run)?;
    let traj = &out.trajectory;
    output::write_monitors(&cfg.file(&dir, "monitors.csv"), traj)?;
    output::write_snapshots(&cfg.file(&dir, "snapshots.csv"), &out.grid, out.spec.u0(), traj)?;
    output::write_report(&cfg.file(&dir, "report.csv"), &out.report)?;
    if matches!(out.report.status, blowuplab::Status::StepUnderflow { .. }) {
        warn!("step size underflow at t = {}", out.report.t_stop);
    }
    let r = &out.report;
    info!(
        "{} at t = {} after {} steps ({} rejected); T_est = {}; blow-up x = {}; min value = {}",
        r.status.as_str(),
        r.t_stop,
        traj.accepted_steps,
        traj.rejected_steps,
        show(r.t_est),
        show(r.blowup_point.map(|b| b.x)),
        r.min_value_overall
    );
    info!("wrote {}", dir.display());
    Ok(())
}

fn show(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

fn cmd_sweep(cli: &Cli, param: SweepParameter, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    let cfg = load_config(cli)?;
    let dir = output_dir(cli, &cfg)?;
    info!("sweep {param} over {values:?} for {}", describe(&cfg));
    let rows = sweep(&cfg.run, param, values)?;
    for row in &rows {
        if let Err(e) = &row.outcome {
            warn!("{param} = {}: {e}", row.value);
        }
    }
    output::write_summary(&cfg.file(&dir, "summary.csv"), &rows)?;
    info!("wrote {}", dir.display());
    Ok(())
}

fn cmd_criteria(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let dir = output_dir(cli, &cfg)?;
    let grid = blowuplab::Grid::new(cfg.run.n)?;
    let spec = cfg.run.family.instantiate(&grid)?;
    let r = blowuplab::check_blowup_criteria(&spec, &grid);
    if !cli.quiet {
        let c = &r.constants;
        println!("{}", describe(&cfg));
        println!("regime            {} (q_crit = {})", r.regime.as_str(), c.q_crit);
        println!("J(0)              {}  negative: {}", r.energy0, pass(r.energy_negative));
        println!("b_crit            {}", c.b_crit);
        println!("c                 {}", c.c);
        println!("beta              {}", c.beta);
        println!("norm threshold    {}", show(c.norm_threshold));
        match r.threshold {
            ThresholdCondition::Norm {
                norm_p1,
                threshold,
                passed,
            } => {
                println!("|U0|_(p+1)        {norm_p1} > {threshold}: {}", pass(passed))
            }
            ThresholdCondition::Coefficient { b_inf, b_crit, passed } => {
                println!("b_inf < b_crit    {b_inf} < {b_crit}: {}", pass(passed))
            }
            ThresholdCondition::NotApplicable => println!("threshold         not applicable (q > q_crit)"),
        }
        println!(
            "initial derivative min {}  nonnegative: {}",
            r.min_initial_derivative,
            pass(r.initial_derivative_nonneg)
        );
        println!("blow-up theorem applies: {}", pass(r.theorem_applies()));
    }
    output::write_criteria(&cfg.file(&dir, "criteria.csv"), &r)?;
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_converge(cli: &Cli, n_list: Option<&[usize]>, t_check: Option<f64>) -> Result<()> {
    let cfg = load_config(cli)?;
    let dir = output_dir(cli, &cfg)?;
    let n_list = n_list.unwrap_or(&cfg.n_list);
    let t_check = t_check.or(cfg.t_check).unwrap_or(cfg.run.integrator.t_max);
    info!("converge over N = {n_list:?} at t = {t_check} for {}", describe(&cfg));
    let report = convergence_study(&cfg.run.family, n_list, t_check, &cfg.run.integrator)?;
    output::write_convergence(&cfg.file(&dir, "convergence.csv"), &report)?;
    if !report.complete() {
        warn!("some runs stopped before t = {t_check}; affected rows are flagged");
    }
    if !cli.quiet {
        for ((n, e), f) in report
            .grids
            .iter()
            .zip(&report.errors)
            .zip(output::convergence_flags(&report))
        {
            println!("N={n:<6} error={:<24} {f}", show(*e));
        }
        println!(
            "orders: {}",
            report.orders.iter().map(|o| show(*o)).collect::<Vec<_>>().join(", ")
        );
    }
    Ok(())
}
