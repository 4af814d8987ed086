//! Batch command-line interface for the coldwave toolkit.
//!
//! Six subcommands cover the full workflow: `simulate` runs a scenario to
//! breaking or its horizon and emits the diagnostics time series,
//! `snapshot` runs to a chosen time and samples the spatial profiles
//! there, `analyze` maps the analytic first-revolution verdicts and
//! certified lifetimes over starting positions, `limiters` emits the
//! phase-plane comparison polylines for one starting point, `threshold`
//! bisects the smoothing collision frequency, and `units` converts
//! laboratory plasma parameters to model units.
//!
//! Simulation outcomes are data, not errors: a run that ends in breaking
//! exits 0 with verdict `broke`. Exit code 1 marks rejected input, exit
//! code 2 a failure at run time. Output files are deterministic: the same
//! configuration and code version produce byte-identical files for any
//! worker-thread count.

mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coldwave::analysis::{
    first_revolution_verdict, guaranteed_revolutions, limiter_trace, phase_point_at, LimiterFamily,
};
use coldwave::sampling::snapshot;
use coldwave::solver::{
    advance, detect_breaking, find_threshold_nu, initialize, run, RunVerdict, ThresholdError,
};
use coldwave::units::{
    collision_frequency, coulomb_log_estimate, dimensionless_scales, eta, PlasmaParams,
};

use crate::config::SourceArgs;

/// Failure modes mapped to exit codes: validation 1, runtime 2.
#[derive(Debug)]
pub(crate) enum CliError {
    /// The input was rejected before any real work started.
    Validation(String),
    /// The work itself failed.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "coldwave", version, about = "Relativistic cold-plasma oscillation toolkit")]
struct Cli {
    /// Directory for emitted files; COLDWAVE_OUT_DIR, then the working
    /// directory, when omitted.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sample maps; one per core when omitted.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to breaking or the horizon and emit its time series.
    Simulate(SimulateArgs),
    /// Run to a chosen time and emit the spatial profiles there.
    Snapshot(SnapshotArgs),
    /// Map analytic verdicts and certified lifetimes over starting positions.
    Analyze(AnalyzeArgs),
    /// Emit the phase-plane limiter polylines for one starting position.
    Limiters(LimitersArgs),
    /// Bisect the smoothing threshold collision frequency.
    Threshold(ThresholdArgs),
    /// Convert physical plasma parameters to model units.
    Units(UnitsArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct SnapshotArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Sample time; the preset's snapshot time or the horizon when omitted.
    #[arg(long)]
    theta: Option<f64>,
    /// Uniformly spaced sample positions across the ensemble (at least 2);
    /// one per initial grid node when omitted.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of grid cells in the starting-position map (default 400).
    #[arg(long)]
    samples: Option<usize>,
}

/// Limiter family choice on the command line.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    /// Two-constant comparison chain; sound for any admissible nu.
    Comparison,
    /// Single-constant conic chain; collisionless cross-check only.
    Ellipse,
}

#[derive(Args)]
struct LimitersArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Starting position of the traced characteristic.
    #[arg(long)]
    rho0: f64,
    /// Comparison family to trace.
    #[arg(long, value_enum, default_value = "comparison")]
    family: FamilyArg,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Lower bracket frequency; its run must break before the horizon.
    #[arg(long)]
    nu_lo: Option<f64>,
    /// Upper bracket frequency; its run must stay smooth.
    #[arg(long)]
    nu_hi: Option<f64>,
    /// Absolute tolerance on the returned frequency.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct UnitsArgs {
    /// Ion charge number Z.
    #[arg(long = "Z")]
    z: f64,
    /// Electron density N0e in cm^-3.
    #[arg(long = "N0e")]
    n0e: f64,
    /// Electron temperature Te in eV.
    #[arg(long = "Te")]
    te: f64,
    /// Coulomb logarithm; estimated from N0e and Te when omitted.
    #[arg(long = "lnLambda")]
    ln_lambda: Option<f64>,
    /// Scale-setting density n0 in cm^-3; defaults to N0e.
    #[arg(long = "n0")]
    n0: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests succeed; anything else is a usage
            // error.
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => simulate_cmd(cli, args),
        Command::Snapshot(args) => snapshot_cmd(cli, args),
        Command::Analyze(args) => analyze_cmd(cli, args),
        Command::Limiters(args) => limiters_cmd(cli, args),
        Command::Threshold(args) => threshold_cmd(cli, args),
        Command::Units(args) => units_cmd(args),
    }
}

fn simulate_cmd(cli: &Cli, args: &SimulateArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.source)?;
    let report = run(&resolved.config).map_err(|e| CliError::Validation(e.to_string()))?;
    let dir = emit::out_dir(cli.out_dir.as_deref())?;
    let series = dir.join(format!("{}_series.csv", resolved.label));
    emit::write_atomic(&series, &emit::series_csv(&report, &resolved))?;
    let summary = dir.join(format!("{}_summary.json", resolved.label));
    emit::write_atomic(&summary, &emit::to_json(&emit::run_summary(&report, &resolved)))?;
    match report.verdict {
        RunVerdict::Broke {
            theta_break,
            rho_break,
            ..
        } => println!(
            "verdict: broke at theta = {theta_break:.4}, rho = {rho_break:.4} after {} oscillations",
            report.oscillation_count
        ),
        RunVerdict::SmoothUntilThetaMax => println!(
            "verdict: smooth until theta = {} ({} oscillations)",
            report.config.theta_max, report.oscillation_count
        ),
    }
    println!("wrote {}", series.display());
    println!("wrote {}", summary.display());
    Ok(())
}

fn snapshot_cmd(cli: &Cli, args: &SnapshotArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.source)?;
    let cfg = &resolved.config;
    let theta = args
        .theta
        .or_else(|| resolved.snapshot_theta())
        .unwrap_or(cfg.theta_max);
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(CliError::Validation(format!(
            "sample time {theta} must be finite and non-negative"
        )));
    }
    let points = args.points.unwrap_or(cfg.m + 1);
    if points < 2 {
        return Err(CliError::Validation(format!(
            "need at least 2 sample points, got {points}"
        )));
    }
    let mut e = initialize(cfg).map_err(|err| CliError::Validation(err.to_string()))?;
    let steps = (theta / cfg.scheme.tau).round() as usize;
    for _ in 0..steps {
        advance(&mut e, cfg.nu).map_err(|err| CliError::Runtime(err.to_string()))?;
        if let Some(info) = detect_breaking(&e, &cfg.monitors).broke {
            return Err(CliError::Runtime(format!(
                "run broke at theta = {:.4} (rho = {:.4}), before the sample time {theta}",
                e.theta, info.rho
            )));
        }
    }
    let (lo, hi) = (e.position(0), e.position(e.m()));
    let queries: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let table = snapshot(&e, &queries);
    let dir = emit::out_dir(cli.out_dir.as_deref())?;
    let csv = dir.join(format!("{}_snapshot.csv", resolved.label));
    emit::write_atomic(&csv, &emit::snapshot_csv(&table, &resolved))?;
    let summary = dir.join(format!("{}_snapshot.json", resolved.label));
    emit::write_atomic(
        &summary,
        &emit::to_json(&emit::snapshot_summary(&table, &resolved)),
    )?;
    println!(
        "sampled {} points at theta = {:.4} ({} skipped)",
        table.rows.len(),
        table.theta,
        table.skipped.len()
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", summary.display());
    Ok(())
}

fn analyze_cmd(cli: &Cli, args: &AnalyzeArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.source)?;
    let cfg = &resolved.config;
    let samples = args
        .samples
        .or_else(|| resolved.map_samples())
        .unwrap_or(400);
    if samples < 2 {
        return Err(CliError::Validation(format!(
            "need at least 2 map cells, got {samples}"
        )));
    }
    let grid: Vec<f64> = (0..=samples)
        .map(|i| -cfg.d + 2.0 * cfg.d * i as f64 / samples as f64)
        .collect();
    let life = guaranteed_revolutions(cfg, &grid);
    let mut rows = Vec::with_capacity(grid.len());
    for (&rho, &(_, turns)) in grid.iter().zip(&life.per_sample) {
        let p = phase_point_at(cfg, rho).ok_or_else(|| {
            CliError::Validation(format!("rho = {rho} is outside the initial data's domain"))
        })?;
        let verdict =
            first_revolution_verdict(&p, cfg.nu).map_err(|e| CliError::Validation(e.to_string()))?;
        rows.push(emit::AnalyzeRow {
            rho,
            alpha: p.alpha,
            beta: p.beta,
            k_minus: p.bound.k_minus,
            verdict: verdict.name(),
            turns,
        });
    }
    let dir = emit::out_dir(cli.out_dir.as_deref())?;
    let csv = dir.join(format!("{}_verdicts.csv", resolved.label));
    emit::write_atomic(&csv, &emit::analyze_csv(&rows, &resolved))?;
    let summary = dir.join(format!("{}_analyze.json", resolved.label));
    emit::write_atomic(
        &summary,
        &emit::to_json(&emit::analyze_summary(&life, &rows, samples, &resolved)),
    )?;
    match (life.n_min, life.lifetime_bound) {
        (Some(n), Some(bound)) => {
            let lo = life
                .worst_rho
                .iter()
                .map(|r| r.abs())
                .fold(f64::INFINITY, f64::min);
            let hi = life.worst_rho.iter().map(|r| r.abs()).fold(0.0, f64::max);
            println!(
                "n_min = {n}: lifetime bound {bound:.4}, binding starts at |rho| in [{lo:.3}, {hi:.3}]"
            );
        }
        _ => println!("no finite certificate on this grid"),
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", summary.display());
    Ok(())
}

fn limiters_cmd(cli: &Cli, args: &LimitersArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.source)?;
    let cfg = &resolved.config;
    let p = phase_point_at(cfg, args.rho0).ok_or_else(|| {
        CliError::Validation(format!(
            "rho0 = {} is outside the initial data's domain",
            args.rho0
        ))
    })?;
    let family = match args.family {
        FamilyArg::Comparison => LimiterFamily::Comparison,
        FamilyArg::Ellipse => LimiterFamily::Ellipse,
    };
    let trace =
        limiter_trace(&p, cfg.nu, family).map_err(|e| CliError::Validation(e.to_string()))?;
    let dir = emit::out_dir(cli.out_dir.as_deref())?;
    let csv = dir.join(format!("{}_limiters.csv", resolved.label));
    emit::write_atomic(&csv, &emit::limiter_csv(&trace, args.rho0, &resolved))?;
    let summary = dir.join(format!("{}_limiters.json", resolved.label));
    emit::write_atomic(
        &summary,
        &emit::to_json(&emit::limiter_summary(&trace, args.rho0, &resolved)),
    )?;
    println!(
        "certified {} revolutions (lifetime bound {:.4}), stop: {}",
        trace.revolutions,
        trace.lifetime_bound,
        emit::stop_name(&trace.stop)
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", summary.display());
    Ok(())
}

fn threshold_cmd(cli: &Cli, args: &ThresholdArgs) -> Result<(), CliError> {
    let resolved = config::resolve(&args.source)?;
    let preset_bracket = resolved.threshold_bracket();
    let nu_lo = args
        .nu_lo
        .or(preset_bracket.map(|b| b.0))
        .ok_or_else(|| CliError::Validation("--nu-lo is required without a bracket preset".into()))?;
    let nu_hi = args
        .nu_hi
        .or(preset_bracket.map(|b| b.1))
        .ok_or_else(|| CliError::Validation("--nu-hi is required without a bracket preset".into()))?;
    let tol = args
        .tol
        .or(preset_bracket.map(|b| b.2))
        .ok_or_else(|| CliError::Validation("--tol is required without a bracket preset".into()))?;
    let result = find_threshold_nu(&resolved.config, nu_lo, nu_hi, tol).map_err(|e| match e {
        ThresholdError::InvalidBracket { .. }
        | ThresholdError::InvalidTolerance(_)
        | ThresholdError::Config(_) => CliError::Validation(e.to_string()),
        ThresholdError::LowerDoesNotBreak(_) | ThresholdError::UpperBreaks(_) => {
            CliError::Runtime(e.to_string())
        }
    })?;
    let dir = emit::out_dir(cli.out_dir.as_deref())?;
    let csv = dir.join(format!("{}_probes.csv", resolved.label));
    emit::write_atomic(&csv, &emit::threshold_csv(&result, tol, &resolved))?;
    let summary = dir.join(format!("{}_threshold.json", resolved.label));
    emit::write_atomic(
        &summary,
        &emit::to_json(&emit::threshold_summary(&result, tol, &resolved)),
    )?;
    println!(
        "threshold: nu* = {:.6e} in [{:.6e}, {:.6e}] after {} probe runs",
        result.nu_star,
        result.bracket.0,
        result.bracket.1,
        result.trace.len()
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", summary.display());
    Ok(())
}

fn units_cmd(args: &UnitsArgs) -> Result<(), CliError> {
    let (ln_lambda, ln_lambda_source) = match args.ln_lambda {
        Some(v) => (v, "given"),
        None => {
            let est = coulomb_log_estimate(args.n0e, args.te)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            log::info!("lnLambda not given; using the standard estimate {est:.3}");
            (est, "estimated")
        }
    };
    let params = PlasmaParams {
        z: args.z,
        n0e: args.n0e,
        te: args.te,
        ln_lambda,
        n0: args.n0.unwrap_or(args.n0e),
    };
    let coupling = eta(&params).map_err(|e| CliError::Validation(e.to_string()))?;
    let nu = collision_frequency(&params).map_err(|e| CliError::Validation(e.to_string()))?;
    let (omega_p, k_p) =
        dimensionless_scales(params.n0).map_err(|e| CliError::Validation(e.to_string()))?;
    println!("eta = {coupling:.6e}");
    println!("lnLambda = {ln_lambda:.4} ({ln_lambda_source})");
    println!("nu = {nu:.6e} (in omega_p units)");
    println!("omega_p = {omega_p:.6e} 1/s");
    println!("k_p = {k_p:.6e} 1/cm");
    Ok(())
}
