//! File emission: atomic writes, self-describing CSVs, and summary JSON.
//!
//! Every emitted file is deterministic for a fixed configuration and code
//! version: metadata lines carry no timestamps or absolute paths, and all
//! floating-point fields are printed with 17 significant digits, enough to
//! round-trip an f64 exactly. CSVs are UTF-8 with LF line endings, a '.'
//! decimal separator, and '#'-prefixed metadata lines before the header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use coldwave::analysis::{GuaranteedLifetime, LimiterFamily, LimiterTrace, TraceStop};
use coldwave::sampling::SnapshotTable;
use coldwave::solver::{BreakKind, InitialData, RunReport, RunVerdict, ThresholdResult};

use crate::config::Resolved;
use crate::CliError;

pub(crate) const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory: the flag wins, then COLDWAVE_OUT_DIR, then the
/// working directory. Created if missing.
pub(crate) fn out_dir(flag: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os("COLDWAVE_OUT_DIR") {
            Some(v) => PathBuf::from(v),
            None => PathBuf::from("."),
        },
    };
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a partial file behind.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let attempt = fs::write(&tmp, contents).and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = attempt {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Runtime(format!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

/// Full-precision float field: 17 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Stable lowercase name of a breaking cause.
fn kind_name(kind: BreakKind) -> &'static str {
    match kind {
        BreakKind::CellCollapse => "cell_collapse",
        BreakKind::DerivativeThreshold => "derivative_threshold",
        BreakKind::NonFiniteStage => "non_finite_stage",
    }
}

/// Stable lowercase name of a limiter stop cause.
pub(crate) fn stop_name(stop: &TraceStop) -> &'static str {
    match stop {
        TraceStop::CrossingBeyondHalf { .. } => "crossing_beyond_half",
        TraceStop::Escaped { .. } => "escaped",
        TraceStop::Capped => "capped",
    }
}

fn family_name(family: LimiterFamily) -> &'static str {
    match family {
        LimiterFamily::Comparison => "comparison",
        LimiterFamily::Ellipse => "ellipse",
    }
}

/// Common '#' metadata block: tool version, label, and the configuration.
fn meta_header(kind: &str, resolved: &Resolved) -> String {
    let cfg = &resolved.config;
    let mut s = String::new();
    let _ = writeln!(s, "# coldwave {VERSION} {kind}");
    let _ = writeln!(s, "# label = {}", resolved.label);
    if let Some(name) = &resolved.preset {
        let _ = writeln!(s, "# preset = {name}");
    }
    if let InitialData::Gaussian { a_star, rho_star } = &cfg.initial_data {
        let _ = writeln!(s, "# a_star = {a_star}, rho_star = {rho_star}");
    }
    let _ = writeln!(
        s,
        "# m = {}, d = {}, nu = {}, tau = {}, theta_max = {}, output_every = {}",
        cfg.m, cfg.d, cfg.nu, cfg.scheme.tau, cfg.theta_max, cfg.output_every
    );
    s
}

/// Serializes a summary document with 17-significant-digit floats.
pub(crate) fn to_json(value: &Value) -> String {
    struct Sci17;
    impl serde_json::ser::Formatter for Sci17 {
        fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
        where
            W: ?Sized + io::Write,
        {
            write!(writer, "{value:.16e}")
        }
    }
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sci17);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization");
    let mut s = String::from_utf8(out).expect("serializer emits UTF-8");
    s.push('\n');
    s
}

/// Configuration echo embedded in every summary document.
fn config_echo(resolved: &Resolved) -> Value {
    let cfg = &resolved.config;
    let initial = match &cfg.initial_data {
        InitialData::Gaussian { a_star, rho_star } => json!({
            "type": "gaussian",
            "a_star": a_star,
            "rho_star": rho_star,
        }),
        InitialData::Tabulated { e0, .. } => json!({
            "type": "tabulated",
            "nodes": e0.len(),
        }),
    };
    json!({
        "initial_data": initial,
        "m": cfg.m,
        "d": cfg.d,
        "nu": cfg.nu,
        "scheme": format!("{:?}", cfg.scheme.kind).to_lowercase(),
        "tau": cfg.scheme.tau,
        "theta_max": cfg.theta_max,
        "output_every": cfg.output_every,
        "monitors": {
            "q_abs_max": cfg.monitors.q_abs_max,
            "d_min": cfg.monitors.d_min,
        },
        "defaults_applied": resolved.defaults_applied,
    })
}

fn base_summary(resolved: &Resolved) -> Value {
    json!({
        "version": VERSION,
        "label": resolved.label,
        "preset": resolved.preset,
        "config": config_echo(resolved),
    })
}

/// Diagnostics time series with the pinned header.
pub(crate) fn series_csv(report: &RunReport, resolved: &Resolved) -> String {
    let mut s = meta_header("time series", resolved);
    let _ = writeln!(s, "# verdict = {}", report.verdict.name());
    if let RunVerdict::Broke {
        theta_break,
        rho_break,
        ..
    } = report.verdict
    {
        let _ = writeln!(
            s,
            "# theta_break = {}, rho_break = {}",
            sci(theta_break),
            sci(rho_break)
        );
    }
    let _ = writeln!(s, "theta,N_max,N_origin,E_max,P_max,min_h,maxQ");
    for r in &report.series {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            sci(r.theta),
            sci(r.n_max),
            sci(r.n_origin),
            sci(r.e_max),
            sci(r.p_max),
            sci(r.min_h),
            sci(r.q_abs_max)
        );
    }
    s
}

pub(crate) fn run_summary(report: &RunReport, resolved: &Resolved) -> Value {
    let verdict = match report.verdict {
        RunVerdict::Broke {
            theta_break,
            rho_break,
            kind,
            particle,
        } => json!({
            "name": "broke",
            "theta_break": theta_break,
            "rho_break": rho_break,
            "kind": kind_name(kind),
            "particle": particle,
        }),
        RunVerdict::SmoothUntilThetaMax => json!({
            "name": "smooth_until_theta_max",
            "theta_break": null,
            "rho_break": null,
        }),
    };
    let mut doc = base_summary(resolved);
    doc["verdict"] = verdict;
    doc["oscillation_count"] = json!(report.oscillation_count);
    doc["probe_index"] = json!(report.probe_index);
    doc["first_smooth_criterion_violation"] = json!(report.first_smooth_criterion_violation);
    doc["records"] = json!(report.series.len());
    doc
}

/// Spatial profiles at one time with the pinned header.
pub(crate) fn snapshot_csv(table: &SnapshotTable, resolved: &Resolved) -> String {
    let mut s = meta_header("snapshot", resolved);
    let _ = writeln!(s, "# theta = {}", sci(table.theta));
    if table.quality_warning {
        let _ = writeln!(s, "# warning: some interpolation cells are near breaking resolution");
    }
    let _ = writeln!(s, "rho,P,E,Q,D,N");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            sci(r.rho),
            sci(r.p),
            sci(r.e),
            sci(r.q),
            sci(r.d),
            sci(r.n)
        );
    }
    s
}

pub(crate) fn snapshot_summary(table: &SnapshotTable, resolved: &Resolved) -> Value {
    let mut doc = base_summary(resolved);
    doc["theta"] = json!(table.theta);
    doc["points"] = json!(table.rows.len());
    doc["skipped"] = json!(table.skipped.len());
    doc["quality_warning"] = json!(table.quality_warning);
    doc
}

/// One row of the verdict map.
pub(crate) struct AnalyzeRow {
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k_minus: f64,
    pub verdict: &'static str,
    pub turns: Option<u32>,
}

pub(crate) fn analyze_csv(rows: &[AnalyzeRow], resolved: &Resolved) -> String {
    let mut s = meta_header("verdict map", resolved);
    let _ = writeln!(
        s,
        "# turns: certified complete revolutions; empty when no finite bound applies"
    );
    let _ = writeln!(s, "rho,alpha,beta,k_minus,verdict,turns");
    for r in rows {
        let turns = r.turns.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            sci(r.rho),
            sci(r.alpha),
            sci(r.beta),
            sci(r.k_minus),
            r.verdict,
            turns
        );
    }
    s
}

pub(crate) fn analyze_summary(
    life: &GuaranteedLifetime,
    rows: &[AnalyzeRow],
    samples: usize,
    resolved: &Resolved,
) -> Value {
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for r in rows {
        *counts.entry(r.verdict).or_insert(0) += 1;
    }
    let mut doc = base_summary(resolved);
    doc["samples"] = json!(samples);
    doc["n_min"] = json!(life.n_min);
    doc["lifetime_bound"] = json!(life.lifetime_bound);
    doc["worst_rho"] = json!(life.worst_rho);
    doc["verdict_counts"] = json!(counts);
    doc
}

/// Limiter polylines, one row per sampled (D, Q) point.
pub(crate) fn limiter_csv(trace: &LimiterTrace, rho0: f64, resolved: &Resolved) -> String {
    let mut s = meta_header("limiter polylines", resolved);
    let _ = writeln!(s, "# rho0 = {}", sci(rho0));
    let _ = writeln!(
        s,
        "# family = {}, revolutions = {}, lifetime_bound = {}, stop = {}",
        family_name(trace.family),
        trace.revolutions,
        sci(trace.lifetime_bound),
        stop_name(&trace.stop)
    );
    let _ = writeln!(s, "segment,quadrant,D,Q");
    for (i, seg) in trace.segments.iter().enumerate() {
        for &(d, q) in &seg.points {
            let _ = writeln!(s, "{},{},{},{}", i, seg.quadrant.roman(), sci(d), sci(q));
        }
    }
    s
}

pub(crate) fn limiter_summary(trace: &LimiterTrace, rho0: f64, resolved: &Resolved) -> Value {
    let stop = match trace.stop {
        TraceStop::CrossingBeyondHalf { d_star } => json!({
            "name": "crossing_beyond_half",
            "d_star": d_star,
        }),
        TraceStop::Escaped { quadrant } => json!({
            "name": "escaped",
            "quadrant": quadrant.roman(),
        }),
        TraceStop::Capped => json!({ "name": "capped" }),
    };
    let mut doc = base_summary(resolved);
    doc["rho0"] = json!(rho0);
    doc["family"] = json!(family_name(trace.family));
    doc["revolutions"] = json!(trace.revolutions);
    doc["lifetime_bound"] = json!(trace.lifetime_bound);
    doc["stop"] = stop;
    doc["crossings"] = json!(trace.crossings);
    doc["segments"] = json!(trace.segments.len());
    doc
}

/// Bisection probe list in execution order.
pub(crate) fn threshold_csv(result: &ThresholdResult, tol: f64, resolved: &Resolved) -> String {
    let mut s = meta_header("threshold probes", resolved);
    let _ = writeln!(
        s,
        "# nu_star = {}, bracket = [{}, {}], tol = {}",
        sci(result.nu_star),
        sci(result.bracket.0),
        sci(result.bracket.1),
        sci(tol)
    );
    let _ = writeln!(s, "nu,broke,theta_end");
    for p in &result.trace {
        let _ = writeln!(s, "{},{},{}", sci(p.nu), p.broke, sci(p.theta_end));
    }
    s
}

pub(crate) fn threshold_summary(result: &ThresholdResult, tol: f64, resolved: &Resolved) -> Value {
    let probes: Vec<Value> = result
        .trace
        .iter()
        .map(|p| {
            json!({
                "nu": p.nu,
                "broke": p.broke,
                "theta_end": p.theta_end,
            })
        })
        .collect();
    let mut doc = base_summary(resolved);
    doc["nu_star"] = json!(result.nu_star);
    doc["bracket"] = json!([result.bracket.0, result.bracket.1]);
    doc["tol"] = json!(tol);
    doc["probes"] = json!(probes);
    doc
}
