//! Configuration resolution: defaults, preset, file, flags, in rising
//! precedence.
//!
//! A run is described by one compiled-in preset or the built-in reference
//! scenario, optionally overridden first by a flat TOML file and then by
//! command-line flags. Fields that nothing set explicitly are tracked so
//! the emitted summary can record which values were defaulted.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use coldwave::integrate::{SchemeKind, StepScheme};
use coldwave::presets::{PresetAction, ScenarioPreset};
use coldwave::solver::{InitialData, Monitors, RunConfig};

use crate::CliError;

/// Scenario selection and scalar overrides shared by the run-focused
/// subcommands.
#[derive(Args, Clone, Debug, Default)]
pub(crate) struct SourceArgs {
    /// Built-in scenario: fig2_nu0, fig3_nu02, fig4_nu05, fig5_snapshot,
    /// revolution_bound, or threshold_search.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// TOML configuration file with flat key = value pairs; may name a
    /// preset to start from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Field amplitude a* of the Gaussian initial data.
    #[arg(long)]
    pub a_star: Option<f64>,
    /// Field width rho* of the Gaussian initial data.
    #[arg(long)]
    pub rho_star: Option<f64>,
    /// Number of grid cells M (M + 1 characteristics).
    #[arg(long)]
    pub m: Option<usize>,
    /// Domain half-width d.
    #[arg(long)]
    pub d: Option<f64>,
    /// Collision frequency nu.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Integrator step tau.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Run horizon.
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Diagnostics cadence, in steps.
    #[arg(long)]
    pub output_every: Option<usize>,
}

/// Flat file form of [`SourceArgs`]; unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<String>,
    a_star: Option<f64>,
    rho_star: Option<f64>,
    m: Option<usize>,
    d: Option<f64>,
    nu: Option<f64>,
    tau: Option<f64>,
    theta_max: Option<f64>,
    output_every: Option<usize>,
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub config: RunConfig,
    /// The chosen preset's action, when a preset was chosen.
    pub action: Option<PresetAction>,
    /// Stem of the emitted file names: preset name, config-file stem, or
    /// "custom".
    pub label: String,
    /// Name of the chosen preset, if any.
    pub preset: Option<String>,
    /// Scalar fields that fell back to built-in defaults.
    pub defaults_applied: Vec<&'static str>,
}

impl Resolved {
    /// The preset's snapshot time, when its action is a snapshot.
    pub fn snapshot_theta(&self) -> Option<f64> {
        match self.action {
            Some(PresetAction::Snapshot { theta }) => Some(theta),
            _ => None,
        }
    }

    /// The preset's map resolution, when its action is a revolution map.
    pub fn map_samples(&self) -> Option<usize> {
        match self.action {
            Some(PresetAction::RevolutionMap { samples }) => Some(samples),
            _ => None,
        }
    }

    /// The preset's bisection bracket (nu_lo, nu_hi, tol), when its action
    /// is a threshold search.
    pub fn threshold_bracket(&self) -> Option<(f64, f64, f64)> {
        match self.action {
            Some(PresetAction::ThresholdSearch { nu_lo, nu_hi, tol }) => Some((nu_lo, nu_hi, tol)),
            _ => None,
        }
    }
}

/// Reference scenario used when no preset is named: the collisionless
/// Gaussian run on the standard grid.
fn default_config() -> RunConfig {
    RunConfig {
        initial_data: InitialData::Gaussian {
            a_star: 3.105,
            rho_star: 4.5,
        },
        m: 4050,
        d: 20.25,
        nu: 0.0,
        scheme: StepScheme::new(SchemeKind::Rk4, 0.01).expect("valid default step"),
        theta_max: 40.0,
        monitors: Monitors::default(),
        output_every: 10,
    }
}

const SCALAR_FIELDS: [&str; 8] = [
    "a_star",
    "rho_star",
    "m",
    "d",
    "nu",
    "tau",
    "theta_max",
    "output_every",
];

pub(crate) fn resolve(src: &SourceArgs) -> Result<Resolved, CliError> {
    let file: Option<FileConfig> = match &src.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
            Some(
                toml::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let f = file.as_ref();
    let preset_name = src
        .preset
        .clone()
        .or_else(|| f.and_then(|v| v.preset.clone()));
    let preset = match &preset_name {
        Some(name) => Some(ScenarioPreset::by_name(name).ok_or_else(|| {
            CliError::Validation(format!(
                "unknown preset {name}; available: {}",
                ScenarioPreset::names().join(", ")
            ))
        })?),
        None => None,
    };

    let mut config = match &preset {
        Some(p) => p.config.clone(),
        None => default_config(),
    };
    let mut set: Vec<&'static str> = Vec::new();

    let a_star_over = src.a_star.or_else(|| f.and_then(|v| v.a_star));
    let rho_star_over = src.rho_star.or_else(|| f.and_then(|v| v.rho_star));
    if a_star_over.is_some() || rho_star_over.is_some() {
        match &mut config.initial_data {
            InitialData::Gaussian { a_star, rho_star } => {
                if let Some(v) = a_star_over {
                    *a_star = v;
                    set.push("a_star");
                }
                if let Some(v) = rho_star_over {
                    *rho_star = v;
                    set.push("rho_star");
                }
            }
            InitialData::Tabulated { .. } => {
                return Err(CliError::Validation(
                    "a_star/rho_star overrides apply only to Gaussian initial data".into(),
                ))
            }
        }
    }
    if let Some(v) = src.m.or_else(|| f.and_then(|c| c.m)) {
        config.m = v;
        set.push("m");
    }
    if let Some(v) = src.d.or_else(|| f.and_then(|c| c.d)) {
        config.d = v;
        set.push("d");
    }
    match src.nu.or_else(|| f.and_then(|c| c.nu)) {
        Some(v) => {
            config.nu = v;
            set.push("nu");
        }
        None if preset.is_none() => {
            log::info!("collision frequency nu not specified; using 0");
        }
        None => {}
    }
    if let Some(v) = src.tau.or_else(|| f.and_then(|c| c.tau)) {
        config.scheme = StepScheme::new(config.scheme.kind, v)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        set.push("tau");
    }
    if let Some(v) = src.theta_max.or_else(|| f.and_then(|c| c.theta_max)) {
        config.theta_max = v;
        set.push("theta_max");
    }
    if let Some(v) = src.output_every.or_else(|| f.and_then(|c| c.output_every)) {
        config.output_every = v;
        set.push("output_every");
    }

    config
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    // Preset values are explicit choices; only the built-in reference
    // scenario counts as a default.
    let defaults_applied: Vec<&'static str> = if preset.is_some() {
        Vec::new()
    } else {
        SCALAR_FIELDS
            .into_iter()
            .filter(|name| !set.contains(name))
            .collect()
    };

    let label = preset_name.clone().unwrap_or_else(|| {
        src.config
            .as_ref()
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into())
    });

    Ok(Resolved {
        config,
        action: preset.map(|p| p.action),
        label,
        preset: preset_name,
        defaults_applied,
    })
}
