//! Named reference scenarios.
//!
//! Every preset starts from the same Gaussian field profile
//! E0(rho) = (a*/rho*)^2 rho exp(-2 rho^2 / rho*^2) with a* = 3.105,
//! rho* = 4.5 on the domain [-20.25, 20.25], discretized with 4051
//! characteristics and an RK4 step of 0.01; they differ in collision
//! frequency, horizon, and the action to perform. The collisionless
//! run breaks at theta ~ 29.5; the scaled frequencies nu = 0.2/29.5
//! and 0.5/29.5 sit just below and just above the breaking threshold.

use crate::integrate::{SchemeKind, StepScheme};
use crate::solver::{InitialData, Monitors, RunConfig};

/// What to do with a preset's configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetAction {
    /// Run to breaking or the horizon and emit the time series.
    Simulate,
    /// Run to `theta` and sample the spatial profiles there.
    Snapshot { theta: f64 },
    /// Map the guaranteed revolution count over this many uniformly
    /// spaced starting positions.
    RevolutionMap { samples: usize },
    /// Bisect the smoothing threshold frequency inside the bracket.
    ThresholdSearch { nu_lo: f64, nu_hi: f64, tol: f64 },
}

/// A named, ready-to-run scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub config: RunConfig,
    pub action: PresetAction,
}

/// Collisionless breaking time of the reference Gaussian data; the
/// scaled collision frequencies of the presets are quoted against it.
const THETA_WB: f64 = 29.5;

fn base_config(nu: f64, theta_max: f64) -> RunConfig {
    RunConfig {
        initial_data: InitialData::Gaussian {
            a_star: 3.105,
            rho_star: 4.5,
        },
        m: 4050,
        d: 20.25,
        nu,
        scheme: StepScheme::new(SchemeKind::Rk4, 0.01).expect("valid step"),
        theta_max,
        monitors: Monitors::default(),
        output_every: 10,
    }
}

impl ScenarioPreset {
    /// All preset names, in presentation order.
    pub fn names() -> &'static [&'static str] {
        &[
            "fig2_nu0",
            "fig3_nu02",
            "fig4_nu05",
            "fig5_snapshot",
            "revolution_bound",
            "threshold_search",
        ]
    }

    /// Looks a preset up by name.
    pub fn by_name(name: &str) -> Option<Self> {
        let preset = match name {
            // Collisionless run: breaks near theta = 29.5 after four
            // oscillations of the off-axis density maximum.
            "fig2_nu0" => ScenarioPreset {
                name: "fig2_nu0",
                config: base_config(0.0, 40.0),
                action: PresetAction::Simulate,
            },
            // Weak collisions, nu * 29.5 = 0.2: breaking is delayed to
            // theta ~ 36 but still happens.
            "fig3_nu02" => ScenarioPreset {
                name: "fig3_nu02",
                config: base_config(0.2 / THETA_WB, 150.0),
                action: PresetAction::Simulate,
            },
            // Stronger collisions, nu * 29.5 = 0.5: above threshold; the
            // off-axis maximum grows for a while, then decays to one.
            "fig4_nu05" => ScenarioPreset {
                name: "fig4_nu05",
                config: base_config(0.5 / THETA_WB, 300.0),
                action: PresetAction::Simulate,
            },
            // Spatial profiles of momentum and field just before the
            // collisionless breaking time.
            "fig5_snapshot" => ScenarioPreset {
                name: "fig5_snapshot",
                config: base_config(0.0, 29.4),
                action: PresetAction::Snapshot { theta: 29.4 },
            },
            // Certified-lifetime map over starting positions.
            "revolution_bound" => ScenarioPreset {
                name: "revolution_bound",
                config: base_config(0.0, 40.0),
                action: PresetAction::RevolutionMap { samples: 400 },
            },
            // Bisection bracket around the smoothing threshold: the lower
            // end still breaks (near theta = 75), the upper end stays
            // smooth to the horizon.
            "threshold_search" => ScenarioPreset {
                name: "threshold_search",
                config: base_config(0.0, 300.0),
                action: PresetAction::ThresholdSearch {
                    nu_lo: 0.422 / THETA_WB,
                    nu_hi: 0.5 / THETA_WB,
                    tol: 1e-4,
                },
            },
            _ => return None,
        };
        Some(preset)
    }
}
