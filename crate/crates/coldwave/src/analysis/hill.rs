//! Blow-up detection through the companion linear oscillator.
//!
//! Along one characteristic the derivative pair (Q, D) obeys a Riccati
//! system driven by the curvature K(theta). The substitution
//! Q = z / W, D = -z' / W with W(theta) = lambda0 e^{nu theta} - z'
//! linearizes it exactly: z solves the damped Hill equation
//! z'' - nu z' + K(theta) z = 0 with z(0) = 1, z'(0) = -u0, where
//! u0 = alpha / beta and lambda0 = (1 - alpha) / beta come from the
//! initial derivatives. Gradient blow-up of the characteristic happens
//! exactly where W vanishes, i.e. where z' catches the reference curve
//! lambda0 e^{nu theta}; the oscillating curvature feeds z' through
//! parametric resonance, which is what makes the catch possible even
//! when collisions damp the motion.
//!
//! The detector integrates the companion equation along a recorded
//! curvature history and locates the first sign change of
//! g = z' - lambda0 e^{nu s} by cubic dense output and bisection.

use crate::analysis::{AnalysisError, PhasePoint};
use crate::integrate::{SchemeKind, StepScheme};
use crate::solver::KappaSeries;

/// Width in theta to which the catch point is bisected.
const EVENT_TOL: f64 = 1e-6;

/// First blow-up time predicted by the companion oscillator along a
/// recorded curvature history, or `None` if z' never catches the
/// reference curve before `horizon`.
///
/// `kappa` must hold finite positive samples and cover the horizon;
/// the phase point must be off the D-axis (beta != 0, otherwise the
/// chart (u0, lambda0) is undefined and [`AnalysisError::BetaZero`] is
/// returned). The returned time is absolute, on the same axis as
/// `kappa.theta0`.
pub fn hill_blowup_detector(
    kappa: &KappaSeries,
    p: &PhasePoint,
    nu: f64,
    horizon: f64,
) -> Result<Option<f64>, AnalysisError> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(AnalysisError::NonFinite { name: "nu", value: nu });
    }
    if !horizon.is_finite() {
        return Err(AnalysisError::NonFinite {
            name: "horizon",
            value: horizon,
        });
    }
    if kappa.values.is_empty() {
        return Err(AnalysisError::BadKappaSample {
            index: 0,
            value: f64::NAN,
        });
    }
    for (index, &value) in kappa.values.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(AnalysisError::BadKappaSample { index, value });
        }
    }
    let end = kappa.theta_end();
    if horizon > end + 0.5 * kappa.tau {
        return Err(AnalysisError::HorizonBeyondSamples { horizon, end });
    }
    let (u0, lambda0) = p.chart()?;

    let tau = kappa.tau;
    let scheme = StepScheme::new(SchemeKind::Rk4, tau).map_err(|_| AnalysisError::NonFinite {
        name: "kappa.tau",
        value: tau,
    })?;
    let theta0 = kappa.theta0;
    // Companion state (z, z'); curvature looked up at absolute time.
    let rhs = |s: f64, y: &[f64; 2]| [y[1], nu * y[1] - kappa.value_at(theta0 + s) * y[0]];

    let span = horizon - theta0;
    let mut s = 0.0f64;
    let mut state = [1.0, -u0];
    let mut g_prev = state[1] - lambda0;
    if g_prev == 0.0 {
        return Ok(Some(theta0));
    }
    while s < span {
        let next = crate::integrate::step(&scheme, rhs, s, &state).map_err(|_| {
            AnalysisError::NonFinite {
                name: "companion state",
                value: f64::NAN,
            }
        })?;
        let s_next = s + tau;
        let g_next = next[1] - lambda0 * (nu * s_next).exp();
        if !g_next.is_finite() {
            return Err(AnalysisError::NonFinite {
                name: "companion gradient",
                value: g_next,
            });
        }
        if g_next == 0.0 {
            return Ok(Some(theta0 + s_next));
        }
        if (g_next > 0.0) != (g_prev > 0.0) {
            let s_star = bisect_catch(kappa, nu, lambda0, s, &state, &next, g_prev > 0.0);
            return Ok(Some(theta0 + s_star));
        }
        state = next;
        s = s_next;
        g_prev = g_next;
    }
    Ok(None)
}

/// Bisects the catch point inside one step using cubic Hermite dense
/// output for z' (endpoint slopes from the differential equation).
fn bisect_catch(
    kappa: &KappaSeries,
    nu: f64,
    lambda0: f64,
    s0: f64,
    left: &[f64; 2],
    right: &[f64; 2],
    left_positive: bool,
) -> f64 {
    let tau = kappa.tau;
    let ddz0 = nu * left[1] - kappa.value_at(kappa.theta0 + s0) * left[0];
    let ddz1 = nu * right[1] - kappa.value_at(kappa.theta0 + s0 + tau) * right[0];
    let g_at = |u: f64| {
        let t = u / tau;
        let h00 = (2.0 * t - 3.0) * t * t + 1.0;
        let h10 = ((t - 2.0) * t + 1.0) * t;
        let h01 = (3.0 - 2.0 * t) * t * t;
        let h11 = (t - 1.0) * t * t;
        let dz = h00 * left[1] + h10 * tau * ddz0 + h01 * right[1] + h11 * tau * ddz1;
        dz - lambda0 * (nu * (s0 + u)).exp()
    };
    let (mut lo, mut hi) = (0.0f64, tau);
    while hi - lo > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        if (g_at(mid) > 0.0) == left_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    s0 + 0.5 * (lo + hi)
}
