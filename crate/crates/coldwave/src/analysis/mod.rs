//! Phase-plane analysis of single characteristics.
//!
//! Along each characteristic the derivative pair (Q, D) obeys a planar
//! non-autonomous system whose only time dependence enters through the
//! curvature factor K(theta) in [K-, 1]. Everything in this module exploits
//! that confinement: closed-form solutions at frozen K yield sufficient
//! smoothness and blow-up predicates for the first revolution
//! ([`frozen`]), quadrant-switched comparison curves bound the number of
//! completed revolutions from below ([`limiter`]), and a linear
//! second-order companion equation detects blow-up along fully simulated
//! characteristics without integrating the singular variables themselves
//! ([`hill`]).

pub mod frozen;
pub mod hill;
pub mod limiter;

pub use frozen::{
    constant_k_solution, first_revolution_verdict, psi_envelopes, revolution_inequality, t_minus,
    ConstantKState, TurnTimePrefactor, Verdict,
};
pub use hill::hill_blowup_detector;
pub use limiter::{
    guaranteed_revolutions, limiter_trace, phase_point_at, quadrant_of, sigma, sigma_bounds,
    GuaranteedLifetime, LimiterFamily, LimiterSegment, LimiterTrace, Quadrant, TraceStop,
};

use thiserror::Error;

use crate::dynamics::{kappa_lower_bound, DomainError, EnergyBound};
use crate::solver::{gaussian_field, gaussian_field_derivative};

/// Failures of the analytic predicates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("input {name} = {value} must be finite")]
    NonFinite { name: &'static str, value: f64 },
    #[error("beta = 0: the (u0, lambda0) chart is undefined; use the dedicated beta = 0 branch")]
    BetaZero,
    #[error("predicate not applicable: requires {requirement}")]
    NotApplicable { requirement: &'static str },
    #[error("degenerate oscillation: nu = {nu} is not below 2 sqrt(K) for K = {k}")]
    DegenerateFrequency { nu: f64, k: f64 },
    #[error("frozen-K characteristic blows up exactly at theta = {theta}")]
    FrozenBlowup { theta: f64 },
    #[error("limiter trace cannot start from (D, Q) = ({d}, {q})")]
    InvalidStart { d: f64, q: f64 },
    #[error("limiter family does not support collisions: nu = {nu} must be 0")]
    UnsupportedNu { nu: f64 },
    #[error("curvature sample {index} = {value} is not positive and finite")]
    BadKappaSample { index: usize, value: f64 },
    #[error("horizon {horizon} exceeds the sampled curvature range ending at {end}")]
    HorizonBeyondSamples { horizon: f64, end: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Initial derivative data of one characteristic in phase-plane coordinates.
///
/// `alpha` is the initial field gradient D0 and `beta` the initial momentum
/// gradient Q0. When `beta != 0` the characteristic admits the projective
/// chart (u0, lambda0) = (alpha/beta, (1-alpha)/beta) used by the
/// closed-form machinery; `beta = 0` data is handled by dedicated branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// Initial field gradient D0.
    pub alpha: f64,
    /// Initial momentum gradient Q0.
    pub beta: f64,
    /// alpha/beta, present when beta != 0.
    pub u0: Option<f64>,
    /// (1 - alpha)/beta, present when beta != 0.
    pub lambda0: Option<f64>,
    /// Curvature confinement K(theta) in [k_minus, k_plus] for the
    /// characteristic this data came from.
    pub bound: EnergyBound,
}

impl PhasePoint {
    /// Builds a phase point, populating the projective chart when defined.
    pub fn new(alpha: f64, beta: f64, bound: EnergyBound) -> Result<Self, AnalysisError> {
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if !value.is_finite() {
                return Err(AnalysisError::NonFinite { name, value });
            }
        }
        let (u0, lambda0) = if beta != 0.0 {
            (Some(alpha / beta), Some((1.0 - alpha) / beta))
        } else {
            (None, None)
        };
        Ok(Self {
            alpha,
            beta,
            u0,
            lambda0,
            bound,
        })
    }

    /// Phase data of the characteristic starting at rest at `rho0` under the
    /// Gaussian-envelope field: alpha is the field gradient there, beta = 0,
    /// and the curvature bound comes from the local field value.
    pub fn from_gaussian(a_star: f64, rho_star: f64, rho0: f64) -> Result<Self, AnalysisError> {
        let e0 = gaussian_field(a_star, rho_star, rho0);
        let alpha = gaussian_field_derivative(a_star, rho_star, rho0);
        let bound = kappa_lower_bound(0.0, e0)?;
        Self::new(alpha, 0.0, bound)
    }

    /// The chart pair (u0, lambda0), or an error for beta = 0 data.
    pub fn chart(&self) -> Result<(f64, f64), AnalysisError> {
        match (self.u0, self.lambda0) {
            (Some(u0), Some(l0)) => Ok((u0, l0)),
            _ => Err(AnalysisError::BetaZero),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chart_defined_only_off_the_axis() {
        let bound = kappa_lower_bound(0.0, 0.5).unwrap();
        let p = PhasePoint::new(0.3, -0.5, bound).unwrap();
        let (u0, l0) = p.chart().unwrap();
        assert_relative_eq!(u0, -0.6);
        assert_relative_eq!(l0, -1.4);

        let axis = PhasePoint::new(0.3, 0.0, bound).unwrap();
        assert_eq!(axis.u0, None);
        assert!(matches!(axis.chart(), Err(AnalysisError::BetaZero)));
    }

    #[test]
    fn gaussian_phase_point_at_reference_radius() {
        // At rho0 = 1 the reference field is 0.43133 with gradient 0.34615,
        // giving rest energy 2.18605 and curvature floor 0.76580.
        let p = PhasePoint::from_gaussian(3.105, 4.5, 1.0).unwrap();
        assert_eq!(p.beta, 0.0);
        assert_relative_eq!(p.alpha, 0.34615, max_relative = 1e-4);
        assert_relative_eq!(p.bound.cal_e0, 2.18605, max_relative = 1e-5);
        assert_relative_eq!(p.bound.k_minus, 0.76580, max_relative = 1e-4);
        assert_eq!(p.bound.k_plus, 1.0);
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let bound = kappa_lower_bound(0.0, 0.0).unwrap();
        assert!(matches!(
            PhasePoint::new(f64::NAN, 0.0, bound),
            Err(AnalysisError::NonFinite { name: "alpha", .. })
        ));
        assert!(matches!(
            PhasePoint::new(0.0, f64::INFINITY, bound),
            Err(AnalysisError::NonFinite { name: "beta", .. })
        ));
    }
}
