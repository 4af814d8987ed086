//! Fixed-step explicit time integrators with order verification.
//!
//! Breaking detection in the solver relies on synchronous ensemble snapshots,
//! so only fixed-step schemes are provided: forward Euler and the classical
//! fourth-order Runge-Kutta method. Every stage is checked for finiteness and
//! a failure is reported with the offending stage, letting the caller treat
//! it as a breaking candidate instead of propagating NaNs.

use thiserror::Error;

/// Integration step failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    /// A stage derivative or the step result was NaN or infinite.
    #[error("non-finite value in stage {stage} at theta = {theta}")]
    NonFiniteStage { stage: usize, theta: f64 },
    /// Rejected scheme parameters.
    #[error("invalid step size tau = {tau}: must be finite and positive")]
    InvalidTau { tau: f64 },
}

/// Which explicit scheme advances the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// One forward difference per step; first order.
    Euler,
    /// Classical four-stage Runge-Kutta tableau; fourth order.
    Rk4,
}

/// A scheme paired with its fixed step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScheme {
    pub kind: SchemeKind,
    /// Time step tau > 0.
    pub tau: f64,
}

impl StepScheme {
    /// Validates `tau > 0` and finite.
    pub fn new(kind: SchemeKind, tau: f64) -> Result<Self, StepError> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(StepError::InvalidTau { tau });
        }
        Ok(Self { kind, tau })
    }

    /// Same scheme with the step halved (for refinement studies).
    pub fn halved(&self) -> Self {
        Self {
            kind: self.kind,
            tau: self.tau / 2.0,
        }
    }
}

/// Result of a convergence-order measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasuredOrder {
    /// Errors vanished at every step size (e.g. an identically-zero rhs);
    /// no finite exponent applies.
    Exact,
    /// Observed log2 error ratio between the tau and tau/2 runs.
    Measured(f64),
}

#[inline]
fn finite(s: &[f64]) -> bool {
    s.iter().all(|x| x.is_finite())
}

/// Advances `s` by one step of `scheme` under the time-dependent derivative
/// `rhs(theta, state)`. Never mutates its input; identical inputs give
/// bit-identical outputs on every thread.
pub fn step<const N: usize>(
    scheme: &StepScheme,
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    theta: f64,
    s: &[f64; N],
) -> Result<[f64; N], StepError> {
    let tau = scheme.tau;
    let fail = |stage| StepError::NonFiniteStage { stage, theta };
    let mut out = *s;
    match scheme.kind {
        SchemeKind::Euler => {
            let k1 = rhs(theta, s);
            if !finite(&k1) {
                return Err(fail(1));
            }
            for i in 0..N {
                out[i] = s[i] + tau * k1[i];
            }
        }
        SchemeKind::Rk4 => {
            let k1 = rhs(theta, s);
            if !finite(&k1) {
                return Err(fail(1));
            }
            let mut mid = *s;
            for i in 0..N {
                mid[i] = s[i] + 0.5 * tau * k1[i];
            }
            let k2 = rhs(theta + 0.5 * tau, &mid);
            if !finite(&k2) {
                return Err(fail(2));
            }
            for i in 0..N {
                mid[i] = s[i] + 0.5 * tau * k2[i];
            }
            let k3 = rhs(theta + 0.5 * tau, &mid);
            if !finite(&k3) {
                return Err(fail(3));
            }
            for i in 0..N {
                mid[i] = s[i] + tau * k3[i];
            }
            let k4 = rhs(theta + tau, &mid);
            if !finite(&k4) {
                return Err(fail(4));
            }
            for i in 0..N {
                out[i] = s[i] + tau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    if !finite(&out) {
        return Err(fail(0));
    }
    Ok(out)
}

/// Integrates from `theta0` over `n` steps, returning the final state.
pub fn integrate_n<const N: usize>(
    scheme: &StepScheme,
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    theta0: f64,
    s0: &[f64; N],
    n: usize,
) -> Result<[f64; N], StepError> {
    let mut s = *s0;
    for i in 0..n {
        // theta recomputed from the index to avoid drift accumulation.
        let theta = theta0 + i as f64 * scheme.tau;
        s = step(scheme, &rhs, theta, &s)?;
    }
    Ok(s)
}

/// Richardson-style convergence exponent on a smooth problem: errors at tau
/// and tau/2 are measured against a tau/8 reference over the same horizon and
/// the log2 ratio is returned. Expect roughly 4 for [`SchemeKind::Rk4`] and 1
/// for [`SchemeKind::Euler`].
pub fn measured_order<const N: usize>(
    scheme: &StepScheme,
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    s0: &[f64; N],
    horizon: f64,
) -> Result<MeasuredOrder, StepError> {
    let n = (horizon / scheme.tau).round().max(1.0) as usize;
    // Identical final time for all three runs: tau is re-derived from n.
    let tau = horizon / n as f64;
    let run = |refine: usize| -> Result<[f64; N], StepError> {
        let sch = StepScheme::new(scheme.kind, tau / refine as f64)?;
        integrate_n(&sch, &rhs, 0.0, s0, n * refine)
    };
    let coarse = run(1)?;
    let half = run(2)?;
    let reference = run(8)?;
    let err = |s: &[f64; N]| -> f64 {
        let mut m = 0.0f64;
        for i in 0..N {
            m = m.max((s[i] - reference[i]).abs());
        }
        m
    };
    let scale: f64 = reference.iter().fold(1.0, |a, x| a.max(x.abs()));
    let (e1, e2) = (err(&coarse), err(&half));
    if e1 <= 1e-14 * scale && e2 <= 1e-14 * scale {
        return Ok(MeasuredOrder::Exact);
    }
    Ok(MeasuredOrder::Measured((e1 / e2).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tau_must_be_positive() {
        assert!(StepScheme::new(SchemeKind::Rk4, 0.0).is_err());
        assert!(StepScheme::new(SchemeKind::Rk4, -0.1).is_err());
        assert!(StepScheme::new(SchemeKind::Rk4, f64::NAN).is_err());
        assert!(StepScheme::new(SchemeKind::Euler, 0.1).is_ok());
    }

    #[test]
    fn zero_rhs_is_identity() {
        let sch = StepScheme::new(SchemeKind::Rk4, 0.3).unwrap();
        let s = [1.0, -2.0, 0.5];
        let out = step(&sch, |_, _| [0.0; 3], 0.0, &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn rk4_matches_exponential_oracle() {
        // y' = -y, y(0) = 1, one step of tau = 0.1 against e^(-0.1).
        let sch = StepScheme::new(SchemeKind::Rk4, 0.1).unwrap();
        let out = step(&sch, |_, s: &[f64; 1]| [-s[0]], 0.0, &[1.0]).unwrap();
        assert!((out[0] - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_rotation_radius_drift_is_fifth_order() {
        // Harmonic pair (P' = -R, R' = P): the radius P^2 + R^2 is exact for
        // the flow; one RK4 step may drift it only at O(tau^5).
        let rhs = |_: f64, s: &[f64; 2]| [-s[1], s[0]];
        for &tau in &[0.1, 0.05] {
            let sch = StepScheme::new(SchemeKind::Rk4, tau).unwrap();
            let out = step(&sch, rhs, 0.0, &[1.0, 0.0]).unwrap();
            let drift = (out[0] * out[0] + out[1] * out[1] - 1.0).abs();
            assert!(drift < tau.powi(5), "tau={tau}: drift {drift}");
        }
    }

    #[test]
    fn non_finite_stage_is_reported_with_its_index() {
        let sch = StepScheme::new(SchemeKind::Rk4, 0.1).unwrap();
        // Derivative turns infinite away from the initial point, so stage 1
        // passes and a later stage trips.
        let rhs = |_: f64, s: &[f64; 1]| [if s[0] > 1.0 { f64::INFINITY } else { 1e3 }];
        let err = step(&sch, rhs, 0.0, &[0.0]).unwrap_err();
        match err {
            StepError::NonFiniteStage { stage, .. } => assert!(stage >= 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn step_never_mutates_input() {
        let sch = StepScheme::new(SchemeKind::Euler, 0.2).unwrap();
        let s = [3.0];
        let _ = step(&sch, |_, s: &[f64; 1]| [-s[0]], 0.0, &s).unwrap();
        assert_eq!(s, [3.0]);
    }

    #[test]
    fn measured_order_rk4_on_decay() {
        let sch = StepScheme::new(SchemeKind::Rk4, 0.25).unwrap();
        match measured_order(&sch, |_, s: &[f64; 1]| [-s[0]], &[1.0], 5.0).unwrap() {
            MeasuredOrder::Measured(p) => assert!((3.7..=4.3).contains(&p), "order {p}"),
            MeasuredOrder::Exact => panic!("expected a finite order"),
        }
    }

    #[test]
    fn measured_order_euler_on_decay() {
        let sch = StepScheme::new(SchemeKind::Euler, 0.25).unwrap();
        match measured_order(&sch, |_, s: &[f64; 1]| [-s[0]], &[1.0], 5.0).unwrap() {
            MeasuredOrder::Measured(p) => assert!((0.8..=1.2).contains(&p), "order {p}"),
            MeasuredOrder::Exact => panic!("expected a finite order"),
        }
    }

    #[test]
    fn measured_order_zero_rhs_is_exact() {
        let sch = StepScheme::new(SchemeKind::Rk4, 0.25).unwrap();
        let got = measured_order(&sch, |_, _: &[f64; 2]| [0.0; 2], &[1.0, 2.0], 5.0).unwrap();
        assert_eq!(got, MeasuredOrder::Exact);
    }

    #[test]
    fn time_dependent_rhs_uses_stage_times() {
        // y' = cos(theta), y(0) = 0 integrates to sin(theta); RK4 needs the
        // half-step stage times to get its fourth order here.
        let sch = StepScheme::new(SchemeKind::Rk4, 0.05).unwrap();
        let out = integrate_n(&sch, |t, _: &[f64; 1]| [t.cos()], 0.0, &[0.0], 40).unwrap();
        assert_relative_eq!(out[0], 2.0f64.sin(), max_relative = 1e-8);
    }
}
