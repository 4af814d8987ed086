//! Pure per-characteristic physics: algebraic closures, the characteristic
//! right-hand side, the energy functional, and the two-sided bounds on the
//! relativistic curvature factor.
//!
//! All quantities are dimensionless: momentum P, displacement R (numerically
//! identical to the electric field E on the trajectory), and the spatial
//! derivatives Q = dP/drho and D = dE/drho carried along one characteristic.
//! The electron density on the trajectory is N = 1 - D.

use thiserror::Error;

/// Rejected input to a pure state evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    /// An argument was NaN or infinite; blow-up must be caught by solver
    /// monitors, never by silent NaN propagation.
    #[error("non-finite input {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    /// A physical parameter violated its admissible range.
    #[error("parameter {name} = {value} outside {requirement}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

fn require_finite(name: &'static str, value: f64) -> Result<f64, DomainError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DomainError::NonFinite { name, value })
    }
}

/// State of one Lagrangian particle carried along its characteristic.
///
/// `rho_l` is the particle's equilibrium (Lagrangian) coordinate; its
/// Eulerian position at any time is `rho_l + r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    /// Lagrangian coordinate: equilibrium position where the particle
    /// contributes no field.
    pub rho_l: f64,
    /// Momentum P.
    pub p: f64,
    /// Displacement R, equal to the electric field E on the trajectory.
    pub r: f64,
    /// Momentum gradient Q = dP/drho.
    pub q: f64,
    /// Field gradient D = dE/drho.
    pub d: f64,
}

impl ParticleState {
    /// Eulerian position rho = rho_l + R.
    #[inline]
    pub fn position(&self) -> f64 {
        self.rho_l + self.r
    }

    /// Electron density N = 1 - D on the trajectory; positive while the
    /// solution is classical.
    #[inline]
    pub fn density(&self) -> f64 {
        1.0 - self.d
    }

    /// The dynamic components [P, R, Q, D] advanced by the integrator
    /// (`rho_l` is a constant label).
    #[inline]
    pub fn dynamic(&self) -> [f64; 4] {
        [self.p, self.r, self.q, self.d]
    }

    /// Writes integrator output back into the state.
    #[inline]
    pub fn set_dynamic(&mut self, s: [f64; 4]) {
        self.p = s[0];
        self.r = s[1];
        self.q = s[2];
        self.d = s[3];
    }
}

/// Per-characteristic bounds on the curvature factor K, derived from the
/// initial energy.
///
/// Along a characteristic the energy functional never increases, so
/// `2 sqrt(1+P^2) <= cal_e0` for all later times, which bounds
/// K = (1+P^2)^(-3/2) from below by `8 / cal_e0^3`. The upper bound is the
/// global `K <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBound {
    /// Initial energy 2 sqrt(1+P0^2) + E0^2; at least 2, with equality only
    /// at the rest state.
    pub cal_e0: f64,
    /// Lower bound 8 / cal_e0^3 for K along the whole trajectory.
    pub k_minus: f64,
    /// Upper bound for K, identically 1.
    pub k_plus: f64,
}

/// Relativistic velocity V = P / sqrt(1+P^2); strictly increasing and
/// confined to (-1, 1).
pub fn lorentz_velocity(p: f64) -> Result<f64, DomainError> {
    require_finite("P", p)?;
    Ok(p / (1.0 + p * p).sqrt())
}

/// Curvature factor K = (1+P^2)^(-3/2) modulating the derivative dynamics;
/// lies in (0, 1].
pub fn kappa(p: f64) -> Result<f64, DomainError> {
    require_finite("P", p)?;
    Ok(kappa_raw(p))
}

/// `kappa` without the finiteness check, for integrator hot loops.
#[inline]
pub fn kappa_raw(p: f64) -> f64 {
    // (1+P^2)^(-3/2) via 1/(u*sqrt(u)): one sqrt, no powf.
    let u = 1.0 + p * p;
    1.0 / (u * u.sqrt())
}

/// Energy functional 2 sqrt(1+P^2) + E^2; conserved along collisionless
/// characteristics, non-increasing when collisions act.
pub fn energy_functional(p: f64, e: f64) -> Result<f64, DomainError> {
    require_finite("P", p)?;
    require_finite("E", e)?;
    Ok(2.0 * (1.0 + p * p).sqrt() + e * e)
}

/// Builds the per-characteristic [`EnergyBound`] from the initial momentum
/// and field.
pub fn kappa_lower_bound(p0: f64, e0: f64) -> Result<EnergyBound, DomainError> {
    let cal_e0 = energy_functional(p0, e0)?;
    Ok(EnergyBound {
        cal_e0,
        k_minus: 8.0 / (cal_e0 * cal_e0 * cal_e0),
        k_plus: 1.0,
    })
}

/// Right-hand side of the characteristic system for the dynamic components
/// `[P, R, Q, D]` at collision frequency `nu`:
///
/// ```text
/// dP/dtheta = -R - nu P
/// dR/dtheta = P / sqrt(1+P^2)
/// dQ/dtheta = -D - K(P) Q^2 - nu Q
/// dD/dtheta = (1 - D) K(P) Q
/// ```
///
/// Pure and infallible on finite inputs; the integrator checks stage
/// finiteness so that blow-up surfaces as an explicit step failure.
#[inline]
pub fn characteristic_rhs(s: &[f64; 4], nu: f64) -> [f64; 4] {
    let [p, r, q, d] = *s;
    let gamma = (1.0 + p * p).sqrt();
    let k = kappa_raw(p);
    [
        -r - nu * p,
        p / gamma,
        -d - k * q * q - nu * q,
        (1.0 - d) * k * q,
    ]
}

/// Checked wrapper around [`characteristic_rhs`] validating state finiteness
/// and `nu >= 0`.
pub fn characteristic_rhs_checked(s: &[f64; 4], nu: f64) -> Result<[f64; 4], DomainError> {
    require_finite("P", s[0])?;
    require_finite("R", s[1])?;
    require_finite("Q", s[2])?;
    require_finite("D", s[3])?;
    require_finite("nu", nu)?;
    if nu < 0.0 {
        return Err(DomainError::OutOfRange {
            name: "nu",
            value: nu,
            requirement: "nu >= 0",
        });
    }
    Ok(characteristic_rhs(s, nu))
}
