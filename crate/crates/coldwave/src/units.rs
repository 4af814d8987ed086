//! Conversions between physical plasma parameters and model units.
//!
//! The model measures time in inverse plasma frequencies 1/omega_p,
//! length in inverse plasma wavenumbers 1/k_p = c/omega_p, and the
//! collision frequency nu in units of omega_p. This module computes
//! those scales from CGS laboratory parameters and evaluates the
//! dimensionless electron-ion collision frequency
//! nu = Z (sqrt(8)/3) eta^{3/2} ln(Lambda) from the plasma coupling
//! eta = e^2 N0e^{1/3} / Te, the ratio of the electron interaction
//! energy at the mean inter-particle distance to the thermal energy.

use thiserror::Error;

/// Squared elementary charge e^2 = alpha hbar c in eV cm, the
/// interaction energy of two electrons at 1 cm (CODATA 2018 values of
/// the fine-structure constant and hbar c).
pub const E2_EV_CM: f64 = 1.439_964_5e-7;
/// Elementary charge in statcoulombs (CGS-Gaussian).
pub const ELECTRON_CHARGE_ESU: f64 = 4.803_204_25e-10;
/// Electron mass in grams (CODATA 2018).
pub const ELECTRON_MASS_G: f64 = 9.109_383_701_5e-28;
/// Speed of light in cm/s (exact).
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;

/// Invalid physical parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitsError {
    /// A parameter that must be strictly positive is not.
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<f64, UnitsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(UnitsError::NonPositive { name, value })
    }
}

/// Physical parameters of a fully ionized plasma in CGS-eV units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaParams {
    /// Ion charge number Z.
    pub z: f64,
    /// Electron density N0e in cm^-3 entering the coupling.
    pub n0e: f64,
    /// Electron temperature Te in eV.
    pub te: f64,
    /// Coulomb logarithm ln(Lambda); an explicit input, see
    /// [`coulomb_log_estimate`] for a standard fit.
    pub ln_lambda: f64,
    /// Unperturbed electron density n0 in cm^-3 setting the scales.
    pub n0: f64,
}

impl PlasmaParams {
    /// Checks that every parameter is finite and strictly positive.
    pub fn validate(&self) -> Result<(), UnitsError> {
        positive("Z", self.z)?;
        positive("N0e", self.n0e)?;
        positive("Te", self.te)?;
        positive("lnLambda", self.ln_lambda)?;
        positive("n0", self.n0)?;
        Ok(())
    }
}

/// Plasma coupling eta = e^2 N0e^{1/3} / Te: interaction energy at the
/// mean inter-particle distance over thermal energy. Dimensionless;
/// much smaller than one in the ideal-plasma regime assumed here.
pub fn eta(params: &PlasmaParams) -> Result<f64, UnitsError> {
    params.validate()?;
    Ok(E2_EV_CM * params.n0e.cbrt() / params.te)
}

/// Dimensionless electron-ion collision frequency
/// nu = Z (sqrt(8)/3) eta^{3/2} ln(Lambda), in units of omega_p.
pub fn collision_frequency(params: &PlasmaParams) -> Result<f64, UnitsError> {
    let h = eta(params)?;
    Ok(params.z * (8.0f64.sqrt() / 3.0) * h * h.sqrt() * params.ln_lambda)
}

/// Standard electron-ion Coulomb-log fit 24 - ln(sqrt(N0e)/Te) for
/// temperatures above ~10 eV (density in cm^-3, temperature in eV).
pub fn coulomb_log_estimate(n0e: f64, te: f64) -> Result<f64, UnitsError> {
    positive("N0e", n0e)?;
    positive("Te", te)?;
    Ok(24.0 - (n0e.sqrt() / te).ln())
}

/// Plasma frequency omega_p = sqrt(4 pi e^2 n0 / m) in s^-1 and
/// wavenumber k_p = omega_p / c in cm^-1 for a density in cm^-3.
/// Dimensionless time is omega_p t and dimensionless length is k_p x.
pub fn dimensionless_scales(n0: f64) -> Result<(f64, f64), UnitsError> {
    positive("n0", n0)?;
    let e2 = ELECTRON_CHARGE_ESU * ELECTRON_CHARGE_ESU;
    let omega_p = (4.0 * std::f64::consts::PI * e2 * n0 / ELECTRON_MASS_G).sqrt();
    Ok((omega_p, omega_p / SPEED_OF_LIGHT_CM_S))
}
