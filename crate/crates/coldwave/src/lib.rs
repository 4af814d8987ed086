//! Relativistic cold-plasma oscillations with electron-ion collisions.
//!
//! This crate simulates plane one-dimensional oscillations of a cold
//! relativistic electron plasma over a fixed ion background and analyzes
//! when their gradients blow up ("breaking"). The fields are followed
//! along characteristics: each particle carries momentum P, displacement
//! R (equal to the electric field on the trajectory), and the spatial
//! derivatives Q = dP/drho, D = dE/drho, whose closed ODE system
//! determines smoothness. Collisions enter as a friction nu P and damp
//! the motion; depending on nu and the initial data the solution either
//! breaks in finite time or stabilizes to the trivial state.
//!
//! - [`dynamics`]: per-particle state, the characteristic equations, and
//!   the conserved-energy curvature bounds.
//! - [`integrate`]: explicit Euler and RK4 steppers with non-finite
//!   stage detection and an order-measurement harness.
//! - [`solver`]: the particle ensemble, breaking monitors, full runs
//!   with diagnostics, and the threshold-frequency bisection.
//! - [`sampling`]: cubic Hermite reconstruction of spatial profiles
//!   from scattered characteristics.
//! - [`analysis`]: phase-plane verdicts for the first revolution,
//!   quadrant-switched limiter curves with certified revolution counts,
//!   and the companion-oscillator blow-up detector.
//! - [`units`]: physical CGS-eV parameters to dimensionless scales.
//! - [`presets`]: named reference scenarios.
//!
//! ## Quick start
//!
//! ```
//! use coldwave::integrate::{SchemeKind, StepScheme};
//! use coldwave::solver::{run, InitialData, Monitors, RunConfig, RunVerdict};
//!
//! let config = RunConfig {
//!     initial_data: InitialData::Gaussian { a_star: 3.105, rho_star: 4.5 },
//!     m: 200,
//!     d: 20.25,
//!     nu: 0.0,
//!     scheme: StepScheme::new(SchemeKind::Rk4, 0.05)?,
//!     theta_max: 5.0,
//!     monitors: Monitors::default(),
//!     output_every: 10,
//! };
//! let report = run(&config)?;
//! assert_eq!(report.verdict, RunVerdict::SmoothUntilThetaMax);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod dynamics;
pub mod integrate;
pub mod presets;
pub mod sampling;
pub mod solver;
pub mod units;

// The guide in book/ doubles as a test suite: each chapter is attached
// here as documentation so `cargo test --doc` compiles and runs every
// code block. One module per chapter keeps failures attributable.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/model.md")]
pub mod book_model {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod book_simulation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/integrators.md")]
pub mod book_integrators {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sampling.md")]
pub mod book_sampling {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/phase-plane.md")]
pub mod book_phase_plane {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/limiters.md")]
pub mod book_limiters {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/blowup-detector.md")]
pub mod book_blowup_detector {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/units.md")]
pub mod book_units {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
