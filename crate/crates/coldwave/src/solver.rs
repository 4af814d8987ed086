//! Ensemble ownership: initialization from Eulerian data, synchronized time
//! stepping, breaking detection, diagnostics series, and the collision
//! threshold search.
//!
//! The ensemble holds M+1 Lagrangian particles indexed k = 0..=M whose
//! initial Eulerian positions form the uniform grid rho_k(0) = k h - d with
//! h = 2d/M. Each particle is advanced independently along its
//! characteristic; the coupling between particles appears only through the
//! breaking monitors (trajectory-ordering check) and the diagnostics
//! reductions, which are computed sequentially in index order so that every
//! run is deterministic regardless of thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{characteristic_rhs, kappa_raw, ParticleState};
use crate::integrate::{step, StepError, StepScheme};

/// Configuration and initial-data validation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("field {name} = {value} must be finite and positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("collision frequency nu = {0} must be finite and non-negative")]
    NegativeNu(f64),
    #[error("particle count M = {0} too small: need M >= 3")]
    TooFewParticles(usize),
    #[error("tabulated initial data column {name} has {got} values, grid needs {want}")]
    TabulatedLength {
        name: &'static str,
        got: usize,
        want: usize,
    },
    #[error("non-finite tabulated initial data in column {name} at node {index}")]
    TabulatedNonFinite { name: &'static str, index: usize },
    #[error(
        "initial data is not classical at grid scale: Lagrangian coordinates \
         reverse between nodes {k} and {k1} (field gradient reaches 1)"
    )]
    InitialDataNotClassical { k: usize, k1: usize },
    #[error("output cadence must be at least 1 step")]
    ZeroCadence,
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Initial Eulerian profiles for the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// Odd Gaussian-envelope field E0(rho) = (a*/rho*)^2 rho exp(-2rho^2/rho*^2)
    /// with zero initial momentum; models the wake left by a short laser
    /// pulse of amplitude `a_star` and width `rho_star`.
    Gaussian { a_star: f64, rho_star: f64 },
    /// Explicit per-node profiles, each of length M+1: field `e0`, momentum
    /// `p0`, and their spatial derivatives `de0`, `dp0`.
    Tabulated {
        e0: Vec<f64>,
        p0: Vec<f64>,
        de0: Vec<f64>,
        dp0: Vec<f64>,
    },
}

/// Blow-up thresholds for the derivative monitors.
///
/// Density singularities (D -> 1, N -> 0 cells) surface as trajectory
/// crossings through the cell-width monitor, so only the negative-D side is
/// thresholded here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitors {
    /// Breaking is declared when any |Q_k| exceeds this.
    pub q_abs_max: f64,
    /// Breaking is declared when any D_k drops below this.
    pub d_min: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Self {
            q_abs_max: 1e6,
            d_min: -1e6,
        }
    }
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub initial_data: InitialData,
    /// Number of grid cells; the ensemble carries M+1 particles.
    pub m: usize,
    /// Domain half-width d: the initial grid spans [-d, d].
    pub d: f64,
    /// Collision frequency nu >= 0.
    pub nu: f64,
    pub scheme: StepScheme,
    /// Stop time when no breaking occurs.
    pub theta_max: f64,
    pub monitors: Monitors,
    /// Diagnostics are recorded every this many steps.
    pub output_every: usize,
}

impl RunConfig {
    /// Grid spacing h = 2d/M.
    pub fn grid_spacing(&self) -> f64 {
        2.0 * self.d / self.m as f64
    }

    /// Validates every scalar field; tabulated column lengths are checked
    /// against the grid at initialization.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [("d", self.d), ("theta_max", self.theta_max)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(ConfigError::NegativeNu(self.nu));
        }
        if self.m < 3 {
            return Err(ConfigError::TooFewParticles(self.m));
        }
        if self.output_every == 0 {
            return Err(ConfigError::ZeroCadence);
        }
        StepScheme::new(self.scheme.kind, self.scheme.tau)?;
        if let InitialData::Gaussian { a_star, rho_star } = self.initial_data {
            for (name, value) in [("a_star", a_star), ("rho_star", rho_star)] {
                if !(value.is_finite() && value > 0.0) {
                    return Err(ConfigError::NonPositive { name, value });
                }
            }
        }
        Ok(())
    }
}

/// Gaussian-envelope initial field E0(rho) = (a*/rho*)^2 rho exp(-2rho^2/rho*^2).
///
/// Odd in rho; its extrema sit at rho = +-rho*/2. With the reference
/// parameters a* = 3.105, rho* = 4.5 this is 0.4761 rho exp(-0.098765... rho^2).
pub fn gaussian_field(a_star: f64, rho_star: f64, rho: f64) -> f64 {
    let c = (a_star / rho_star) * (a_star / rho_star);
    c * rho * (-2.0 * rho * rho / (rho_star * rho_star)).exp()
}

/// Spatial derivative of [`gaussian_field`], used for the initial gradient D0.
pub fn gaussian_field_derivative(a_star: f64, rho_star: f64, rho: f64) -> f64 {
    let c = (a_star / rho_star) * (a_star / rho_star);
    let w = rho * rho / (rho_star * rho_star);
    c * (-2.0 * rho * rho / (rho_star * rho_star)).exp() * (1.0 - 4.0 * w)
}

/// The particle ensemble at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    /// Particles in grid order k = 0..=M.
    pub particles: Vec<ParticleState>,
    /// Current time.
    pub theta: f64,
    pub scheme: StepScheme,
    /// Domain half-width of the initial grid.
    pub d: f64,
    /// Initial grid spacing h = 2d/M.
    pub h: f64,
}

impl Ensemble {
    /// Number of grid cells M (particle count minus one).
    pub fn m(&self) -> usize {
        self.particles.len() - 1
    }

    /// Eulerian position of particle k at the current time.
    #[inline]
    pub fn position(&self, k: usize) -> f64 {
        self.particles[k].position()
    }

    /// Smallest current cell width h_k = rho_{k+1} - rho_k and the index
    /// where it occurs (first index on ties).
    pub fn min_cell_width(&self) -> (f64, usize) {
        let mut min_h = f64::INFINITY;
        let mut arg = 0;
        for k in 0..self.m() {
            let h = self.position(k + 1) - self.position(k);
            if h < min_h {
                min_h = h;
                arg = k;
            }
        }
        (min_h, arg)
    }
}

/// Why a run was declared broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakKind {
    /// Adjacent trajectories crossed: some cell width h_k reached zero.
    CellCollapse,
    /// A derivative monitor fired (|Q| or -D beyond threshold).
    DerivativeThreshold,
    /// An integrator stage went non-finite.
    NonFiniteStage,
}

/// Location and cause of a breaking event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakInfo {
    pub kind: BreakKind,
    /// Particle index: the left particle of the collapsed cell, or the
    /// particle whose derivative fired.
    pub particle: usize,
    /// Eulerian position: midpoint of the collapsed cell, or the firing
    /// particle's position.
    pub rho: f64,
}

/// Outcome of one monitor sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakStatus {
    /// Present when any breaking monitor fired.
    pub broke: Option<BreakInfo>,
    /// Whether the pointwise smoothness criterion Q^2 + 2D - 1 < 0 held at
    /// every particle (warning-level diagnostic only).
    pub smooth_criterion_everywhere: bool,
}

/// One step failed while advancing the ensemble.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("integration failed for particle {particle} ({source})")]
pub struct AdvanceFailure {
    pub particle: usize,
    pub source: StepError,
}

/// Builds the ensemble at theta = 0 from a validated configuration.
///
/// Grid: rho_k(0) = k h - d for k = 0..=M with h = 2d/M. Each particle's
/// Lagrangian label is rho_l = rho_k(0) - E0(rho_k(0)), so that the identity
/// rho = rho_l + R holds exactly at theta = 0.
pub fn initialize(config: &RunConfig) -> Result<Ensemble, ConfigError> {
    config.validate()?;
    let m = config.m;
    let h = config.grid_spacing();
    let n = m + 1;

    let (e0, p0, de0, dp0): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = match &config.initial_data {
        InitialData::Gaussian { a_star, rho_star } => {
            let mut e0 = Vec::with_capacity(n);
            let mut de0 = Vec::with_capacity(n);
            for k in 0..n {
                let rho = k as f64 * h - config.d;
                e0.push(gaussian_field(*a_star, *rho_star, rho));
                de0.push(gaussian_field_derivative(*a_star, *rho_star, rho));
            }
            (e0, vec![0.0; n], de0, vec![0.0; n])
        }
        InitialData::Tabulated { e0, p0, de0, dp0 } => {
            for (name, col) in [("e0", e0), ("p0", p0), ("de0", de0), ("dp0", dp0)] {
                if col.len() != n {
                    return Err(ConfigError::TabulatedLength {
                        name,
                        got: col.len(),
                        want: n,
                    });
                }
                if let Some(i) = col.iter().position(|x| !x.is_finite()) {
                    return Err(ConfigError::TabulatedNonFinite { name, index: i });
                }
            }
            (e0.clone(), p0.clone(), de0.clone(), dp0.clone())
        }
    };

    let mut particles = Vec::with_capacity(n);
    for k in 0..n {
        let rho = k as f64 * h - config.d;
        particles.push(ParticleState {
            rho_l: rho - e0[k],
            p: p0[k],
            r: e0[k],
            q: dp0[k],
            d: de0[k],
        });
    }

    // The Lagrangian labels must be strictly increasing, otherwise the data
    // already carries a density singularity at grid scale.
    for k in 0..m {
        if particles[k + 1].rho_l <= particles[k].rho_l {
            return Err(ConfigError::InitialDataNotClassical { k, k1: k + 1 });
        }
    }

    // The scheme imposes no boundary condition; warn when the data is not
    // numerically compactly supported inside [-d, d].
    let max_abs = e0
        .iter()
        .chain(p0.iter())
        .fold(0.0f64, |a, x| a.max(x.abs()));
    let edge = e0[0]
        .abs()
        .max(e0[n - 1].abs())
        .max(p0[0].abs())
        .max(p0[n - 1].abs());
    if max_abs > 0.0 && edge > 1e-10 * max_abs {
        log::warn!(
            "initial data reaches the domain boundary: |data(+-d)| = {:.3e} \
             vs peak {:.3e}; no boundary condition is imposed",
            edge,
            max_abs
        );
    }

    Ok(Ensemble {
        particles,
        theta: 0.0,
        scheme: config.scheme,
        d: config.d,
        h,
    })
}

/// Advances every particle by one step of the ensemble scheme.
///
/// Particles are mutually independent within a step and may be updated in
/// parallel; results are bit-identical for any thread count. On a step
/// failure the lowest failing particle index is reported and the ensemble
/// must be treated as a breaking candidate at the attempted time.
pub fn advance(e: &mut Ensemble, nu: f64) -> Result<(), AdvanceFailure> {
    let scheme = e.scheme;
    let theta = e.theta;
    let rhs = move |_t: f64, s: &[f64; 4]| characteristic_rhs(s, nu);
    let failures: Vec<(usize, StepError)> = e
        .particles
        .par_iter_mut()
        .enumerate()
        .with_min_len(64)
        .filter_map(|(k, ps)| match step(&scheme, rhs, theta, &ps.dynamic()) {
            Ok(s) => {
                ps.set_dynamic(s);
                None
            }
            Err(err) => Some((k, err)),
        })
        .collect();
    e.theta = theta + scheme.tau;
    if let Some((particle, source)) = failures.into_iter().min_by_key(|(k, _)| *k) {
        return Err(AdvanceFailure { particle, source });
    }
    Ok(())
}

/// Sweeps the breaking monitors over the current ensemble state.
///
/// Breaking fires on the first of: a collapsed cell (min_k h_k <= 0, reported
/// at the midpoint of the first such cell), or a derivative beyond its
/// threshold. Non-finite states are caught earlier by [`advance`].
pub fn detect_breaking(e: &Ensemble, monitors: &Monitors) -> BreakStatus {
    let mut smooth_criterion_everywhere = true;
    let mut collapse: Option<(usize, f64)> = None;
    let mut worst_q = (0.0f64, 0usize);
    let mut worst_d = (f64::INFINITY, 0usize);
    for (k, ps) in e.particles.iter().enumerate() {
        if ps.q * ps.q + 2.0 * ps.d - 1.0 >= 0.0 {
            smooth_criterion_everywhere = false;
        }
        if ps.q.abs() > worst_q.0 {
            worst_q = (ps.q.abs(), k);
        }
        if ps.d < worst_d.0 {
            worst_d = (ps.d, k);
        }
        if k < e.m() && collapse.is_none() {
            let (a, b) = (e.position(k), e.position(k + 1));
            if b - a <= 0.0 {
                collapse = Some((k, 0.5 * (a + b)));
            }
        }
    }
    let broke = if let Some((k, mid)) = collapse {
        Some(BreakInfo {
            kind: BreakKind::CellCollapse,
            particle: k,
            rho: mid,
        })
    } else if worst_q.0 > monitors.q_abs_max {
        Some(BreakInfo {
            kind: BreakKind::DerivativeThreshold,
            particle: worst_q.1,
            rho: e.position(worst_q.1),
        })
    } else if worst_d.0 < monitors.d_min {
        Some(BreakInfo {
            kind: BreakKind::DerivativeThreshold,
            particle: worst_d.1,
            rho: e.position(worst_d.1),
        })
    } else {
        None
    };
    BreakStatus {
        broke,
        smooth_criterion_everywhere,
    }
}

/// Verdict of a completed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunVerdict {
    /// A breaking monitor fired; carries time, place and cause.
    Broke {
        theta_break: f64,
        rho_break: f64,
        kind: BreakKind,
        particle: usize,
    },
    /// All monitors stayed quiet up to theta_max.
    SmoothUntilThetaMax,
}

impl RunVerdict {
    pub fn is_broke(&self) -> bool {
        matches!(self, RunVerdict::Broke { .. })
    }

    /// Stable lowercase name used in reports and file output.
    pub fn name(&self) -> &'static str {
        match self {
            RunVerdict::Broke { .. } => "broke",
            RunVerdict::SmoothUntilThetaMax => "smooth_until_theta_max",
        }
    }
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRecord {
    pub theta: f64,
    /// Exact maximum of N = 1 - D over all particles.
    pub n_max: f64,
    /// Density at the center particle (initial position rho = 0 for even M).
    pub n_origin: f64,
    /// Maximum |E| over particles.
    pub e_max: f64,
    /// Maximum |P| over particles.
    pub p_max: f64,
    /// Smallest cell width.
    pub min_h: f64,
    /// Maximum |Q| over particles.
    pub q_abs_max: f64,
}

/// Immutable summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub verdict: RunVerdict,
    pub series: Vec<SeriesRecord>,
    /// Completed field oscillations at the probe particle (sign-change
    /// cycles of E): one full revolution of its phase projection each.
    pub oscillation_count: u32,
    /// Probe particle index: first particle with the largest initial |E|.
    pub probe_index: usize,
    /// First time the pointwise criterion Q^2 + 2D - 1 < 0 failed somewhere,
    /// if it ever did (diagnostic only).
    pub first_smooth_criterion_violation: Option<f64>,
    /// The configuration that produced this report.
    pub config: RunConfig,
}

impl RunReport {
    pub fn theta_break(&self) -> Option<f64> {
        match self.verdict {
            RunVerdict::Broke { theta_break, .. } => Some(theta_break),
            RunVerdict::SmoothUntilThetaMax => None,
        }
    }

    pub fn rho_break(&self) -> Option<f64> {
        match self.verdict {
            RunVerdict::Broke { rho_break, .. } => Some(rho_break),
            RunVerdict::SmoothUntilThetaMax => None,
        }
    }
}

/// Runs a configuration to breaking or `theta_max`, recording diagnostics.
pub fn run(config: &RunConfig) -> Result<RunReport, ConfigError> {
    let mut e = initialize(config)?;
    let nu = config.nu;
    let tau = config.scheme.tau;
    let n_steps = (config.theta_max / tau).round() as usize;

    // Probe: first particle with the largest initial field magnitude.
    let probe_index = {
        let mut best = (0.0f64, 0usize);
        for (k, ps) in e.particles.iter().enumerate() {
            if ps.r.abs() > best.0 {
                best = (ps.r.abs(), k);
            }
        }
        best.1
    };
    let mut prev_sign = {
        let r = e.particles[probe_index].r;
        if r == 0.0 {
            1.0
        } else {
            r.signum()
        }
    };
    let mut sign_changes = 0u32;
    let mut series = Vec::new();
    let mut first_violation = None;
    let center = config.m / 2;

    let mut verdict = RunVerdict::SmoothUntilThetaMax;
    for n in 1..=n_steps {
        let theta = n as f64 * tau;
        if let Err(failure) = advance(&mut e, nu) {
            let ps = &e.particles[failure.particle];
            let rho = ps.position();
            verdict = RunVerdict::Broke {
                theta_break: theta,
                rho_break: if rho.is_finite() { rho } else { ps.rho_l },
                kind: BreakKind::NonFiniteStage,
                particle: failure.particle,
            };
            break;
        }

        let r = e.particles[probe_index].r;
        if r != 0.0 && r.signum() != prev_sign {
            sign_changes += 1;
            prev_sign = r.signum();
        }

        let status = detect_breaking(&e, &config.monitors);
        if !status.smooth_criterion_everywhere && first_violation.is_none() {
            first_violation = Some(theta);
        }
        if let Some(info) = status.broke {
            verdict = RunVerdict::Broke {
                theta_break: theta,
                rho_break: info.rho,
                kind: info.kind,
                particle: info.particle,
            };
            break;
        }

        if n % config.output_every == 0 {
            let mut n_max = f64::NEG_INFINITY;
            let mut e_max = 0.0f64;
            let mut p_max = 0.0f64;
            let mut q_abs_max = 0.0f64;
            for ps in &e.particles {
                n_max = n_max.max(ps.density());
                e_max = e_max.max(ps.r.abs());
                p_max = p_max.max(ps.p.abs());
                q_abs_max = q_abs_max.max(ps.q.abs());
            }
            series.push(SeriesRecord {
                theta,
                n_max,
                n_origin: e.particles[center].density(),
                e_max,
                p_max,
                min_h: e.min_cell_width().0,
                q_abs_max,
            });
        }
    }

    Ok(RunReport {
        verdict,
        series,
        oscillation_count: sign_changes / 2,
        probe_index,
        first_smooth_criterion_violation: first_violation,
        config: config.clone(),
    })
}

/// Threshold search failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("invalid bracket [{nu_lo}, {nu_hi}]: need nu_lo < nu_hi, both finite")]
    InvalidBracket { nu_lo: f64, nu_hi: f64 },
    #[error("tolerance {0} must be finite and positive")]
    InvalidTolerance(f64),
    #[error("lower bracket nu = {0} did not break before theta_max; no threshold inside")]
    LowerDoesNotBreak(f64),
    #[error("upper bracket nu = {0} broke before theta_max; no threshold inside")]
    UpperBreaks(f64),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// One bisection probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdProbe {
    pub nu: f64,
    pub broke: bool,
    /// Breaking time when broke, otherwise the run horizon.
    pub theta_end: f64,
}

/// Certified output of [`find_threshold_nu`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket.
    pub nu_star: f64,
    /// Final bracket: breaks at `bracket.0`, smooth at `bracket.1`.
    pub bracket: (f64, f64),
    /// All probe runs in execution order, bracket certificates first.
    pub trace: Vec<ThresholdProbe>,
}

/// Bisects on the collision frequency for the smallest nu whose run stays
/// smooth until `config.theta_max`, to absolute tolerance `tol` in nu.
///
/// The configuration's own `nu` is ignored; `nu_lo` must break and `nu_hi`
/// must not, and both certificate runs are performed and recorded.
pub fn find_threshold_nu(
    config: &RunConfig,
    nu_lo: f64,
    nu_hi: f64,
    tol: f64,
) -> Result<ThresholdResult, ThresholdError> {
    if !(nu_lo.is_finite() && nu_hi.is_finite() && nu_lo < nu_hi && nu_lo >= 0.0) {
        return Err(ThresholdError::InvalidBracket { nu_lo, nu_hi });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ThresholdError::InvalidTolerance(tol));
    }
    let probe = |nu: f64| -> Result<ThresholdProbe, ThresholdError> {
        let cfg = RunConfig {
            nu,
            ..config.clone()
        };
        let report = run(&cfg)?;
        Ok(ThresholdProbe {
            nu,
            broke: report.verdict.is_broke(),
            theta_end: report.theta_break().unwrap_or(config.theta_max),
        })
    };

    let mut trace = Vec::new();
    let lo_probe = probe(nu_lo)?;
    if !lo_probe.broke {
        return Err(ThresholdError::LowerDoesNotBreak(nu_lo));
    }
    trace.push(lo_probe);
    let hi_probe = probe(nu_hi)?;
    if hi_probe.broke {
        return Err(ThresholdError::UpperBreaks(nu_hi));
    }
    trace.push(hi_probe);

    let (mut lo, mut hi) = (nu_lo, nu_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid)?;
        trace.push(p);
        if p.broke {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        nu_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        trace,
    })
}

/// Time series of one characteristic, recorded every `record_every` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicTrace {
    /// (theta, [P, R, Q, D]) samples, starting at the initial state.
    pub samples: Vec<(f64, [f64; 4])>,
    /// Time of the first failed step, when integration blew up before the
    /// horizon.
    pub failed_at: Option<f64>,
}

/// Integrates a single characteristic from `s0` up to `theta_end`.
///
/// Stops early (recording `failed_at`) if a stage goes non-finite; no other
/// monitor is applied, so derivatives may grow without bound.
pub fn trace_characteristic(
    s0: &ParticleState,
    nu: f64,
    scheme: &StepScheme,
    theta_end: f64,
    record_every: usize,
) -> CharacteristicTrace {
    let every = record_every.max(1);
    let n_steps = (theta_end / scheme.tau).round() as usize;
    let mut s = s0.dynamic();
    let mut samples = vec![(0.0, s)];
    let mut failed_at = None;
    for n in 1..=n_steps {
        let theta = n as f64 * scheme.tau;
        match step(scheme, |_, s: &[f64; 4]| characteristic_rhs(s, nu), theta, &s) {
            Ok(next) => {
                s = next;
                if n % every == 0 {
                    samples.push((theta, s));
                }
            }
            Err(_) => {
                failed_at = Some(theta);
                break;
            }
        }
    }
    CharacteristicTrace { samples, failed_at }
}

/// Sampled curvature factor K(theta) along one characteristic.
///
/// Only the (P, R) pair is integrated: it decouples from the derivative
/// components, so the series stays smooth even past derivative blow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaSeries {
    pub theta0: f64,
    /// Uniform sample spacing.
    pub tau: f64,
    /// K at theta0 + i tau.
    pub values: Vec<f64>,
}

impl KappaSeries {
    /// Linear interpolation, clamped at the ends.
    pub fn value_at(&self, theta: f64) -> f64 {
        let t = (theta - self.theta0) / self.tau;
        if t <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if t >= last as f64 {
            return self.values[last];
        }
        let i = t.floor() as usize;
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Time of the final sample.
    pub fn theta_end(&self) -> f64 {
        self.theta0 + self.tau * (self.values.len() - 1) as f64
    }
}

/// Integrates the (P, R) pair of one characteristic and samples
/// K = (1+P^2)^(-3/2) at every step node from `theta0 = 0` to `theta_end`.
pub fn kappa_series(
    s0: &ParticleState,
    nu: f64,
    scheme: &StepScheme,
    theta_end: f64,
) -> Result<KappaSeries, StepError> {
    let n_steps = (theta_end / scheme.tau).round() as usize;
    let mut s = [s0.p, s0.r];
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(kappa_raw(s[0]));
    let rhs = move |_t: f64, s: &[f64; 2]| {
        let gamma = (1.0 + s[0] * s[0]).sqrt();
        [-s[1] - nu * s[0], s[0] / gamma]
    };
    for n in 1..=n_steps {
        s = step(scheme, rhs, (n - 1) as f64 * scheme.tau, &s)?;
        values.push(kappa_raw(s[0]));
    }
    Ok(KappaSeries {
        theta0: 0.0,
        tau: scheme.tau,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::SchemeKind;
    use approx::assert_relative_eq;

    fn tiny_config() -> RunConfig {
        RunConfig {
            initial_data: InitialData::Gaussian {
                a_star: 3.105,
                rho_star: 4.5,
            },
            m: 100,
            d: 20.25,
            nu: 0.0,
            scheme: StepScheme::new(SchemeKind::Rk4, 0.01).unwrap(),
            theta_max: 1.0,
            monitors: Monitors::default(),
            output_every: 10,
        }
    }

    #[test]
    fn gaussian_field_reference_values() {
        // Coefficient (a*/rho*)^2 = 0.4761 and rate 2/rho*^2 = 8/81.
        let c = 3.105f64 / 4.5;
        assert_relative_eq!(c * c, 0.4761, max_relative = 1e-12);
        assert_eq!(gaussian_field(3.105, 4.5, 0.0), 0.0);
        let rho = 1.7;
        assert_relative_eq!(
            gaussian_field(3.105, 4.5, rho),
            0.4761 * rho * (-8.0 / 81.0 * rho * rho).exp(),
            max_relative = 1e-12
        );
        // Boundary decay ratio at d = 4.5 rho*: exp(-40.5) ~ 2.58e-18.
        let d = 4.5 * 4.5;
        let ratio = gaussian_field(3.105, 4.5, d) / (0.4761 * d);
        assert_relative_eq!(ratio, (-40.5f64).exp(), max_relative = 1e-10);
        assert_relative_eq!(ratio, 2.58e-18, max_relative = 5e-3);
    }

    #[test]
    fn gaussian_derivative_matches_difference_quotient() {
        let (a, rs) = (3.105, 4.5);
        for &rho in &[-3.0, -0.4, 0.0, 1.1, 2.25, 6.0] {
            let eps = 1e-6;
            let fd = (gaussian_field(a, rs, rho + eps) - gaussian_field(a, rs, rho - eps))
                / (2.0 * eps);
            assert_relative_eq!(
                gaussian_field_derivative(a, rs, rho),
                fd,
                epsilon = 1e-9,
                max_relative = 1e-8
            );
        }
        // Extrema of the field are at +-rho*/2.
        assert_relative_eq!(
            gaussian_field_derivative(a, rs, 2.25),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn initialize_gaussian_grid_and_identity() {
        let cfg = tiny_config();
        let e = initialize(&cfg).unwrap();
        assert_eq!(e.particles.len(), cfg.m + 1);
        assert_relative_eq!(e.h, 2.0 * cfg.d / cfg.m as f64);
        for (k, ps) in e.particles.iter().enumerate() {
            let rho0 = k as f64 * e.h - cfg.d;
            // rho = rho_l + R recovers the initial grid exactly.
            assert_relative_eq!(ps.position(), rho0, epsilon = 1e-12);
            assert_eq!(ps.p, 0.0);
            assert_eq!(ps.q, 0.0);
            assert_relative_eq!(ps.r, gaussian_field(3.105, 4.5, rho0), max_relative = 1e-14);
        }
    }

    #[test]
    fn initialize_zero_data_is_rest_grid() {
        let mut cfg = tiny_config();
        let n = cfg.m + 1;
        cfg.initial_data = InitialData::Tabulated {
            e0: vec![0.0; n],
            p0: vec![0.0; n],
            de0: vec![0.0; n],
            dp0: vec![0.0; n],
        };
        let e = initialize(&cfg).unwrap();
        for (k, ps) in e.particles.iter().enumerate() {
            assert_eq!(ps.rho_l, k as f64 * e.h - cfg.d);
            assert_eq!((ps.p, ps.r, ps.q, ps.d), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn initialize_rejects_supercritical_gradient() {
        let mut cfg = tiny_config();
        let n = cfg.m + 1;
        let h = cfg.grid_spacing();
        // Field increasing faster than the grid spacing between two nodes
        // reverses the Lagrangian labels there.
        let mut e0 = vec![0.0; n];
        e0[50] = -0.6 * h;
        e0[51] = 0.6 * h;
        cfg.initial_data = InitialData::Tabulated {
            e0,
            p0: vec![0.0; n],
            de0: vec![0.0; n],
            dp0: vec![0.0; n],
        };
        match initialize(&cfg) {
            Err(ConfigError::InitialDataNotClassical { k: 50, k1: 51 }) => {}
            other => panic!("expected reversal at node 50, got {other:?}"),
        }
    }

    #[test]
    fn initialize_rejects_bad_scalars() {
        let mut cfg = tiny_config();
        cfg.m = 2;
        assert!(matches!(
            initialize(&cfg),
            Err(ConfigError::TooFewParticles(2))
        ));
        let mut cfg = tiny_config();
        cfg.nu = -0.5;
        assert!(matches!(initialize(&cfg), Err(ConfigError::NegativeNu(_))));
        let mut cfg = tiny_config();
        cfg.d = 0.0;
        assert!(initialize(&cfg).is_err());
    }

    #[test]
    fn rest_ensemble_stays_exactly_at_rest() {
        let mut cfg = tiny_config();
        let n = cfg.m + 1;
        cfg.initial_data = InitialData::Tabulated {
            e0: vec![0.0; n],
            p0: vec![0.0; n],
            de0: vec![0.0; n],
            dp0: vec![0.0; n],
        };
        let mut e = initialize(&cfg).unwrap();
        for _ in 0..5 {
            advance(&mut e, 0.3).unwrap();
        }
        for ps in &e.particles {
            assert_eq!((ps.p, ps.r, ps.q, ps.d), (0.0, 0.0, 0.0, 0.0));
        }
        let status = detect_breaking(&e, &Monitors::default());
        assert!(status.broke.is_none());
        assert!(status.smooth_criterion_everywhere);
    }

    #[test]
    fn small_oscillator_period_approaches_two_pi() {
        // Single particle with (P, R) = (0, eps): the relativistic
        // correction is O(eps^2), so the period is 2 pi to that accuracy.
        let s0 = ParticleState {
            rho_l: 0.0,
            p: 0.0,
            r: 1e-3,
            q: 0.0,
            d: 0.0,
        };
        let scheme = StepScheme::new(SchemeKind::Rk4, 1e-3).unwrap();
        let trace = trace_characteristic(&s0, 0.0, &scheme, 7.0, 1);
        let mut crossings = Vec::new();
        for w in trace.samples.windows(2) {
            let (t0, s0) = w[0];
            let (t1, s1) = w[1];
            if s0[1] > 0.0 && s1[1] <= 0.0 || s0[1] < 0.0 && s1[1] >= 0.0 {
                // Linear interpolation of the crossing time.
                crossings.push(t0 + (t1 - t0) * s0[1] / (s0[1] - s1[1]));
            }
        }
        assert!(crossings.len() >= 2, "need two zero crossings");
        let period = 2.0 * (crossings[1] - crossings[0]);
        assert_relative_eq!(period, std::f64::consts::TAU, max_relative = 1e-5);
    }

    #[test]
    fn center_characteristic_density_peak_oracle() {
        // The particle at rho = 0 keeps P = R = 0, so its (Q, D) system has
        // K = 1 exactly and conserves (Q^2 + D^2)/(1-D)^2. Starting from
        // D0 = 0.4761 the density N = 1 - D peaks at 10.9598.
        let d0 = gaussian_field_derivative(3.105, 4.5, 0.0);
        assert_relative_eq!(d0, 0.4761, max_relative = 1e-12);
        let s0 = ParticleState {
            rho_l: 0.0,
            p: 0.0,
            r: 0.0,
            q: 0.0,
            d: d0,
        };
        let scheme = StepScheme::new(SchemeKind::Rk4, 1e-3).unwrap();
        let trace = trace_characteristic(&s0, 0.0, &scheme, 7.0, 1);
        assert!(trace.failed_at.is_none());
        let n_peak = trace
            .samples
            .iter()
            .map(|(_, s)| 1.0 - s[3])
            .fold(f64::NEG_INFINITY, f64::max);
        let c = (2.0 * d0 - 1.0) / ((1.0 - d0) * (1.0 - d0));
        let d_min = ((c + 1.0) + (c + 1.0).sqrt()) / c;
        assert_relative_eq!(1.0 - d_min, 10.9598, max_relative = 1e-4);
        assert_relative_eq!(n_peak, 1.0 - d_min, max_relative = 1e-3);
    }

    #[test]
    fn detect_breaking_flags_swapped_neighbors() {
        let cfg = tiny_config();
        let mut e = initialize(&cfg).unwrap();
        let status = detect_breaking(&e, &Monitors::default());
        assert!(status.broke.is_none());
        // Swap two adjacent positions by editing displacements.
        let gap = e.position(51) - e.position(50);
        e.particles[50].r += gap;
        e.particles[51].r -= gap;
        let status = detect_breaking(&e, &Monitors::default());
        match status.broke {
            Some(BreakInfo {
                kind: BreakKind::CellCollapse,
                particle,
                ..
            }) => assert!((49..=51).contains(&particle)),
            other => panic!("expected cell collapse, got {other:?}"),
        }
    }

    #[test]
    fn detect_breaking_flags_derivative_threshold() {
        let cfg = tiny_config();
        let mut e = initialize(&cfg).unwrap();
        e.particles[7].q = 2e6;
        let status = detect_breaking(&e, &Monitors::default());
        match status.broke {
            Some(BreakInfo {
                kind: BreakKind::DerivativeThreshold,
                particle: 7,
                ..
            }) => {}
            other => panic!("expected derivative threshold at 7, got {other:?}"),
        }
    }

    #[test]
    fn run_smooth_series_well_formed() {
        let cfg = tiny_config();
        let report = run(&cfg).unwrap();
        assert_eq!(report.verdict, RunVerdict::SmoothUntilThetaMax);
        assert_eq!(report.theta_break(), None);
        assert_eq!(report.series.len(), 10);
        for w in report.series.windows(2) {
            assert!(w[1].theta > w[0].theta);
            assert!(w[0].min_h > 0.0);
            assert!(w[0].n_max >= 1.0 - 1e-12);
        }
        // Probe sits at an extremum of the initial field, |rho| = rho*/2.
        let probe_rho0 = report.probe_index as f64 * (2.0 * cfg.d / cfg.m as f64) - cfg.d;
        assert_relative_eq!(probe_rho0.abs(), 2.25, epsilon = 0.3);
    }

    #[test]
    fn threshold_rejects_bad_brackets() {
        let cfg = tiny_config();
        assert!(matches!(
            find_threshold_nu(&cfg, 0.1, 0.1, 1e-3),
            Err(ThresholdError::InvalidBracket { .. })
        ));
        assert!(matches!(
            find_threshold_nu(&cfg, 0.2, 0.1, 1e-3),
            Err(ThresholdError::InvalidBracket { .. })
        ));
        assert!(matches!(
            find_threshold_nu(&cfg, 0.0, 0.1, 0.0),
            Err(ThresholdError::InvalidTolerance(_))
        ));
        // The tiny smooth config never breaks, so the lower certificate
        // fails.
        assert!(matches!(
            find_threshold_nu(&cfg, 0.0, 0.1, 1e-3),
            Err(ThresholdError::LowerDoesNotBreak(_))
        ));
    }

    #[test]
    fn kappa_series_tracks_momentum() {
        let s0 = ParticleState {
            rho_l: 0.0,
            p: 0.0,
            r: 0.5,
            q: 0.0,
            d: 0.0,
        };
        let scheme = StepScheme::new(SchemeKind::Rk4, 0.01).unwrap();
        let ks = kappa_series(&s0, 0.0, &scheme, 3.0).unwrap();
        assert_eq!(ks.values.len(), 301);
        assert_eq!(ks.values[0], 1.0);
        // K dips below 1 once the particle picks up momentum and returns
        // near 1 at the field nodes; always within the energy bound.
        let b = crate::dynamics::kappa_lower_bound(0.0, 0.5).unwrap();
        for &k in &ks.values {
            assert!(k <= 1.0 + 1e-15 && k >= b.k_minus - 1e-12);
        }
        assert!(ks.values.iter().cloned().fold(1.0f64, f64::min) < 0.95);
        // Interpolation endpoints and midpoints behave.
        assert_eq!(ks.value_at(-1.0), ks.values[0]);
        assert_eq!(ks.value_at(99.0), *ks.values.last().unwrap());
        let mid = ks.value_at(0.005);
        assert_relative_eq!(mid, 0.5 * (ks.values[0] + ks.values[1]), epsilon = 1e-15);
    }

    #[test]
    fn advance_failure_reports_lowest_particle() {
        let cfg = tiny_config();
        let mut e = initialize(&cfg).unwrap();
        e.particles[30].q = f64::MAX / 2.0;
        e.particles[60].q = f64::MAX / 2.0;
        let err = advance(&mut e, 0.0).unwrap_err();
        assert_eq!(err.particle, 30);
    }
}
