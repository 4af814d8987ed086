//! Quadrant-switched limiter curves and guaranteed revolution counts.
//!
//! In the (D, Q) plane the slope of Q^2 along a trajectory,
//! dQ^2/dD = -2 [ D/((1-D)K) + Q^2/(1-D) + nu Q/((1-D)K) ],
//! depends on the unknown curvature K(theta) only through its confinement
//! to [K-, K+]. Replacing each K by whichever endpoint makes the slope
//! extremal yields autonomous comparison fields whose integral curves pin
//! the trajectory from outside. Following the outer chain quadrant by
//! quadrant, switching constants exactly at the axis crossings, bounds
//! every axis crossing of the true trajectory; each crossing of the
//! positive D-axis below 1/2 certifies one more full revolution, so the
//! count n gives the lifetime bound 2 pi n.
//!
//! Revolutions run I -> II -> III -> IV with quadrant I = (D < 0, Q > 0),
//! II = (D > 0, Q > 0), III = (D > 0, Q < 0), IV = (D < 0, Q < 0); D rises
//! while Q > 0 and falls while Q < 0, and unbounded growth is only
//! possible in quadrant IV.

use rayon::prelude::*;

use crate::analysis::{AnalysisError, PhasePoint};
use crate::dynamics::EnergyBound;
use crate::solver::{InitialData, RunConfig};

/// Revolutions are counted up to this cap; traces that keep passing are
/// reported as capped rather than looping forever (families with unit
/// cycle gain never fail on their own).
const REVOLUTION_CAP: u32 = 64;
/// Q^2 beyond this is treated as an escape to infinity.
const ESCAPE_Y: f64 = 1e12;
/// D below this is treated as an escape to -infinity.
const ESCAPE_D: f64 = -1e6;
/// Axis crossings are bisected to this width in D.
const AXIS_TOL: f64 = 1e-10;

/// Open quadrants of the (D, Q) plane in revolution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    /// I: D < 0, Q > 0.
    One,
    /// II: D > 0, Q > 0.
    Two,
    /// III: D > 0, Q < 0.
    Three,
    /// IV: D < 0, Q < 0; the only quadrant admitting unbounded growth.
    Four,
}

impl Quadrant {
    /// Sign of Q inside this quadrant.
    fn q_sign(self) -> f64 {
        match self {
            Quadrant::One | Quadrant::Two => 1.0,
            Quadrant::Three | Quadrant::Four => -1.0,
        }
    }

    /// Roman-numeral label.
    pub fn roman(self) -> &'static str {
        match self {
            Quadrant::One => "I",
            Quadrant::Two => "II",
            Quadrant::Three => "III",
            Quadrant::Four => "IV",
        }
    }
}

impl std::fmt::Display for Quadrant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.roman())
    }
}

/// Quadrant containing (d, q), or `None` on the axes.
pub fn quadrant_of(d: f64, q: f64) -> Option<Quadrant> {
    if d == 0.0 || q == 0.0 || !d.is_finite() || !q.is_finite() {
        return None;
    }
    Some(match (d < 0.0, q > 0.0) {
        (true, true) => Quadrant::One,
        (false, true) => Quadrant::Two,
        (false, false) => Quadrant::Three,
        (true, false) => Quadrant::Four,
    })
}

/// Half-slope of Q^2 in D with the curvature of the D-term frozen at `k_d`
/// and of the collision term at `k_nu`: the trajectory satisfies
/// dQ^2/dD = 2 sigma when both are the true K.
pub fn sigma(d: f64, q: f64, nu: f64, k_d: f64, k_nu: f64) -> f64 {
    -(d / ((1.0 - d) * k_d) + q * q / (1.0 - d) + nu * q / ((1.0 - d) * k_nu))
}

/// Pointwise lower and upper bounds on the true half-slope over
/// K in [k_minus, k_plus], resolved per quadrant.
///
/// The extremal endpoint choice flips with the signs of D and Q: the
/// D-term prefers K- when D < 0 (I, IV reversed for upper/lower) and the
/// collision term flips with the sign of Q.
pub fn sigma_bounds(
    quadrant: Quadrant,
    d: f64,
    q: f64,
    nu: f64,
    bound: &EnergyBound,
) -> (f64, f64) {
    let (m, p) = (bound.k_minus, bound.k_plus);
    // ((k_d, k_nu) for the lower bound, (k_d, k_nu) for the upper bound).
    let ((ld, ln), (ud, un)) = match quadrant {
        Quadrant::One => ((p, m), (m, p)),
        Quadrant::Two => ((m, m), (p, p)),
        Quadrant::Three => ((m, p), (p, m)),
        Quadrant::Four => ((p, p), (m, m)),
    };
    (sigma(d, q, nu, ld, ln), sigma(d, q, nu, ud, un))
}

/// Which comparison field the limiter chain integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimiterFamily {
    /// Outer chain of the two-constant comparison bounds: the collision
    /// term is frozen at K+ everywhere and the D-term at K- in quadrants
    /// I, III and K+ in II, IV. Sound for any nu in range; the cycle gain
    /// exceeds one, so counting terminates by itself. This is the default.
    #[default]
    Comparison,
    /// Single-constant conic curves C (1 - D^2) = K Q^2 + D^2 with K = K+
    /// in quadrants I, IV and K- in II, III. Collisionless only; its cycle
    /// gain is exactly one, so a passing start passes forever and the
    /// trace ends at the revolution cap. Kept for cross-checking the
    /// closed-form conservation law.
    Ellipse,
}

/// One integrated limiter arc inside a single quadrant.
#[derive(Debug, Clone, PartialEq)]
pub struct LimiterSegment {
    pub quadrant: Quadrant,
    /// Sampled (D, Q) polyline, signed Q.
    pub points: Vec<(f64, f64)>,
}

/// Why a limiter trace stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceStop {
    /// A positive-axis crossing landed at D* >= 1/2; continuation is not
    /// certified beyond the revolutions already granted.
    CrossingBeyondHalf { d_star: f64 },
    /// The limiter left the bounded region (only possible in quadrant IV
    /// for the comparison family, or via numeric overflow).
    Escaped { quadrant: Quadrant },
    /// The revolution cap was reached with every crossing still passing.
    Capped,
}

/// Output of [`limiter_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimiterTrace {
    pub family: LimiterFamily,
    /// Quadrant arcs in traversal order (empty in counting-only mode).
    pub segments: Vec<LimiterSegment>,
    /// Axis touch points (D, Q) in traversal order, starting point
    /// included when it lies on an axis.
    pub crossings: Vec<(f64, f64)>,
    /// Certified complete revolutions n.
    pub revolutions: u32,
    /// Lifetime bound 2 pi n.
    pub lifetime_bound: f64,
    pub stop: TraceStop,
}

/// Outcome of one quadrant arc.
enum Arc {
    /// Reached the Q-axis (D = 0) carrying y = Q^2.
    QAxis { y: f64 },
    /// Reached the D-axis (Q = 0) at this D.
    DAxis { d: f64 },
    Escaped,
}

struct Tracer<'a> {
    family: LimiterFamily,
    bound: &'a EnergyBound,
    nu: f64,
    record: bool,
    segments: Vec<LimiterSegment>,
    crossings: Vec<(f64, f64)>,
}

impl Tracer<'_> {
    /// Full slope dy/dx of y = Q^2 for the chain member of `quadrant`.
    fn slope(&self, quadrant: Quadrant, x: f64, y: f64) -> f64 {
        let (m, p) = (self.bound.k_minus, self.bound.k_plus);
        match self.family {
            LimiterFamily::Comparison => {
                let k_d = match quadrant {
                    Quadrant::One | Quadrant::Three => m,
                    Quadrant::Two | Quadrant::Four => p,
                };
                let q = quadrant.q_sign() * y.max(0.0).sqrt();
                2.0 * sigma(x, q, self.nu, k_d, p)
            }
            LimiterFamily::Ellipse => {
                let k = match quadrant {
                    Quadrant::One | Quadrant::Four => p,
                    Quadrant::Two | Quadrant::Three => m,
                };
                -2.0 * x * (1.0 + k * y) / (k * (1.0 - x * x))
            }
        }
    }

    /// One classical RK4 step of size `h` (sign carries direction).
    fn rk4(&self, quadrant: Quadrant, x: f64, y: f64, h: f64) -> f64 {
        let k1 = self.slope(quadrant, x, y);
        let k2 = self.slope(quadrant, x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = self.slope(quadrant, x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = self.slope(quadrant, x + h, y + h * k3);
        y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    fn open_segment(&mut self, quadrant: Quadrant, x: f64, y: f64) {
        if self.record {
            let q = quadrant.q_sign() * y.max(0.0).sqrt();
            self.segments.push(LimiterSegment {
                quadrant,
                points: vec![(x, q)],
            });
        }
    }

    fn push_point(&mut self, quadrant: Quadrant, x: f64, y: f64) {
        if self.record {
            let q = quadrant.q_sign() * y.max(0.0).sqrt();
            self.segments.last_mut().unwrap().points.push((x, q));
        }
    }

    /// Bisects the fraction of a step of size `h` at which y crosses zero;
    /// the bracket is (y > 0 at fraction lo, y <= 0 at fraction hi).
    fn bisect_axis(&self, quadrant: Quadrant, x: f64, y: f64, h: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while (hi - lo) * h.abs() > AXIS_TOL {
            let mid = 0.5 * (lo + hi);
            if self.rk4(quadrant, x, y, mid * h) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x + 0.5 * (lo + hi) * h
    }

    /// Quadrant I arc: from (x0 < 0, y0) rightward to the Q-axis.
    /// Step sizes shrink geometrically with |x| so arbitrarily deep
    /// re-entries stay cheap and accurate.
    fn arc_one(&mut self, x0: f64, y0: f64) -> Arc {
        let q = Quadrant::One;
        self.open_segment(q, x0, y0);
        let (mut x, mut y) = (x0, y0);
        while x < 0.0 {
            let h = (0.01 * x.abs().max(1e-4)).min(-x);
            y = self.rk4(q, x, y, h);
            x += h;
            if !y.is_finite() || y > ESCAPE_Y {
                return Arc::Escaped;
            }
            self.push_point(q, x, y);
        }
        Arc::QAxis { y: y.max(0.0) }
    }

    /// Quadrant II arc: from (x0 >= 0, y0 > 0) rightward until y = 0
    /// (event-located) or the density wall D -> 1.
    fn arc_two(&mut self, x0: f64, y0: f64) -> Arc {
        let q = Quadrant::Two;
        self.open_segment(q, x0, y0);
        let (mut x, mut y) = (x0, y0);
        loop {
            if x >= 1.0 - 1e-9 {
                return Arc::Escaped;
            }
            let h = 1e-3f64.min(1.0 - 1e-9 - x);
            let y_new = self.rk4(q, x, y, h);
            if !y_new.is_finite() {
                return Arc::Escaped;
            }
            if y_new <= 0.0 {
                let d = self.bisect_axis(q, x, y, h);
                self.push_point(q, d, 0.0);
                return Arc::DAxis { d };
            }
            x += h;
            y = y_new;
            self.push_point(q, x, y);
        }
    }

    /// Quadrant III arc: from (x0 > 0, y0) leftward to the Q-axis in
    /// uniform steps (the interval is at most one unit long).
    fn arc_three(&mut self, x0: f64, y0: f64) -> Arc {
        let q = Quadrant::Three;
        self.open_segment(q, x0, y0);
        let n = 512;
        let h = -x0 / n as f64;
        let mut y = y0;
        for i in 1..=n {
            let x = x0 + h * (i - 1) as f64;
            y = self.rk4(q, x, y, h).max(0.0);
            if !y.is_finite() || y > ESCAPE_Y {
                return Arc::Escaped;
            }
            self.push_point(q, x0 + h * i as f64, y);
        }
        Arc::QAxis { y }
    }

    /// Quadrant IV arc: from (x0 <= 0, y0 > 0) leftward until y = 0 or
    /// escape. Step sizes grow geometrically (capped relative to |x|) so
    /// deep excursions terminate quickly without losing accuracy.
    fn arc_four(&mut self, x0: f64, y0: f64) -> Arc {
        let q = Quadrant::Four;
        self.open_segment(q, x0, y0);
        let (mut x, mut y) = (x0, y0);
        let mut step = 1e-3f64;
        loop {
            if x < ESCAPE_D {
                return Arc::Escaped;
            }
            let h = -step;
            let y_new = self.rk4(q, x, y, h);
            if !y_new.is_finite() || y_new > ESCAPE_Y {
                return Arc::Escaped;
            }
            if y_new <= 0.0 {
                let d = self.bisect_axis(q, x, y, h);
                self.push_point(q, d, 0.0);
                return Arc::DAxis { d };
            }
            x += h;
            y = y_new;
            self.push_point(q, x, y);
            step = (step * 1.01).min(0.01 * x.abs().max(1.0));
        }
    }
}

/// Entry state of the chain.
enum Entry {
    One(f64, f64),
    Two(f64, f64),
    Three(f64, f64),
    Four(f64, f64),
}

fn trace_core(
    p: &PhasePoint,
    nu: f64,
    family: LimiterFamily,
    record: bool,
) -> Result<LimiterTrace, AnalysisError> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(AnalysisError::NonFinite { name: "nu", value: nu });
    }
    if family == LimiterFamily::Ellipse && nu != 0.0 {
        return Err(AnalysisError::UnsupportedNu { nu });
    }
    let (alpha, beta) = (p.alpha, p.beta);
    if alpha == 0.0 && beta == 0.0 {
        return Err(AnalysisError::InvalidStart { d: alpha, q: beta });
    }
    if alpha >= 1.0 {
        return Err(AnalysisError::InvalidStart { d: alpha, q: beta });
    }
    if nu >= 2.0 * p.bound.k_minus.sqrt() {
        return Err(AnalysisError::NotApplicable {
            requirement: "nu < 2 sqrt(K-)",
        });
    }

    let mut tracer = Tracer {
        family,
        bound: &p.bound,
        nu,
        record,
        segments: Vec::new(),
        crossings: Vec::new(),
    };

    let y0 = beta * beta;
    // Entry quadrant and whether the first revolution is certified at the
    // start: positive-axis points need D0 < 1/2, off-axis starts with
    // Q0 < 0 need the strict first-revolution inequality.
    let (mut entry, granted) = if beta == 0.0 {
        if alpha > 0.0 {
            tracer.crossings.push((alpha, 0.0));
            (Entry::Three(alpha, 0.0), alpha < 0.5)
        } else {
            tracer.crossings.push((alpha, 0.0));
            (Entry::One(alpha, 0.0), false)
        }
    } else if beta > 0.0 {
        if alpha < 0.0 {
            (Entry::One(alpha, y0), false)
        } else {
            (Entry::Two(alpha.max(0.0), y0), false)
        }
    } else {
        let grant = super::frozen::revolution_inequality(alpha, beta);
        if alpha > 0.0 {
            (Entry::Three(alpha, y0), grant)
        } else {
            (Entry::Four(alpha.min(0.0), y0), grant)
        }
    };

    let mut revolutions = if granted { 1u32 } else { 0 };
    let stop = loop {
        match entry {
            Entry::One(x, y) => match tracer.arc_one(x, y) {
                Arc::QAxis { y } => {
                    tracer.crossings.push((0.0, y.sqrt()));
                    entry = Entry::Two(0.0, y);
                }
                _ => break TraceStop::Escaped {
                    quadrant: Quadrant::One,
                },
            },
            Entry::Two(x, y) => match tracer.arc_two(x, y) {
                Arc::DAxis { d } => {
                    tracer.crossings.push((d, 0.0));
                    if d >= 0.5 {
                        break TraceStop::CrossingBeyondHalf { d_star: d };
                    }
                    if revolutions == REVOLUTION_CAP {
                        break TraceStop::Capped;
                    }
                    revolutions += 1;
                    entry = Entry::Three(d, 0.0);
                }
                _ => break TraceStop::Escaped {
                    quadrant: Quadrant::Two,
                },
            },
            Entry::Three(x, y) => match tracer.arc_three(x, y) {
                Arc::QAxis { y } => {
                    tracer.crossings.push((0.0, -y.sqrt()));
                    entry = Entry::Four(0.0, y);
                }
                _ => break TraceStop::Escaped {
                    quadrant: Quadrant::Three,
                },
            },
            Entry::Four(x, y) => match tracer.arc_four(x, y) {
                Arc::DAxis { d } => {
                    tracer.crossings.push((d, 0.0));
                    entry = Entry::One(d, 0.0);
                }
                _ => break TraceStop::Escaped {
                    quadrant: Quadrant::Four,
                },
            },
        }
    };

    Ok(LimiterTrace {
        family,
        segments: tracer.segments,
        crossings: tracer.crossings,
        revolutions,
        lifetime_bound: std::f64::consts::TAU * revolutions as f64,
        stop,
    })
}

/// Integrates the outer limiter chain from one characteristic's initial
/// derivative data and counts certified revolutions.
///
/// Requires a non-origin start with D0 < 1 and nu < 2 sqrt(K-); the
/// Ellipse family additionally requires nu = 0. Segments carry the full
/// sampled polylines.
pub fn limiter_trace(
    p: &PhasePoint,
    nu: f64,
    family: LimiterFamily,
) -> Result<LimiterTrace, AnalysisError> {
    trace_core(p, nu, family, true)
}

/// Per-sample output of [`guaranteed_revolutions`].
#[derive(Debug, Clone, PartialEq)]
pub struct GuaranteedLifetime {
    /// Minimum certified revolution count over the samples, when any
    /// sample produced a finite count.
    pub n_min: Option<u32>,
    /// 2 pi n_min.
    pub lifetime_bound: Option<f64>,
    /// Every sample position achieving the minimum.
    pub worst_rho: Vec<f64>,
    /// (rho, certified count) per sample; `None` marks samples with no
    /// finite bound: equilibrium points and traces still passing at the
    /// revolution cap.
    pub per_sample: Vec<(f64, Option<u32>)>,
}

/// Phase data of the characteristic starting at `rho` for this
/// configuration's initial fields, or `None` outside the data's domain.
///
/// Gaussian data is evaluated in closed form; tabulated data by cubic
/// Hermite interpolation on the initial uniform grid.
pub fn phase_point_at(config: &RunConfig, rho: f64) -> Option<PhasePoint> {
    use crate::dynamics::kappa_lower_bound;
    use crate::solver::{gaussian_field, gaussian_field_derivative};
    let (e0, p0, alpha, beta) = match &config.initial_data {
        InitialData::Gaussian { a_star, rho_star } => (
            gaussian_field(*a_star, *rho_star, rho),
            0.0,
            gaussian_field_derivative(*a_star, *rho_star, rho),
            0.0,
        ),
        InitialData::Tabulated { e0, p0, de0, dp0 } => {
            let n = config.m + 1;
            if e0.len() != n || p0.len() != n || de0.len() != n || dp0.len() != n {
                return None;
            }
            let h = config.grid_spacing();
            if !rho.is_finite() || rho < -config.d || rho > config.d {
                return None;
            }
            let k = (((rho + config.d) / h).floor() as usize).min(config.m - 1);
            let xl = k as f64 * h - config.d;
            let t = (rho - xl) / h;
            let h00 = (2.0 * t - 3.0) * t * t + 1.0;
            let h10 = ((t - 2.0) * t + 1.0) * t;
            let h01 = (3.0 - 2.0 * t) * t * t;
            let h11 = (t - 1.0) * t * t;
            let g00 = 6.0 * t * (t - 1.0);
            let g10 = (3.0 * t - 4.0) * t + 1.0;
            let g01 = -g00;
            let g11 = (3.0 * t - 2.0) * t;
            let val = |v: &[f64], dv: &[f64]| {
                h00 * v[k] + h10 * h * dv[k] + h01 * v[k + 1] + h11 * h * dv[k + 1]
            };
            let der = |v: &[f64], dv: &[f64]| {
                (g00 * v[k] + g01 * v[k + 1]) / h + g10 * dv[k] + g11 * dv[k + 1]
            };
            (val(e0, de0), val(p0, dp0), der(e0, de0), der(p0, dp0))
        }
    };
    let bound = kappa_lower_bound(p0, e0).ok()?;
    PhasePoint::new(alpha, beta, bound).ok()
}

/// Minimum certified revolution count over starting positions, with the
/// lifetime bound 2 pi n_min and the positions achieving it.
///
/// Each sample uses its own characteristic's curvature floor. Samples
/// whose derivative data is the equilibrium point, or whose trace still
/// passes at the revolution cap, contribute no finite count; data with no
/// finite count anywhere (such as rest data) yields `n_min = None`.
pub fn guaranteed_revolutions(config: &RunConfig, rho_samples: &[f64]) -> GuaranteedLifetime {
    let per_sample: Vec<(f64, Option<u32>)> = rho_samples
        .par_iter()
        .map(|&rho| {
            let n = phase_point_at(config, rho).and_then(|p| {
                if p.alpha == 0.0 && p.beta == 0.0 {
                    return None;
                }
                match trace_core(&p, config.nu, LimiterFamily::Comparison, false) {
                    Ok(tr) if tr.stop == TraceStop::Capped => None,
                    Ok(tr) => Some(tr.revolutions),
                    Err(_) => None,
                }
            });
            (rho, n)
        })
        .collect();
    let n_min = per_sample.iter().filter_map(|&(_, n)| n).min();
    let worst_rho = match n_min {
        Some(min) => per_sample
            .iter()
            .filter(|&&(_, n)| n == Some(min))
            .map(|&(rho, _)| rho)
            .collect(),
        None => Vec::new(),
    };
    GuaranteedLifetime {
        n_min,
        lifetime_bound: n_min.map(|n| std::f64::consts::TAU * n as f64),
        worst_rho,
        per_sample,
    }
}
