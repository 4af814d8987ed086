//! Eulerian field reconstruction from the moving particle grid.
//!
//! At any frozen time the particles sit at strictly increasing positions
//! rho_k and carry both field values (P, R) and their spatial derivatives
//! (Q, D). A cubic Hermite interpolant over each bracketing interval
//! therefore reproduces fields to fourth order in the cell width and its
//! derivative gives consistent Q, D, N = 1 - D at arbitrary query points.

use thiserror::Error;

use crate::solver::Ensemble;

/// Per-query reconstruction failures.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SampleError {
    #[error("query rho = {rho} outside the particle hull [{lo}, {hi}]")]
    OutOfHull { rho: f64, lo: f64, hi: f64 },
    #[error("bracketing cell {k} has collapsed (non-positive width); ensemble is not classical")]
    CollapsedCell { k: usize },
    #[error("query rho = {0} is not finite")]
    NonFiniteQuery(f64),
}

/// Reconstructed fields at one query position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub rho: f64,
    pub p: f64,
    pub e: f64,
    pub q: f64,
    pub d: f64,
    /// Density N = 1 - D.
    pub n: f64,
}

/// Eulerian snapshot at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotTable {
    /// Time at which the ensemble was sampled.
    pub theta: f64,
    /// One row per answerable query, in query order.
    pub rows: Vec<SnapshotRow>,
    /// Indices into the query list that produced no row, with the reason.
    pub skipped: Vec<(usize, SampleError)>,
    /// Set when the smallest cell is below 1e-3 of the initial spacing:
    /// interpolation across a collapsing cell is unreliable.
    pub quality_warning: bool,
}

/// Cubic Hermite reconstruction of (P, E, Q, D, N) at `rho`.
///
/// Locates the bracketing interval by binary search on the particle
/// positions, then interpolates P from values P_k with slopes Q_k and E
/// from values R_k with slopes D_k; Q and D are the interpolant
/// derivatives. The result depends only on the bracketing cell's data.
pub fn hermite_sample(e: &Ensemble, rho: f64) -> Result<SnapshotRow, SampleError> {
    if !rho.is_finite() {
        return Err(SampleError::NonFiniteQuery(rho));
    }
    let m = e.m();
    let (lo, hi) = (e.position(0), e.position(m));
    if rho < lo || rho > hi {
        return Err(SampleError::OutOfHull { rho, lo, hi });
    }
    // Largest k with rho_k <= rho, clamped so the cell [k, k+1] exists.
    let mut a = 0usize;
    let mut b = m;
    while b - a > 1 {
        let mid = (a + b) / 2;
        if e.position(mid) <= rho {
            a = mid;
        } else {
            b = mid;
        }
    }
    let k = a.min(m - 1);
    let (xl, xr) = (e.position(k), e.position(k + 1));
    let w = xr - xl;
    if w <= 0.0 {
        return Err(SampleError::CollapsedCell { k });
    }
    let t = (rho - xl) / w;

    // Hermite basis and its t-derivative.
    let h00 = (2.0 * t - 3.0) * t * t + 1.0;
    let h10 = ((t - 2.0) * t + 1.0) * t;
    let h01 = (3.0 - 2.0 * t) * t * t;
    let h11 = (t - 1.0) * t * t;
    let g00 = 6.0 * t * (t - 1.0);
    let g10 = (3.0 * t - 4.0) * t + 1.0;
    let g01 = -g00;
    let g11 = (3.0 * t - 2.0) * t;

    let (sl, sr) = (&e.particles[k], &e.particles[k + 1]);
    let p = h00 * sl.p + h10 * w * sl.q + h01 * sr.p + h11 * w * sr.q;
    let field = h00 * sl.r + h10 * w * sl.d + h01 * sr.r + h11 * w * sr.d;
    let q = (g00 * sl.p + g01 * sr.p) / w + g10 * sl.q + g11 * sr.q;
    let d = (g00 * sl.r + g01 * sr.r) / w + g10 * sl.d + g11 * sr.d;

    Ok(SnapshotRow {
        rho,
        p,
        e: field,
        q,
        d,
        n: 1.0 - d,
    })
}

/// Samples the ensemble at a sorted query list.
///
/// Queries outside the particle hull (or crossing a collapsed cell) are
/// skipped and recorded with their reason instead of aborting the whole
/// snapshot. Rows keep query order, so sorted queries give sorted rows.
pub fn snapshot(e: &Ensemble, queries: &[f64]) -> SnapshotTable {
    let quality_warning = e.min_cell_width().0 < 1e-3 * e.h;
    let mut rows = Vec::with_capacity(queries.len());
    let mut skipped = Vec::new();
    for (i, &rho) in queries.iter().enumerate() {
        match hermite_sample(e, rho) {
            Ok(row) => rows.push(row),
            Err(err) => skipped.push((i, err)),
        }
    }
    SnapshotTable {
        theta: e.theta,
        rows,
        skipped,
        quality_warning,
    }
}
