//! The degree threshold `N(a)`: self-consistent centroid bound, choice of the
//! evaluation point `c`, and the published table.
//!
//! The centroid `m` is unknown for a hypothetical counterexample, but it is
//! bounded by a quantity that only depends on the degree (see
//! [`bounds::m_upper_bound`]). The threshold in turn depends on `m`. The
//! fixed point of `m -> m_upper_bound(a, N(a, c, m))` closes the loop; the
//! crossing degree `N3` is used inside the loop as a real number so the map is
//! continuous.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, constants, crossing_degree, degree_thresholds, m_upper_bound_real};
use crate::error::{Error, Result};

pub const MAX_FIXED_POINT_ITERATIONS: usize = 200;
pub const DAMPING: f64 = 0.5;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Number of grid cells over `(0, a)` in the coarse search for `c`.
pub const C_GRID_CELLS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub m: f64,
    /// Integer crossing degree at the fixed point.
    pub n: u64,
    pub n_real: f64,
    pub delta_star: f64,
    /// `|m - m_upper_bound(a, n)|` at the integer degree.
    pub residual: f64,
    pub iterations: usize,
}

/// Damped iteration `m <- m + 0.5 (m_upper_bound(a, N3(m)) - m)` from `m = a/4`.
pub fn fixed_point_m(a: f64, c: f64, tol: f64) -> Result<FixedPoint> {
    if !(0.0 < c && c < a && a < 1.0) {
        return Err(Error::domain(format!(
            "need 0 < c < a < 1, got a = {a}, c = {c}"
        )));
    }
    let mut m = a / 4.0;
    for iteration in 1..=MAX_FIXED_POINT_ITERATIONS {
        let n_real = crossing_degree(a, c, m)?.max(2.0);
        let bound = m_upper_bound_real(a, n_real)?;
        let step = bound.value - m;
        if step.abs() <= tol {
            let n = n_real.floor() as u64 + 1;
            let at_n = m_upper_bound_real(a, n as f64)?;
            return Ok(FixedPoint {
                m,
                n,
                n_real,
                delta_star: at_n.delta_star,
                residual: (m - at_n.value).abs(),
                iterations: iteration,
            });
        }
        m += DAMPING * step;
    }
    let n_real = crossing_degree(a, c, m)?;
    let bound = m_upper_bound_real(a, n_real.max(2.0))?;
    Err(Error::NonConvergence {
        iterations: MAX_FIXED_POINT_ITERATIONS,
        worst_residual: (bound.value - m).abs(),
    })
}

/// One row of the threshold table with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub a: f64,
    pub c: f64,
    pub m: f64,
    pub r: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// The table's threshold column: the crossing degree `N3`.
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    #[serde(rename = "N3")]
    pub n3: u64,
    /// `max(N1, N2, N3)`.
    #[serde(rename = "N_max")]
    pub n_max: u64,
    pub delta_star: f64,
    /// `|m - m_upper_bound(a, N)|`.
    pub residual: f64,
    /// Set when `N1` or `N2` exceeds `N3`.
    pub flagged: bool,
}

impl ThresholdRow {
    /// Assemble a row from given `(a, c, m)` without any iteration.
    pub fn evaluate(a: f64, c: f64, m: f64) -> Result<Self> {
        let k = constants(a, c, m)?;
        let t = degree_thresholds(a, c, m)?;
        let at_n = m_upper_bound_real(a, t.n3 as f64)?;
        Ok(ThresholdRow {
            a,
            c,
            m,
            r: k.r,
            alpha: k.alpha,
            p: k.p,
            q: k.q,
            k: k.k,
            n: t.n3,
            n1: t.n1,
            n2: t.n2,
            n3: t.n3,
            n_max: t.n,
            delta_star: at_n.delta_star,
            residual: (m - at_n.value).abs(),
            flagged: t.n > t.n3,
        })
    }

    pub const CSV_HEADER: &'static str = "a,c,m,r,alpha,p,q,K,N";

    /// One CSV line at the table's printed precision.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.3},{:.3},{:.4},{:.2},{:.3},{:.3},{:.3},{}",
            self.a, self.c, self.m, self.r, self.alpha, self.p, self.q, self.k, self.n
        )
    }
}

/// `fixed_point_m` followed by the row assembly at the converged `m`.
pub fn row_for(a: f64, c: f64, tol: f64) -> Result<ThresholdRow> {
    let fp = fixed_point_m(a, c, tol)?;
    ThresholdRow::evaluate(a, c, fp.m)
}

/// Choose `c` minimising the crossing degree at the fixed point.
///
/// Coarse grid with step `a/200`, then golden-section refinement of the
/// real-valued crossing degree in the two cells around the best grid point.
pub fn optimize_c(a: f64) -> Result<(f64, ThresholdRow)> {
    if !(0.0 < a && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let objective = |c: f64| -> f64 {
        fixed_point_m(a, c, DEFAULT_TOL)
            .map(|fp| fp.n_real)
            .unwrap_or(f64::INFINITY)
    };
    let step = a / C_GRID_CELLS as f64;
    let grid: Vec<(usize, f64)> = (1..C_GRID_CELLS)
        .map(|i| (i, objective(i as f64 * step)))
        .collect();
    let (best, best_value) =
        grid.iter().copied().fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        );
    if !best_value.is_finite() {
        return Err(Error::AllRowsInvalid { a });
    }
    let lo = (best - 1) as f64 * step;
    let hi = ((best + 1) as f64 * step).min(a);
    let (c_ref, v_ref) = bounds::golden_section(objective, lo, hi, 1e-7 * a);
    let c = if v_ref <= best_value {
        c_ref
    } else {
        best as f64 * step
    };
    let row = row_for(a, c, DEFAULT_TOL)?;
    Ok((c, row))
}

/// A row as printed in the published table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub a: f64,
    pub c: f64,
    pub m: f64,
    pub r: f64,
    pub alpha: f64,
    /// Digits after the decimal point in the printed `alpha`.
    pub alpha_decimals: u32,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

#[allow(clippy::too_many_arguments)]
const fn published_row(
    a: f64,
    c: f64,
    m: f64,
    r: f64,
    alpha: f64,
    alpha_decimals: u32,
    p: f64,
    q: f64,
    k: f64,
    n: u64,
) -> PublishedRow {
    PublishedRow {
        a,
        c,
        m,
        r,
        alpha,
        alpha_decimals,
        p,
        q,
        k,
        n,
    }
}

pub const PUBLISHED_TABLE: [PublishedRow; 9] = [
    published_row(
        0.9, 0.756, 0.080, 0.1270, 13.32, 2, 0.673, 0.255, 1.031, 1006,
    ),
    published_row(0.8, 0.700, 0.100, 0.0686, 9.66, 2, 0.500, 0.214, 1.049, 616),
    published_row(0.7, 0.630, 0.110, 0.0366, 7.3, 1, 0.369, 0.178, 1.051, 560),
    published_row(0.6, 0.550, 0.100, 0.0197, 5.73, 2, 0.286, 0.154, 1.048, 563),
    published_row(0.5, 0.460, 0.100, 0.0117, 4.58, 2, 0.200, 0.120, 1.035, 718),
    published_row(0.4, 0.374, 0.089, 0.0057, 3.8, 1, 0.139, 0.093, 1.024, 1004),
    published_row(
        0.3, 0.284, 0.073, 0.0025, 3.18, 2, 0.091, 0.067, 1.014, 1654,
    ),
    published_row(
        0.2, 0.191, 0.053, 0.0009, 2.65, 2, 0.052, 0.043, 1.007, 3587,
    ),
    published_row(
        0.1, 0.096, 0.029, 0.0002, 2.17, 2, 0.022, 0.020, 1.002, 15064,
    ),
];

pub fn published_row_for(a: f64) -> Option<&'static PublishedRow> {
    PUBLISHED_TABLE.iter().find(|r| (r.a - a).abs() < 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    /// Use the printed `c` and `m` verbatim.
    Pinned,
    /// Run the fixed point and the `c` optimisation.
    Free,
}

/// One row per `a`; rows are computed in parallel and failures stay per-row.
pub fn make_table(avalues: &[f64], mode: TableMode) -> Vec<Result<ThresholdRow>> {
    avalues
        .par_iter()
        .map(|&a| {
            if !(0.0 < a && a < 1.0) {
                return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
            }
            match mode {
                TableMode::Pinned => {
                    let printed = published_row_for(a)
                        .ok_or_else(|| Error::domain(format!("no published row for a = {a}")))?;
                    ThresholdRow::evaluate(a, printed.c, printed.m)
                }
                TableMode::Free => optimize_c(a).map(|(_, row)| row),
            }
        })
        .collect()
}

/// The nine published `a` values, in published order.
pub fn published_avalues() -> Vec<f64> {
    PUBLISHED_TABLE.iter().map(|r| r.a).collect()
}

/// Deviation of a recomputed row from its printed counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinnedComparison {
    pub a: f64,
    pub dp: f64,
    pub dq: f64,
    pub dr: f64,
    pub dalpha: f64,
    #[serde(rename = "dK")]
    pub dk: f64,
    /// `(N3 - printed N) / printed N`.
    pub n3_relative: f64,
    /// `max(N1, N2, N3)` exceeds the printed `N`.
    pub exceeds_printed: bool,
}

impl PinnedComparison {
    pub fn new(row: &ThresholdRow, printed: &PublishedRow) -> Self {
        PinnedComparison {
            a: row.a,
            dp: (row.p - printed.p).abs(),
            dq: (row.q - printed.q).abs(),
            dr: (row.r - printed.r).abs(),
            dalpha: (row.alpha - printed.alpha).abs(),
            dk: (row.k - printed.k).abs(),
            n3_relative: (row.n3 as f64 - printed.n as f64) / printed.n as f64,
            exceeds_printed: row.n_max > printed.n,
        }
    }

    /// Every printed column reproduced within one unit of its last printed digit.
    pub fn within_last_digit(&self, printed: &PublishedRow) -> bool {
        let unit = |d: u32| 10f64.powi(-(d as i32)) * (1.0 + 1e-9);
        self.dp <= unit(3)
            && self.dq <= unit(3)
            && self.dr <= unit(4)
            && self.dalpha <= unit(printed.alpha_decimals)
            && self.dk <= unit(3)
    }
}
