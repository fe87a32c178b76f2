//! Scalar bounds: the four product lemmas, the centroid estimate, the growth
//! constants and the degree thresholds `N1`, `N2`, `N3`.
//!
//! Conventions used throughout:
//!
//! * `a` is the distinguished zero, real with `0 < a < 1`;
//! * `m` is the real part of the centroid of the zeros, and `p`, `q` are the
//!   two affine rescalings of `a/2 - m` (see [`centroid_params`]);
//! * `c` is the evaluation point `0 < c < a` at which `|P(c)|` is squeezed
//!   between an upper estimate `1 + a` and a lower estimate growing like `K^n`.
//!
//! All logarithms are natural.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::Polynomial;
use crate::rootsolver::{all_roots, DEFAULT_TOL};

/// Upper limit for the `N1` / `N2` integer scans.
pub const THRESHOLD_SCAN_CAP: u64 = 10_000_000;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

fn require_order_c_a(a: f64, c: f64) -> Result<()> {
    require(0.0 < c && c < a && a < 1.0, || {
        format!("need 0 < c < a < 1, got a = {a}, c = {c}")
    })
}

/// `1 - sqrt(1 + x^2 - x a)` without cancellation near `x = 0` and `x = a`.
pub(crate) fn one_minus_sqrt_gap(x: f64, a: f64) -> f64 {
    let inner = 1.0 + x * x - x * a;
    x * (a - x) / (1.0 + inner.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidParams {
    pub p: f64,
    pub q: f64,
}

impl CentroidParams {
    /// Both parameters lie in `[0, 1]`, as they must for an actual
    /// counterexample configuration.
    pub fn in_unit_range(&self) -> bool {
        (0.0..=1.0).contains(&self.p) && (0.0..=1.0).contains(&self.q)
    }
}

/// `p = (a/2 - m)/(1 - a/2)`, `q = (a/2 - m)/(1 + a/2)`.
///
/// Out-of-range values are returned as-is; check [`CentroidParams::in_unit_range`].
pub fn centroid_params(a: f64, m: f64) -> CentroidParams {
    let gap = a / 2.0 - m;
    CentroidParams {
        p: gap / (1.0 - a / 2.0),
        q: gap / (1.0 + a / 2.0),
    }
}

/// `sqrt(1 + delta^2 - 2 delta s)^n`, the bound on `prod |delta - a_k|` over
/// `n` points of the closed unit disk with mean real part `s`.
pub fn lemma1_bound(delta: f64, s: f64, n: usize) -> Result<f64> {
    require(0.0 < delta && delta < 1.0, || {
        format!("need 0 < delta < 1, got {delta}")
    })?;
    require((-1.0..=1.0).contains(&s), || {
        format!("need -1 <= s <= 1, got {s}")
    })?;
    Ok((1.0 + delta * delta - 2.0 * delta * s)
        .sqrt()
        .powi(n as i32))
}

/// Per-factor bound `A` on `|(delta - b_k)/(a - b_k)|` for points of the lens
/// complement `{|z| <= 1, |z - a| >= 1}` with mean real part `s`.
///
/// `A < 1` whenever the preconditions hold.
pub fn lemma_a_bound(delta: f64, a: f64, s: f64) -> Result<f64> {
    require(0.0 < delta && delta < a && a < 1.0, || {
        format!("need 0 < delta < a < 1, got delta = {delta}, a = {a}")
    })?;
    require(s <= a / 2.0 && s >= -1.0, || {
        format!("need -1 <= s <= a/2, got s = {s}")
    })?;
    let q = centroid_params(a, s).q;
    let root = (1.0 + delta * delta - delta * a).sqrt();
    Ok(((1.0 + delta) / (1.0 + a)).powf(q) * root.powf(1.0 - q))
}

/// The two candidate per-factor lower bounds on `|b - b_k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaBBranches {
    pub b1: f64,
    pub b2: f64,
}

impl LemmaBBranches {
    pub fn min(&self) -> f64 {
        self.b1.min(self.b2)
    }
}

pub fn lemma_b_branches(b: f64, a: f64, s: f64) -> Result<LemmaBBranches> {
    require(b > 1.0, || format!("need b > 1, got {b}"))?;
    require(0.0 < a && a < 1.0, || format!("need 0 < a < 1, got {a}"))?;
    require(s <= a / 2.0 && s >= -1.0, || {
        format!("need -1 <= s <= a/2, got s = {s}")
    })?;
    let CentroidParams { p, q } = centroid_params(a, s);
    let root = (1.0 + b * b - b * a).sqrt();
    Ok(LemmaBBranches {
        b1: (1.0 + b - a).powf(p) * root.powf(1.0 - p),
        b2: (1.0 + b).powf(q) * root.powf(1.0 - q),
    })
}

/// `min(B1, B2)`, the per-factor lower bound on `|b - b_k|` for `b > 1`.
pub fn lemma_b_bound(b: f64, a: f64, s: f64) -> Result<f64> {
    lemma_b_branches(b, a, s).map(|br| br.min())
}

/// `beta = log(prodabs) / log((c + r)/(1 + c r))`.
pub fn moebius_exponent(c: f64, r: f64, prodabs: f64) -> Result<f64> {
    require(0.0 < c && c < 1.0, || format!("need 0 < c < 1, got {c}"))?;
    require(0.0 < r && r < 1.0 - c, || {
        format!("need 0 < r < 1 - c, got r = {r}, c = {c}")
    })?;
    require(0.0 < prodabs && prodabs <= 1.0, || {
        format!("need 0 < prodabs <= 1, got {prodabs}")
    })?;
    Ok(prodabs.ln() / ((c + r) / (1.0 + c * r)).ln())
}

/// `r^beta`, the lower bound on a product of Moebius distances
/// `|(c - a_k)/(1 - c a_k)| >= r` given the product of the moduli `|a_k|`.
pub fn lemma_beta_bound(c: f64, r: f64, prodabs: f64) -> Result<f64> {
    let beta = moebius_exponent(c, r, prodabs)?;
    Ok(r.powf(beta))
}

/// Both sides of an inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `|c - z|` against `(c/(1-h)) |(1-h)^2/c - z|` for `|z| >= 1 - h`.
pub fn sym_check(c: f64, h: f64, z: Complex64) -> Result<Sides> {
    require(h > 0.0 && 0.0 < c && c < 1.0 - h, || {
        format!("need h > 0 and 0 < c < 1 - h, got c = {c}, h = {h}")
    })?;
    let rho = 1.0 - h;
    require(z.norm() >= rho * (1.0 - 1e-12), || {
        format!("need |z| >= 1 - h = {rho}, got |z| = {}", z.norm())
    })?;
    Ok(Sides {
        lhs: (c - z).norm(),
        rhs: c / rho * (rho * rho / c - z).norm(),
    })
}

/// `|P(b)|` against `((b - 1)/n) |P'(b)|` for a polynomial with every zero in
/// the closed unit disk.
pub fn mini_check(p: &Polynomial, b: f64) -> Result<Sides> {
    require(b > 1.0, || format!("need b > 1, got {b}"))?;
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegreeTooSmall {
            required: 1,
            got: 0,
        });
    }
    let roots = all_roots(p, DEFAULT_TOL)?;
    if let Some((index, r)) = roots
        .roots
        .iter()
        .enumerate()
        .find(|(_, r)| r.norm() > 1.0 + 1e-8)
    {
        return Err(Error::UnitDiskViolation {
            index,
            modulus: r.norm(),
        });
    }
    let z = Complex64::new(b, 0.0);
    let (value, slope) = p.eval_with_derivative(z);
    Ok(Sides {
        lhs: value.norm(),
        rhs: (b - 1.0) / n as f64 * slope.norm(),
    })
}

/// The bracketed objective `delta/2 - log(1 - sqrt(1 + delta^2 - delta a)) / (delta n)`.
pub fn m_bound_objective(delta: f64, a: f64, n: f64) -> f64 {
    if delta <= 0.0 || delta >= a {
        return f64::INFINITY;
    }
    delta / 2.0 - one_minus_sqrt_gap(delta, a).ln() / (delta * n)
}

/// Infimum of the centroid estimate and the `delta` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MBound {
    pub value: f64,
    pub delta_star: f64,
}

/// Upper estimate on `m` for a counterexample of degree `n`, as a function of
/// a real degree. Used directly by the fixed-point iteration.
///
/// A log-spaced scan brackets the minimiser, then golden-section search
/// refines it.
pub fn m_upper_bound_real(a: f64, n: f64) -> Result<MBound> {
    require(0.0 < a && a < 1.0, || format!("need 0 < a < 1, got {a}"))?;
    require(n >= 1.0, || format!("need n >= 1, got {n}"))?;
    let f = |d: f64| m_bound_objective(d, a, n);

    const SCAN: usize = 400;
    const DECADES: f64 = 12.0;
    let grid: Vec<f64> = (0..=SCAN)
        .map(|i| a * 10f64.powf(-DECADES * (1.0 - i as f64 / SCAN as f64)))
        .collect();
    let (best, _) =
        grid.iter()
            .enumerate()
            .map(|(i, &d)| (i, f(d)))
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    let lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let hi = if best == SCAN { a } else { grid[best + 1] };
    let (delta_star, value) = golden_section(f, lo, hi, 1e-15 * a);
    Ok(MBound { value, delta_star })
}

/// `inf_{0 < delta <= a} (delta/2 - log(1 - sqrt(1 + delta^2 - delta a))/(delta n))`.
pub fn m_upper_bound(a: f64, n: u64) -> Result<f64> {
    require(n >= 2, || format!("need n >= 2, got {n}"))?;
    m_upper_bound_real(a, n as f64).map(|b| b.value)
}

/// Minimise a unimodal `f` on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `(1 - sqrt(1 + delta^2 - delta a)) / n`, the lower bound on `|P(delta)/P'(a)|`.
pub fn rapport_lower(delta: f64, a: f64, n: u64) -> Result<f64> {
    require(0.0 < delta && delta < a && a <= 1.0, || {
        format!("need 0 < delta < a <= 1, got delta = {delta}, a = {a}")
    })?;
    require(n >= 1, || "need n >= 1".to_string())?;
    Ok(one_minus_sqrt_gap(delta, a) / n as f64)
}

/// `(16 n / a^2, a^2 / 16)`: upper bound on `|P'(a)|`, lower bound on `|P(0)|`.
pub fn thm_p4_bounds(a: f64, n: u64) -> (f64, f64) {
    (16.0 * n as f64 / (a * a), a * a / 16.0)
}

/// The constants tying the upper and lower estimates of `|P(c)|` together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub p: f64,
    pub q: f64,
    /// Exclusion radius in the Moebius metric around `c`.
    pub r: f64,
    pub alpha: f64,
    /// Growth rate of the lower estimate.
    pub k: f64,
    pub k_branches: LemmaBBranches,
    /// Decay rate of `|P'(delta)/P'(a)|` on `[0, c]`.
    pub d: f64,
}

impl Constants {
    pub fn k_valid(&self) -> bool {
        self.k > 1.0
    }

    pub fn d_below_one(&self) -> bool {
        self.d < 1.0
    }
}

pub fn constants(a: f64, c: f64, m: f64) -> Result<Constants> {
    require_order_c_a(a, c)?;
    let CentroidParams { p, q } = centroid_params(a, m);
    let r = c * (a - c) / (2.0 * (1.0 - c * c));
    let alpha = (a / 16.0).ln() / ((c + r) / (1.0 + c * r)).ln();
    let root = (1.0 + c * c - a * c).sqrt();
    let k_branches = LemmaBBranches {
        b1: (1.0 + c - a * c).powf(p) * root.powf(1.0 - p),
        b2: (1.0 + c).powf(q) * root.powf(1.0 - q),
    };
    let d = (1.0 / (1.0 + a))
        .powf(q)
        .max(((1.0 + c) / (1.0 + a)).powf(q) * root.powf(1.0 - q));
    Ok(Constants {
        p,
        q,
        r,
        alpha,
        k: k_branches.min(),
        k_branches,
        d,
    })
}

/// `log((1+a)(1-ac)/((1-c)(a-c))) - alpha log r`, the numerator of `N3 - 1`.
fn crossing_numerator(a: f64, c: f64, k: &Constants) -> f64 {
    ((1.0 + a) * (1.0 - a * c) / ((1.0 - c) * (a - c))).ln() - k.alpha * k.r.ln()
}

/// The real-valued crossing degree: `N3` before rounding.
pub fn crossing_degree(a: f64, c: f64, m: f64) -> Result<f64> {
    let k = constants(a, c, m)?;
    if !k.k_valid() {
        return Err(Error::InvalidRow { a, c, m, k: k.k });
    }
    Ok(crossing_numerator(a, c, &k) / k.k.ln() + 1.0)
}

/// Lower estimate `((1-c)(a-c)/(1-ac)) r^alpha K^(n-1)` on `|P(c)|`.
pub fn lower_estimate(a: f64, c: f64, k: &Constants, n: u64) -> f64 {
    (1.0 - c) * (a - c) / (1.0 - a * c) * k.r.powf(k.alpha) * k.k.powf(n as f64 - 1.0)
}

/// Upper estimate `1 + a` on `|P(c)|`, valid once `n >= max(N1, N2)`.
pub fn upper_estimate(a: f64) -> f64 {
    1.0 + a
}

/// Smallest `n >= 2` for which the monotone predicate holds.
///
/// Doubling brackets the crossing, bisection pins it.
fn first_true(pred: impl Fn(u64) -> bool, cap: u64) -> Result<u64> {
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !pred(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
        if lo >= cap {
            return Err(Error::ThresholdOverflow { cap });
        }
        hi = hi.min(cap);
    }
    // pred(lo) false (or lo = 1 below the range), pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `N1`: smallest `n` with `((1+a/2)/(1+a))^(q(n-1)) <= (1 - sqrt(1 - a^2/4))/(n a)`.
pub fn n1_threshold(a: f64, q: f64) -> Result<u64> {
    let log_ratio = ((1.0 + a / 2.0) / (1.0 + a)).ln();
    let numer = one_minus_sqrt_gap(a / 2.0, a).ln();
    first_true(
        |n| q * (n as f64 - 1.0) * log_ratio <= numer - (n as f64 * a).ln(),
        THRESHOLD_SCAN_CAP,
    )
}

/// `N2`: smallest `n` with `D^(n-1) <= a/(16 n)`.
pub fn n2_threshold(a: f64, d: f64) -> Result<u64> {
    let log_d = d.ln();
    first_true(
        |n| (n as f64 - 1.0) * log_d <= (a / (16.0 * n as f64)).ln(),
        THRESHOLD_SCAN_CAP,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    /// The real-valued crossing degree behind `n3`.
    pub n3_real: f64,
    /// `max(n1, n2, n3)`.
    pub n: u64,
}

/// `N1`, `N2`, `N3 = floor(crossing) + 1` and their maximum.
pub fn degree_thresholds(a: f64, c: f64, m: f64) -> Result<Thresholds> {
    let k = constants(a, c, m)?;
    if !k.k_valid() {
        return Err(Error::InvalidRow { a, c, m, k: k.k });
    }
    let n3_real = crossing_numerator(a, c, &k) / k.k.ln() + 1.0;
    if n3_real.is_nan() || n3_real >= THRESHOLD_SCAN_CAP as f64 {
        return Err(Error::ThresholdOverflow {
            cap: THRESHOLD_SCAN_CAP,
        });
    }
    let n3 = (n3_real.floor() as u64 + 1).max(2);
    let n1 = n1_threshold(a, k.q)?;
    let n2 = n2_threshold(a, k.d)?;
    Ok(Thresholds {
        n1,
        n2,
        n3,
        n3_real,
        n: n1.max(n2).max(n3),
    })
}

/// Every scalar of the argument in one flat record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundContext {
    pub a: f64,
    pub c: f64,
    pub m: f64,
    /// Degree at which the context is evaluated; equal to `N`.
    pub n: u64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    #[serde(rename = "N3")]
    pub n3: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
}

impl BoundContext {
    pub fn new(a: f64, c: f64, m: f64) -> Result<Self> {
        let k = constants(a, c, m)?;
        let t = degree_thresholds(a, c, m)?;
        Ok(BoundContext {
            a,
            c,
            m,
            n: t.n,
            p: k.p,
            q: k.q,
            r: k.r,
            alpha: k.alpha,
            k: k.k,
            d: k.d,
            n1: t.n1,
            n2: t.n2,
            n3: t.n3,
            big_n: t.n,
        })
    }

    /// `0 <= q <= p <= 1`.
    pub fn centroid_ordered(&self) -> bool {
        0.0 <= self.q && self.q <= self.p && self.p <= 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn centroid_params_table_rows() {
        let cp = centroid_params(0.8, 0.100);
        assert!((cp.p - 0.500).abs() < 5e-4);
        assert!((cp.q - 0.214).abs() < 5e-4);
        let cp = centroid_params(0.3, 0.15);
        assert_eq!((cp.p, cp.q), (0.0, 0.0));
        let cp = centroid_params(0.1, 0.029);
        assert!((cp.p - 0.022).abs() < 5e-4);
        assert!((cp.q - 0.020).abs() < 5e-4);
        assert!(cp.in_unit_range());
        assert!(!centroid_params(0.5, 0.9).in_unit_range());
    }

    #[test]
    fn lemma1_examples() {
        assert_relative_eq!(
            lemma1_bound(0.5, 0.0, 4).unwrap(),
            1.5625,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lemma1_bound(0.3, 1.0, 5).unwrap(),
            0.7f64.powi(5),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lemma1_bound(0.5, -1.0, 1).unwrap(),
            1.5,
            max_relative = 1e-15
        );
        assert!(lemma1_bound(1.0, 0.0, 2).is_err());
        assert!(lemma1_bound(0.5, 1.5, 2).is_err());
    }

    #[test]
    fn lemma_a_examples() {
        // s = a/2 makes q = 0
        let a = 0.6;
        let delta = 0.25;
        let v = lemma_a_bound(delta, a, a / 2.0).unwrap();
        assert_relative_eq!(
            v,
            (1.0 + delta * delta - delta * a).sqrt(),
            max_relative = 1e-15
        );
        // q = 0.214 at a = 0.8: s = a/2 - q (1 + a/2)
        let s = 0.4 - 0.214 * 1.4;
        let v = lemma_a_bound(0.4, 0.8, s).unwrap();
        assert_relative_eq!(v, 0.884_880_944_687_885_9, max_relative = 1e-12);
        assert!(v < 1.0);
        let near = lemma_a_bound(0.8 - 1e-9, 0.8, 0.4).unwrap();
        assert!(near < 1.0 && near > 1.0 - 1e-9);
        assert!(lemma_a_bound(0.9, 0.8, 0.0).is_err());
        assert!(lemma_a_bound(0.3, 0.8, 0.5).is_err());
    }

    #[test]
    fn lemma_b_examples() {
        let s = 0.4 - 0.214 * 1.4;
        // p from s is 0.5 + small; use the row's s = m = 0.1 for the exact branch values
        let br = lemma_b_branches(1.0 / 0.7, 0.8, 0.1).unwrap();
        assert_relative_eq!(br.b1, 1.497_873_449_569_386, max_relative = 1e-12);
        assert_relative_eq!(br.b2, 1.555_615_181_790_588_6, max_relative = 1e-12);
        assert_eq!(br.min(), br.b1);
        assert_relative_eq!(0.7 * br.b1, 1.048_511_414_698_570_1, max_relative = 1e-12);
        assert!(lemma_b_bound(1.0 / 0.7, 0.8, s).unwrap() > 1.0);

        let b = 1.7;
        let a = 0.35;
        let v = lemma_b_bound(b, a, a / 2.0).unwrap();
        assert_relative_eq!(v, (1.0 + b * b - b * a).sqrt(), max_relative = 1e-15);
        assert!(lemma_b_bound(1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(lemma_beta_bound(0.4, 0.1, 1.0).unwrap(), 1.0);
        let beta = moebius_exponent(0.7, 0.0686, 0.8 / 16.0).unwrap();
        assert!((beta - 9.66).abs() < 5e-3);
        assert_relative_eq!(beta, 9.660_932_770_184_821, max_relative = 1e-12);
        let beta = moebius_exponent(0.096, 0.0002, 0.1 / 16.0).unwrap();
        assert!((beta - 2.17).abs() < 5e-3);
        let bound = lemma_beta_bound(0.7, 0.0686, 0.05).unwrap();
        assert!(bound > 0.0 && bound <= 1.0);
        assert!(lemma_beta_bound(0.7, 0.4, 0.5).is_err());
        assert!(lemma_beta_bound(0.7, 0.1, 0.0).is_err());
    }

    #[test]
    fn sym_examples() {
        let h = 0.2;
        let c = 0.4;
        let z = Complex64::from_polar(1.0 - h, 2.1);
        let s = sym_check(c, h, z).unwrap();
        assert_relative_eq!(s.lhs, s.rhs, max_relative = 1e-14);

        let s = sym_check(0.5, 0.1, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(s.lhs, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.rhs, 0.344_444_444_444_444_4, max_relative = 1e-14);
        assert!(sym_check(0.95, 0.1, Complex64::new(1.0, 0.0)).is_err());
        assert!(sym_check(0.5, 0.1, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn mini_examples() {
        let s = mini_check(&Polynomial::monomial(2), 2.0).unwrap();
        assert_eq!((s.lhs, s.rhs), (4.0, 2.0));
        for n in 1..9 {
            let b = 1.37;
            let s = mini_check(&Polynomial::monomial(n), b).unwrap();
            assert_relative_eq!(s.lhs, b.powi(n as i32), max_relative = 1e-14);
            assert_relative_eq!(
                s.rhs,
                (b - 1.0) * b.powi(n as i32 - 1),
                max_relative = 1e-14
            );
        }
        let outside = Polynomial::from_roots(&[Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(matches!(
            mini_check(&outside, 2.0),
            Err(Error::UnitDiskViolation { .. })
        ));
        assert!(mini_check(&Polynomial::monomial(2), 1.0).is_err());
    }

    /// Dense grid with step 1e-4, independent of the bracketing search.
    fn m_bound_grid(a: f64, n: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut i = 1;
        loop {
            let d = i as f64 * 1e-4;
            if d >= a {
                break;
            }
            let v = d / 2.0 - (1.0 - (1.0 + d * d - d * a).sqrt()).ln() / (d * n);
            if v < best.0 {
                best = (v, d);
            }
            i += 1;
        }
        best
    }

    #[test]
    fn m_upper_bound_matches_grid_oracle() {
        for &(a, n) in &[(0.8, 616u64), (0.1, 15064), (0.5, 718), (0.9, 1006)] {
            let (grid_value, grid_delta) = m_bound_grid(a, n as f64);
            let b = m_upper_bound_real(a, n as f64).unwrap();
            assert!(
                b.value <= grid_value + 1e-12,
                "a = {a}: {} vs grid {grid_value}",
                b.value
            );
            assert!(grid_value - b.value < 1e-6);
            assert!((b.delta_star - grid_delta).abs() < 2e-3);
        }
        // frozen from the grid oracle
        let v = m_upper_bound(0.8, 616).unwrap();
        assert!((v - 0.102_87).abs() < 5e-5, "{v}");
        let v = m_upper_bound(0.1, 15064).unwrap();
        assert!((v - 0.030_15).abs() < 5e-5, "{v}");
        assert!(m_upper_bound(0.8, 1_000_000_000).unwrap() < 1e-3);
    }

    #[test]
    fn m_upper_bound_decreases_in_n() {
        for &a in &[0.1, 0.35, 0.8, 0.95] {
            let mut prev = f64::INFINITY;
            for n in [2u64, 5, 10, 50, 100, 1000, 10_000, 100_000] {
                let v = m_upper_bound(a, n).unwrap();
                assert!(v <= prev, "a = {a}, n = {n}");
                prev = v;
            }
        }
    }

    #[test]
    fn rapport_examples() {
        let v = rapport_lower(0.4, 0.8, 616).unwrap();
        assert_relative_eq!(v, 1.355_273_717_675_844e-4, max_relative = 1e-12);
        assert!(rapport_lower(1e-12, 0.8, 10).unwrap() < 1e-12);
        assert!(rapport_lower(0.8 - 1e-12, 0.8, 10).unwrap() < 1e-12);
        assert!(rapport_lower(0.9, 0.8, 10).is_err());
    }

    #[test]
    fn p4_examples() {
        let (du, pl) = thm_p4_bounds(0.8, 616);
        assert_relative_eq!(du, 15400.0, max_relative = 1e-14);
        assert_relative_eq!(pl, 0.04, max_relative = 1e-14);
        assert_eq!(thm_p4_bounds(1.0, 7), (112.0, 0.0625));
        assert_eq!(thm_p4_bounds(0.5, 718), (45952.0, 0.015625));
    }

    #[test]
    fn constants_row_point_eight() {
        let k = constants(0.8, 0.7, 0.1).unwrap();
        assert!((k.r - 0.0686).abs() < 5e-5);
        assert!((k.alpha - 9.66).abs() < 5e-3);
        assert!((k.k - 1.049).abs() < 5e-4);
        assert_eq!(k.k, k.k_branches.b1);
        assert_relative_eq!(k.k, 1.048_511_414_698_570_1, max_relative = 1e-12);
        assert_relative_eq!(k.d, 0.960_061_295_980_022_1, max_relative = 1e-12);
        assert!(k.k_valid() && k.d_below_one());
    }

    #[test]
    fn constants_row_point_one() {
        let k = constants(0.1, 0.096, 0.029).unwrap();
        assert!((k.r - 0.0002).abs() < 5e-5);
        assert!((k.alpha - 2.17).abs() < 5e-3);
        assert!((k.k - 1.002).abs() < 5e-4);
        assert!(constants(0.5, 0.5, 0.1).is_err());
        assert!(constants(0.5, 0.0, 0.1).is_err());
    }

    #[test]
    fn k_equals_scaled_lemma_b() {
        for &(a, c, m) in &[
            (0.8, 0.7, 0.1),
            (0.1, 0.096, 0.029),
            (0.5, 0.46, 0.1),
            (0.9, 0.756, 0.08),
        ] {
            let k = constants(a, c, m).unwrap();
            let via_b = c * lemma_b_bound(1.0 / c, a, m).unwrap();
            assert_relative_eq!(k.k, via_b, max_relative = 1e-12);
        }
    }

    /// Linear scan from n = 2, used as an oracle for the bracketing search.
    fn linear_first(pred: impl Fn(u64) -> bool) -> u64 {
        (2..).find(|&n| pred(n)).unwrap()
    }

    #[test]
    fn thresholds_row_point_eight() {
        let (a, c, m) = (0.8, 0.7, 0.1);
        let t = degree_thresholds(a, c, m).unwrap();
        let k = constants(a, c, m).unwrap();
        let n1 = linear_first(|n| {
            ((1.0 + a / 2.0) / (1.0 + a)).powf(k.q * (n as f64 - 1.0))
                <= (1.0 - (1.0 - a * a / 4.0).sqrt()) / (n as f64 * a)
        });
        let n2 = linear_first(|n| k.d.powf(n as f64 - 1.0) <= a / (16.0 * n as f64));
        assert_eq!(t.n1, n1);
        assert_eq!(t.n2, n2);
        assert_eq!((t.n1, t.n2), (134, 206));
        assert_eq!(t.n3, 617);
        assert!((t.n3 as f64 - 616.0).abs() / 616.0 <= 0.02);
        assert_eq!(t.n, 617);
    }

    #[test]
    fn n3_diverges_as_k_approaches_one() {
        // at fixed (a, m), K -> 1 as c moves toward the lower end of the admissible range
        let (a, m) = (0.8, 0.1);
        let mut c_lo = 0.05;
        let mut c_hi = 0.7;
        assert!(!constants(a, c_lo, m).unwrap().k_valid());
        for _ in 0..60 {
            let mid = 0.5 * (c_lo + c_hi);
            if constants(a, mid, m).unwrap().k_valid() {
                c_hi = mid;
            } else {
                c_lo = mid;
            }
        }
        let near = crossing_degree(a, c_hi, m).unwrap();
        let far = crossing_degree(a, 0.7, m).unwrap();
        assert!(near > 1e3 * far, "{near} vs {far}");
        assert!(matches!(
            degree_thresholds(a, c_lo, m),
            Err(Error::InvalidRow { .. })
        ));
    }

    #[test]
    fn estimates_cross_at_n3() {
        for &(a, c, m) in &[(0.8, 0.7, 0.1), (0.6, 0.55, 0.1), (0.3, 0.284, 0.073)] {
            let k = constants(a, c, m).unwrap();
            let t = degree_thresholds(a, c, m).unwrap();
            assert!(lower_estimate(a, c, &k, t.n3) > upper_estimate(a));
            assert!(lower_estimate(a, c, &k, t.n3 - 1) <= upper_estimate(a));
        }
    }

    #[test]
    fn bound_context_serializes_flat() {
        let ctx = BoundContext::new(0.8, 0.7, 0.1).unwrap();
        assert!(ctx.centroid_ordered());
        let v: serde_json::Value = serde_json::to_value(ctx).unwrap();
        for key in [
            "a", "c", "m", "n", "p", "q", "r", "alpha", "K", "D", "N1", "N2", "N",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["N"], 617);
    }

    #[test]
    fn first_true_caps() {
        assert_eq!(first_true(|n| n >= 2, 100).unwrap(), 2);
        assert_eq!(first_true(|n| n >= 37, 100).unwrap(), 37);
        assert!(matches!(
            first_true(|_| false, 1000),
            Err(Error::ThresholdOverflow { .. })
        ));
    }
}
