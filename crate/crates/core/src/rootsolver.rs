//! Numerical root extraction and minimal enclosing disks.
//!
//! Roots come from a simultaneous Aberth–Ehrlich iteration followed by a
//! guarded Newton polish on each root. Zero roots that are exact (vanishing
//! low-order coefficients) are split off before iterating.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::Polynomial;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 1000;
const POLISH_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    #[serde(with = "crate::polycore::complex_pairs")]
    pub roots: Vec<Complex64>,
    /// Largest `|P(root)|` over the set.
    pub residual: f64,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Arithmetic mean of the roots.
    pub fn centroid(&self) -> Complex64 {
        self.roots.iter().sum::<Complex64>() / self.roots.len() as f64
    }

    /// Distance from `z` to the nearest root, or `None` for an empty set.
    pub fn nearest_distance(&self, z: Complex64) -> Option<f64> {
        self.roots.iter().map(|r| (r - z).norm()).reduce(f64::min)
    }
}

/// A closed disk in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::domain(format!(
                "disk radius must be >= 0, got {radius}"
            )));
        }
        Ok(Disk { center, radius })
    }

    /// The disk having `[p, q]` as a diameter.
    pub fn from_diameter(p: Complex64, q: Complex64) -> Self {
        Disk {
            center: (p + q) * 0.5,
            radius: (p - q).norm() * 0.5,
        }
    }

    /// Circumscribed disk of a triangle, `None` when the points are collinear.
    pub fn circumscribed(a: Complex64, b: Complex64, c: Complex64) -> Option<Self> {
        let b = b - a;
        let c = c - a;
        let d = 2.0 * (b.re * c.im - b.im * c.re);
        if d.abs() <= f64::EPSILON * (b.norm_sqr() + c.norm_sqr()) {
            return None;
        }
        let bb = b.norm_sqr();
        let cc = c.norm_sqr();
        let center = Complex64::new((c.im * bb - b.im * cc) / d, (b.re * cc - c.re * bb) / d);
        Some(Disk {
            center: center + a,
            radius: center.norm(),
        })
    }

    /// Membership with absolute slack.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (z - self.center).norm() <= self.radius + slack
    }

    pub fn inflate(&self, by: f64) -> Disk {
        Disk {
            center: self.center,
            radius: self.radius + by,
        }
    }
}

/// All roots of `p` with the default tolerance and sweep budget.
pub fn all_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    all_roots_with_budget(p, tol, DEFAULT_MAX_SWEEPS)
}

pub fn all_roots_with_budget(p: &Polynomial, tol: f64, max_sweeps: usize) -> Result<RootSet> {
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::DegreeTooSmall {
            required: 1,
            got: 0,
        });
    }
    let lead = p.leading();
    let zero = Complex64::new(0.0, 0.0);

    // exact zero roots
    let shift = p.coeffs().iter().take_while(|&&c| c == zero).count();
    let mut roots = vec![zero; shift];

    let monic: Vec<Complex64> = p.coeffs()[shift..].iter().map(|&c| c / lead).collect();
    let reduced_degree = monic.len() - 1;
    match reduced_degree {
        0 => {}
        1 => roots.push(-monic[0]),
        _ => {
            let mut found = aberth(&monic, max_sweeps);
            for z in found.iter_mut() {
                *z = polish(&monic, *z);
            }
            merge_multiple_roots(&monic, &mut found, tol);
            roots.extend(found);
        }
    }

    let residual = roots.iter().map(|&r| p.eval(r).norm()).fold(0.0, f64::max);
    let coeff_abs: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
    // backward-error acceptance: compare against the evaluation's own scale
    let acceptable = roots.iter().all(|&r| {
        let scale = horner_abs(&coeff_abs, r.norm());
        p.eval(r).norm() <= tol * (1.0 + scale)
    });
    if !acceptable || !residual.is_finite() {
        return Err(Error::NonConvergence {
            iterations: max_sweeps,
            worst_residual: residual,
        });
    }
    Ok(RootSet { roots, residual })
}

fn horner_abs(coeff_abs: &[f64], x: f64) -> f64 {
    coeff_abs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_pair(monic: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = p;
    for &c in monic.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Initial guesses on a circle whose radius is the geometric mean of the
/// root moduli, rotated off the real axis.
fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let radius = monic[0].norm().powf(1.0 / n as f64).max(1e-3);
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + 0.4 + 0.01 * k as f64 / n as f64;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(monic: &[Complex64], max_sweeps: usize) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let abs: Vec<f64> = monic.iter().map(|c| c.norm()).collect();
    let mut z = initial_guesses(monic);
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for _ in 0..max_sweeps {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_pair(monic, z[i]);
            if p.norm() <= 4.0 * eps * horner_abs(&abs, z[i].norm()) {
                done[i] = true;
                continue;
            }
            all_done = false;
            if dp.norm() == 0.0 {
                let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += nudge;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= 2.0 * eps * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }
    // out of sweeps is not an error here; the caller decides from the residual
    z
}

/// Newton steps accepted only while they reduce the residual.
fn polish(monic: &[Complex64], mut z: Complex64) -> Complex64 {
    let (mut p, mut dp) = eval_pair(monic, z);
    for _ in 0..POLISH_STEPS {
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let (cp, cdp) = eval_pair(monic, candidate);
        if cp.norm() >= p.norm() {
            break;
        }
        z = candidate;
        p = cp;
        dp = cdp;
    }
    z
}

/// First `k` Taylor coefficients of `coeffs` at `mu`, by repeated synthetic division.
fn taylor_head(coeffs: &[Complex64], mu: Complex64, k: usize) -> Vec<Complex64> {
    let mut q = coeffs.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(coeffs.len()) {
        let mut carry = Complex64::new(0.0, 0.0);
        for c in q.iter_mut().rev() {
            carry = carry * mu + *c;
            *c = carry;
        }
        // q[0] now holds the remainder, q[1..] the quotient
        out.push(q.remove(0));
    }
    out
}

/// A k-fold root of `P` is a simple root of `P^(k-1)`: Newton on that
/// derivative, accepting steps only while they shrink the residual.
fn refine_multiple_root(monic: &[Complex64], start: Complex64, k: usize) -> Complex64 {
    let mut d = Polynomial::new(monic.to_vec());
    for _ in 1..k {
        d = d.derivative();
    }
    let mut z = start;
    let (mut v, mut dv) = d.eval_with_derivative(z);
    for _ in 0..POLISH_STEPS {
        if v.norm() == 0.0 || dv.norm() == 0.0 {
            break;
        }
        let candidate = z - v / dv;
        let (cv, cdv) = d.eval_with_derivative(candidate);
        if cv.norm() >= v.norm() {
            break;
        }
        z = candidate;
        v = cv;
        dv = cdv;
    }
    z
}

/// Clusters of roots that are consistent with a single multiple root, up to
/// the backward-error tolerance, are replaced by that root.
///
/// A k-fold root splits into k points spread by about `eps^(1/k)` under a
/// coefficient perturbation of size `eps`, so multiple roots are only
/// located that coarsely, while the cluster center is well conditioned. A cluster
/// is accepted when the first `k` Taylor coefficients at its refined center
/// vanish relative to the same expansion with absolute values.
fn merge_multiple_roots(monic: &[Complex64], roots: &mut [Complex64], tol: f64) {
    let abs: Vec<Complex64> = monic
        .iter()
        .map(|c| Complex64::new(c.norm(), 0.0))
        .collect();
    let n = roots.len();
    let mut merged = vec![false; n];
    for tau in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let mut seen = merged.clone();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            // single-linkage component at this scale
            let mut members = vec![start];
            seen[start] = true;
            let mut next = 0;
            while next < members.len() {
                let z = roots[members[next]];
                for j in 0..n {
                    if !seen[j] && (roots[j] - z).norm() <= tau * (1.0 + z.norm()) {
                        seen[j] = true;
                        members.push(j);
                    }
                }
                next += 1;
            }
            let k = members.len();
            if k < 2 {
                continue;
            }
            let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>() / k as f64;
            let mu = refine_multiple_root(monic, mean, k);
            let head = taylor_head(monic, mu, k);
            let bound = taylor_head(&abs, Complex64::new(mu.norm(), 0.0), k);
            if head
                .iter()
                .zip(&bound)
                .all(|(t, b)| t.norm() <= tol * (1.0 + b.re))
            {
                for &i in &members {
                    roots[i] = mu;
                    merged[i] = true;
                }
            }
        }
    }
}

/// Smallest closed disk containing every point.
///
/// Incremental construction with the boundary-support recursion unrolled
/// into three nested loops; deterministic in the input order.
pub fn smallest_enclosing_disk(points: &[Complex64]) -> Result<Disk> {
    let first = *points.first().ok_or(Error::EmptyInput(
        "smallest enclosing disk needs at least one point",
    ))?;
    let slack = |d: &Disk| 1e-14 * (1.0 + d.radius + d.center.norm());
    let mut disk = Disk {
        center: first,
        radius: 0.0,
    };
    for i in 1..points.len() {
        if disk.contains(points[i], slack(&disk)) {
            continue;
        }
        disk = Disk {
            center: points[i],
            radius: 0.0,
        };
        for j in 0..i {
            if disk.contains(points[j], slack(&disk)) {
                continue;
            }
            disk = Disk::from_diameter(points[i], points[j]);
            for k in 0..j {
                if disk.contains(points[k], slack(&disk)) {
                    continue;
                }
                disk = Disk::circumscribed(points[i], points[j], points[k])
                    .unwrap_or_else(|| widest_pair(points[i], points[j], points[k]));
            }
        }
    }
    Ok(disk)
}

fn widest_pair(a: Complex64, b: Complex64, c: Complex64) -> Disk {
    [
        Disk::from_diameter(a, b),
        Disk::from_diameter(a, c),
        Disk::from_diameter(b, c),
    ]
    .into_iter()
    .max_by(|x, y| x.radius.total_cmp(&y.radius))
    .unwrap()
}
