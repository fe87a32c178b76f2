//! Geometric statements about zeros and critical points, as executable checks.
//!
//! Every predicate here compares floating-point quantities with an absolute
//! slack of `1e-9` scaled by `1 + |compared magnitudes|`.
//!
//! Note on naming: the value `omega` of [`localize_zero_disk`] is a target
//! value `P(z) = omega`, unrelated to the center of the disk returned by
//! [`exclusion_disk_refined`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{multiaffine_form, Polynomial};
use crate::rootsolver::{all_roots, smallest_enclosing_disk, Disk, RootSet, DEFAULT_TOL};

pub const GEOMETRIC_SLACK: f64 = 1e-9;
/// Allowance for roots that should lie on a disk boundary but come back from
/// the solver with small errors.
pub const SOLVER_SLACK: f64 = 1e-6;
pub const UNIT_DISK_SLACK: f64 = 1e-12;
pub const GAUSS_LUCAS_SLACK: f64 = 1e-8;

/// Critical points (zeros of `P'`) of a polynomial of degree at least 2.
pub fn critical_points(p: &Polynomial) -> Result<RootSet> {
    if p.degree() < 2 {
        return Err(Error::DegreeTooSmall {
            required: 2,
            got: p.degree(),
        });
    }
    all_roots(&p.derivative(), DEFAULT_TOL)
}

fn check_unit_disk(points: &[Complex64], slack: f64) -> Result<()> {
    match points
        .iter()
        .enumerate()
        .find(|(_, z)| z.norm() > 1.0 + slack)
    {
        Some((index, z)) => Err(Error::UnitDiskViolation {
            index,
            modulus: z.norm(),
        }),
        None => Ok(()),
    }
}

/// A zero `a` on the positive real axis together with the remaining zeros and
/// the resulting critical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootConfiguration {
    pub a: f64,
    #[serde(with = "crate::polycore::complex_pairs")]
    pub others: Vec<Complex64>,
    #[serde(with = "crate::polycore::complex_pairs")]
    pub criticals: Vec<Complex64>,
}

impl RootConfiguration {
    pub fn new(a: f64, others: Vec<Complex64>) -> Result<Self> {
        if !(0.0 < a && a <= 1.0) {
            return Err(Error::domain(format!("need 0 < a <= 1, got {a}")));
        }
        if others.is_empty() {
            return Err(Error::DegreeTooSmall {
                required: 2,
                got: 1,
            });
        }
        check_unit_disk(&others, UNIT_DISK_SLACK)?;
        let mut roots = Vec::with_capacity(others.len() + 1);
        roots.push(Complex64::new(a, 0.0));
        roots.extend_from_slice(&others);
        let criticals = critical_points(&Polynomial::from_roots(&roots))?.roots;
        if let Some(z) = criticals
            .iter()
            .find(|z| z.norm() > 1.0 + GAUSS_LUCAS_SLACK)
        {
            return Err(Error::Precondition(format!(
                "critical point {z} outside the closed unit disk"
            )));
        }
        Ok(RootConfiguration {
            a,
            others,
            criticals,
        })
    }

    pub fn degree(&self) -> usize {
        self.others.len() + 1
    }

    pub fn roots(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(self.a, 0.0))
            .chain(self.others.iter().copied())
            .collect()
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::from_roots(&self.roots())
    }

    /// Real part of the common centroid of zeros and critical points.
    pub fn m(&self) -> f64 {
        let roots = self.roots();
        roots.iter().map(|z| z.re).sum::<f64>() / roots.len() as f64
    }

    /// Distance from `a` to its nearest critical point.
    pub fn critical_distance(&self) -> f64 {
        let a = Complex64::new(self.a, 0.0);
        self.criticals
            .iter()
            .map(|z| (z - a).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDistance {
    #[serde(with = "pair")]
    pub root: Complex64,
    pub min_distance: f64,
}

mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// For each zero, its distance to the nearest critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SendovReport {
    pub minima: Vec<RootDistance>,
    pub satisfied: bool,
}

impl SendovReport {
    pub fn worst(&self) -> f64 {
        self.minima
            .iter()
            .map(|r| r.min_distance)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn sendov_report(roots: &[Complex64]) -> Result<SendovReport> {
    if roots.len() < 2 {
        return Err(Error::DegreeTooSmall {
            required: 2,
            got: roots.len(),
        });
    }
    check_unit_disk(roots, UNIT_DISK_SLACK)?;
    let criticals = critical_points(&Polynomial::from_roots(roots))?;
    let minima: Vec<RootDistance> = roots
        .iter()
        .map(|&root| RootDistance {
            root,
            min_distance: criticals.nearest_distance(root).unwrap_or(f64::INFINITY),
        })
        .collect();
    let satisfied = minima
        .iter()
        .all(|r| r.min_distance <= 1.0 + GEOMETRIC_SLACK);
    Ok(SendovReport { minima, satisfied })
}

/// The disk with diameter `[delta, delta - n (P(delta) - omega)/P'(delta)]`,
/// which contains a solution of `P(z) = omega` (`n = deg P`).
pub fn localize_zero_disk(p: &Polynomial, delta: Complex64, omega: Complex64) -> Result<Disk> {
    let (value, slope) = p.eval_with_derivative(delta);
    if slope.norm() <= 1e-12 {
        return Err(Error::VanishingDerivative(slope.norm()));
    }
    let n = p.degree() as f64;
    let far_end = delta - (value - omega) / slope * n;
    Ok(Disk::from_diameter(delta, far_end))
}

/// Result of checking the localization disk against the actual solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub disk: Disk,
    /// Solution of `P(z) = omega` nearest to the disk center.
    pub nearest: Complex64,
    pub distance: f64,
    /// `|P(nearest) - omega|`.
    pub value_error: f64,
}

impl Localization {
    /// `radius + SOLVER_SLACK - distance`; nonnegative when the disk holds a solution.
    pub fn margin(&self) -> f64 {
        self.disk.radius + SOLVER_SLACK - self.distance
    }

    pub fn holds(&self) -> bool {
        self.margin() >= 0.0
    }
}

pub fn localize_and_verify(
    p: &Polynomial,
    delta: Complex64,
    omega: Complex64,
) -> Result<Localization> {
    let disk = localize_zero_disk(p, delta, omega)?;
    let solutions = all_roots(&p.shift_value(omega), DEFAULT_TOL)?;
    let nearest = solutions
        .roots
        .iter()
        .copied()
        .min_by(|x, y| {
            (x - disk.center)
                .norm()
                .total_cmp(&(y - disk.center).norm())
        })
        .expect("degree >= 1 gives at least one solution");
    Ok(Localization {
        disk,
        nearest,
        distance: (nearest - disk.center).norm(),
        value_error: (p.eval(nearest) - omega).norm(),
    })
}

/// Signed slack of the perpendicular-bisector property: the smaller, over the
/// two closed half-planes bounded by the bisector of `[alpha, beta]`, of the
/// deepest critical point's signed distance into that half-plane.
pub fn bisector_margin(p: &Polynomial, alpha: Complex64, beta: Complex64) -> Result<f64> {
    if alpha == beta {
        return Err(Error::Precondition("alpha and beta must differ".into()));
    }
    let (pa, pb) = (p.eval(alpha), p.eval(beta));
    if (pa - pb).norm() > GEOMETRIC_SLACK * (1.0 + pa.norm()) {
        return Err(Error::Precondition(format!(
            "P(alpha) = {pa} and P(beta) = {pb} differ"
        )));
    }
    let criticals = critical_points(p)?;
    let mid = (alpha + beta) * 0.5;
    let dir = (beta - alpha) / (beta - alpha).norm();
    let signed: Vec<f64> = criticals
        .roots
        .iter()
        .map(|z| ((z - mid) * dir.conj()).re)
        .collect();
    let toward_beta = signed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let toward_alpha = signed.iter().map(|s| -s).fold(f64::NEG_INFINITY, f64::max);
    Ok(toward_beta.min(toward_alpha))
}

/// Whether each closed half-plane bounded by the bisector of `[alpha, beta]`
/// holds a critical point, given `P(alpha) = P(beta)`.
pub fn bisector_check(p: &Polynomial, alpha: Complex64, beta: Complex64) -> Result<bool> {
    let margin = bisector_margin(p, alpha, beta)?;
    Ok(margin >= -GEOMETRIC_SLACK * (1.0 + alpha.norm().max(beta.norm())))
}

/// Outcome of a Walsh coalescence check on the smallest disk holding the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshWitness {
    /// The multi-affine form `<P, prod (conj(a_k) X + 1)>_n`.
    pub value: Complex64,
    pub region: Disk,
    /// Solution of `P(z) = value` closest to the region center.
    pub beta: Complex64,
    /// `radius + SOLVER_SLACK - |beta - center|`.
    pub margin: f64,
}

pub fn walsh_witness(p: &Polynomial, alphas: &[Complex64]) -> Result<WalshWitness> {
    let value = multiaffine_form(p, alphas)?;
    let region = smallest_enclosing_disk(alphas)?;
    if p.degree() == 0 {
        // any point works for a constant
        return Ok(WalshWitness {
            value,
            region,
            beta: region.center,
            margin: region.radius + SOLVER_SLACK,
        });
    }
    let solutions = all_roots(&p.shift_value(value), DEFAULT_TOL)?;
    let beta = solutions
        .roots
        .iter()
        .copied()
        .min_by(|x, y| {
            (x - region.center)
                .norm()
                .total_cmp(&(y - region.center).norm())
        })
        .expect("degree >= 1");
    Ok(WalshWitness {
        value,
        region,
        beta,
        margin: region.radius + SOLVER_SLACK - (beta - region.center).norm(),
    })
}

/// Whether `P(beta)` equals the multi-affine form for some `beta` in the
/// smallest disk containing `alphas` (inflated by [`SOLVER_SLACK`]).
pub fn walsh_check(p: &Polynomial, alphas: &[Complex64]) -> Result<bool> {
    walsh_witness(p, alphas).map(|w| w.margin >= 0.0)
}

/// Disk of center `c` and radius `1 - sqrt(1 + c(c - a))` free of zeros of a
/// counterexample polynomial.
pub fn exclusion_disk_basic(a: f64, c: f64) -> Result<Disk> {
    if !(0.0 < c && c < a && a < 1.0) {
        return Err(Error::domain(format!(
            "need 0 < c < a < 1, got a = {a}, c = {c}"
        )));
    }
    // 1 - sqrt(1 - c(a - c)) without cancellation
    let radius = crate::bounds::one_minus_sqrt_gap(c, a);
    Disk::new(Complex64::new(c, 0.0), radius)
}

/// The refined exclusion disk for `0 < h < c < a < 1 - h`, as a center and
/// radius on the real axis, together with the slack of the containment it
/// relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedExclusion {
    pub center: f64,
    pub radius: f64,
    /// `1 - sqrt(1 + w^2 - w a) - R`.
    pub containment: f64,
    /// `(w a - 2R) - (w^2 - R^2)`.
    pub reduced: f64,
    /// `1 - R`.
    pub radius_gap: f64,
}

impl RefinedExclusion {
    pub fn holds(&self, slack: f64) -> bool {
        self.containment >= -slack && self.reduced >= -slack && self.radius_gap >= -slack
    }

    pub fn disk(&self) -> Disk {
        Disk {
            center: Complex64::new(self.center, 0.0),
            radius: self.radius,
        }
    }
}

pub fn refined_exclusion(a: f64, c: f64, h: f64) -> Result<RefinedExclusion> {
    if !(0.0 < h && h < c && c < a && a < 1.0 - h) {
        return Err(Error::domain(format!(
            "need 0 < h < c < a < 1 - h, got a = {a}, c = {c}, h = {h}"
        )));
    }
    let rho2 = (1.0 - h) * (1.0 - h);
    let k = c * (a - c) / (2.0 * (rho2 - c * c));
    let denom = 1.0 - (k * c) * (k * c);
    let w = c * (1.0 - k * k * rho2) / denom;
    let radius = k * (rho2 - c * c) / denom;
    let containment = 1.0 - (1.0 + w * w - w * a).sqrt() - radius;
    Ok(RefinedExclusion {
        center: w,
        radius,
        containment,
        reduced: (w * a - 2.0 * radius) - (w * w - radius * radius),
        radius_gap: 1.0 - radius,
    })
}

/// The refined exclusion disk; fails if its containment in the basic disk
/// (centered at its own center) does not hold to `1e-12`.
pub fn exclusion_disk_refined(a: f64, c: f64, h: f64) -> Result<Disk> {
    let ex = refined_exclusion(a, c, h)?;
    if !ex.holds(1e-12) {
        return Err(Error::Precondition(format!(
            "containment fails at a = {a}, c = {c}, h = {h}: slack {}",
            ex.containment
        )));
    }
    Ok(ex.disk())
}

/// `|mean(zeros) - mean(critical points)|`.
pub fn centroid_shift(roots: &[Complex64]) -> Result<f64> {
    let p = Polynomial::from_roots(roots);
    let criticals = critical_points(&p)?;
    let mean = roots.iter().sum::<Complex64>() / roots.len() as f64;
    Ok((mean - criticals.centroid()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn roots_of_unity(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    #[test]
    fn sendov_roots_of_unity() {
        let report = sendov_report(&roots_of_unity(5)).unwrap();
        assert!(report.satisfied);
        assert_eq!(report.minima.len(), 5);
        for r in &report.minima {
            // criticals form a quadruple zero at 0, recovered to ~eps^(1/4)
            assert!((r.min_distance - 1.0).abs() < 1e-3, "{}", r.min_distance);
        }
    }

    #[test]
    fn sendov_single_nonzero_root() {
        // (z - a) z^(n-1): criticals 0 (multiplicity n-2) and (n-1)a/n
        let a = 0.7;
        for n in [3usize, 5, 8] {
            let mut roots = vec![c(0.0, 0.0); n - 1];
            roots.insert(0, c(a, 0.0));
            let report = sendov_report(&roots).unwrap();
            assert!(report.satisfied);
            assert!((report.minima[0].min_distance - a / n as f64).abs() < 1e-9);
            for r in &report.minima[1..] {
                assert!(r.min_distance < 1e-3);
            }
        }
    }

    #[test]
    fn sendov_errors() {
        assert!(matches!(
            sendov_report(&[c(0.5, 0.0)]),
            Err(Error::DegreeTooSmall { .. })
        ));
        assert!(matches!(
            sendov_report(&[c(0.5, 0.0), c(1.5, 0.0)]),
            Err(Error::UnitDiskViolation { index: 1, .. })
        ));
    }

    #[test]
    fn root_configuration_invariants() {
        let cfg =
            RootConfiguration::new(0.6, vec![c(-0.5, 0.5), c(0.1, -0.9), c(-1.0, 0.0)]).unwrap();
        assert_eq!(cfg.degree(), 4);
        assert_eq!(cfg.criticals.len(), 3);
        assert!(cfg
            .criticals
            .iter()
            .all(|z| z.norm() <= 1.0 + GAUSS_LUCAS_SLACK));
        assert_relative_eq!(cfg.m(), (0.6 - 0.5 + 0.1 - 1.0) / 4.0, max_relative = 1e-15);
        assert!(cfg.critical_distance() <= 1.0);
        assert!(RootConfiguration::new(0.0, vec![c(0.1, 0.0)]).is_err());
        assert!(RootConfiguration::new(0.5, vec![]).is_err());
        assert!(RootConfiguration::new(0.5, vec![c(1.1, 0.0)]).is_err());
    }

    #[test]
    fn localize_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let disk = localize_zero_disk(&p, c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(disk.center.re, 1.25, max_relative = 1e-15);
        assert_relative_eq!(disk.radius, 0.75, max_relative = 1e-15);
        assert!(disk.contains(c(1.0, 0.0), 0.0));

        let disk = localize_zero_disk(&p, c(0.5, 0.0), c(-0.75, 0.0)).unwrap();
        assert_eq!(disk.radius, 0.0);
        assert_eq!(disk.center, c(0.5, 0.0));
        assert_eq!(p.eval(c(0.5, 0.0)), c(-0.75, 0.0));

        assert!(matches!(
            localize_zero_disk(&p, c(0.0, 0.0), c(1.0, 0.0)),
            Err(Error::VanishingDerivative(_))
        ));

        let loc = localize_and_verify(&p, c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert!(loc.holds());
        assert!(loc.value_error < 1e-12);
    }

    #[test]
    fn bisector_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert!(bisector_check(&p, c(1.0, 0.0), c(-1.0, 0.0)).unwrap());
        assert!(
            bisector_margin(&p, c(1.0, 0.0), c(-1.0, 0.0))
                .unwrap()
                .abs()
                < 1e-15
        );

        let cubic = Polynomial::from_real(&[0.0, -3.0, 0.0, 1.0]);
        let s3 = 3f64.sqrt();
        assert!(bisector_check(&cubic, c(s3, 0.0), c(-s3, 0.0)).unwrap());
        let m = bisector_margin(&cubic, c(s3, 0.0), c(-s3, 0.0)).unwrap();
        assert_relative_eq!(m, 1.0, max_relative = 1e-9);

        assert!(matches!(
            bisector_check(&p, c(1.0, 0.0), c(0.5, 0.0)),
            Err(Error::Precondition(_))
        ));
        assert!(bisector_check(&p, c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn walsh_examples() {
        let z2 = Polynomial::monomial(2);
        let w = walsh_witness(&z2, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((w.value - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((w.beta.norm() - 1.0).abs() < 1e-12);
        assert!(w.margin >= 0.0);

        let p = Polynomial::new(vec![c(0.3, 0.0), c(0.0, 1.0), c(-2.0, 0.5)]);
        let alpha = c(0.2, -0.4);
        assert!(walsh_check(&p, &[alpha; 4]).unwrap());

        let constant = Polynomial::constant(c(2.0, 0.0));
        assert!(walsh_check(&constant, &[c(0.0, 0.0), c(1.0, 1.0)]).unwrap());
        assert!(walsh_check(&Polynomial::monomial(3), &[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn exclusion_basic_examples() {
        let d = exclusion_disk_basic(0.8, 0.4).unwrap();
        assert_relative_eq!(d.radius, 0.083_484_861_008_832, max_relative = 1e-13);
        assert!(exclusion_disk_basic(0.8, 1e-9).unwrap().radius < 1e-9);
        assert!(exclusion_disk_basic(0.8, 0.8 - 1e-9).unwrap().radius < 1e-9);
        assert!(exclusion_disk_basic(0.8, 0.8).is_err());
        assert!(exclusion_disk_basic(1.0, 0.5).is_err());
    }

    #[test]
    fn exclusion_refined_examples() {
        let ex = refined_exclusion(0.8, 0.7, 0.05).unwrap();
        assert_relative_eq!(ex.center, 0.697_913_852_945_339_6, max_relative = 1e-12);
        assert_relative_eq!(ex.radius, 0.035_123_904_491_731_35, max_relative = 1e-12);
        assert!(ex.holds(1e-12));
        let d = exclusion_disk_refined(0.8, 0.7, 0.05).unwrap();
        assert_eq!(d.radius, ex.radius);

        let tiny = refined_exclusion(0.5, 2e-9, 1e-9).unwrap();
        assert!(tiny.radius < 1e-9 && tiny.center < 1e-8);

        assert!(exclusion_disk_refined(0.8, 0.7, 0.25).is_err());
        assert!(exclusion_disk_refined(0.8, 0.05, 0.1).is_err());
    }

    #[test]
    fn centroid_is_preserved() {
        let roots = vec![
            c(0.9, 0.1),
            c(-0.3, 0.7),
            c(0.0, -1.0),
            c(-0.6, -0.2),
            c(0.25, 0.25),
        ];
        assert!(centroid_shift(&roots).unwrap() < 1e-12);
    }
}
