//! Seeded randomized suites for every inequality and geometric statement.
//!
//! Each trial owns a ChaCha8 stream keyed by `(seed, trial index)`: the seed
//! selects the key, the trial index selects the stream. Trials therefore draw
//! the same numbers regardless of how they are scheduled across threads, and
//! aggregation runs over the collected outcomes in trial order.
//!
//! A trial produces a *margin*: a signed slack that is nonnegative when the
//! checked statement holds (solver allowances are folded into the margin).
//! A violation is a margin below `-VIOLATION_TOL`. Sampler or solver failures
//! are counted separately as errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::geometry;
use crate::polycore::{roots_to_json, Polynomial};
use crate::rootsolver::{all_roots, DEFAULT_TOL};

pub const VIOLATION_TOL: f64 = 1e-9;
/// Relative shrink applied to every parameter interval before drawing.
pub const ENDPOINT_MARGIN: f64 = 1e-3;
pub const MIN_ACCEPTANCE_RATE: f64 = 1e-4;
const MAX_RECORDED_FAILURES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma1,
    MajDeri,
    MinDeri,
    MinReste,
    Sym,
    Mini,
    Localize,
    Walsh,
    Bisector,
    GaussLucas,
    SendovSmoke,
    Centroid,
    ExclusionContainment,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Lemma1,
        Suite::MajDeri,
        Suite::MinDeri,
        Suite::MinReste,
        Suite::Sym,
        Suite::Mini,
        Suite::Localize,
        Suite::Walsh,
        Suite::Bisector,
        Suite::GaussLucas,
        Suite::SendovSmoke,
        Suite::Centroid,
        Suite::ExclusionContainment,
    ];

    pub const LEMMAS: [Suite; 6] = [
        Suite::Lemma1,
        Suite::MajDeri,
        Suite::MinDeri,
        Suite::MinReste,
        Suite::Sym,
        Suite::Mini,
    ];

    pub const GEOMETRIC: [Suite; 5] = [
        Suite::Localize,
        Suite::Walsh,
        Suite::Bisector,
        Suite::GaussLucas,
        Suite::Centroid,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::MajDeri => "maj_deri",
            Suite::MinDeri => "min_deri",
            Suite::MinReste => "min_reste",
            Suite::Sym => "sym",
            Suite::Mini => "mini",
            Suite::Localize => "localize",
            Suite::Walsh => "walsh",
            Suite::Bisector => "bisector",
            Suite::GaussLucas => "gauss_lucas",
            Suite::SendovSmoke => "sendov_smoke",
            Suite::Centroid => "centroid",
            Suite::ExclusionContainment => "exclusion_containment",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.id() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub max_degree: usize,
}

impl SuiteSpec {
    pub fn new(suite: Suite, trials: u64, seed: u64, max_degree: usize) -> Result<Self> {
        let spec = SuiteSpec {
            suite,
            trials,
            seed,
            max_degree,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::domain("trials must be >= 1"));
        }
        if !(2..=32).contains(&self.max_degree) {
            return Err(Error::domain(format!(
                "max_degree must lie in [2, 32], got {}",
                self.max_degree
            )));
        }
        Ok(())
    }
}

/// A configuration that violated its statement or failed to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(with = "crate::polycore::complex_pairs")]
    pub points: Vec<Complex64>,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: u64,
    pub violations: u64,
    pub errors: u64,
    /// Most negative margin observed (or the smallest positive one).
    pub worst_margin: f64,
    pub worst_trial: Option<u64>,
    pub seed: u64,
    pub max_degree: usize,
    /// Up to 64 offending configurations, in trial order.
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.errors == 0
    }
}

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform draw in `(lo, hi)` shrunk by [`ENDPOINT_MARGIN`] at both ends.
pub fn draw_inside<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen();
    lo + (hi - lo) * (ENDPOINT_MARGIN + (1.0 - 2.0 * ENDPOINT_MARGIN) * u)
}

/// Sampling regions for hypotheses of the lemmas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// Closed unit disk, by rejection from the square.
    UnitDisk,
    /// Unit circle.
    UnitCircle,
    /// `|z| <= 1` and `|z - a| >= 1`, by rejection from a covering strip.
    LensComplement { a: f64 },
    /// The boundary of the lens complement where the extremal cases live: the
    /// arc `|z - a| = 1` inside the disk and the segment `[-1, a - 1]`.
    LensBoundary { a: f64 },
    /// `0 < |z| <= 1` and `|(c - z)/(1 - c z)| >= r`, by rejection.
    AnnulusMoebius { c: f64, r: f64 },
    /// Real points in `[(c + r)/(1 + c r), 1]`, extremal for the Moebius lemma.
    MoebiusExtremal { c: f64, r: f64 },
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::UnitDisk => "unit_disk",
            Region::UnitCircle => "unit_circle",
            Region::LensComplement { .. } => "lens_complement",
            Region::LensBoundary { .. } => "lens_boundary",
            Region::AnnulusMoebius { .. } => "annulus_moebius",
            Region::MoebiusExtremal { .. } => "moebius_extremal",
        }
    }

    const SLACK: f64 = 1e-12;

    /// Membership test used both for rejection and for the post-hoc check.
    pub fn contains(&self, z: Complex64) -> bool {
        let s = Self::SLACK;
        match *self {
            Region::UnitDisk => z.norm() <= 1.0,
            Region::UnitCircle => (z.norm() - 1.0).abs() <= s,
            Region::LensComplement { a } => z.norm() <= 1.0 && (z - a).norm() >= 1.0,
            Region::LensBoundary { a } => z.norm() <= 1.0 + s && (z - a).norm() >= 1.0 - s,
            Region::AnnulusMoebius { c, r } => {
                let n = z.norm();
                n > 0.0 && n <= 1.0 && moebius_distance(c, z) >= r
            }
            Region::MoebiusExtremal { c, r } => {
                let n = z.norm();
                n > 0.0 && n <= 1.0 + s && moebius_distance(c, z) >= r * (1.0 - s)
            }
        }
    }

    fn valid(&self) -> bool {
        match *self {
            Region::UnitDisk | Region::UnitCircle => true,
            Region::LensComplement { a } | Region::LensBoundary { a } => 0.0 < a && a < 1.0,
            Region::AnnulusMoebius { c, r } | Region::MoebiusExtremal { c, r } => {
                0.0 < c && c < 1.0 && 0.0 < r && r < 1.0 - c
            }
        }
    }
}

/// `|(c - z)/(1 - c z)|` for real `c`.
pub fn moebius_distance(c: f64, z: Complex64) -> f64 {
    ((c - z) / (1.0 - c * z)).norm()
}

fn square_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// One candidate draw for `region`, before the membership test.
fn propose<R: Rng + ?Sized>(region: Region, rng: &mut R) -> Complex64 {
    match region {
        Region::UnitDisk | Region::AnnulusMoebius { .. } => square_point(rng),
        // The crescent's horizontal slice at height y starts at -sqrt(1 - y^2)
        // and is at most `a` wide, so a sheared strip of width `a` covers it
        // with an acceptance rate near one even for tiny `a`.
        Region::LensComplement { a } => {
            let y: f64 = rng.gen_range(-1.0..=1.0);
            let x = -(1.0 - y * y).sqrt() + a * rng.gen::<f64>();
            Complex64::new(x, y)
        }
        Region::UnitCircle => Complex64::from_polar(1.0, rng.gen_range(-PI..PI)),
        Region::LensBoundary { a } => {
            if rng.gen_bool(0.5) {
                // arc |z - a| = 1, restricted to the unit disk: Re z <= a/2
                let half = (a / 2.0).acos();
                let theta = rng.gen_range(half..=2.0 * PI - half);
                Complex64::new(a, 0.0) + Complex64::from_polar(1.0, theta)
            } else {
                Complex64::new(rng.gen_range(-1.0..=a - 1.0), 0.0)
            }
        }
        Region::MoebiusExtremal { c, r } => {
            let lo = (c + r) / (1.0 + c * r);
            Complex64::new(rng.gen_range(lo..=1.0), 0.0)
        }
    }
}

/// Draw `n` points from `region`; every point is re-verified before returning.
pub fn sample_config<R: Rng + ?Sized>(
    region: Region,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !region.valid() {
        return Err(Error::domain(format!("empty or invalid region {region:?}")));
    }
    let budget = ((n.max(1) as f64) / MIN_ACCEPTANCE_RATE) as u64;
    let mut attempts = 0u64;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::RejectionBudget {
                region: region.name().to_string(),
                attempts: budget,
            });
        }
        let z = propose(region, rng);
        if region.contains(z) {
            out.push(z);
        }
    }
    debug_assert!(out.iter().all(|&z| region.contains(z)));
    Ok(out)
}

/// Each point from `boundary` with probability `p_boundary`, else from `bulk`.
fn sample_mixed<R: Rng + ?Sized>(
    bulk: Region,
    boundary: Region,
    p_boundary: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let region = if rng.gen_bool(p_boundary) {
            boundary
        } else {
            bulk
        };
        out.extend(sample_config(region, 1, rng)?);
    }
    Ok(out)
}

fn random_complex_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen_range(-PI..PI))
}

/// A polynomial with zeros in the closed unit disk and a random leading
/// coefficient of modulus in `[0.5, 2]`.
fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
) -> Result<(Vec<Complex64>, Polynomial)> {
    let roots = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.25, degree, rng)?;
    let lead = Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(-3.0..3.0));
    let p = Polynomial::from_roots(&roots).scale(lead);
    Ok((roots, p))
}

/// What a trial leaves behind for reporting and replay.
#[derive(Default)]
struct Trial {
    points: Vec<Complex64>,
    params: BTreeMap<String, f64>,
}

impl Trial {
    fn param(&mut self, name: &str, value: f64) -> f64 {
        self.params.insert(name.to_string(), value);
        value
    }
}

fn degree_in<R: Rng + ?Sized>(rng: &mut R, lo: usize, max_degree: usize) -> usize {
    rng.gen_range(lo..=max_degree.max(lo))
}

fn sum_ln(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::ln).sum()
}

fn run_trial(suite: Suite, seed: u64, index: u64, max_degree: usize) -> (Trial, Result<f64>) {
    let mut rng = trial_rng(seed, index);
    let mut t = Trial::default();
    let result = trial_body(suite, &mut rng, max_degree, &mut t);
    (t, result)
}

fn trial_body(suite: Suite, rng: &mut ChaCha8Rng, max_degree: usize, t: &mut Trial) -> Result<f64> {
    match suite {
        Suite::Lemma1 => {
            let n = degree_in(rng, 1, max_degree);
            let delta = t.param("delta", draw_inside(rng, 0.0, 1.0));
            t.points = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.5, n, rng)?;
            let s = t.param("s", t.points.iter().map(|z| z.re).sum::<f64>() / n as f64);
            let log_bound = n as f64 * 0.5 * (1.0 + delta * delta - 2.0 * delta * s).ln();
            bounds::lemma1_bound(delta, s.clamp(-1.0, 1.0), n)?;
            let log_prod = sum_ln(t.points.iter().map(|z| (delta - z).norm()));
            Ok(1.0 - (log_prod - log_bound).exp())
        }
        Suite::MajDeri | Suite::MinDeri => {
            let m = degree_in(rng, 1, max_degree - 1);
            let a = t.param("a", draw_inside(rng, 0.0, 1.0));
            t.points = sample_mixed(
                Region::LensComplement { a },
                Region::LensBoundary { a },
                0.5,
                m,
                rng,
            )?;
            let s = t.param("s", t.points.iter().map(|z| z.re).sum::<f64>() / m as f64);
            let s = s.min(a / 2.0);
            if suite == Suite::MajDeri {
                let delta = t.param("delta", draw_inside(rng, 0.0, a));
                let bound = bounds::lemma_a_bound(delta, a, s)?;
                let log_ratio = sum_ln(t.points.iter().map(|z| (delta - z).norm()))
                    - sum_ln(t.points.iter().map(|z| (a - z).norm()));
                Ok(1.0 - (log_ratio - m as f64 * bound.ln()).exp())
            } else {
                let b = t.param("b", draw_inside(rng, 1.0, 3.0));
                let bound = bounds::lemma_b_bound(b, a, s)?;
                let log_prod = sum_ln(t.points.iter().map(|z| (b - z).norm()));
                Ok((log_prod - m as f64 * bound.ln()).exp() - 1.0)
            }
        }
        Suite::MinReste => {
            let n = degree_in(rng, 1, max_degree);
            let c = t.param("c", draw_inside(rng, 0.0, 1.0));
            let r = t.param("r", draw_inside(rng, 0.0, 1.0 - c));
            t.points = sample_mixed(
                Region::AnnulusMoebius { c, r },
                Region::MoebiusExtremal { c, r },
                0.5,
                n,
                rng,
            )?;
            let prodabs = t.param(
                "prodabs",
                t.points.iter().map(|z| z.norm()).product::<f64>(),
            );
            let beta = bounds::moebius_exponent(c, r, prodabs.min(1.0))?;
            let log_prod = sum_ln(t.points.iter().map(|&z| moebius_distance(c, z)));
            Ok((log_prod - beta * r.ln()).exp() - 1.0)
        }
        Suite::Sym => {
            let h = t.param("h", draw_inside(rng, 0.0, 1.0));
            let c = t.param("c", draw_inside(rng, 0.0, 1.0 - h));
            let modulus = if rng.gen_bool(0.5) {
                1.0
            } else {
                rng.gen_range(1.0 - h..=1.5)
            };
            let z = Complex64::from_polar(modulus, rng.gen_range(-PI..PI));
            t.points = vec![z];
            let sides = bounds::sym_check(c, h, z)?;
            Ok(sides.slack() / (1.0 + sides.lhs))
        }
        Suite::Mini => {
            let n = degree_in(rng, 1, max_degree);
            let b = t.param("b", draw_inside(rng, 1.0, 3.0));
            t.points = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.25, n, rng)?;
            let sides = bounds::mini_check(&Polynomial::from_roots(&t.points), b)?;
            Ok(sides.slack() / sides.lhs)
        }
        Suite::Localize => {
            let n = degree_in(rng, 1, max_degree);
            let (roots, p) = random_polynomial(rng, n)?;
            t.points = roots;
            let delta = random_complex_in_disk(rng, 1.5);
            let omega = random_complex_in_disk(rng, 2.0);
            t.param("delta_re", delta.re);
            t.param("delta_im", delta.im);
            t.param("omega_re", omega.re);
            t.param("omega_im", omega.im);
            let loc = geometry::localize_and_verify(&p, delta, omega)?;
            let value_slack = 1e-7 - loc.value_error;
            Ok((loc.margin() / (1.0 + loc.disk.radius)).min(value_slack))
        }
        Suite::Walsh => {
            let n = degree_in(rng, 1, max_degree);
            let deg = rng.gen_range(1..=n);
            let (roots, p) = random_polynomial(rng, deg)?;
            let alphas = sample_config(Region::UnitDisk, n, rng)?;
            t.param("degree", deg as f64);
            t.points = alphas.clone();
            t.points.extend(roots);
            let w = geometry::walsh_witness(&p, &alphas)?;
            Ok(w.margin / (1.0 + w.region.radius))
        }
        Suite::Bisector => {
            let n = degree_in(rng, 2, max_degree);
            let (roots, p) = random_polynomial(rng, n)?;
            t.points = roots;
            let alpha = random_complex_in_disk(rng, 1.2);
            t.param("alpha_re", alpha.re);
            t.param("alpha_im", alpha.im);
            let omega = p.eval(alpha);
            let solutions = all_roots(&p.shift_value(omega), DEFAULT_TOL)?;
            let others: Vec<Complex64> = solutions
                .roots
                .into_iter()
                .filter(|z| (z - alpha).norm() > 1e-6)
                .collect();
            if others.is_empty() {
                return Err(Error::Precondition(
                    "no second preimage distinct from alpha".into(),
                ));
            }
            let beta = others[rng.gen_range(0..others.len())];
            t.param("beta_re", beta.re);
            t.param("beta_im", beta.im);
            let margin = geometry::bisector_margin(&p, alpha, beta)?;
            Ok(margin / (1.0 + alpha.norm().max(beta.norm())))
        }
        Suite::GaussLucas => {
            let n = degree_in(rng, 2, max_degree);
            t.points = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.5, n, rng)?;
            let criticals = geometry::critical_points(&Polynomial::from_roots(&t.points))?;
            let worst = criticals.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(1.0 + geometry::GAUSS_LUCAS_SLACK - worst)
        }
        Suite::SendovSmoke => {
            let n = degree_in(rng, 2, max_degree);
            t.points = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.5, n, rng)?;
            let report = geometry::sendov_report(&t.points)?;
            Ok(1.0 + VIOLATION_TOL - report.worst())
        }
        Suite::Centroid => {
            let n = degree_in(rng, 2, max_degree);
            t.points = sample_mixed(Region::UnitDisk, Region::UnitCircle, 0.25, n, rng)?;
            Ok(1e-8 - geometry::centroid_shift(&t.points)?)
        }
        Suite::ExclusionContainment => {
            let h = t.param("h", draw_inside(rng, 0.0, 0.5));
            let a = t.param("a", draw_inside(rng, h, 1.0 - h));
            let c = t.param("c", draw_inside(rng, h, a));
            let ex = geometry::refined_exclusion(a, c, h)?;
            Ok(ex.containment.min(ex.reduced).min(ex.radius_gap))
        }
    }
}

/// Run every trial of a suite; trials may execute on any number of threads.
pub fn run_suite(spec: &SuiteSpec) -> Result<SuiteReport> {
    spec.validate()?;
    let outcomes: Vec<(Trial, Result<f64>)> = (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(spec.suite, spec.seed, i, spec.max_degree))
        .collect();

    let mut report = SuiteReport {
        suite: spec.suite,
        trials: spec.trials,
        violations: 0,
        errors: 0,
        worst_margin: f64::INFINITY,
        worst_trial: None,
        seed: spec.seed,
        max_degree: spec.max_degree,
        failures: Vec::new(),
    };
    for (index, (trial, outcome)) in outcomes.into_iter().enumerate() {
        let index = index as u64;
        let failure = match outcome {
            Ok(margin) => {
                if margin < report.worst_margin || margin.is_nan() {
                    report.worst_margin = margin;
                    report.worst_trial = Some(index);
                }
                if margin < -VIOLATION_TOL || margin.is_nan() {
                    report.violations += 1;
                    Some(Failure {
                        trial: index,
                        margin: Some(margin),
                        error: None,
                        points: trial.points,
                        params: trial.params,
                    })
                } else {
                    None
                }
            }
            Err(err) => {
                report.errors += 1;
                Some(Failure {
                    trial: index,
                    margin: None,
                    error: Some(err.to_string()),
                    points: trial.points,
                    params: trial.params,
                })
            }
        };
        if let Some(f) = failure {
            if report.failures.len() < MAX_RECORDED_FAILURES {
                report.failures.push(f);
            }
        }
    }
    Ok(report)
}

/// Write each recorded failure as `<suite>-<trial>.roots.json` (root-list
/// format) plus `<suite>-<trial>.params.json`.
pub fn dump_failures(report: &SuiteReport, dir: &Path) -> std::io::Result<usize> {
    fs::create_dir_all(dir)?;
    for f in &report.failures {
        let stem = format!("{}-{}", report.suite, f.trial);
        fs::write(
            dir.join(format!("{stem}.roots.json")),
            roots_to_json(&f.points),
        )?;
        let params = serde_json::to_string_pretty(&f.params).map_err(std::io::Error::other)?;
        fs::write(dir.join(format!("{stem}.params.json")), params)?;
    }
    Ok(report.failures.len())
}
