//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use sendov_core::geometry::refined_exclusion;
use sendov_core::polycore::{InnerProductSpace, Polynomial};
use sendov_core::propverify::{run_suite, trial_rng, Suite, SuiteReport, SuiteSpec};
use sendov_core::threshold::{
    fixed_point_m, make_table, published_avalues, published_row_for, PinnedComparison, TableMode,
};

const SEED: u64 = 42;

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!(
        "{}; {:.2}s (limit {}s)",
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    out.ok &= elapsed < limit;
    out
}

fn table_pinned() -> Outcome {
    let rows = make_table(&published_avalues(), TableMode::Pinned);
    let mut bad = Vec::new();
    for row in &rows {
        match row {
            Ok(row) => {
                let printed = published_row_for(row.a).unwrap();
                if !PinnedComparison::new(row, printed).within_last_digit(printed) {
                    bad.push(format!("a={}", row.a));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} rows, mismatches: {:?}", rows.len(), bad),
    )
}

fn thresholds() -> Outcome {
    let rows = make_table(&published_avalues(), TableMode::Pinned);
    let mut ok = true;
    let mut notes = Vec::new();
    for row in rows.iter().flatten() {
        let printed = published_row_for(row.a).unwrap();
        let rel = (row.n3 as f64 - printed.n as f64) / printed.n as f64;
        if (row.a - 0.8).abs() < 1e-12 {
            ok &= (row.n3 as f64 - 616.0).abs() / 616.0 <= 0.02;
        }
        if row.a >= 0.3 - 1e-12 {
            ok &= rel.abs() <= 0.03;
        }
        // the flag must be raised exactly when max(N1, N2, N3) exceeds the printed N
        ok &= row.flagged == (row.n_max > row.n3);
        let exceeds = row.n_max > printed.n;
        if exceeds {
            notes.push(format!(
                "a={} flagged (N1={}, N2={}, N3={})",
                row.a, row.n1, row.n2, row.n3
            ));
        }
    }
    ok &= rows.len() == 9 && rows.iter().all(|r| r.is_ok());
    let n08 = rows
        .iter()
        .flatten()
        .find(|r| (r.a - 0.8).abs() < 1e-12)
        .map(|r| r.n3);
    outcome(ok, format!("N3(0.8) = {n08:?}; {}", notes.join(", ")))
}

fn fixed_points() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (a, c, lo, hi) in [(0.8, 0.700, 0.095, 0.105), (0.1, 0.096, 0.027, 0.031)] {
        let start = Instant::now();
        match fixed_point_m(a, c, 1e-9) {
            Ok(fp) => {
                ok &= (lo..=hi).contains(&fp.m) && fp.residual <= 1e-4;
                ok &= start.elapsed() < Duration::from_secs(10);
                detail.push(format!(
                    "a={a}: m={:.5} N={} residual={:.1e}",
                    fp.m, fp.n, fp.residual
                ));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("a={a}: {e}"));
            }
        }
    }
    outcome(ok, detail.join("; "))
}

fn run_suites(suites: &[Suite], trials: u64, max_degree: usize) -> Vec<SuiteReport> {
    suites
        .iter()
        .map(|&s| run_suite(&SuiteSpec::new(s, trials, SEED, max_degree).unwrap()).unwrap())
        .collect()
}

fn summarize(reports: &[SuiteReport]) -> Outcome {
    let ok = reports.iter().all(SuiteReport::passed);
    let detail = reports
        .iter()
        .map(|r| {
            format!(
                "{}: {} violations, {} errors, worst {:.1e}",
                r.suite, r.violations, r.errors, r.worst_margin
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(ok, detail)
}

fn exclusion_grid() -> Outcome {
    let step = 0.01;
    let (mut points, mut failures) = (0u64, 0u64);
    let mut worst = f64::INFINITY;
    for hi in 1..100 {
        let h = hi as f64 * step;
        for ci in (hi + 1)..100 {
            let c = ci as f64 * step;
            for ai in (ci + 1)..100 {
                let a = ai as f64 * step;
                if a >= 1.0 - h {
                    break;
                }
                points += 1;
                let ex = refined_exclusion(a, c, h).unwrap();
                worst = worst.min(ex.containment);
                if ex.containment < -1e-12 || ex.reduced < 0.0 || ex.radius > 1.0 {
                    failures += 1;
                }
            }
        }
    }
    outcome(
        failures == 0 && points > 0,
        format!("{points} grid points, {failures} failures, worst containment slack {worst:.1e}"),
    )
}

fn kernel_identities() -> Outcome {
    let mut worst = 0.0f64;
    for trial in 0..1000u64 {
        let mut rng = trial_rng(SEED, trial);
        let n = rng.gen_range(1..=12usize);
        let coeffs: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let p = Polynomial::new(coeffs);
        let alpha = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let space = InnerProductSpace::new(n).unwrap();
        let (value, slope) = p.eval_with_derivative(alpha);
        let scale =
            p.coeffs().iter().map(|c| c.norm()).sum::<f64>() * (1.0 + alpha.norm()).powi(n as i32);
        let e1 = (space.inner(&p, &space.kernel(alpha)).unwrap() - value).norm() / scale;
        let e2 = (space.inner(&p, &space.derivative_kernel(alpha)).unwrap() * n as f64 - slope)
            .norm()
            / (n as f64 * scale);
        worst = worst.max(e1).max(e2);
    }
    outcome(
        worst <= 1e-9,
        format!("1000 trials, worst relative error {worst:.1e}"),
    )
}

fn determinism() -> Outcome {
    let json = |suites: &[Suite], trials, deg| {
        serde_json::to_string(&run_suites(suites, trials, deg)).unwrap()
    };
    let first = json(&Suite::LEMMAS, 10_000, 12) + &json(&Suite::GEOMETRIC, 1000, 10);
    let second = json(&Suite::LEMMAS, 10_000, 12) + &json(&Suite::GEOMETRIC, 1000, 10);
    outcome(
        first == second,
        format!("{} bytes of JSON compared", first.len()),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "1 pinned table",
            Box::new(|| timed(Duration::from_secs(1), table_pinned)),
        ),
        ("2 thresholds", Box::new(thresholds)),
        ("3 fixed point", Box::new(fixed_points)),
        (
            "4 lemma suites",
            Box::new(|| {
                timed(Duration::from_secs(60), || {
                    summarize(&run_suites(&Suite::LEMMAS, 10_000, 12))
                })
            }),
        ),
        (
            "5 geometric suites",
            Box::new(|| {
                timed(Duration::from_secs(60), || {
                    summarize(&run_suites(&Suite::GEOMETRIC, 1000, 10))
                })
            }),
        ),
        (
            "6 exclusion grid",
            Box::new(|| timed(Duration::from_secs(10), exclusion_grid)),
        ),
        ("7 kernel identities", Box::new(kernel_identities)),
        ("8 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let out = check();
        println!(
            "{} criterion {name}: {}",
            if out.ok { "PASS" } else { "FAIL" },
            out.detail
        );
        failed += usize::from(!out.ok);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
