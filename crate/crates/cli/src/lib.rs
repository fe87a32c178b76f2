//! The `sendov` command line: tables, single thresholds, Sendov checks of user
//! polynomials, property suites and localization demos.
//!
//! Exit codes: 0 on success, 1 on usage, input or domain errors (and on suite
//! violations), 2 when a numerical method fails to converge.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use sendov_core::bounds::BoundContext;
use sendov_core::geometry::{localize_and_verify, sendov_report};
use sendov_core::polycore::{roots_from_json, Polynomial};
use sendov_core::propverify::{dump_failures, run_suite, Suite, SuiteReport, SuiteSpec};
use sendov_core::rootsolver::{all_roots, DEFAULT_TOL};
use sendov_core::threshold::{
    make_table, optimize_c, published_avalues, row_for, TableMode, ThresholdRow,
    DEFAULT_TOL as FIXED_POINT_TOL,
};

#[derive(Debug, Parser)]
#[command(
    name = "sendov",
    version,
    about = "Degree thresholds and numerical checks for Sendov's conjecture"
)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Significant digits in text output, in [1, 17]
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// Worker threads, >= 1 [default: available parallelism]
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold table over several values of a
    Table(TableArgs),
    /// Threshold row for a single a
    Threshold(ThresholdArgs),
    /// Distance from each zero to the nearest critical point
    Check(PolyInput),
    /// Run seeded property suites
    Verify(VerifyArgs),
    /// Disk containing a solution of P(z) = omega, checked against the solver
    Localize(LocalizeArgs),
    /// Every constant of the argument for given (a, c, m)
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Use the published c and m for each row instead of optimizing
    #[arg(long)]
    pub pinned: bool,

    /// Comma-separated values of a, each in (0, 1) [default: 0.9, 0.8, ..., 0.1]
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Root position a, in (0, 1)
    #[arg(long)]
    pub a: f64,

    /// Evaluation point c, in (0, a) [default: optimized]
    #[arg(long)]
    pub c: Option<f64>,

    /// Centroid bound m, in (0, a/2]; requires --c [default: fixed point]
    #[arg(long, requires = "c")]
    pub m: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PolyInput {
    /// JSON array of [re, im] zeros, each of modulus <= 1
    #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
    pub roots: Option<PathBuf>,

    /// JSON array of [re, im] coefficients, constant term first
    #[arg(long)]
    pub poly: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`: lemma1, maj_deri, min_deri, min_reste, sym, mini,
    /// localize, walsh, bisector, gauss_lucas, sendov_smoke, centroid,
    /// exclusion_containment
    #[arg(long)]
    pub suite: String,

    /// Number of trials, >= 1
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Seed, any unsigned 64-bit integer
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Largest sampled degree, in [2, 32]
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(2..=32))]
    pub max_degree: u64,

    /// Directory receiving offending configurations as root-list JSON
    #[arg(long)]
    pub dump_failures: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[command(flatten)]
    pub input: PolyInput,

    /// Starting point delta as `re,im`, with P'(delta) != 0
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub delta: Complex64,

    /// Target value omega as `re,im` [default: 0]
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub omega: Complex64,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Root position a, in (0, 1)
    #[arg(long)]
    pub a: f64,
    /// Evaluation point c, in (0, a)
    #[arg(long)]
    pub c: f64,
    /// Centroid bound m, in (0, a/2]
    #[arg(long)]
    pub m: f64,
}

/// Accepts `re,im`, `[re,im]` or a bare real number.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected `re,im`, got `{s}`")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite complex number `{s}`"))
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    Core(sendov_core::Error),
    Violations(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => format!("usage error: {msg}"),
            CliError::Io { path, source } => format!("io error: {}: {source}", path.display()),
            CliError::Json { path, source } => format!("input error: {}: {source}", path.display()),
            CliError::Core(e) if e.is_numerical() => format!("numerical error: {e}"),
            CliError::Core(e) => format!("error: {e}"),
            CliError::Violations(msg) => format!("verification failed: {msg}"),
        }
    }
}

impl From<sendov_core::Error> for CliError {
    fn from(e: sendov_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Primary output, plus a failure that should still set the exit code after
/// the output has been written (per-row table errors, suite violations).
struct Output {
    text: String,
    failure: Option<CliError>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output {
            text,
            failure: None,
        }
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "usage error: {}", e.render());
                    1
                }
            };
        }
    };
    let threads = cli.jobs.map(usize::from).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "usage error: cannot start {threads} workers: {e}");
            return 1;
        }
    };
    let output = match pool.install(|| execute(&cli)) {
        Ok(output) => output,
        Err(e) => {
            let _ = writeln!(err, "{}", e.message());
            return e.exit_code();
        }
    };
    if let Err(e) = out.write_all(output.text.as_bytes()) {
        let _ = writeln!(err, "io error: <stdout>: {e}");
        return 1;
    }
    match output.failure {
        Some(e) => {
            let _ = writeln!(err, "{}", e.message());
            e.exit_code()
        }
        None => 0,
    }
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let fmt = Formatter {
        format: cli.format,
        digits: cli.precision as usize,
    };
    match &cli.command {
        Command::Table(args) => table(args, &fmt),
        Command::Threshold(args) => threshold(args, &fmt).map(Output::from),
        Command::Check(input) => check(input, &fmt).map(Output::from),
        Command::Verify(args) => verify(args, &fmt),
        Command::Localize(args) => localize(args, &fmt).map(Output::from),
        Command::Constants(args) => constants(args, &fmt).map(Output::from),
    }
}

struct Formatter {
    format: Format,
    digits: usize,
}

impl Formatter {
    /// `digits` significant digits, fixed notation for moderate exponents.
    fn num(&self, x: f64) -> String {
        if x == 0.0 || !x.is_finite() {
            return format!("{x}");
        }
        let exp = x.abs().log10().floor() as i32;
        if (-5..self.digits as i32).contains(&exp) {
            let decimals = (self.digits as i32 - 1 - exp).max(0) as usize;
            let s = format!("{x:.decimals$}");
            if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        } else {
            format!("{x:.*e}", self.digits - 1)
        }
    }

    fn complex(&self, z: Complex64) -> String {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{} {sign} {}i", self.num(z.re), self.num(z.im.abs()))
    }

    fn json<T: serde::Serialize + ?Sized>(&self, value: &T) -> String {
        serde_json::to_string_pretty(value).expect("serializable") + "\n"
    }

    fn no_csv(&self, command: &str) -> CliResult<()> {
        if self.format == Format::Csv {
            return Err(CliError::Usage(format!(
                "csv output is not available for `{command}`"
            )));
        }
        Ok(())
    }
}

fn check_a(a: f64) -> CliResult<()> {
    if 0.0 < a && a < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--a must lie in (0, 1), got {a}")))
    }
}

fn check_c(a: f64, c: f64) -> CliResult<()> {
    if 0.0 < c && c < a {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--c must lie in (0, a) = (0, {a}), got {c}"
        )))
    }
}

fn check_m(a: f64, m: f64) -> CliResult<()> {
    if 0.0 < m && m <= a / 2.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--m must lie in (0, a/2] = (0, {}], got {m}",
            a / 2.0
        )))
    }
}

fn row_text(fmt: &Formatter, row: &ThresholdRow) -> String {
    let f = |x| fmt.num(x);
    let mut s = format!(
        "a = {}  c = {}  m = {}\n  r = {}  alpha = {}  p = {}  q = {}  K = {}\n  N = {} (N1 = {}, N2 = {}, N3 = {})",
        f(row.a), f(row.c), f(row.m), f(row.r), f(row.alpha), f(row.p), f(row.q), f(row.k),
        row.n, row.n1, row.n2, row.n3
    );
    if row.flagged {
        let _ = write!(s, "  [flagged: max(N1, N2, N3) = {}]", row.n_max);
    }
    s.push('\n');
    s
}

fn rows_output(
    fmt: &Formatter,
    rows: &[(f64, Result<ThresholdRow, sendov_core::Error>)],
) -> String {
    match fmt.format {
        Format::Csv => {
            let mut s = format!("{}\n", ThresholdRow::CSV_HEADER);
            for row in rows.iter().filter_map(|(_, r)| r.as_ref().ok()) {
                s.push_str(&row.csv_line());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|(a, r)| match r {
                    Ok(row) => serde_json::to_value(row).expect("serializable"),
                    Err(e) => json!({ "a": a, "error": e.to_string() }),
                })
                .collect();
            fmt.json(&values)
        }
        Format::Text => rows
            .iter()
            .map(|(a, r)| match r {
                Ok(row) => row_text(fmt, row),
                Err(e) => format!("a = {}  error: {e}\n", fmt.num(*a)),
            })
            .collect(),
    }
}

/// The most severe per-row failure, if any row failed.
fn worst_row_error(rows: &[(f64, Result<ThresholdRow, sendov_core::Error>)]) -> Option<CliError> {
    let mut errors: Vec<&sendov_core::Error> =
        rows.iter().filter_map(|(_, r)| r.as_ref().err()).collect();
    errors.sort_by_key(|e| !e.is_numerical());
    errors.first().map(|e| CliError::Core((*e).clone()))
}

fn table(args: &TableArgs, fmt: &Formatter) -> CliResult<Output> {
    let avalues = if args.a.is_empty() {
        published_avalues()
    } else {
        args.a.clone()
    };
    for &a in &avalues {
        check_a(a)?;
    }
    let mode = if args.pinned {
        TableMode::Pinned
    } else {
        TableMode::Free
    };
    let rows: Vec<_> = avalues
        .iter()
        .copied()
        .zip(make_table(&avalues, mode))
        .collect();
    Ok(Output {
        text: rows_output(fmt, &rows),
        failure: worst_row_error(&rows),
    })
}

fn threshold(args: &ThresholdArgs, fmt: &Formatter) -> CliResult<String> {
    check_a(args.a)?;
    if let Some(c) = args.c {
        check_c(args.a, c)?;
    }
    if let Some(m) = args.m {
        check_m(args.a, m)?;
    }
    let row = match (args.c, args.m) {
        (Some(c), Some(m)) => ThresholdRow::evaluate(args.a, c, m),
        (Some(c), None) => row_for(args.a, c, FIXED_POINT_TOL),
        (None, _) => optimize_c(args.a).map(|(_, row)| row),
    }?;
    Ok(rows_output(fmt, &[(args.a, Ok(row))]))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_pairs(path: &Path) -> CliResult<Vec<Complex64>> {
    roots_from_json(&read_file(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Zeros and polynomial from either input form.
fn load(input: &PolyInput) -> CliResult<(Vec<Complex64>, Polynomial)> {
    match (&input.roots, &input.poly) {
        (Some(path), _) => {
            let roots = read_pairs(path)?;
            let p = Polynomial::from_roots(&roots);
            Ok((roots, p))
        }
        (None, Some(path)) => {
            let p = Polynomial::new(read_pairs(path)?);
            if p.degree() == 0 {
                return Err(CliError::Usage(
                    "the polynomial must have degree >= 1".into(),
                ));
            }
            let roots = all_roots(&p, DEFAULT_TOL)?.roots;
            Ok((roots, p))
        }
        (None, None) => Err(CliError::Usage(
            "one of --roots or --poly is required".into(),
        )),
    }
}

fn check(input: &PolyInput, fmt: &Formatter) -> CliResult<String> {
    fmt.no_csv("check")?;
    let (roots, _) = load(input)?;
    let report = sendov_report(&roots)?;
    Ok(match fmt.format {
        Format::Json => fmt.json(&report),
        _ => {
            let mut s = format!(
                "{}\n",
                if report.satisfied {
                    "satisfied"
                } else {
                    "violated"
                }
            );
            for r in &report.minima {
                let _ = writeln!(s, "{}  {}", fmt.complex(r.root), fmt.num(r.min_distance));
            }
            s
        }
    })
}

fn verify(args: &VerifyArgs, fmt: &Formatter) -> CliResult<Output> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse().map_err(|_| {
            CliError::Usage(format!(
                "unknown suite `{}` (see `verify --help`)",
                args.suite
            ))
        })?]
    };
    let reports = suites
        .iter()
        .map(|&suite| {
            run_suite(&SuiteSpec::new(
                suite,
                args.trials,
                args.seed,
                args.max_degree as usize,
            )?)
        })
        .collect::<Result<Vec<SuiteReport>, _>>()?;
    if let Some(dir) = &args.dump_failures {
        for report in &reports {
            dump_failures(report, dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
        }
    }
    let text = match fmt.format {
        Format::Json => fmt.json(&reports),
        Format::Csv => {
            let mut s = String::from(
                "suite,trials,violations,errors,worst_margin,worst_trial,seed,max_degree\n",
            );
            for r in &reports {
                let worst_trial = r.worst_trial.map(|t| t.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{:e},{},{},{}",
                    r.suite,
                    r.trials,
                    r.violations,
                    r.errors,
                    r.worst_margin,
                    worst_trial,
                    r.seed,
                    r.max_degree
                );
            }
            s
        }
        Format::Text => reports
            .iter()
            .map(|r| {
                format!(
                    "{:<22} trials {}  violations {}  errors {}  worst margin {}\n",
                    r.suite.id(),
                    r.trials,
                    r.violations,
                    r.errors,
                    fmt.num(r.worst_margin)
                )
            })
            .collect(),
    };
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.suite.id())
        .collect();
    Ok(Output {
        text,
        failure: (!failing.is_empty()).then(|| {
            CliError::Violations(format!(
                "suites with violations or errors: {}",
                failing.join(", ")
            ))
        }),
    })
}

fn localize(args: &LocalizeArgs, fmt: &Formatter) -> CliResult<String> {
    fmt.no_csv("localize")?;
    let (_, p) = load(&args.input)?;
    if p.degree() == 0 {
        return Err(CliError::Usage(
            "the polynomial must have degree >= 1".into(),
        ));
    }
    let loc = localize_and_verify(&p, args.delta, args.omega)?;
    Ok(match fmt.format {
        Format::Json => fmt.json(&json!({
            "delta": [args.delta.re, args.delta.im],
            "omega": [args.omega.re, args.omega.im],
            "center": [loc.disk.center.re, loc.disk.center.im],
            "radius": loc.disk.radius,
            "nearest": [loc.nearest.re, loc.nearest.im],
            "distance": loc.distance,
            "value_error": loc.value_error,
            "contains_solution": loc.holds(),
        })),
        _ => format!(
            "disk: center {}  radius {}\nnearest solution: {}  distance {}  |P(z) - omega| {}\n{}\n",
            fmt.complex(loc.disk.center),
            fmt.num(loc.disk.radius),
            fmt.complex(loc.nearest),
            fmt.num(loc.distance),
            fmt.num(loc.value_error),
            if loc.holds() { "contains a solution" } else { "NO solution inside" }
        ),
    })
}

fn constants(args: &ConstantsArgs, fmt: &Formatter) -> CliResult<String> {
    check_a(args.a)?;
    check_c(args.a, args.c)?;
    check_m(args.a, args.m)?;
    let ctx = BoundContext::new(args.a, args.c, args.m)?;
    let value = serde_json::to_value(ctx).expect("serializable");
    let fields = value.as_object().expect("record");
    Ok(match fmt.format {
        Format::Json => fmt.json(&value),
        Format::Csv => {
            let keys: Vec<&str> = fields.keys().map(String::as_str).collect();
            let vals: Vec<String> = fields.values().map(|v| v.to_string()).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        Format::Text => fields
            .iter()
            .map(|(k, v)| match v.as_f64() {
                Some(x) if !v.is_u64() => format!("{k:<6} {}\n", fmt.num(x)),
                _ => format!("{k:<6} {v}\n"),
            })
            .collect(),
    })
}
