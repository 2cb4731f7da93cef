//! The `landau-bloch` command line.
//!
//! JSON goes to standard output and diagnostics to standard error. Exit codes:
//! 0 on success, 1 when a verification suite finds violations, 2 on usage or
//! parameter errors. Every output embeds a [`RunManifest`]; its timestamp is
//! taken from `SOURCE_DATE_EPOCH` (default 0) so that identical invocations
//! print identical bytes, unless `--wall-clock` is given.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::{DateTime, SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{schlicht_radius_lower, DistortionEnvelope};
use crate::constants::BlochClassParams;
use crate::error::{Error, Result};
use crate::hardy::{hardy_landau, HardyClassParams, HardyLandauResult};
use crate::lab::{
    estimate_hardy_norm, keyed_rng, normalize_for_distortion, verify_distortion,
    verify_injectivity_sample, BoundReport, ExtremalMap, HolomorphicMap, PolyMap, SamplingConfig,
    Stream,
};
use crate::matrix::ComplexScalar;
use crate::quadrature::QuadratureConfig;

const RANDOM_POLY_MAPS: u64 = 100;
const RANDOM_POLY_MAX_DEGREE: usize = 6;
const RANDOM_POLY_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
const HARDY_MAPS: u64 = 10;
const HARDY_MAP_DEGREE: u32 = 3;
const HARDY_MAP_SCALE: f64 = 0.1;
const HARDY_NORM_SAMPLES: usize = 20_000;
const NORMALIZATION_SAMPLES: usize = 2048;
const RADIAL_GRID: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "landau-bloch",
    version,
    about = "Distortion envelopes, schlicht radii and univalence radii for holomorphic maps of the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Stamp the manifest with the current time instead of SOURCE_DATE_EPOCH (default 0).
    #[arg(long, global = true)]
    wall_clock: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Peak a0, m(lambda), admissible radii and the schlicht radius.
    Constants {
        #[command(flatten)]
        class: ClassArgs,
        /// Absolute tolerance of the schlicht-radius quadrature.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Univalence radius and covered ball for maps in the Hardy space H^p.
    Hardy {
        #[command(flatten)]
        hardy: HardyArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tabulate a distortion envelope or the schlicht radius as a function of lambda.
    Curve {
        #[arg(value_enum)]
        kind: CurveKind,
        #[command(flatten)]
        class: ClassArgs,
        /// Number of rows, at least 2.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Absolute tolerance of the schlicht-radius quadrature.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a verification suite; exits 1 if any violation is found.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Uniform sample points per admissible ball, or point pairs for hardy-injectivity.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Defaults: 1 for extremal; cycles through 0.5, 1, 2 for random-poly.
        #[arg(long)]
        alpha: Option<f64>,
        /// Defaults: 2 for extremal and hardy-injectivity.
        #[arg(long)]
        n: Option<usize>,
        /// Extremal suite only. Default 0.5.
        #[arg(long)]
        lambda: Option<f64>,
        /// Hardy exponent for hardy-injectivity.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Polynomial map in JSON form to use instead of the random maps.
        #[arg(long)]
        map_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct ClassArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Value of det f'(0), in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Bound on the alpha-Bloch semi-norm, at least 1.
    #[arg(long = "K", default_value_t = 1.0)]
    bloch_bound: f64,
}

impl ClassArgs {
    fn params(&self) -> Result<BlochClassParams> {
        BlochClassParams::new(self.alpha, self.n, self.lambda, self.bloch_bound)
    }

    fn manifest_entries(&self) -> Vec<(&'static str, Value)> {
        vec![
            ("alpha", json!(self.alpha)),
            ("n", json!(self.n)),
            ("lambda", json!(self.lambda)),
            ("K", json!(self.bloch_bound)),
        ]
    }
}

#[derive(Debug, Args)]
struct HardyArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Bound K0 on the Hardy norm.
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
    /// Value lambda0 = |det f'(0)|, at most K0.
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    Lower,
    Upper,
    SchlichtVsLambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Extremal,
    RandomPoly,
    HardyInjectivity,
}

/// Provenance record embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    fn new(command: &str, entries: Vec<(&'static str, Value)>, seed: u64, wall_clock: bool) -> Self {
        Self {
            command: command.to_string(),
            parameters: entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(wall_clock),
        }
    }
}

fn timestamp(wall_clock: bool) -> String {
    let seconds = if wall_clock {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0)
    } else {
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(0)
    };
    DateTime::<Utc>::from_timestamp(seconds, 0)
        .unwrap_or_default()
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn success(stdout: String) -> Self {
        Self {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            exit_code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(rendered)
            } else {
                Outcome::success(rendered)
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::usage(format!("error: {e}")),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Constants { class, tol, format } => {
            json_only(*format, "constants")?;
            constants(class, *tol, cli.wall_clock)
        }
        Command::Hardy { hardy, format } => {
            json_only(*format, "hardy")?;
            hardy_command(hardy, cli.wall_clock)
        }
        Command::Curve {
            kind,
            class,
            points,
            tol,
            format,
        } => curve(*kind, class, *points, *tol, *format, cli.wall_clock),
        Command::Verify {
            suite,
            seed,
            samples,
            alpha,
            n,
            lambda,
            p,
            map_file,
            format,
        } => {
            json_only(*format, "verify")?;
            let request = VerifyRequest {
                suite: *suite,
                seed: *seed,
                samples: *samples,
                alpha: *alpha,
                n: *n,
                lambda: *lambda,
                p: *p,
                map_file: map_file.clone(),
            };
            verify(&request, cli.wall_clock)
        }
    }
}

fn json_only(format: Format, command: &str) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::InvalidParameter(format!(
            "--format csv is only available for `curve`, not `{command}`"
        )));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output records serialize");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ConstantsRecord {
    a0: f64,
    m_lambda: f64,
    admissible_lower_radius: f64,
    admissible_upper_radius: f64,
    schlicht_radius_lower: f64,
}

fn constants(class: &ClassArgs, tol: f64, wall_clock: bool) -> Result<Outcome> {
    let params = class.params()?;
    let quadrature = QuadratureConfig::new(tol, 500)?;
    let envelope = DistortionEnvelope::new(params)?;
    let radii = envelope.radii();
    let record = ConstantsRecord {
        a0: envelope.peak(),
        m_lambda: envelope.root(),
        admissible_lower_radius: radii.lower_domain,
        admissible_upper_radius: radii.upper_domain,
        schlicht_radius_lower: schlicht_radius_lower(&params, &quadrature)?,
    };
    let mut entries = class.manifest_entries();
    entries.push(("tol", json!(tol)));
    let manifest = RunManifest::new("constants", entries, 0, wall_clock);
    Ok(Outcome::success(to_json(&json!({
        "manifest": manifest,
        "result": record,
    }))))
}

fn hardy_command(args: &HardyArgs, wall_clock: bool) -> Result<Outcome> {
    let params = HardyClassParams::new(args.p, args.n, args.k0, args.lambda0)?;
    let result: HardyLandauResult = hardy_landau(&params)?;
    let entries = vec![
        ("p", json!(args.p)),
        ("n", json!(args.n)),
        ("k0", json!(args.k0)),
        ("lambda0", json!(args.lambda0)),
    ];
    let manifest = RunManifest::new("hardy", entries, 0, wall_clock);
    Ok(Outcome::success(to_json(&json!({
        "manifest": manifest,
        "result": result,
    }))))
}

fn curve(
    kind: CurveKind,
    class: &ClassArgs,
    points: usize,
    tol: f64,
    format: Format,
    wall_clock: bool,
) -> Result<Outcome> {
    if points < 2 {
        return Err(Error::InvalidParameter(format!("--points must be at least 2, got {points}")));
    }
    let params = class.params()?;
    let envelope = DistortionEnvelope::new(params)?;
    let radii = envelope.radii();
    let grid = |end: f64| -> Vec<f64> {
        (0..points)
            .map(|k| (end * k as f64 / (points - 1) as f64).min(end))
            .collect()
    };
    let (name, columns, rows): (&str, [&str; 2], Vec<[f64; 2]>) = match kind {
        CurveKind::Lower => (
            "lower",
            ["z_abs", "lower_envelope"],
            grid(radii.lower_domain)
                .into_iter()
                .map(|t| Ok([t, envelope.lower(t)?]))
                .collect::<Result<_>>()?,
        ),
        CurveKind::Upper => {
            if radii.upper_domain <= 0.0 {
                return Err(Error::Domain {
                    operation: "curve upper",
                    detail: "the upper envelope is only defined at |z| = 0 when lambda = 1".into(),
                });
            }
            (
                "upper",
                ["z_abs", "upper_envelope"],
                grid(radii.upper_domain)
                    .into_iter()
                    .map(|t| Ok([t, envelope.upper(t)?]))
                    .collect::<Result<_>>()?,
            )
        }
        CurveKind::SchlichtVsLambda => {
            let quadrature = QuadratureConfig::new(tol, 500)?;
            let rows = (1..=points)
                .map(|k| {
                    let lambda = k as f64 / points as f64;
                    Ok([lambda, schlicht_radius_lower(&params.with_lambda(lambda)?, &quadrature)?])
                })
                .collect::<Result<_>>()?;
            ("schlicht-vs-lambda", ["lambda", "schlicht_radius_lower"], rows)
        }
    };
    let mut entries = class.manifest_entries();
    entries.push(("kind", json!(name)));
    entries.push(("points", json!(points)));
    if kind == CurveKind::SchlichtVsLambda {
        entries.push(("tol", json!(tol)));
    }
    let manifest = RunManifest::new("curve", entries, 0, wall_clock);
    let stdout = match format {
        Format::Json => to_json(&json!({
            "manifest": manifest,
            "kind": name,
            "columns": columns,
            "rows": rows,
        })),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# {}", serde_json::to_string(&manifest).expect("manifest serializes"));
            let _ = writeln!(out, "{},{}", columns[0], columns[1]);
            for [x, y] in rows {
                let _ = writeln!(out, "{x:.16e},{y:.16e}");
            }
            out
        }
    };
    Ok(Outcome::success(stdout))
}

struct VerifyRequest {
    suite: Suite,
    seed: u64,
    samples: usize,
    alpha: Option<f64>,
    n: Option<usize>,
    lambda: Option<f64>,
    p: f64,
    map_file: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyCase {
    label: String,
    details: BTreeMap<&'static str, Value>,
    report: BoundReport,
}

fn verify(request: &VerifyRequest, wall_clock: bool) -> Result<Outcome> {
    let mut entries = vec![
        ("suite", json!(request.suite)),
        ("samples", json!(request.samples)),
    ];
    let cases = match request.suite {
        Suite::Extremal => {
            if request.map_file.is_some() {
                return Err(Error::InvalidParameter(
                    "--map-file applies to the random-poly and hardy-injectivity suites".into(),
                ));
            }
            let alpha = request.alpha.unwrap_or(1.0);
            let n = request.n.unwrap_or(2);
            let lambda = request.lambda.unwrap_or(0.5);
            entries.extend([("alpha", json!(alpha)), ("n", json!(n)), ("lambda", json!(lambda))]);
            extremal_suite(alpha, n, lambda, request)?
        }
        Suite::RandomPoly => {
            reject_lambda(request)?;
            if let Some(alpha) = request.alpha {
                entries.push(("alpha", json!(alpha)));
            }
            random_poly_suite(request)?
        }
        Suite::HardyInjectivity => {
            reject_lambda(request)?;
            entries.push(("p", json!(request.p)));
            if request.map_file.is_none() {
                entries.push(("n", json!(request.n.unwrap_or(2))));
            }
            hardy_injectivity_suite(request)?
        }
    };
    if let Some(path) = &request.map_file {
        entries.push(("map_file", json!(path.display().to_string())));
    }
    let report = BoundReport::combine(cases.iter().map(|c| &c.report))
        .expect("every suite produces at least one case");
    let exit_code = verdict(&report);
    let manifest = RunManifest::new("verify", entries, request.seed, wall_clock);
    let stdout = to_json(&json!({
        "manifest": manifest,
        "suite": request.suite,
        "passed": report.passed(),
        "report": report,
        "cases": cases,
    }));
    Ok(Outcome {
        exit_code,
        stdout,
        stderr: String::new(),
    })
}

fn verdict(report: &BoundReport) -> i32 {
    if report.passed() {
        0
    } else {
        1
    }
}

fn reject_lambda(request: &VerifyRequest) -> Result<()> {
    if request.lambda.is_some() {
        return Err(Error::InvalidParameter(
            "--lambda only applies to the extremal suite; other suites normalize their maps".into(),
        ));
    }
    Ok(())
}

fn sampling(seed: u64, sphere_samples: usize, pair_samples: usize) -> Result<SamplingConfig> {
    SamplingConfig::new(seed, sphere_samples, RADIAL_GRID, pair_samples)
}

fn extremal_suite(alpha: f64, n: usize, lambda: f64, request: &VerifyRequest) -> Result<Vec<VerifyCase>> {
    let params = BlochClassParams::new(alpha, n, lambda, 1.0)?;
    let map = ExtremalMap::new(params)?;
    let report = verify_distortion(&map, &params, &sampling(request.seed, request.samples, 1)?)?;
    Ok(vec![VerifyCase {
        label: "extremal map".into(),
        details: BTreeMap::from([("m_lambda", json!(map.root()))]),
        report,
    }])
}

fn load_map(path: &PathBuf) -> Result<PolyMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidMap(format!("cannot read {}: {e}", path.display())))?;
    PolyMap::from_json(&text)
}

fn random_poly_suite(request: &VerifyRequest) -> Result<Vec<VerifyCase>> {
    let maps: Vec<(String, PolyMap, f64)> = match &request.map_file {
        Some(path) => vec![("map file".into(), load_map(path)?, request.alpha.unwrap_or(1.0))],
        None => (0..RANDOM_POLY_MAPS)
            .map(|k| {
                let mut rng = keyed_rng(request.seed, Stream::RandomMaps, k);
                let map = PolyMap::random_univariate(&mut rng, RANDOM_POLY_MAX_DEGREE);
                let alpha = request
                    .alpha
                    .unwrap_or(RANDOM_POLY_ALPHAS[k as usize % RANDOM_POLY_ALPHAS.len()]);
                (format!("random map {k}"), map, alpha)
            })
            .collect(),
    };
    let normalization = sampling(request.seed, NORMALIZATION_SAMPLES, 1)?;
    let checks = sampling(request.seed, request.samples, 1)?;
    maps.into_iter()
        .map(|(label, map, alpha)| {
            let normalized = normalize_for_distortion(&map, alpha, &normalization)?;
            let params = BlochClassParams::new(alpha, map.dim(), normalized.lambda, 1.0)?;
            let report = verify_distortion(&normalized.map, &params, &checks)?;
            Ok(VerifyCase {
                label,
                details: BTreeMap::from([
                    ("alpha", json!(alpha)),
                    ("degree", json!(map.degree())),
                    ("input_det_seminorm", json!(normalized.input_seminorm)),
                    ("lambda", json!(normalized.lambda)),
                    ("map", serde_json::to_value(&map).expect("maps serialize")),
                ]),
                report,
            })
        })
        .collect()
}

fn hardy_injectivity_suite(request: &VerifyRequest) -> Result<Vec<VerifyCase>> {
    let maps: Vec<(String, PolyMap)> = match &request.map_file {
        Some(path) => vec![("map file".into(), load_map(path)?)],
        None => {
            let n = request.n.unwrap_or(2);
            if n == 0 {
                return Err(Error::InvalidParameter("n must be >= 1".into()));
            }
            (0..HARDY_MAPS)
                .map(|k| {
                    let mut rng = keyed_rng(request.seed, Stream::RandomMaps, k);
                    let map = PolyMap::random_near_identity(&mut rng, n, HARDY_MAP_DEGREE, HARDY_MAP_SCALE);
                    (format!("near-identity map {k}"), map)
                })
                .collect()
        }
    };
    let norm_cfg = sampling(request.seed, HARDY_NORM_SAMPLES, 1)?;
    let pair_cfg = sampling(request.seed, 1, request.samples)?;
    maps.into_iter()
        .map(|(label, map)| {
            let n = map.dim();
            let zero = vec![ComplexScalar::new(0.0, 0.0); n];
            let lambda0 = map.jacobian_det(&zero)?.norm();
            let estimate = estimate_hardy_norm(&map, request.p, &norm_cfg)?;
            // The sampled norm is a lower estimate; three standard errors cover its noise.
            let k0 = (estimate.value + 3.0 * estimate.standard_error).max(lambda0);
            let params = HardyClassParams::new(request.p, n, k0, lambda0)?;
            let result = hardy_landau(&params)?;
            let report = verify_injectivity_sample(&map, result.univalence_radius, &pair_cfg)?;
            Ok(VerifyCase {
                label,
                details: BTreeMap::from([
                    ("hardy_norm_estimate", json!(estimate.value)),
                    ("hardy_norm_standard_error", json!(estimate.standard_error)),
                    ("k0", json!(k0)),
                    ("lambda0", json!(lambda0)),
                    ("univalence_radius", json!(result.univalence_radius)),
                    ("map", serde_json::to_value(&map).expect("maps serialize")),
                ]),
                report,
            })
        })
        .collect()
}
