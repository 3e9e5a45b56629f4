//! The `hullcurve` command line.
//!
//! [`dispatch`] parses arguments, runs one subcommand and returns the exit
//! code: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical nonconvergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use hullcurve::bodies::{ConvexBody, SphereQuadrature};
use hullcurve::constants::ConstantsTable;
use hullcurve::curves::Polyline;
use hullcurve::inequalities::{self, CampaignConfig, CampaignRow};
use hullcurve::io::{BodyFile, BodySpec};
use hullcurve::optimizer::{self, OptimizerConfig};
use hullcurve::{grassmann, steiner, Error, VerificationReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Caps the worker count; unset means one worker per core.
pub const THREADS_ENV: &str = "HULLCURVE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hullcurve", version, about = "Convex bodies, covering curves and the mean-width norm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sphere areas, ball volumes and the inequality constants for one dimension.
    Constants {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Inspect a body file.
    Body {
        #[command(subcommand)]
        action: BodyAction,
    },
    /// Inspect a curve file.
    Curve {
        #[command(subcommand)]
        action: CurveAction,
    },
    /// Mean projected length of a curve over random planes.
    Kubota(KubotaArgs),
    /// Mean projected perimeter of a body against its norm.
    Projnorm(ProjnormArgs),
    /// Quermassintegrals from a Steiner polynomial fit.
    Steiner(SteinerArgs),
    /// Check one inequality on a body and a covering curve.
    Verify {
        #[command(subcommand)]
        theorem: VerifyTheorem,
    },
    /// Random-instance campaign for one inequality, written as CSV.
    Campaign(CampaignArgs),
    /// Search for a short covering curve.
    Optimize(OptimizeArgs),
}

#[derive(Subcommand, Debug)]
enum BodyAction {
    Info(BodyInfoArgs),
}

#[derive(Subcommand, Debug)]
enum CurveAction {
    Info(CurveInfoArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyTheorem {
    /// length ≥ per − diam, in the plane.
    Theorem1(VerifyArgs),
    /// N(K) ≤ A·length + B·diam.
    Theorem2(VerifyArgs),
    /// length ≥ C(n)·Θ for constant width Θ.
    Theorem3(VerifyArgs),
}

#[derive(Args, Debug)]
struct BodyInfoArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CurveInfoArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct KubotaArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ProjnormArgs {
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1_000_000)]
    sphere_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SteinerArgs {
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = steiner::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated ε values; defaults to a geometric grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Fix the top coefficient to the unit-ball volume.
    #[arg(long)]
    pinned: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    body: PathBuf,
    #[arg(long)]
    curve: PathBuf,
    /// Sphere samples for the norm (theorem2).
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Covering tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    theorem: u8,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Points per random curve (theorems 1 and 2).
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 20_000)]
    sphere_samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// CSV destination; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the summary as JSON (only with --out).
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = 24)]
    vertices: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Where to write the best curve.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::IllConditioned { .. } | Error::Infeasible { .. } => EXIT_NONCONVERGENCE,
        Error::NotCovered(_) | Error::WidthCertificate { .. } => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let command = command_line(&argv);
    let mut buf = Vec::new();
    let result = pool.install(|| run(cli.command, &command, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())
}

/// The invocation, minus the program path, for reproduction.
fn command_line(argv: &[OsString]) -> String {
    let mut parts = vec!["hullcurve".to_string()];
    for a in argv.iter().skip(1) {
        let s = a.to_string_lossy();
        if s.is_empty() || s.contains(char::is_whitespace) {
            parts.push(format!("'{s}'"));
        } else {
            parts.push(s.into_owned());
        }
    }
    parts.join(" ")
}

fn run(cmd: Command, command: &str, out: &mut Vec<u8>) -> Outcome {
    let mut o = Output { command, buf: out };
    match cmd {
        Command::Constants { dim, json } => constants(&mut o, dim, json),
        Command::Body { action: BodyAction::Info(a) } => body_info(&mut o, a),
        Command::Curve { action: CurveAction::Info(a) } => curve_info(&mut o, a),
        Command::Kubota(a) => kubota(&mut o, a),
        Command::Projnorm(a) => projnorm(&mut o, a),
        Command::Steiner(a) => steiner_fit(&mut o, a),
        Command::Verify { theorem } => verify(&mut o, theorem),
        Command::Campaign(a) => campaign(&mut o, a),
        Command::Optimize(a) => optimize(&mut o, a),
    }
}

struct Output<'a> {
    command: &'a str,
    buf: &'a mut Vec<u8>,
}

impl Output<'_> {
    /// Pretty JSON: `tool`, `version`, `command`, then the fields of `body`.
    fn json<T: Serialize>(&mut self, kind: &str, body: &T) -> std::result::Result<(), Failure> {
        let mut map = Map::new();
        map.insert("tool".into(), json!("hullcurve"));
        map.insert("version".into(), json!(VERSION));
        map.insert("command".into(), json!(self.command));
        map.insert("output".into(), json!(kind));
        match serde_json::to_value(body).map_err(Error::from)? {
            Value::Object(fields) => map.extend(fields),
            other => {
                map.insert("value".into(), other);
            }
        }
        let text = serde_json::to_string_pretty(&Value::Object(map)).map_err(Error::from)?;
        self.buf.extend_from_slice(text.as_bytes());
        self.buf.push(b'\n');
        Ok(())
    }

    /// Aligned `key  value` lines, after an optional `seed=` line and a
    /// version header.
    fn text(&mut self, seed: Option<u64>, rows: &[(&str, String)]) {
        if let Some(s) = seed {
            self.line(&format!("seed={s}"));
        }
        self.line(&format!("# hullcurve {VERSION}: {}", self.command));
        let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in rows {
            self.line(&format!("{k:<w$}  {v}"));
        }
    }

    fn line(&mut self, s: &str) {
        self.buf.extend_from_slice(s.as_bytes());
        self.buf.push(b'\n');
    }
}

fn pm(value: f64, se: f64) -> String {
    format!("{value:.12} ± {se:.3e}")
}

fn num(x: f64) -> String {
    format!("{x:.15}")
}

fn vec_str(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_body(path: &Path) -> std::result::Result<(BodyFile, ConvexBody), Failure> {
    let file: BodyFile = serde_json::from_str(&read_text(path)?).map_err(Error::from)?;
    let body = file.build()?;
    Ok((file, body))
}

fn load_curve(path: &Path) -> std::result::Result<Polyline, Failure> {
    Ok(hullcurve::io::parse_curve(&read_text(path)?)?)
}

fn kind_name(spec: &BodySpec) -> &'static str {
    match spec {
        BodySpec::Polytope { .. } => "polytope",
        BodySpec::Ball { .. } => "ball",
        BodySpec::ReuleauxPolygon { .. } => "reuleaux_polygon",
        BodySpec::RevolvedReuleaux { .. } => "revolved_reuleaux",
    }
}

fn write_file(path: &Path, contents: &[u8]) -> std::result::Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn constants(o: &mut Output, dim: usize, json: bool) -> Outcome {
    let t = ConstantsTable::new(dim)?;
    if json {
        o.json("constants", &t)?;
    } else {
        o.text(
            None,
            &[
                ("dimension", dim.to_string()),
                ("sphere_area", num(t.sphere_area)),
                ("ball_volume", num(t.ball_volume)),
                ("theorem2_a", num(t.theorem2_a)),
                ("theorem2_b", num(t.theorem2_b)),
                ("theorem3_c", num(t.theorem3_c)),
                ("corollary_bound", num(t.corollary_bound)),
                ("gautschi_lower", num(t.gautschi.lower)),
                ("gautschi_ratio", num(t.gautschi.ratio)),
                ("gautschi_upper", num(t.gautschi.upper)),
            ],
        );
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BodyInfo {
    kind: &'static str,
    dimension: usize,
    diameter: f64,
    diameter_exact: bool,
    circumradius: f64,
    declared_width: Option<f64>,
    perimeter: Option<f64>,
    mean_width: f64,
    mean_width_stderr: f64,
    norm: f64,
    norm_stderr: f64,
    samples: usize,
    seed: u64,
}

fn body_info(o: &mut Output, a: BodyInfoArgs) -> Outcome {
    let (file, k) = load_body(&a.file)?;
    let q = SphereQuadrature::antithetic(a.samples, a.seed)?;
    let mw = k.mean_width(&q)?;
    let nm = k.norm(&q)?;
    let d = k.diameter_estimate();
    let info = BodyInfo {
        kind: kind_name(&file.spec),
        dimension: k.dimension(),
        diameter: d.value,
        diameter_exact: d.exact,
        circumradius: k.circumradius(),
        declared_width: k.declared_width(),
        perimeter: if k.dimension() == 2 { Some(k.perimeter()?) } else { None },
        mean_width: mw.estimate,
        mean_width_stderr: mw.std_error,
        norm: nm.estimate,
        norm_stderr: nm.std_error,
        samples: a.samples,
        seed: a.seed,
    };
    if a.json {
        o.json("body_info", &info)?;
    } else {
        let mut rows = vec![
            ("kind", info.kind.to_string()),
            ("dimension", info.dimension.to_string()),
            ("diameter", format!("{}{}", num(info.diameter), if d.exact { "" } else { " (grid)" })),
            ("circumradius", num(info.circumradius)),
        ];
        if let Some(w) = info.declared_width {
            rows.push(("constant_width", num(w)));
        }
        if let Some(p) = info.perimeter {
            rows.push(("perimeter", num(p)));
        }
        rows.push(("mean_width", pm(info.mean_width, info.mean_width_stderr)));
        rows.push(("norm", pm(info.norm, info.norm_stderr)));
        rows.push(("sphere_samples", a.samples.to_string()));
        o.text(Some(a.seed), &rows);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CurveInfo {
    dimension: usize,
    points: usize,
    length: f64,
    bounding_box: BoundingBox,
}

#[derive(Serialize)]
struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn curve_info(o: &mut Output, a: CurveInfoArgs) -> Outcome {
    let c = load_curve(&a.file)?;
    let (lo, hi) = c.bounding_box();
    let info = CurveInfo {
        dimension: c.dimension(),
        points: c.len(),
        length: c.length(),
        bounding_box: BoundingBox { lo, hi },
    };
    if a.json {
        o.json("curve_info", &info)?;
    } else {
        o.text(
            None,
            &[
                ("dimension", info.dimension.to_string()),
                ("points", info.points.to_string()),
                ("length", num(info.length)),
                ("bbox_lo", vec_str(&info.bounding_box.lo)),
                ("bbox_hi", vec_str(&info.bounding_box.hi)),
            ],
        );
    }
    Ok(EXIT_OK)
}

fn report_out(o: &mut Output, r: &VerificationReport, seed: Option<u64>, json: bool) -> Outcome {
    if json {
        o.json("verification_report", r)?;
    } else {
        let relation = match r.relation {
            hullcurve::report::Relation::AtMost => "lhs <= rhs",
            hullcurve::report::Relation::AtLeast => "lhs >= rhs",
            hullcurve::report::Relation::Equal => "lhs == rhs",
        };
        let mut rows = vec![
            ("check", r.name.clone()),
            ("relation", relation.to_string()),
            ("lhs", num(r.lhs)),
            ("rhs", num(r.rhs)),
            ("margin", format!("{:.6e}", r.margin)),
            ("stderr", format!("{:.6e}", r.stat_error)),
            ("tolerance", format!("{:.6e}", r.tolerance)),
        ];
        let meta: Vec<(String, String)> = r
            .metadata
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => (k.clone(), s.clone()),
                v => (k.clone(), v.to_string()),
            })
            .collect();
        for (k, v) in &meta {
            rows.push((k.as_str(), v.clone()));
        }
        rows.push(("pass", r.pass.to_string()));
        o.text(seed, &rows);
    }
    Ok(if r.pass { EXIT_OK } else { EXIT_FAIL })
}

fn kubota(o: &mut Output, a: KubotaArgs) -> Outcome {
    let c = load_curve(&a.curve)?;
    if c.dimension() != a.dim {
        return Err(Failure::Usage(format!(
            "--dim {} does not match the curve's dimension {}",
            a.dim,
            c.dimension()
        )));
    }
    let r = grassmann::verify_kubota_length(&c, a.samples, a.seed)?;
    report_out(o, &r, Some(a.seed), a.json)
}

fn projnorm(o: &mut Output, a: ProjnormArgs) -> Outcome {
    let (_, k) = load_body(&a.body)?;
    let q = SphereQuadrature::antithetic(a.sphere_samples, a.seed)?;
    let r = grassmann::verify_projection_norm(&k, a.samples, a.seed, &q)?;
    report_out(o, &r, Some(a.seed), a.json)
}

#[derive(Serialize)]
struct SteinerOut<'a> {
    fit: &'a steiner::QuermassFit,
    norm: f64,
    norm_stderr: f64,
}

fn steiner_fit(o: &mut Output, a: SteinerArgs) -> Outcome {
    let (_, k) = load_body(&a.body)?;
    let grid = a.grid.clone().unwrap_or_else(|| steiner::default_grid(&k));
    let fit = if a.pinned {
        steiner::fit_quermass_pinned(&k, &grid, a.samples, a.seed)?
    } else {
        steiner::fit_quermass(&k, &grid, a.samples, a.seed)?
    };
    let n = steiner::norm_from_steiner(&fit);
    if a.json {
        o.json(
            "quermass_fit",
            &SteinerOut { fit: &fit, norm: n.estimate, norm_stderr: n.std_error },
        )?;
    } else {
        let labels: Vec<String> = (0..fit.coefficients.len()).map(|i| format!("W_{i}")).collect();
        let mut rows: Vec<(&str, String)> = vec![
            ("dimension", fit.dimension.to_string()),
            ("samples_per_eps", fit.samples.to_string()),
            ("epsilon_grid", vec_str(&fit.epsilon_grid)),
            ("pinned", fit.pinned.to_string()),
        ];
        for (i, l) in labels.iter().enumerate() {
            rows.push((l.as_str(), pm(fit.coefficients[i], fit.coefficient_errors[i])));
        }
        rows.push(("norm", pm(n.estimate, n.std_error)));
        rows.push(("residual", format!("{:.3e}", fit.residual)));
        rows.push(("condition", format!("{:.3e}", fit.condition)));
        o.text(Some(a.seed), &rows);
    }
    Ok(EXIT_OK)
}

fn verify(o: &mut Output, t: VerifyTheorem) -> Outcome {
    let (which, a) = match t {
        VerifyTheorem::Theorem1(a) => (1, a),
        VerifyTheorem::Theorem2(a) => (2, a),
        VerifyTheorem::Theorem3(a) => (3, a),
    };
    let (_, k) = load_body(&a.body)?;
    let c = load_curve(&a.curve)?;
    let (r, seed) = match which {
        1 => (inequalities::verify_theorem1(&k, &c, a.tol)?, None),
        2 => {
            let q = SphereQuadrature::antithetic(a.samples, a.seed)?;
            (inequalities::verify_theorem2(&k, &c, &q, a.tol)?, Some(a.seed))
        }
        _ => (inequalities::verify_theorem3(&k, &c, a.tol)?, None),
    };
    report_out(o, &r, seed, a.json)
}

#[derive(Serialize)]
struct CampaignSummary {
    theorem: u8,
    dimension: usize,
    trials: usize,
    points: usize,
    sphere_samples: usize,
    seed: u64,
    tol: f64,
    failures: usize,
    strictness: inequalities::StrictnessReport,
    csv: Option<String>,
}

fn campaign(o: &mut Output, a: CampaignArgs) -> Outcome {
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    if a.theorem != 2 && a.dim != 2 {
        return Err(Failure::Usage(format!("theorem {} campaigns are planar; use --dim 2", a.theorem)));
    }
    let cfg = CampaignConfig {
        points: a.points,
        sphere_samples: a.sphere_samples,
        tol: a.tol,
        ..CampaignConfig::new(a.dim, a.trials, a.seed)
    };
    let reports = match a.theorem {
        1 => inequalities::theorem1_campaign(&cfg)?,
        2 => inequalities::theorem2_campaign(&cfg)?,
        _ => inequalities::theorem3_campaign(&cfg)?,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, r) in reports.iter().enumerate() {
        w.serialize(CampaignRow::from((i, r)))
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    let name = format!("theorem{}", a.theorem);
    let strictness = inequalities::strictness_probe(&name, &reports)?;
    let failures = strictness.failures;
    match &a.out {
        None => o.buf.extend_from_slice(&bytes),
        Some(path) => {
            write_file(path, &bytes)?;
            let s = CampaignSummary {
                theorem: a.theorem,
                dimension: a.dim,
                trials: a.trials,
                points: a.points,
                sphere_samples: a.sphere_samples,
                seed: a.seed,
                tol: a.tol,
                failures,
                strictness,
                csv: Some(path.display().to_string()),
            };
            if a.json {
                o.json("campaign_summary", &s)?;
            } else {
                let q = s.strictness.quantiles;
                let mut rows = vec![
                    ("theorem", name.clone()),
                    ("dimension", a.dim.to_string()),
                    ("trials", a.trials.to_string()),
                ];
                if a.theorem != 3 {
                    rows.push(("points", a.points.to_string()));
                }
                if a.theorem == 2 {
                    rows.push(("sphere_samples", a.sphere_samples.to_string()));
                }
                rows.extend([
                    ("tol", format!("{:e}", a.tol)),
                    ("failures", failures.to_string()),
                    ("min_relative_margin", format!("{:.6e}", s.strictness.min_relative_margin)),
                    ("argmin", s.strictness.argmin.to_string()),
                    ("quantiles", format!("{:.4e} {:.4e} {:.4e} {:.4e} {:.4e}", q[0], q[1], q[2], q[3], q[4])),
                    ("strictly_positive", s.strictness.strictly_positive.to_string()),
                    ("csv", path.display().to_string()),
                ]);
                o.text(Some(a.seed), &rows);
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct OptimizeOut<'a> {
    #[serde(flatten)]
    result: &'a optimizer::OptResult,
    ratio_to_width: Option<f64>,
    curve_file: Option<String>,
}

fn optimize(o: &mut Output, a: OptimizeArgs) -> Outcome {
    let (_, k) = load_body(&a.body)?;
    let mut cfg = OptimizerConfig {
        vertex_count: a.vertices,
        restarts: a.restarts,
        anneal_steps: a.steps,
        covering_tol: a.tol,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    if let Some(t) = a.temperature {
        cfg.initial_temperature = t;
    }
    if let Some(c) = a.cooling {
        cfg.cooling_rate = c;
    }
    let res = optimizer::optimize_covering_curve(&k, &cfg)?;
    if let Some(path) = &a.out {
        let text = hullcurve::io::curve_json(&res.best_curve)?;
        write_file(path, format!("{text}\n").as_bytes())?;
    }
    let ratio = k.declared_width().map(|w| res.best_length / w);
    if a.json {
        o.json(
            "optimize_result",
            &OptimizeOut {
                result: &res,
                ratio_to_width: ratio,
                curve_file: a.out.as_ref().map(|p| p.display().to_string()),
            },
        )?;
    } else {
        let mut rows = vec![
            ("dimension", k.dimension().to_string()),
            ("vertices", cfg.vertex_count.to_string()),
            ("restarts", cfg.restarts.to_string()),
            ("steps", cfg.anneal_steps.to_string()),
            ("initial_temperature", format!("{}", cfg.initial_temperature)),
            ("cooling_rate", format!("{}", cfg.cooling_rate)),
            ("covering_tol", format!("{:e}", cfg.covering_tol)),
            ("initial_length", num(res.initial_length)),
            ("best_length", num(res.best_length)),
            ("feasible", res.feasible.to_string()),
        ];
        if let (Some(lb), Some(gap), Some(r)) = (res.lower_bound, res.gap, ratio) {
            rows.push(("lower_bound", num(lb)));
            rows.push(("gap", num(gap)));
            rows.push(("length_over_width", num(r)));
        }
        rows.push(("trace", vec_str(&res.trace)));
        if let Some(p) = &a.out {
            rows.push(("curve", p.display().to_string()));
        }
        o.text(Some(a.seed), &rows);
    }
    Ok(if res.feasible { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hullcurve").chain(args.iter().copied());
        let code = dispatch(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["constants"]).0, EXIT_USAGE);
        assert_eq!(call(&["constants", "--dim", "3", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["constants", "--dim", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("error"));
    }

    #[test]
    fn help_and_version_exit_zero() {
        let (code, out, _) = call(&["--version"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains(VERSION));
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn constants_text_and_json() {
        let (code, out, _) = call(&["constants", "--dim", "3"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("# hullcurve"));
        assert!(out.contains("theorem2_a"));
        let (_, out, _) = call(&["constants", "--dim", "3", "--json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["theorem2_a"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(v["theorem2_b"].as_f64().unwrap(), 2.0);
        assert_eq!(v["version"], VERSION);
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::IllConditioned { condition: 1e12 }), EXIT_NONCONVERGENCE);
        assert_eq!(exit_code(&Error::NotCovered("x".into())), EXIT_FAIL);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), EXIT_USAGE);
    }

    #[test]
    fn command_line_quotes_spaces() {
        let argv: Vec<OsString> = ["bin", "verify", "a b"].iter().map(OsString::from).collect();
        assert_eq!(command_line(&argv), "hullcurve verify 'a b'");
    }
}
