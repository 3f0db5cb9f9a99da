use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use schatten_geo::group::{convexity_profile, distance_p, DiscretizedCurve, GeodesicSegment};
use schatten_geo::harness::{orbit_operator, run_verify, trial_rng, ConfigOverrides, ExperimentConfig};
use schatten_geo::linalg::json::{format_number, matrix_from_json};
use schatten_geo::linalg::spectral::exp_skew;
use schatten_geo::linalg::{pnorm, SquareMatrix};
use schatten_geo::orbit::{endpoint_geodesic, isometric_lift, nonclosedness_demo, OrbitSpec};
use schatten_geo::random::{random_skew_in_ball, random_skew_unit, random_unitary};
use schatten_geo::{GeoError, Hermitian, SkewHermitian, Unitary, VERSION};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "schatten-geo", version, about = "Finsler geometry of Schatten unitary groups and unitary orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Matrix dimension.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Even Schatten order.
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML or JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites (`all` or any of the suite names, repeatable or comma separated).
    Verify {
        #[arg(long = "suite", value_delimiter = ',', default_value = "all")]
        suites: Vec<String>,
    },
    /// Minimal geodesic joining two points of a unitary orbit.
    Geodesic {
        #[arg(long)]
        x0: PathBuf,
        #[arg(long)]
        x1: PathBuf,
        /// Eigenvalue clustering tolerance.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Isometric lift of the orbit curve `t -> u(t) A u(t)*`; random instance when files are omitted.
    Lift {
        /// Hermitian base operator.
        #[arg(long, requires = "curve")]
        a: Option<PathBuf>,
        /// `{"times": [...], "samples": [unitary, ...]}`
        #[arg(long, requires = "a")]
        curve: Option<PathBuf>,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Rectifiable distance `|log(u* v)|_p` and the chordal distance.
    Distance {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Non-closedness table for the diagonal operator with the given eigenvalues.
    DemoNonclosed {
        /// Comma-separated distinct eigenvalues.
        #[arg(long, value_delimiter = ',', conflicts_with = "harmonic", required_unless_present = "harmonic")]
        eigenvalues: Vec<f64>,
        /// Use eigenvalues 1, 1/2, 1/3, ...
        #[arg(long)]
        harmonic: bool,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
    /// Convexity profile of `s -> d(u, beta(s))^p` along a geodesic; random instance when files are omitted.
    Convexity {
        #[arg(long, requires_all = ["base", "velocity"])]
        u: Option<PathBuf>,
        #[arg(long, requires_all = ["u", "velocity"])]
        base: Option<PathBuf>,
        #[arg(long, requires_all = ["u", "base"])]
        velocity: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
struct CurveFile {
    times: Vec<f64>,
    samples: Vec<Unitary>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// Splits `--tol.NAME VALUE` and `--param.NAME VALUE` (or `=VALUE`) out of the argument list.
fn extract_dotted(args: Vec<String>) -> Result<(Vec<String>, ConfigOverrides), Failure> {
    let mut rest = Vec::with_capacity(args.len());
    let mut layer = ConfigOverrides::default();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let (map, key) = if let Some(k) = arg.strip_prefix("--tol.") {
            (&mut layer.tolerances, k.to_string())
        } else if let Some(k) = arg.strip_prefix("--param.") {
            (&mut layer.params, k.to_string())
        } else {
            rest.push(arg);
            continue;
        };
        let (name, raw) = match key.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| Failure::Usage(format!("{arg} needs a value")))?;
                (key, v)
            }
        };
        let value: f64 = raw.parse().map_err(|_| Failure::Usage(format!("{arg}: '{raw}' is not a number")))?;
        map.insert(name, value);
    }
    Ok((rest, layer))
}

fn read_matrix(path: &Path) -> Result<SquareMatrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    matrix_from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_as<T>(path: &Path, f: impl FnOnce(SquareMatrix) -> schatten_geo::Result<T>) -> Result<T, Failure> {
    f(read_matrix(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Two-column CSV of the scalar fields of a JSON object.
fn scalar_csv(v: &Value) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Usage(format!("csv: {e}"));
    w.write_record(["field", "value"]).map_err(err)?;
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::Number(num) => num.as_f64().map(format_number).unwrap_or_else(|| num.to_string()),
                Value::Bool(b) => b.to_string(),
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                _ => continue,
            };
            w.write_record([k.as_str(), cell.as_str()]).map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn render(v: &Value, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v).expect("json value serializes")),
        Format::Csv => scalar_csv(v),
    }
}

fn run(cli: Cli, flags: ConfigOverrides) -> Result<u8, Failure> {
    let c = &cli.common;
    let mut layers = Vec::new();
    if let Some(path) = &c.config {
        layers.push(ConfigOverrides::from_file(path)?);
    }
    layers.push(ConfigOverrides { seed: c.seed, n: c.n, p: c.p, trials: c.trials, ..flags });
    let cfg = ExperimentConfig::resolve(&layers)?;
    let p = cfg.even_p();
    let out = c.out.as_deref();
    let start = Instant::now();

    match cli.command {
        Command::Verify { suites } => {
            let report = run_verify(&cfg, &suites)?;
            let text = match c.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv()?,
            };
            emit(out, &text)?;
            for check in report.checks.iter().filter(|r| !r.passed()) {
                eprintln!(
                    "violation: {}/{}: {} of {} samples, worst gap {:e} > {:e}",
                    check.suite, check.name, check.violations, check.samples, check.worst_gap, check.tolerance
                );
            }
            Ok(if report.passed() { 0 } else { EXIT_VIOLATION })
        }
        Command::Geodesic { x0, x1, tau } => {
            let x0 = read_as(&x0, Hermitian::new)?;
            let x1 = read_as(&x1, Hermitian::new)?;
            let spec = OrbitSpec::new(x0.clone(), p, tau)?;
            let geo = endpoint_geodesic(&spec, &x0, &x1)?;
            let v = json!({
                "command": "geodesic",
                "version": VERSION,
                "p": p.get(),
                "length": geo.length,
                "stationarity": geo.stationarity,
                "endpoint_residual": geo.endpoint_residual,
                "iterations": geo.iterations,
                "certificate": if geo.certified { "MINIMAL" } else { "NO-CERTIFICATE" },
                "z": to_value(&geo.geodesic.velocity),
                "start": to_value(&geo.geodesic.start),
                "wall_time": start.elapsed().as_secs_f64(),
            });
            if !geo.certified {
                eprintln!("NO-CERTIFICATE: length {} >= pi/4; the critical point is reported without a minimality guarantee", geo.length);
            }
            emit(out, &render(&v, c.format.unwrap_or(Format::Json))?)?;
            Ok(0)
        }
        Command::Lift { a, curve, tau } => {
            let (a, curve) = match (a, curve) {
                (Some(a), Some(curve)) => {
                    let a = read_as(&a, Hermitian::new)?;
                    let text = std::fs::read_to_string(&curve)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", curve.display())))?;
                    let file: CurveFile = serde_json::from_str(&text)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", curve.display())))?;
                    (a, DiscretizedCurve::new(file.times, file.samples)?)
                }
                _ => random_lift_instance(&cfg)?,
            };
            let spec = OrbitSpec::new(a, p, tau)?;
            let res = isometric_lift(&curve, &spec)?;
            let ok = res.defect <= cfg.tol("lift_defect");
            let v = json!({
                "command": "lift",
                "version": VERSION,
                "p": p.get(),
                "defect": res.defect,
                "orbit_length": res.lengths.orbit,
                "lift_length": res.lengths.lift,
                "source_length": res.lengths.source,
                "correction_length": res.lengths.correction,
                "speed_mismatch": res.speed_mismatch,
                "defect_ok": ok,
                "beta_end": to_value(res.beta.samples().last().expect("nonempty curve")),
                "wall_time": start.elapsed().as_secs_f64(),
            });
            emit(out, &render(&v, c.format.unwrap_or(Format::Json))?)?;
            Ok(if ok { 0 } else { EXIT_VIOLATION })
        }
        Command::Distance { u, v } => {
            let u = read_as(&u, Unitary::new)?;
            let v = read_as(&v, Unitary::new)?;
            if u.dim() != v.dim() {
                return Err(GeoError::Dimension { expected: u.dim(), found: v.dim() }.into());
            }
            let d = distance_p(&u, &v, p);
            let chord = pnorm(&(u.as_matrix() - v.as_matrix()), p);
            let lower = (1.0 - std::f64::consts::PI.powi(2) / 12.0).sqrt();
            let slack = cfg.tol("norm_equiv") * d.max(1.0);
            let ok = chord - d <= slack && lower * d - chord <= slack;
            let value = json!({
                "command": "distance",
                "version": VERSION,
                "p": p.get(),
                "distance": d,
                "chordal": chord,
                "lower_constant": lower,
                "equivalence_ok": ok,
                "wall_time": start.elapsed().as_secs_f64(),
            });
            emit(out, &render(&value, c.format.unwrap_or(Format::Json))?)?;
            Ok(if ok { 0 } else { EXIT_VIOLATION })
        }
        Command::DemoNonclosed { eigenvalues, harmonic, n_min, n_max } => {
            if n_min < 2 || n_max < n_min {
                return Err(Failure::Usage(format!("need 2 <= n-min <= n-max, got {n_min}..{n_max}")));
            }
            let eigs: Vec<f64> = if harmonic { (1..=n_max).map(|k| 1.0 / k as f64).collect() } else { eigenvalues };
            let rows: Vec<_> = nonclosedness_demo(&eigs, n_max)?.into_iter().filter(|r| r.n >= n_min).collect();
            let text = match c.format.unwrap_or(Format::Csv) {
                Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize"),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let err = |e: csv::Error| Failure::Usage(format!("csv: {e}"));
                    w.write_record(["n", "p_norm", "complement_norm", "delta_norm", "ratio"]).map_err(err)?;
                    for r in &rows {
                        w.write_record([
                            r.n.to_string(),
                            format_number(r.p_norm),
                            format_number(r.complement_norm),
                            format_number(r.delta_norm),
                            format_number(r.ratio),
                        ])
                        .map_err(err)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure::Usage(format!("csv: {e}")))?)
                        .expect("csv output is utf-8")
                }
            };
            emit(out, &text)?;
            Ok(0)
        }
        Command::Convexity { u, base, velocity } => {
            let (u, beta) = match (u, base, velocity) {
                (Some(u), Some(base), Some(velocity)) => {
                    let u = read_as(&u, Unitary::new)?;
                    let base = read_as(&base, Unitary::new)?;
                    let z = read_as(&velocity, SkewHermitian::new)?;
                    (u, GeodesicSegment::new(base, z, (0.0, 1.0))?)
                }
                _ => random_convexity_instance(&cfg)?,
            };
            let prof = convexity_profile(&u, &beta, cfg.count("profile_grid").max(1), p)?;
            let ok = -prof.convexity_gap() <= cfg.tol("convexity") && prof.derivative_mismatch() <= cfg.tol("convexity_fd");
            let mut v = to_value(&prof);
            let extra = json!({
                "command": "convexity",
                "version": VERSION,
                "p": p.get(),
                "convexity_gap": prof.convexity_gap(),
                "derivative_mismatch": prof.derivative_mismatch(),
                "ok": ok,
                "wall_time": start.elapsed().as_secs_f64(),
            });
            if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
                m.extend(e);
            }
            emit(out, &render(&v, c.format.unwrap_or(Format::Json))?)?;
            Ok(if ok { 0 } else { EXIT_VIOLATION })
        }
    }
}

fn random_lift_instance(cfg: &ExperimentConfig) -> Result<(Hermitian, DiscretizedCurve<Unitary>), Failure> {
    let mut rng = trial_rng(cfg.seed, 0, 0);
    let n = cfg.n;
    let a = orbit_operator(n, &mut rng);
    let z1 = random_skew_in_ball(n, cfg.even_p(), 0.5, &mut rng);
    let z2 = random_skew_in_ball(n, cfg.even_p(), 0.5, &mut rng);
    let steps = cfg.count("steps").max(2);
    let curve = DiscretizedCurve::sample(0.0, 1.0, steps, |t| {
        exp_skew(&z1.scaled(t)).compose(&exp_skew(&z2.scaled((std::f64::consts::PI * t).sin())))
    })?;
    Ok((a, curve))
}

fn random_convexity_instance(cfg: &ExperimentConfig) -> Result<(Unitary, GeodesicSegment), Failure> {
    let mut rng = trial_rng(cfg.seed, 0, 1);
    let (n, p) = (cfg.n, cfg.even_p());
    let u = random_unitary(n, &mut rng);
    let base = u.compose(&exp_skew(&random_skew_in_ball(n, p, 1.0, &mut rng)));
    let z = random_skew_unit(n, p, &mut rng).scaled(rng.random_range(0.1..0.5));
    Ok((u, GeodesicSegment::new(base, z, (0.0, 1.0))?))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (rest, flags) = match extract_dotted(args) {
        Ok(x) => x,
        Err(Failure::Usage(m)) | Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(rest) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli, flags) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
