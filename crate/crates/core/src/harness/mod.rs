//! Randomized verification suites, their configuration and reports.

mod suites;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::linalg::EvenP;

pub use suites::{orbit_operator, SUITES};

/// Tolerance names and defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("norm_equiv", 1e-12),
    ("dexp_fd", 1e-6),
    ("contraction", 1e-12),
    ("g_bound", 1e-8),
    ("hessian", 1e-7),
    ("minimality", 1e-3),
    ("variation", 1e-4),
    ("convexity", 1e-6),
    ("convexity_fd", 1e-5),
    ("clarkson", 1e-12),
    ("semiparallelogram", 1e-12),
    ("family_bound", 1e-10),
    ("lift_defect", 1e-6),
    ("lift_length", 1e-5),
    ("lift_cross", 1e-6),
    ("horizontality", 1e-6),
    ("recover", 1e-5),
    ("stationarity", 1e-8),
    ("projection", 1e-8),
    ("invariance", 1e-8),
    ("uniqueness", 1e-6),
    ("ca_bound", 1e-10),
    ("sharpness", 1e-12),
    ("nonclosed", 1e-12),
    ("range", 1e-9),
    ("sigma", 1e-9),
];

/// Command parameters and defaults.
pub const PARAMS: &[(&str, f64)] = &[
    // minimality: perturbation amplitude, competitors per trial, chordal grid
    ("amplitude", 0.5),
    ("competitors", 20.0),
    ("grid", 200.0),
    // comparison inequalities
    ("r0", std::f64::consts::FRAC_PI_4),
    ("t_grid", 21.0),
    // convexity profile points
    ("profile_grid", 8.0),
    // RK4 steps per unit time in lifts
    ("steps", 200.0),
    // orbit: largest planted geodesic length
    ("plant_length", 0.7),
    // non-closedness table: largest n
    ("n_max", 64.0),
];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n: usize,
    pub p: u32,
    pub trials: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub params: BTreeMap<String, f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            n: 4,
            p: 4,
            trials: 100,
            tolerances: TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            params: PARAMS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// Partial configuration as read from a file or the command line.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ConfigOverrides {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Ok(serde_json::from_str(&text)?)
        } else {
            toml::from_str(&text).map_err(|e| GeoError::InvalidInput(format!("config {}: {e}", path.display())))
        }
    }
}

impl ExperimentConfig {
    /// Applies overrides in order; later ones win.
    pub fn resolve(layers: &[ConfigOverrides]) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for layer in layers {
            cfg.seed = layer.seed.unwrap_or(cfg.seed);
            cfg.n = layer.n.unwrap_or(cfg.n);
            cfg.p = layer.p.unwrap_or(cfg.p);
            cfg.trials = layer.trials.unwrap_or(cfg.trials);
            for (k, v) in &layer.tolerances {
                if !cfg.tolerances.contains_key(k) {
                    return Err(GeoError::InvalidInput(format!("unknown tolerance '{k}'")));
                }
                cfg.tolerances.insert(k.clone(), *v);
            }
            for (k, v) in &layer.params {
                if !cfg.params.contains_key(k) {
                    return Err(GeoError::InvalidInput(format!("unknown parameter '{k}'")));
                }
                cfg.params.insert(k.clone(), *v);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(GeoError::InvalidInput(format!("n must be at least 2, got {}", self.n)));
        }
        EvenP::new(self.p)?;
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(GeoError::InvalidInput(format!("tolerance '{k}' must be positive, got {v}")));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(GeoError::InvalidInput(format!("parameter '{k}' must be finite and nonnegative, got {v}")));
        }
        Ok(())
    }

    pub fn even_p(&self) -> EvenP {
        EvenP::new(self.p).expect("validated")
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn count(&self, name: &str) -> usize {
        self.params[name].round() as usize
    }
}

/// Independent generator for one trial of one suite.
pub fn trial_rng(seed: u64, suite_id: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite_id << 40) | trial);
    rng
}

/// Aggregate of one check over many samples. `worst_gap` is the largest excess over the
/// bound being tested (negative when every sample has slack).
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub worst_gap: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub samples: usize,
    pub params: BTreeMap<String, f64>,
}

impl CheckRecord {
    pub fn from_gaps(suite: &str, name: &str, tolerance: f64, gaps: &[f64], params: BTreeMap<String, f64>) -> Self {
        let worst_gap = if gaps.iter().any(|g| g.is_nan()) {
            f64::NAN
        } else {
            gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        let violations = gaps.iter().filter(|g| !(**g <= tolerance)).count();
        CheckRecord {
            suite: suite.to_string(),
            name: name.to_string(),
            worst_gap,
            tolerance,
            violations,
            samples: gaps.len(),
            params,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
    pub violations: usize,
    pub wall_time: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// JSON with `wall_time` as the only run-dependent field.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "check", "worst_gap", "tolerance", "violations", "samples"])
            .map_err(csv_err)?;
        for c in &self.checks {
            w.write_record([
                c.suite.clone(),
                c.name.clone(),
                crate::linalg::json::format_number(c.worst_gap),
                crate::linalg::json::format_number(c.tolerance),
                c.violations.to_string(),
                c.samples.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| GeoError::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> GeoError {
    GeoError::InvalidInput(format!("csv: {e}"))
}

/// Runs `f` on every trial index in parallel; results come back in trial order.
pub(crate) fn par_trials<T: Send>(trials: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Runs the named suites (or `all`) and aggregates their checks.
pub fn run_verify(cfg: &ExperimentConfig, suites: &[String]) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut names: Vec<&str> = Vec::new();
    for s in suites {
        if s == "all" {
            names.extend(SUITES.iter().map(|(n, _, _)| *n));
        } else if SUITES.iter().any(|(n, _, _)| n == s) {
            names.push(s);
        } else {
            let known: Vec<&str> = SUITES.iter().map(|(n, _, _)| *n).collect();
            return Err(GeoError::InvalidInput(format!("unknown suite '{s}'; known: all, {}", known.join(", "))));
        }
    }
    let mut checks = Vec::new();
    for name in names {
        let (_, id, run) = SUITES.iter().find(|(n, _, _)| *n == name).expect("checked above");
        checks.extend(run(cfg, *id)?);
    }
    let violations = checks.iter().map(|c| c.violations).sum();
    Ok(Report {
        command: "verify".into(),
        version: crate::VERSION.into(),
        config: cfg.clone(),
        checks,
        violations,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
