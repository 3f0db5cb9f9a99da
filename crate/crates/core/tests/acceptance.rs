//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;

use schatten_geo::harness::{run_verify, CheckRecord, ConfigOverrides, ExperimentConfig};

const N: usize = 4;

fn config(p: u32, trials: usize, params: &[(&str, f64)]) -> ExperimentConfig {
    let layer = ConfigOverrides {
        seed: Some(20240601),
        n: Some(N),
        p: Some(p),
        trials: Some(trials),
        tolerances: BTreeMap::new(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    };
    ExperimentConfig::resolve(&[layer]).expect("valid acceptance config")
}

struct Outcome {
    checks: Vec<CheckRecord>,
    error: Option<String>,
    seconds: f64,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.error = self.error.take().or(other.error);
        self.seconds = self.seconds.max(other.seconds);
    }
}

/// Runs one suite and keeps only the named checks.
fn run(suite: &str, cfg: &ExperimentConfig, names: &[&str]) -> Outcome {
    match run_verify(cfg, &[suite.to_string()]) {
        Ok(report) => {
            let checks: Vec<CheckRecord> =
                report.checks.into_iter().filter(|c| names.contains(&c.name.as_str())).collect();
            let missing: Vec<&&str> = names.iter().filter(|n| !checks.iter().any(|c| c.name == **n)).collect();
            let error = (!missing.is_empty()).then(|| format!("missing checks {missing:?}"));
            Outcome { checks, error, seconds: report.wall_time }
        }
        Err(e) => Outcome { checks: Vec::new(), error: Some(format!("{suite}: {e}")), seconds: 0.0 },
    }
}

fn over_p(suite: &str, trials: usize, params: &[(&str, f64)], names: &[&str]) -> Outcome {
    let mut out = Outcome { checks: Vec::new(), error: None, seconds: 0.0 };
    for p in [2, 4, 6] {
        out.merge(run(suite, &config(p, trials, params), names));
    }
    out
}

fn report(id: usize, title: &str, out: &Outcome, extra: Option<(bool, String)>) -> bool {
    let samples: usize = out.checks.iter().map(|c| c.samples).sum();
    let violations: usize = out.checks.iter().map(|c| c.violations).sum();
    let empty = out.checks.iter().any(|c| c.samples == 0);
    let worst = out
        .checks
        .iter()
        .map(|c| format!("{}={:.2e}/{:.0e}", c.name, c.worst_gap, c.tolerance))
        .collect::<Vec<_>>()
        .join(" ");
    let (extra_ok, extra_msg) = extra.unwrap_or((true, String::new()));
    let ok = out.error.is_none() && violations == 0 && !empty && extra_ok;
    let mut line = format!(
        "{} {:>2}. {title}: {violations} violations in {samples} samples, {:.1}s [{worst}]",
        if ok { "PASS" } else { "FAIL" },
        id,
        out.seconds
    );
    if !extra_msg.is_empty() {
        line.push_str(&format!(" {extra_msg}"));
    }
    if let Some(e) = &out.error {
        line.push_str(&format!(" error: {e}"));
    }
    if empty {
        line.push_str(" (a check drew no admissible samples)");
    }
    println!("{line}");
    ok
}

fn main() -> ExitCode {
    let mut all = true;

    let c1 = over_p("dexp", 200, &[], &["dexp_vs_difference"]);
    all &= report(1, "dexp against central differences", &c1, None);

    let c2 = over_p("dexp", 500, &[], &["dexp_contraction"]);
    all &= report(2, "dexp contraction", &c2, None);

    let c3 = over_p("dexp", 500, &[], &["f_inverse_g_bound"]);
    all &= report(3, "g bound for F(ad w)^-1", &c3, None);

    let c4 = over_p("norms", 500, &[], &["chord_below_distance", "chord_above_scaled_distance"]);
    let constant = (1.0 - PI * PI / 12.0).sqrt();
    // sqrt(1 - pi^2 / 12) = 0.4213466...
    let const_ok = (constant * 1e4).round() == 4213.0;
    all &= report(4, "norm equivalence", &c4, Some((const_ok, format!("constant={constant:.7}"))));

    let c5 = run(
        "minimality",
        &config(4, 100, &[("competitors", 100.0), ("grid", 200.0), ("amplitude", 0.5)]),
        &["competitor_shortfall"],
    );
    all &= report(5, "minimality of one-parameter groups", &c5, None);

    let c6 = run("variation", &config(4, 50, &[]), &["first_variation"]);
    all &= report(6, "first variation formula", &c6, None);

    let c7 = run("convexity", &config(4, 100, &[]), &["second_difference_above_sine_bound", "derivative_formulas"]);
    all &= report(7, "convexity along geodesics", &c7, None);

    let mut c8 = over_p("clarkson", 1000, &[], &["clarkson"]);
    c8.merge(over_p("semiparallelogram", 500, &[], &["semi_parallelogram"]));
    all &= report(8, "Clarkson and semi-parallelogram", &c8, None);

    let c9 = run(
        "family-bound",
        &config(4, 200, &[("t_grid", 21.0), ("r0", PI / 4.0)]),
        &["family_length_bound", "reverse_triangle_chain", "g_cap_at_quarter_pi"],
    );
    all &= report(9, "geodesic family bound", &c9, None);

    let c10 = run(
        "lifts",
        &config(4, 100, &[]),
        &[
            "isometric_defect",
            "lift_not_longer",
            "orbit_length_identity",
            "correction_at_most_twice",
            "p2_horizontal_cross_check",
        ],
    );
    all &= report(10, "isometric and horizontal lifts", &c10, None);

    let c11 = over_p("orbit", 100, &[], &["plant_and_recover", "endpoint_stationarity"]);
    all &= report(11, "orbit geodesics from endpoints", &c11, None);

    let c12 = run(
        "orbit",
        &config(4, 100, &[("n_max", 64.0)]),
        &["nonclosed_projection_norm", "nonclosed_delta_bound", "ca_sharpness"],
    );
    let rows = c12.checks.iter().find(|c| c.name == "nonclosed_projection_norm").map_or(0, |c| c.samples);
    all &= report(12, "non-closed range demonstration", &c12, Some((rows == 63, format!("rows={rows}"))));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
