use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use schatten_geo::linalg::json::matrix_to_json;
use schatten_geo::linalg::spectral::exp_skew;
use schatten_geo::random::{random_hermitian, random_skew, random_unitary};
use schatten_geo::{Hermitian, SkewHermitian};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schatten-geo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn clarkson_suite_passes() {
    let out = run(&["verify", "--suite", "clarkson", "--n", "4", "--p", "4", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["checks"][0]["samples"], 1000);
}

#[test]
fn smoke_all_suites_is_fast() {
    let start = Instant::now();
    let out = run(&["verify", "--suite", "all", "--n", "2", "--p", "2", "--trials", "10"]);
    let elapsed = start.elapsed();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let suites: std::collections::BTreeSet<String> =
        json(&out)["checks"].as_array().unwrap().iter().map(|c| c["suite"].as_str().unwrap().to_string()).collect();
    assert_eq!(suites.len(), 12);
}

#[test]
fn zero_amplitude_competitors_match_the_geodesic() {
    let out = run(&["verify", "--suite", "minimality", "--n", "4", "--p", "4", "--trials", "5", "--param.amplitude", "0"]);
    assert_eq!(code(&out), 0);
    let gap = json(&out)["checks"][0]["worst_gap"].as_f64().unwrap();
    assert!(gap.abs() < 1e-12, "{gap}");
}

#[test]
fn determinism_apart_from_wall_time() {
    let args = ["verify", "--suite", "dexp,orbit", "--n", "3", "--p", "4", "--trials", "8", "--seed", "11"];
    let strip = |out: Output| {
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("wall_time");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(run(&args));
    let b = strip(run(&args));
    assert_eq!(a, b);
    let c = strip(run(&["verify", "--suite", "dexp,orbit", "--n", "3", "--p", "4", "--trials", "8", "--seed", "12"]));
    assert_ne!(a, c);
}

#[test]
fn exit_codes() {
    // A tolerance no computation can meet.
    let out = run(&["verify", "--suite", "dexp", "--trials", "3", "--tol.dexp_fd", "1e-300"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dexp_vs_difference"));

    for bad in [
        vec!["verify", "--suite", "nonsense"],
        vec!["verify", "--p", "3"],
        vec!["verify", "--n", "1"],
        vec!["verify", "--tol.nonsense", "1"],
        vec!["verify", "--tol.clarkson", "-1"],
        vec!["verify", "--param.grid"],
        vec!["frobnicate"],
        vec!["geodesic", "--x0", "/nonexistent.json", "--x1", "/nonexistent.json"],
    ] {
        assert_eq!(code(&run(&bad)), 2, "{bad:?}");
    }

    // Samples too far apart for the chordal construction.
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &matrix_to_json(Hermitian::from_real_diagonal(&[0.0, 1.0]).as_matrix()));
    let z = SkewHermitian::from_hermitian(&Hermitian::from_real_diagonal(&[3.0, -3.0]));
    let curve = format!(
        r#"{{"times": [0, 1], "samples": [{}, {}]}}"#,
        matrix_to_json(&nalgebra::DMatrix::identity(2, 2)),
        matrix_to_json(exp_skew(&z).as_matrix())
    );
    let c = write(dir.path(), "c.json", &curve);
    let out = run(&["lift", "--a", &a, "--curve", &c, "--p", "2"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 5\nn = 3\ntrials = 4\n[tolerances]\nclarkson = 1e-9\n");
    let out = run(&["verify", "--suite", "clarkson", "--config", &cfg, "--trials", "6"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["n"], 3);
    assert_eq!(v["config"]["trials"], 6);
    assert_eq!(v["checks"][0]["tolerance"], 1e-9);
    let out = run(&["verify", "--suite", "clarkson", "--config", &cfg, "--tol.clarkson=1e-7"]);
    assert_eq!(json(&out)["checks"][0]["tolerance"], 1e-7);
}

#[test]
fn csv_report_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&["verify", "--suite", "norms", "--trials", "5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(&rdr.headers().unwrap()[1], "check");
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn demo_nonclosed_table() {
    let out = run(&["demo-nonclosed", "--harmonic", "--n-max", "64"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 63);
    for r in &rows {
        assert!((r[1] - 1.0 / r[0].sqrt()).abs() < 1e-12, "{r:?}");
    }
    assert!(rows.windows(2).all(|w| w[1][4] < w[0][4]));

    let out = run(&["demo-nonclosed", "--eigenvalues", "0,1,3", "--n-max", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(csv::Reader::from_reader(out.stdout.as_slice()).records().count(), 2);

    assert_eq!(code(&run(&["demo-nonclosed", "--eigenvalues", "1", "--n-min", "1", "--n-max", "1"])), 2);
    assert_eq!(code(&run(&["demo-nonclosed", "--eigenvalues", "1,2,1", "--n-max", "3"])), 2);
}

#[test]
fn geodesic_command() {
    let mut rng = rand::rng();
    let dir = tempfile::tempdir().unwrap();
    let a = Hermitian::from_real_diagonal(&[0.0, 0.0, 1.0, 2.0]).conjugated_by(&random_unitary(4, &mut rng));
    let x0 = write(dir.path(), "x0.json", &matrix_to_json(a.as_matrix()));

    let out = run(&["geodesic", "--x0", &x0, "--x1", &x0, "--p", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["length"].as_f64().unwrap(), 0.0);
    assert_eq!(v["certificate"], "MINIMAL");

    // Far endpoints: still reports the critical point, without the certificate.
    let z = random_skew(4, &mut rng);
    let z = z.scaled(2.0 / schatten_geo::linalg::pnorm(&z, schatten_geo::EvenP::new(4).unwrap()));
    let x1 = write(dir.path(), "x1.json", &matrix_to_json(a.conjugated_by(&exp_skew(&z)).as_matrix()));
    let out = run(&["geodesic", "--x0", &x0, "--x1", &x1, "--p", "4"]);
    if code(&out) == 0 {
        let v = json(&out);
        assert!(v["length"].as_f64().unwrap() >= std::f64::consts::FRAC_PI_4);
        assert_eq!(v["certificate"], "NO-CERTIFICATE");
        assert!(v["z"]["entries"].is_array());
    } else {
        assert_eq!(code(&out), 3);
    }

    let other = write(dir.path(), "b.json", &matrix_to_json(random_hermitian(4, &mut rng).as_matrix()));
    assert_eq!(code(&run(&["geodesic", "--x0", &x0, "--x1", &other])), 2);
}

#[test]
fn distance_lift_and_convexity_commands() {
    let mut rng = rand::rng();
    let dir = tempfile::tempdir().unwrap();
    let u = random_unitary(3, &mut rng);
    let v = random_unitary(3, &mut rng);
    let fu = write(dir.path(), "u.json", &matrix_to_json(u.as_matrix()));
    let fv = write(dir.path(), "v.json", &matrix_to_json(v.as_matrix()));
    let out = run(&["distance", "--u", &fu, "--v", &fv, "--p", "6"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let expected = schatten_geo::group::distance_p(&u, &v, schatten_geo::EvenP::new(6).unwrap());
    assert!((r["distance"].as_f64().unwrap() - expected).abs() < 1e-14);
    assert_eq!(code(&run(&["distance", "--u", &fu, "--v", &fu, "--format", "csv"])), 0);

    let out = run(&["lift", "--n", "3", "--p", "4", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(r["defect"].as_f64().unwrap() < 1e-6);
    assert!(r["lift_length"].as_f64().unwrap() <= r["source_length"].as_f64().unwrap() + 1e-6);

    let out = run(&["convexity", "--n", "3", "--p", "4", "--seed", "2"]);
    assert!(matches!(code(&out), 0 | 2), "{}", String::from_utf8_lossy(&out.stderr));
    if code(&out) == 0 {
        assert_eq!(json(&out)["ok"], true);
    }
}
