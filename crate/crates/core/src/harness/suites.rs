//! The verification suites. Each trial draws from its own generator stream, so results do
//! not depend on scheduling.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{par_trials, trial_rng, CheckRecord, ExperimentConfig};
use crate::error::{GeoError, Result};
use crate::expcalc::{dexp, dexp_inv, f_ad_inverse_apply, g_bound, quadratic_q, quadratic_q_sum_of_squares, q_commutator_bound_check};
use crate::group::{
    clarkson_check, convexity_profile, distance_p, first_variation_check, geodesic_family_bound, minimality_experiment,
    semi_parallelogram_gap, tol_disc, ExponentialProduct, GeodesicSegment, Profile,
};
use crate::linalg::spectral::exp_skew;
use crate::linalg::{c, opnorm, pnorm, schatten_norm_pow, singular_values, EvenP, Hermitian, Unitary};
use crate::orbit::{
    best_approximant_q, c_a, c_a_bound_check, cross_section_sigma, delta_a, delta_a_inverse, endpoint_geodesic,
    horizontal_lift_p2_curve, isometric_lift_curve, isotropy_algebra, minimal_lifting_from, nonclosedness_demo,
    quotient_norm, sharpness_witness, ConjugationCurve, OrbitSpec,
};
use crate::random::{ginibre, random_skew, random_skew_in_ball, random_skew_unit, random_skew_with_opnorm, random_unitary};

pub type SuiteFn = fn(&ExperimentConfig, u64) -> Result<Vec<CheckRecord>>;

/// Suite names, stream ids and entry points, in the order `all` runs them.
pub const SUITES: &[(&str, u64, SuiteFn)] = &[
    ("norms", 1, norms),
    ("dexp", 2, dexp_suite),
    ("hessian", 3, hessian),
    ("minimality", 4, minimality),
    ("variation", 5, variation),
    ("convexity", 6, convexity),
    ("clarkson", 7, clarkson),
    ("semiparallelogram", 8, semiparallelogram),
    ("family-bound", 9, family_bound),
    ("lifts", 10, lifts),
    ("orbit", 11, orbit),
    ("sigma", 12, sigma),
];

/// Rejection sampling gives up after this many draws.
const MAX_DRAWS: usize = 1000;

/// Hermitian test operator with one repeated eigenvalue when `n >= 3`, in a random frame.
pub fn orbit_operator(n: usize, rng: &mut impl Rng) -> Hermitian {
    let eigs: Vec<f64> = if n >= 3 { (0..n).map(|k| k.saturating_sub(1) as f64).collect() } else { vec![0.0, 1.0] };
    Hermitian::from_real_diagonal(&eigs).conjugated_by(&random_unitary(n, rng))
}

/// One row of gaps per trial, one column per check; `None` skips a sample.
fn records(
    suite: &str,
    cfg: &ExperimentConfig,
    checks: &[(&str, &str)],
    rows: &[Vec<Option<f64>>],
    params: &[&str],
) -> Vec<CheckRecord> {
    let params: BTreeMap<String, f64> = params.iter().map(|k| (k.to_string(), cfg.param(k))).collect();
    checks
        .iter()
        .enumerate()
        .map(|(j, (name, tol))| {
            let gaps: Vec<f64> = rows.iter().filter_map(|r| r[j]).collect();
            CheckRecord::from_gaps(suite, name, cfg.tol(tol), &gaps, params.clone())
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn norms(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let lower = (1.0 - PI * PI / 12.0).sqrt();
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let u = random_unitary(n, &mut rng);
        let v = random_unitary(n, &mut rng);
        let d = distance_p(&u, &v, p);
        let chord = pnorm(&(u.as_matrix() - v.as_matrix()), p);
        let scale = d.max(1.0);
        let m = ginibre(n, &mut rng);
        let by_svd = singular_values(&m).iter().map(|s| s.powf(p.as_f64())).sum::<f64>().powf(1.0 / p.as_f64());
        Ok(vec![Some((chord - d) / scale), Some((lower * d - chord) / scale), Some(rel(pnorm(&m, p), by_svd))])
    })?;
    Ok(records(
        "norms",
        cfg,
        &[("chord_below_distance", "norm_equiv"), ("chord_above_scaled_distance", "norm_equiv"), ("schatten_routes", "norm_equiv")],
        &rows,
        &[],
    ))
}

fn dexp_suite(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let a = random_skew_in_ball(n, p, 1.0, &mut rng);
        let b = random_skew_in_ball(n, p, 1.0, &mut rng);
        let exact = dexp(&a, &b);
        let h = 1e-3;
        let e = |s: f64| exp_skew(&(&a + &b.scaled(s))).into_inner();
        let fd = (e(-2.0 * h) - e(-h) * c(8.0) + e(h) * c(8.0) - e(2.0 * h)) / c(12.0 * h);
        let fd_gap = (fd - &exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
        let back = dexp_inv(&a, &exact)?;
        let inv_gap = (back.as_matrix() - b.as_matrix()).norm() / b.norm().max(f64::MIN_POSITIVE);
        // Contraction holds for any skew-Hermitian base point.
        let big = random_skew_with_opnorm(n, 3.0 * rng.random::<f64>(), &mut rng);
        let contraction = pnorm(&dexp(&big, &b), p) - pnorm(&b, p);
        let w = random_skew_in_ball(n, p, FRAC_PI_2, &mut rng);
        let unit = random_skew_unit(n, p, &mut rng);
        let lhs = pnorm(f_ad_inverse_apply(&w, &unit)?.as_matrix(), p);
        let rhs = g_bound(opnorm(&w))?;
        Ok(vec![Some(fd_gap), Some(inv_gap), Some(contraction), Some(lhs / rhs - 1.0)])
    })?;
    Ok(records(
        "dexp",
        cfg,
        &[
            ("dexp_vs_difference", "dexp_fd"),
            ("dexp_inverse_roundtrip", "dexp_fd"),
            ("dexp_contraction", "contraction"),
            ("f_inverse_g_bound", "g_bound"),
        ],
        &rows,
        &[],
    ))
}

fn hessian(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let a = random_skew_in_ball(n, p, 2.0, &mut rng);
        let b = random_skew_unit(n, p, &mut rng);
        let q = quadratic_q(&a, &b, p);
        let h = 1e-2;
        let f = |s: f64| schatten_norm_pow(&(&a + &b.scaled(s)), p);
        let fd = (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
        let sos = quadratic_q_sum_of_squares(&a, &b, p);
        let scale = pnorm(&a, p).powi(p.get() as i32 - 2).max(f64::MIN_POSITIVE);
        let (lhs, rhs) = q_commutator_bound_check(&a, &b, p);
        Ok(vec![Some(rel(q, fd)), Some(rel(q, sos)), Some(-q / scale), Some((lhs - rhs) / rhs.max(f64::MIN_POSITIVE))])
    })?;
    Ok(records(
        "hessian",
        cfg,
        &[
            ("quadratic_vs_difference", "hessian"),
            ("sum_of_squares", "hessian"),
            ("positivity", "hessian"),
            ("commutator_bound", "hessian"),
        ],
        &rows,
        &[],
    ))
}

fn minimality(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let (competitors, grid, amplitude) = (cfg.count("competitors"), cfg.count("grid"), cfg.param("amplitude"));
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let r = (PI - 0.1) * rng.random_range(0.05..=1.0);
        let z = random_skew_with_opnorm(n, r, &mut rng);
        let rep = minimality_experiment(&z, competitors, amplitude, grid, p, &mut rng)?;
        Ok(vec![if competitors > 0 { Some(-rep.min_excess) } else { None }])
    })?;
    Ok(records("minimality", cfg, &[("competitor_shortfall", "minimality")], &rows, &["amplitude", "competitors", "grid"]))
}

fn variation(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let z = random_skew_in_ball(n, p, 1.0, &mut rng);
        let m1 = random_skew_in_ball(n, p, 1.0, &mut rng);
        let m2 = random_skew_in_ball(n, p, 1.0, &mut rng);
        let fam = move |s: f64, t: f64| exp_skew(&(&z + &m1.scaled(s)).scaled(t)).compose(&exp_skew(&m2.scaled(s * t * t)));
        Ok(vec![Some(first_variation_check(&fam, p).relative_gap())])
    })?;
    Ok(records("variation", cfg, &[("first_variation", "variation")], &rows, &[]))
}

fn convexity(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let grid = cfg.count("profile_grid").max(1);
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        for _ in 0..MAX_DRAWS {
            let u = random_unitary(n, &mut rng);
            let base = u.compose(&exp_skew(&random_skew_in_ball(n, p, 1.0, &mut rng)));
            let z = random_skew_unit(n, p, &mut rng).scaled(rng.random_range(0.1..0.5));
            let beta = GeodesicSegment::new(base, z, (0.0, 1.0))?;
            match convexity_profile(&u, &beta, grid, p) {
                Ok(prof) => return Ok(vec![Some(-prof.convexity_gap()), Some(prof.derivative_mismatch())]),
                Err(GeoError::Radius(_)) | Err(GeoError::Aligned) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(vec![None, None])
    })?;
    Ok(records(
        "convexity",
        cfg,
        &[("second_difference_above_sine_bound", "convexity"), ("derivative_formulas", "convexity_fd")],
        &rows,
        &["profile_grid"],
    ))
}

fn clarkson(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let x = ginibre(n, &mut rng) * c(rng.random_range(0.01..3.0));
        let y = ginibre(n, &mut rng) * c(rng.random_range(0.01..3.0));
        let (lhs, rhs) = clarkson_check(&x, &y, p);
        Ok(vec![Some((lhs - rhs) / rhs)])
    })?;
    Ok(records("clarkson", cfg, &[("clarkson", "clarkson")], &rows, &[]))
}

fn semiparallelogram(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let r0 = cfg.param("r0");
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        for _ in 0..MAX_DRAWS {
            let u = random_unitary(n, &mut rng);
            let mid = u.compose(&exp_skew(&random_skew_in_ball(n, p, r0, &mut rng)));
            let x = random_skew_in_ball(n, p, 0.5 * r0, &mut rng);
            let gamma = GeodesicSegment::new(mid.compose(&exp_skew(&-&x)), x.scaled(2.0), (0.0, 1.0))?;
            let (g0, g1) = (gamma.start(), gamma.end());
            let admissible = [distance_p(&u, &g0, p), distance_p(&u, &g1, p), distance_p(&u, &mid, p), gamma.length(p)]
                .iter()
                .all(|d| *d < r0);
            if !admissible {
                continue;
            }
            let gap = semi_parallelogram_gap(&u, &gamma, p, r0)?;
            let scale = (0.5 * gamma.length(p)).powf(p.as_f64()) + distance_p(&u, &mid, p).powf(p.as_f64());
            return Ok(vec![Some(-gap / scale.max(f64::MIN_POSITIVE))]);
        }
        Ok(vec![None])
    })?;
    Ok(records("semiparallelogram", cfg, &[("semi_parallelogram", "semiparallelogram")], &rows, &["r0"]))
}

fn family_bound(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let r0 = cfg.param("r0");
    let grid = cfg.count("t_grid").max(2);
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        for _ in 0..MAX_DRAWS {
            let u = random_unitary(n, &mut rng);
            let v = u.compose(&exp_skew(&random_skew_in_ball(n, p, r0, &mut rng)));
            let w = u.compose(&exp_skew(&random_skew_in_ball(n, p, r0, &mut rng)));
            if distance_p(&v, &w, p) >= r0 {
                continue;
            }
            match geodesic_family_bound(&u, &v, &w, p, r0, grid) {
                Ok(rep) => return Ok(vec![Some(rep.worst_excess), Some(rep.reverse_triangle_excess)]),
                Err(GeoError::Radius(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(vec![None, None])
    })?;
    let mut out = records(
        "family-bound",
        cfg,
        &[("family_length_bound", "family_bound"), ("reverse_triangle_chain", "family_bound")],
        &rows,
        &["r0", "t_grid"],
    );
    let cap = (g_bound(FRAC_PI_4)? - PI / (2.0 * 2f64.sqrt())).abs();
    out.push(CheckRecord::from_gaps("family-bound", "g_cap_at_quarter_pi", cfg.tol("family_bound"), &[cap], BTreeMap::new()));
    Ok(out)
}

fn random_group_curve(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Result<ExponentialProduct> {
    ExponentialProduct::new(
        Unitary::identity(n),
        vec![
            (Profile::Linear(scale), random_skew(n, rng)),
            (Profile::Sine(0.5 * scale), random_skew(n, rng)),
            (Profile::Quadratic(0.5 * scale), random_skew(n, rng)),
        ],
        (0.0, 1.0),
    )
}

fn lifts(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let steps = cfg.count("steps").max(200);
    let allowance = tol_disc(steps);
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let spec = OrbitSpec::new(orbit_operator(n, &mut rng), p, None)?;
        let spec2 = spec.with_p(EvenP::new(2)?);
        let mut scale = 0.3;
        loop {
            let curve = random_group_curve(n, scale, &mut rng)?;
            let res = match isometric_lift_curve(&curve, &spec, steps) {
                Ok(r) => r,
                Err(GeoError::Subdivide { .. }) if scale > 1e-3 => {
                    scale *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let src = res.lengths.source.unwrap_or(f64::NAN);
            let corr = res.lengths.correction.unwrap_or(f64::NAN);
            let iso2 = isometric_lift_curve(&curve, &spec2, steps)?;
            let orbit = ConjugationCurve { curve: &curve, a: spec.a().clone() };
            let hor = horizontal_lift_p2_curve(&orbit, &spec2, steps)?;
            return Ok(vec![
                Some(res.defect),
                Some(res.lengths.lift - src - allowance),
                Some((res.lengths.orbit - res.lengths.lift).abs()),
                Some(corr - 2.0 * src - allowance),
                Some(res.speed_mismatch.unwrap_or(f64::NAN)),
                Some((iso2.lengths.lift - hor.lengths.lift).abs()),
                Some(hor.horizontality.unwrap_or(f64::NAN)),
                Some(hor.defect),
            ]);
        }
    })?;
    Ok(records(
        "lifts",
        cfg,
        &[
            ("isometric_defect", "lift_defect"),
            ("lift_not_longer", "lift_length"),
            ("orbit_length_identity", "lift_length"),
            ("correction_at_most_twice", "lift_length"),
            ("speed_identity", "lift_length"),
            ("p2_horizontal_cross_check", "lift_cross"),
            ("horizontality", "horizontality"),
            ("horizontal_defect", "lift_defect"),
        ],
        &rows,
        &["steps"],
    ))
}

fn orbit(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let (n, p) = (cfg.n, cfg.even_p());
    let plant = cfg.param("plant_length").min(FRAC_PI_4 - 1e-3);
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let a = orbit_operator(n, &mut rng);
        let spec = OrbitSpec::new(a.clone(), p, None)?;
        let pt = spec.point_from_unitary(&random_unitary(n, &mut rng));
        let iso = pt.isotropy();
        let random_iso = |rng: &mut ChaCha8Rng| {
            let coef: Vec<f64> = (0..iso.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            iso.combine(&coef)
        };

        // Plant a geodesic and recover it from its endpoints.
        let z0 = minimal_lifting_from(&pt, &random_skew(n, &mut rng), p)?;
        let len = plant * rng.random_range(0.2..=1.0);
        let z0 = z0.scaled(len / pnorm(&z0, p));
        let x1 = pt.x().conjugated_by(&exp_skew(&z0));
        let geo = endpoint_geodesic(&spec, pt.x(), &x1)?;

        // Best approximant properties.
        let x = random_skew(n, &mut rng);
        let q = best_approximant_q(&x, iso, p)?;
        let idem = best_approximant_q(&(&x - &q), iso, p)?.norm() / x.norm();
        let lam = rng.random_range(0.1..5.0);
        let homog = (best_approximant_q(&x.scaled(lam), iso, p)?.as_matrix() - q.as_matrix() * c(lam)).norm() / (lam * x.norm());
        let bounded = pnorm(&q, p) - 2.0 * pnorm(&x, p);

        // Minimal liftings: independent of the solution, minimal against the isotropy algebra.
        let tangent = pt.differential(&random_skew(n, &mut rng));
        let w1 = pt.solve_tangent(&tangent)?;
        let w2 = &w1 + &random_iso(&mut rng);
        let z1 = minimal_lifting_from(&pt, &w1, p)?;
        let z2 = minimal_lifting_from(&pt, &w2, p)?;
        let unique = (z1.as_matrix() - z2.as_matrix()).norm() / z1.norm().max(1.0);
        let y = random_iso(&mut rng);
        let minimal = pnorm(&z1, p) - pnorm(&(&z1 - &y), p);
        let u = random_unitary(n, &mut rng);
        let moved = spec.point(&pt.x().conjugated_by(&u))?;
        let qa = quotient_norm(&pt, &tangent, p)?;
        let qb = quotient_norm(&moved, &tangent.conjugated_by(&u), p)?;

        // The commutator map of A.
        let m = ginibre(n, &mut rng);
        let (lhs, rhs) = c_a_bound_check(&spec, &m)?;
        let witness = sharpness_witness(&spec)?;
        let (wl, wr) = c_a_bound_check(&spec, &witness)?;
        let offdiag = &m - spec.base_point().pinch(&m);
        let back = delta_a_inverse(&spec, &offdiag)?;
        let range = (delta_a(&spec, &back) - &offdiag).norm() / offdiag.norm().max(1.0);
        let commutes = isotropy_algebra(&spec)
            .basis()
            .iter()
            .map(|b| (b.as_matrix() * a.as_matrix() - a.as_matrix() * b.as_matrix()).norm())
            .fold(0.0, f64::max);

        Ok(vec![
            Some((geo.length - len).abs()),
            Some(geo.stationarity),
            Some(geo.endpoint_residual),
            Some(idem),
            Some(homog),
            Some(bounded),
            Some(commutes),
            Some(unique),
            Some(minimal),
            Some(rel(qa, qb)),
            Some(1.0 - lhs / rhs.max(f64::MIN_POSITIVE)),
            Some((wl - wr).abs()),
            Some(range),
        ])
    })?;
    let mut out = records(
        "orbit",
        cfg,
        &[
            ("plant_and_recover", "recover"),
            ("endpoint_stationarity", "stationarity"),
            ("endpoint_residual", "recover"),
            ("approximant_idempotent", "projection"),
            ("approximant_homogeneous", "projection"),
            ("approximant_bounded", "projection"),
            ("isotropy_commutes", "projection"),
            ("lifting_unique", "uniqueness"),
            ("lifting_minimal", "projection"),
            ("quotient_invariant", "invariance"),
            ("ca_lower_bound", "ca_bound"),
            ("ca_sharpness", "sharpness"),
            ("delta_range", "range"),
        ],
        &rows,
        &["plant_length"],
    );
    let n_max = cfg.count("n_max").max(2);
    let eigs: Vec<f64> = (1..=n_max).map(|k| 1.0 / k as f64).collect();
    let table = nonclosedness_demo(&eigs, n_max)?;
    let pn: Vec<f64> = table.iter().map(|r| (r.p_norm - 1.0 / (r.n as f64).sqrt()).abs()).collect();
    let bound: Vec<f64> = table.iter().map(|r| (r.delta_norm.powi(2) - r.delta_sq_bound) / r.delta_sq_bound).collect();
    let mut params = BTreeMap::new();
    params.insert("n_max".to_string(), n_max as f64);
    let tol = cfg.tol("nonclosed");
    out.push(CheckRecord::from_gaps("orbit", "nonclosed_projection_norm", tol, &pn, params.clone()));
    out.push(CheckRecord::from_gaps("orbit", "nonclosed_delta_bound", tol, &bound, params));
    Ok(out)
}

fn sigma(cfg: &ExperimentConfig, id: u64) -> Result<Vec<CheckRecord>> {
    let n = cfg.n;
    let rows = par_trials(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, id, t);
        let spec = OrbitSpec::new(orbit_operator(n, &mut rng), EvenP::new(2)?, None)?;
        let ca = c_a(&spec)?.value;
        let iso = isotropy_algebra(&spec);
        let coef: Vec<f64> = (0..iso.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let v = exp_skew(&iso.combine(&coef));
        let id_n = Unitary::identity(n);
        let at_base = (cross_section_sigma(&spec, &v)?.as_matrix() - id_n.as_matrix()).norm();
        for _ in 0..MAX_DRAWS {
            let z = random_skew_in_ball(n, EvenP::new(2)?, 1.0, &mut rng);
            let u = exp_skew(&z);
            let b = spec.a().conjugated_by(&u);
            if (b.as_matrix() - spec.a().as_matrix()).norm() >= 0.9 * ca {
                continue;
            }
            let s = cross_section_sigma(&spec, &u)?;
            let section = (spec.a().conjugated_by(&s).as_matrix() - b.as_matrix()).norm();
            let other = cross_section_sigma(&spec, &u.compose(&v))?;
            let well_defined = (other.as_matrix() - s.as_matrix()).norm();
            return Ok(vec![Some(at_base), Some(section), Some(well_defined)]);
        }
        Ok(vec![Some(at_base), None, None])
    })?;
    Ok(records(
        "sigma",
        cfg,
        &[("identity_on_isotropy", "sigma"), ("section_property", "sigma"), ("well_defined", "sigma")],
        &rows,
        &[],
    ))
}
