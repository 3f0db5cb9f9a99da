//! Numerical experiments on minimality, first variation, convexity and the comparison
//! inequalities for geodesic triangles.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::{curve_length, distance_p, DiscretizedCurve, GeodesicSegment};
use crate::error::{GeoError, Result};
use crate::expcalc::{g_bound, pnorm_pow_gradient, AdOperator, HessianForm};
use crate::linalg::spectral::{unitary_log, ExpRay};
use crate::linalg::{
    c, frobenius_inner, opnorm, pnorm, schatten_norm_pow, trace_product, EvenP, SkewHermitian, SquareMatrix,
    Unitary,
};
use crate::quadrature::gauss_legendre_64;
use crate::random::random_skew_unit;

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub reference_length: f64,
    pub lengths: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// `min_k (L(gamma_k) - |z|_p)`.
    pub min_excess: f64,
    pub grid: usize,
}

/// Compares `|z|_p` against chordal lengths of fixed-endpoint perturbations
/// `exp(a sin(pi t) m) exp(t z)` with `|m|_p = 1` and `a` uniform in `[0, amplitude]`.
pub fn minimality_experiment(
    z: &SkewHermitian,
    trials: usize,
    amplitude: f64,
    grid: usize,
    p: EvenP,
    rng: &mut impl Rng,
) -> Result<MinimalityReport> {
    if opnorm(z) > PI {
        return Err(GeoError::OutOfDomain(format!("|z|_inf = {} exceeds pi", opnorm(z))));
    }
    if grid == 0 {
        return Err(GeoError::InvalidInput("grid must be positive".into()));
    }
    let n = z.dim();
    let reference_length = pnorm(z, p);
    let mut lengths = Vec::with_capacity(trials);
    let mut amplitudes = Vec::with_capacity(trials);
    let along = ExpRay::new(z);
    for _ in 0..trials {
        let m = random_skew_unit(n, p, rng);
        let a = amplitude * rng.random::<f64>();
        let bend = ExpRay::new(&m);
        let samples = DiscretizedCurve::sample(0.0, 1.0, grid, |t| bend.at(a * (PI * t).sin()).compose(&along.at(t)))?;
        lengths.push(curve_length(&samples, p)?);
        amplitudes.push(a);
    }
    let min_excess = lengths.iter().map(|l| l - reference_length).fold(f64::INFINITY, f64::min);
    Ok(MinimalityReport { reference_length, lengths, amplitudes, min_excess, grid })
}

/// A two-parameter family `(s, t) -> g_s(t)`, smooth on a neighborhood of `{0} x [0, 1]`.
pub trait VariationFamily: Sync {
    fn point(&self, s: f64, t: f64) -> Unitary;
}

impl<F: Fn(f64, f64) -> Unitary + Sync> VariationFamily for F {
    fn point(&self, s: f64, t: f64) -> Unitary {
        self(s, t)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FirstVariation {
    /// Finite difference of the energy `int |v_s|_p^p dt` at `s = 0`.
    pub lhs: f64,
    /// Boundary term minus the integral term.
    pub rhs: f64,
    pub boundary: f64,
    pub integral: f64,
}

impl FirstVariation {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / (1.0 + self.lhs.abs())
    }
}

const FD_STEP: f64 = 1e-3;

/// Fourth-order central difference of a matrix-valued function.
fn five_point(f: impl Fn(f64) -> SquareMatrix, x: f64, h: f64) -> SquareMatrix {
    let d = f(x - 2.0 * h) - f(x - h) * c(8.0) + f(x + h) * c(8.0) - f(x + 2.0 * h);
    d / c(12.0 * h)
}

fn five_point_scalar(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// `g* dg/dt` and `g* dg/ds` of a family, by finite differences.
fn family_velocities(fam: &dyn VariationFamily, s: f64, t: f64) -> (SquareMatrix, SquareMatrix) {
    let g = fam.point(s, t);
    let dt = five_point(|x| fam.point(s, x).into_inner(), t, FD_STEP);
    let ds = five_point(|x| fam.point(x, t).into_inner(), s, FD_STEP);
    let gi = g.as_matrix().adjoint();
    (
        SkewHermitian::skew_part(&gi * dt).into_inner(),
        SkewHermitian::skew_part(&gi * ds).into_inner(),
    )
}

fn time_velocity(fam: &dyn VariationFamily, s: f64, t: f64) -> SquareMatrix {
    let g = fam.point(s, t);
    let dt = five_point(|x| fam.point(s, x).into_inner(), t, FD_STEP);
    SkewHermitian::skew_part(g.as_matrix().adjoint() * dt).into_inner()
}

/// Checks the first variation formula of the p-energy at `s = 0`.
///
/// With `v = g* g_t`, `w = g* g_s` and `G(v) = (-1)^{p/2} p v^{p-1}`:
/// `dE/ds = Re Tr(G(v) w)|_{t=0}^{1} - int_0^1 Re Tr(d/dt[G(v)] w) dt`.
pub fn first_variation_check(family: &dyn VariationFamily, p: EvenP) -> FirstVariation {
    let (nodes, weights) = gauss_legendre_64();
    let energy = |s: f64| -> f64 {
        nodes.iter().zip(weights).map(|(&t, &wt)| wt * schatten_norm_pow(&time_velocity(family, s, t), p)).sum()
    };
    let lhs = five_point_scalar(energy, 0.0, FD_STEP);

    let pairing = |t: f64| {
        let (v, w) = family_velocities(family, 0.0, t);
        trace_product(&pnorm_pow_gradient(&v, p), &w).re
    };
    let boundary = pairing(1.0) - pairing(0.0);
    let integral: f64 = nodes
        .iter()
        .zip(weights)
        .map(|(&t, &wt)| {
            let dg = five_point(|x| pnorm_pow_gradient(&time_velocity(family, 0.0, x), p), t, FD_STEP);
            let (_, w) = family_velocities(family, 0.0, t);
            wt * trace_product(&dg, &w).re
        })
        .sum();
    FirstVariation { lhs, rhs: boundary - integral, boundary, integral }
}

/// The function `s -> d_p(u, beta(s))^p` along a geodesic and its derivative formulas.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvexityProfile {
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    /// `H_w(w', w) / (p - 1)`.
    pub f_prime: Vec<f64>,
    /// `H_w(w', z)`.
    pub f_second: Vec<f64>,
    pub f_prime_fd: Vec<f64>,
    pub f_second_fd: Vec<f64>,
    /// `Q_w(w')`.
    pub r_squared: Vec<f64>,
    /// `R^2 sin(2 |w|_p) / (2 |w|_p)`.
    pub lower_bound: Vec<f64>,
    /// Largest relative disagreement between `w'` from `F(ad w)^{-1} z` and from differences.
    pub wdot_mismatch: f64,
    /// Grid indices where `R = 0`.
    pub degenerate: Vec<usize>,
    /// Grid indices where the second difference is negative beyond tolerance.
    pub concave_points: Vec<usize>,
}

impl ConvexityProfile {
    /// `min_k (second difference - lower bound)`.
    pub fn convexity_gap(&self) -> f64 {
        self.f_second_fd.iter().zip(&self.lower_bound).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min)
    }

    /// Largest relative disagreement between derivative formulas and finite differences.
    pub fn derivative_mismatch(&self) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);
        let first = self.f_prime.iter().zip(&self.f_prime_fd).map(|(a, b)| rel(*a, *b));
        let second = self.f_second.iter().zip(&self.f_second_fd).map(|(a, b)| rel(*a, *b));
        first.chain(second).fold(0.0, f64::max)
    }
}

const CONCAVITY_TOL: f64 = 1e-6;

/// Samples `f(s) = d_p(u, beta(s))^p` on `grid + 1` points of the geodesic's interval.
///
/// Requires `beta` inside the open ball of radius `pi/2` about `u` and `u` off the
/// geodesic's prolongation.
pub fn convexity_profile(u: &Unitary, beta: &GeodesicSegment, grid: usize, p: EvenP) -> Result<ConvexityProfile> {
    let z = &beta.velocity;
    if z.norm() == 0.0 {
        return Err(GeoError::InvalidInput("the geodesic is constant".into()));
    }
    if grid == 0 {
        return Err(GeoError::InvalidInput("grid must be positive".into()));
    }
    let (t0, t1) = beta.interval;
    let rel = u.adjoint().compose(&beta.base);
    let w_at = |s: f64| -> Result<SkewHermitian> {
        let w = unitary_log(&rel.compose(&crate::linalg::spectral::exp_skew(&z.scaled(s - t0))));
        let d = pnorm(&w, p);
        if d >= PI / 2.0 {
            return Err(GeoError::Radius(format!(
                "the geodesic leaves the ball of radius pi/2 about u (d_p = {d} at s = {s})"
            )));
        }
        Ok(w)
    };

    let w0 = w_at(t0)?;
    let coef = frobenius_inner(z, &w0) / z.norm_squared();
    let off_line = (w0.as_matrix() - z.as_matrix() * c(coef)).norm();
    if off_line <= 1e-9 * w0.norm().max(1.0) {
        return Err(GeoError::Aligned);
    }

    let pf = p.as_f64();
    let h1 = 1e-4;
    let h2 = 1e-3;
    let f_of = |s: f64| -> Result<f64> { Ok(schatten_norm_pow(w_at(s)?.as_matrix(), p)) };
    let mut prof = ConvexityProfile::default();
    let zscale = pnorm(z, p).powi(2);
    for k in 0..=grid {
        let s = t0 + (t1 - t0) * k as f64 / grid as f64;
        let w = w_at(s)?;
        let ad = AdOperator::new(&w);
        let wdot = SkewHermitian::skew_part(ad.apply_f_inverse(z.as_matrix())?);
        let form = HessianForm::new(&w, p);
        let f = schatten_norm_pow(&w, p);
        let r2 = form.quadratic(&wdot);
        let wn = f.powf(1.0 / pf);
        let bound = if wn > 0.0 { r2 * (2.0 * wn).sin() / (2.0 * wn) } else { r2 };

        let wp = w_at(s + h1)?;
        let wm = w_at(s - h1)?;
        let wdot_fd = (wp.as_matrix() - wm.as_matrix()) / c(2.0 * h1);
        let mism = (wdot_fd - wdot.as_matrix()).norm() / wdot.norm().max(1e-12);
        prof.wdot_mismatch = prof.wdot_mismatch.max(mism);

        let fp_fd = (f_of(s - 2.0 * h1)? - 8.0 * f_of(s - h1)? + 8.0 * f_of(s + h1)? - f_of(s + 2.0 * h1)?) / (12.0 * h1);
        let (fm2, fm1, fp1, fp2) = (f_of(s - 2.0 * h2)?, f_of(s - h2)?, f_of(s + h2)?, f_of(s + 2.0 * h2)?);
        let fs_fd = (-fm2 + 16.0 * fm1 - 30.0 * f + 16.0 * fp1 - fp2) / (12.0 * h2 * h2);

        if r2 <= 1e-12 * zscale {
            prof.degenerate.push(k);
        }
        if fs_fd < -CONCAVITY_TOL {
            prof.concave_points.push(k);
        }
        prof.s.push(s);
        prof.f.push(f);
        prof.f_prime.push(form.eval(&wdot, &w) / (pf - 1.0));
        prof.f_second.push(form.eval(&wdot, z));
        prof.f_prime_fd.push(fp_fd);
        prof.f_second_fd.push(fs_fd);
        prof.r_squared.push(r2);
        prof.lower_bound.push(bound);
    }
    Ok(prof)
}

/// Returns `(2|x|^p + 2|y|^p, |x - y|^p + |x + y|^p)`.
pub fn clarkson_check(x: &SquareMatrix, y: &SquareMatrix, p: EvenP) -> (f64, f64) {
    let lhs = 2.0 * schatten_norm_pow(x, p) + 2.0 * schatten_norm_pow(y, p);
    let rhs = schatten_norm_pow(&(x - y), p) + schatten_norm_pow(&(x + y), p);
    (lhs, rhs)
}

fn check_r0(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0 <= PI / 4.0 + 1e-15) {
        return Err(GeoError::Radius(format!("r0 = {r0} must lie in (0, pi/4]")));
    }
    Ok(())
}

/// `g(r0)/2 [d(u, g0)^p + d(u, g1)^p] - d(u, g_mid)^p - L(g)^p / 2^p`, nonnegative when all
/// three distances are below `r0 <= pi/4`.
pub fn semi_parallelogram_gap(u: &Unitary, gamma: &GeodesicSegment, p: EvenP, r0: f64) -> Result<f64> {
    check_r0(r0)?;
    let (t0, t1) = gamma.interval;
    let pts = [gamma.point(t0), gamma.point(0.5 * (t0 + t1)), gamma.point(t1)];
    let d: Vec<f64> = pts.iter().map(|x| distance_p(u, x, p)).collect();
    if let Some(bad) = d.iter().find(|&&x| x >= r0) {
        return Err(GeoError::Radius(format!("d_p(u, gamma) = {bad} is not below r0 = {r0}")));
    }
    let pf = p.as_f64();
    let g = g_bound(r0)?;
    let l = gamma.length(p);
    Ok(0.5 * g * (d[0].powf(pf) + d[2].powf(pf)) - d[1].powf(pf) - (l / 2.0).powf(pf))
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyBoundReport {
    pub t: Vec<f64>,
    /// `L(gamma_t) = d(alpha(t), beta(t))`.
    pub lengths: Vec<f64>,
    /// `t g(r0) L(gamma)`.
    pub bounds: Vec<f64>,
    /// `max_t (L(gamma_t) - t g(r0) L(gamma))`.
    pub worst_excess: f64,
    pub g: f64,
    /// `(|d(u,v) - d(u,w)|, |x - y|_p, g(r0) d(v, w))`, an increasing chain.
    pub reverse_triangle: (f64, f64, f64),
    pub reverse_triangle_excess: f64,
}

/// Compares the geodesics `gamma_t` from `u e^{tx}` to `u e^{ty}` with the geodesic from
/// `v = u e^x` to `w = u e^y`, for `v, w` within `r0 <= pi/4` of `u`.
pub fn geodesic_family_bound(
    u: &Unitary,
    v: &Unitary,
    w: &Unitary,
    p: EvenP,
    r0: f64,
    grid: usize,
) -> Result<FamilyBoundReport> {
    check_r0(r0)?;
    if grid < 2 {
        return Err(GeoError::InvalidInput("the t-grid needs at least two points".into()));
    }
    let duv = distance_p(u, v, p);
    let duw = distance_p(u, w, p);
    if duv >= r0 || duw >= r0 {
        return Err(GeoError::Radius(format!(
            "v and w must lie within r0 = {r0} of u (distances {duv}, {duw})"
        )));
    }
    let x = unitary_log(&u.adjoint().compose(v));
    let y = unitary_log(&u.adjoint().compose(w));
    let g = g_bound(r0)?;
    let lg = distance_p(v, w, p);
    let mut t = Vec::with_capacity(grid);
    let mut lengths = Vec::with_capacity(grid);
    let mut bounds = Vec::with_capacity(grid);
    for k in 0..grid {
        let s = k as f64 / (grid - 1) as f64;
        let alpha = GeodesicSegment { base: u.clone(), velocity: x.clone(), interval: (0.0, 1.0) }.point(s);
        let beta = GeodesicSegment { base: u.clone(), velocity: y.clone(), interval: (0.0, 1.0) }.point(s);
        t.push(s);
        lengths.push(distance_p(&alpha, &beta, p));
        bounds.push(s * g * lg);
    }
    let worst_excess = lengths.iter().zip(&bounds).map(|(l, b)| l - b).fold(f64::NEG_INFINITY, f64::max);
    let chain = ((duv - duw).abs(), pnorm(&(&x - &y), p), g * lg);
    let reverse_triangle_excess = (chain.0 - chain.1).max(chain.1 - chain.2);
    Ok(FamilyBoundReport { t, lengths, bounds, worst_excess, g, reverse_triangle: chain, reverse_triangle_excess })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral::exp_skew;
    use crate::linalg::Complex64;
    use crate::random::{random_skew, random_skew_in_ball, random_skew_unit, random_skew_with_opnorm, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(k: u32) -> EvenP {
        EvenP::new(k).unwrap()
    }

    #[test]
    fn zero_amplitude_has_zero_excess() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = random_skew_with_opnorm(3, 2.0, &mut rng);
        let r = minimality_experiment(&z, 3, 0.0, 50, p(4), &mut rng).unwrap();
        assert!(r.min_excess.abs() < 1e-12);
    }

    #[test]
    fn perturbations_are_longer() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = random_skew_with_opnorm(3, PI - 0.1, &mut rng);
        let r = minimality_experiment(&z, 10, 0.5, 200, p(4), &mut rng).unwrap();
        assert!(r.min_excess >= -1e-4, "{}", r.min_excess);
    }

    #[test]
    fn beyond_pi_the_principal_log_is_shorter() {
        let mut d = SquareMatrix::zeros(2, 2);
        d[(0, 0)] = Complex64::new(0.0, PI + 0.3);
        let z = SkewHermitian::new(d).unwrap();
        let principal = unitary_log(&exp_skew(&z));
        assert!(pnorm(&principal, p(4)) < pnorm(&z, p(4)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(minimality_experiment(&z, 1, 0.1, 10, p(4), &mut rng).is_err());
    }

    #[test]
    fn first_variation_of_fixed_family_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = random_skew(3, &mut rng);
        let fam = move |_s: f64, t: f64| exp_skew(&z.scaled(t));
        let fv = first_variation_check(&fam, p(4));
        assert!(fv.lhs.abs() < 1e-9 && fv.rhs.abs() < 1e-9, "{fv:?}");
    }

    #[test]
    fn first_variation_geodesic_integral_term_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = random_skew(3, &mut rng).scaled(0.5);
        let m = random_skew(3, &mut rng);
        let fam = move |s: f64, t: f64| exp_skew(&m.scaled(s * (PI * t).sin())).compose(&exp_skew(&z.scaled(t)));
        let fv = first_variation_check(&fam, p(4));
        assert!(fv.integral.abs() < 1e-8, "{fv:?}");
        assert!(fv.relative_gap() < 1e-6, "{fv:?}");
    }

    #[test]
    fn first_variation_random_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let z = random_skew(4, &mut rng).scaled(0.6);
        let a = random_skew(4, &mut rng).scaled(0.4);
        let b = random_skew(4, &mut rng).scaled(0.4);
        let fam = move |s: f64, t: f64| {
            exp_skew(&(&z.scaled(t) + &a.scaled(s * t * t))).compose(&exp_skew(&b.scaled(s * (1.0 + t))))
        };
        for k in [2, 4, 6] {
            let fv = first_variation_check(&fam, p(k));
            assert!(fv.relative_gap() < 1e-6, "p={k} {fv:?}");
        }
    }

    #[test]
    fn convexity_profile_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [2, 4, 6] {
            let u = random_unitary(4, &mut rng);
            let b = u.compose(&exp_skew(&random_skew_in_ball(4, p(k), 0.6, &mut rng)));
            let z = random_skew_unit(4, p(k), &mut rng).scaled(0.5);
            let seg = GeodesicSegment::new(b, z, (0.0, 1.0)).unwrap();
            let prof = match convexity_profile(&u, &seg, 10, p(k)) {
                Ok(prof) => prof,
                Err(GeoError::Radius(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(prof.wdot_mismatch < 1e-6, "{}", prof.wdot_mismatch);
            assert!(prof.derivative_mismatch() < 1e-5, "p={k}: {}", prof.derivative_mismatch());
            assert!(prof.convexity_gap() >= -1e-6);
            assert!(prof.concave_points.is_empty());
        }
    }

    #[test]
    fn convexity_rejects_aligned_and_far() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_unitary(3, &mut rng);
        let z = random_skew_unit(3, p(4), &mut rng).scaled(0.3);
        let seg = GeodesicSegment::new(u.compose(&exp_skew(&z.scaled(0.5))), z.clone(), (0.0, 1.0)).unwrap();
        assert!(matches!(convexity_profile(&u, &seg, 5, p(4)), Err(GeoError::Aligned)));
        let far = GeodesicSegment::new(u.compose(&exp_skew(&random_skew_unit(3, p(4), &mut rng).scaled(1.7))), z, (0.0, 1.0))
            .unwrap();
        assert!(matches!(convexity_profile(&u, &far, 5, p(4)), Err(GeoError::Radius(_))));
    }

    #[test]
    fn clarkson_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = crate::random::ginibre(3, &mut rng);
        let zero = SquareMatrix::zeros(3, 3);
        let (l, r) = clarkson_check(&x, &zero, p(4));
        assert!((l - r).abs() < 1e-12 * l);
        let (l, r) = clarkson_check(&x, &x, p(6));
        let xp = schatten_norm_pow(&x, p(6));
        assert!((l - 4.0 * xp).abs() < 1e-12 * l && (r - 64.0 * xp).abs() < 1e-10 * r);
    }

    #[test]
    fn semi_parallelogram_midpoint_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let b = random_unitary(3, &mut rng);
        let z = random_skew_unit(3, p(4), &mut rng).scaled(0.6);
        let seg = GeodesicSegment::new(b, z, (0.0, 1.0)).unwrap();
        let u = seg.point(0.5);
        let r0 = PI / 4.0;
        let gap = semi_parallelogram_gap(&u, &seg, p(4), r0).unwrap();
        let l = seg.length(p(4));
        let expected = (g_bound(r0).unwrap() - 1.0) * (l / 2.0).powi(4);
        assert!((gap - expected).abs() < 1e-12);
        assert!(semi_parallelogram_gap(&u, &seg, p(4), 1.0).is_err());
    }

    #[test]
    fn family_bound_endpoints_and_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(3, &mut rng);
        let v = u.compose(&exp_skew(&random_skew_in_ball(3, p(4), 0.7, &mut rng)));
        let w = u.compose(&exp_skew(&random_skew_in_ball(3, p(4), 0.7, &mut rng)));
        let rep = geodesic_family_bound(&u, &v, &w, p(4), PI / 4.0, 21).unwrap();
        assert!((rep.g - PI / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(rep.worst_excess <= 1e-10);
        assert!(rep.reverse_triangle_excess <= 1e-10);
        assert!((rep.lengths[20] - distance_p(&v, &w, p(4))).abs() < 1e-10);
        let same = geodesic_family_bound(&u, &v, &v, p(4), PI / 4.0, 5).unwrap();
        assert!(same.lengths.iter().all(|&l| l < 1e-12));
    }
}
