//! Lifting orbit curves `gamma(t) = Gamma(t) A Gamma(t)*` to the unitary group.
//!
//! The isometric lift is `beta = Gamma e^z` with
//! `zdot = -F(ad(-z))^{-1} Q(v)`, `v = Gamma* Gamma'`, `z(0) = 0`. Then
//! `(e^z)' e^{-z} = -Q(v)` stays in the isotropy algebra, so `beta` still lifts `gamma`,
//! and `|beta* beta'|_p = |v - Q(v)|_p` is the quotient speed of `gamma`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{best_approximant_q, OrbitSpec, SkewSubspace};
use crate::error::{GeoError, Result};
use crate::expcalc::{dexp, f_ad_inverse_apply};
use crate::group::{richardson_length, DiscretizedCurve, GroupCurve, PiecewiseGeodesic};
use crate::linalg::spectral::exp_skew;
use crate::linalg::{pnorm, EvenP, Hermitian, SkewHermitian, SquareMatrix, Unitary};
use crate::quadrature::simpson;

/// Lengths reported by a lift.
#[derive(Clone, Debug, Serialize)]
pub struct LiftLengths {
    /// Finsler length of the orbit curve.
    pub orbit: f64,
    /// `L_p` of the lifted curve.
    pub lift: f64,
    /// `L_p` of the curve being lifted, when there is one.
    pub source: Option<f64>,
    /// `L_p` of the correction `t -> e^{z(t)}`.
    pub correction: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftResult {
    pub beta: DiscretizedCurve<Unitary>,
    /// `z(t)` at the sample times; empty for horizontal lifts.
    pub z_path: Vec<SkewHermitian>,
    /// `max_t |beta A beta* - gamma(t)|_2`.
    pub defect: f64,
    pub lengths: LiftLengths,
    /// `max_t | |beta* beta'|_p - |v - Q(v)|_p |`, with `beta'` from the exact `dexp`.
    pub speed_mismatch: Option<f64>,
    /// `max_t |P(Gamma* Gamma')|_2`, projecting on the isotropy algebra of `A`.
    pub horizontality: Option<f64>,
}

impl LiftResult {
    pub fn times(&self) -> &[f64] {
        self.beta.times()
    }
}

/// Even step counts on each smooth piece of `[a, b]`.
fn piece_grid(breaks: &[f64], steps_per_unit: usize) -> Vec<(f64, f64, usize)> {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let k = ((w[1] - w[0]) * steps_per_unit as f64).ceil().max(2.0) as usize;
            (w[0], w[1], k + k % 2)
        })
        .collect()
}

/// Keeps evaluation inside the piece so corners use the one-sided velocity.
fn clamp_inside(t: f64, a: f64, b: f64) -> f64 {
    t.max(a).min(b - 1e-12 * (b - a))
}

/// Isometric lift of `t -> Gamma(t) A Gamma(t)*` with `steps_per_unit >= 200` RK4 steps per unit time.
///
/// Fails with a subdivision error as soon as `|z|_p` reaches `pi / 2`.
pub fn isometric_lift_curve(curve: &dyn GroupCurve, spec: &OrbitSpec, steps_per_unit: usize) -> Result<LiftResult> {
    if curve.dim() != spec.dim() {
        return Err(GeoError::Dimension { expected: spec.dim(), found: curve.dim() });
    }
    let steps_per_unit = steps_per_unit.max(200);
    let p = spec.p();
    let iso = super::isotropy_algebra(spec);
    let n = spec.dim();
    let a = spec.a();

    let mut breaks = curve.breakpoints();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let pieces = piece_grid(&breaks, steps_per_unit);

    let mut z = SkewHermitian::zeros(n);
    let mut times = Vec::new();
    let mut betas = Vec::new();
    let mut z_path = Vec::new();
    let mut break_idx = Vec::new();
    let (mut orbit_len, mut source_len) = (0.0, 0.0);
    let mut defect: f64 = 0.0;
    let mut speed_mismatch: f64 = 0.0;

    let rhs = |z: &SkewHermitian, qv: &SkewHermitian| -> Result<SkewHermitian> {
        Ok(-&f_ad_inverse_apply(&-z, qv)?)
    };

    for (pi, &(ta, tb, steps)) in pieces.iter().enumerate() {
        let h = (tb - ta) / steps as f64;
        let at = |t: f64| -> Result<(SkewHermitian, SkewHermitian)> {
            let v = curve.left_velocity(clamp_inside(t, ta, tb));
            let q = best_approximant_q(&v, &iso, p)?;
            Ok((v, q))
        };
        let mut orbit_speeds = Vec::with_capacity(steps + 1);
        let mut source_speeds = Vec::with_capacity(steps + 1);
        let (mut v0, mut q0) = at(ta)?;
        if pi > 0 {
            // The sample at a corner was already recorded by the previous piece.
            times.pop();
            betas.pop();
            z_path.pop();
        }
        break_idx.push(times.len());
        for k in 0..=steps {
            let t = ta + h * k as f64;
            let g = curve.point(t);
            let beta = g.compose(&exp_skew(&z));
            defect = defect.max((a.conjugated_by(&beta).as_matrix() - a.conjugated_by(&g).as_matrix()).norm());
            let horizontal = &v0 - &q0;
            orbit_speeds.push(pnorm(&horizontal, p));
            source_speeds.push(pnorm(&v0, p));
            // beta* beta' = e^{-z} (v + zdot-contribution) e^{z}, with (e^z)' from dexp.
            let zdot = rhs(&z, &q0)?;
            let eu = exp_skew(&z);
            let correction = dexp(&z, &zdot) * eu.as_matrix().adjoint();
            let moved = v0.as_matrix() + correction;
            speed_mismatch = speed_mismatch.max((pnorm(&moved, p) - pnorm(&horizontal, p)).abs());
            times.push(t);
            betas.push(beta);
            z_path.push(z.clone());
            if k == steps {
                break;
            }
            let (_, qm) = at(t + 0.5 * h)?;
            let (v1, q1) = at(t + h)?;
            let k1 = rhs(&z, &q0)?;
            let k2 = rhs(&(&z + &(&k1 * (0.5 * h))), &qm)?;
            let k3 = rhs(&(&z + &(&k2 * (0.5 * h))), &qm)?;
            let k4 = rhs(&(&z + &(&k3 * h)), &q1)?;
            let incr = &(&(&k1 + &(&k2 * 2.0)) + &(&(&k3 * 2.0) + &k4)) * (h / 6.0);
            z = &z + &incr;
            let norm = pnorm(&z, p);
            if norm >= FRAC_PI_2 {
                return Err(GeoError::Subdivide { t: t + h, norm });
            }
            v0 = v1;
            q0 = q1;
        }
        orbit_len += simpson(&orbit_speeds, h);
        source_len += simpson(&source_speeds, h);
    }
    let beta = DiscretizedCurve::new(times.clone(), betas)?;
    let lift_len = richardson_length(&beta, &break_idx, p)?;
    let corrections = DiscretizedCurve::new(times, z_path.iter().map(exp_skew).collect())?;
    let correction_len = richardson_length(&corrections, &break_idx, p)?;
    Ok(LiftResult {
        beta,
        z_path,
        defect,
        lengths: LiftLengths {
            orbit: orbit_len,
            lift: lift_len,
            source: Some(source_len),
            correction: Some(correction_len),
        },
        speed_mismatch: Some(speed_mismatch),
        horizontality: None,
    })
}

/// Isometric lift of a sampled group curve, interpolated by short geodesics.
pub fn isometric_lift(curve: &DiscretizedCurve<Unitary>, spec: &OrbitSpec) -> Result<LiftResult> {
    let interp = PiecewiseGeodesic::from_samples(curve)?;
    isometric_lift_curve(&interp, spec, 200)
}

/// A smooth curve in the orbit with known velocity.
pub trait OrbitCurve: Sync {
    fn dim(&self) -> usize;
    fn interval(&self) -> (f64, f64);
    fn point(&self, t: f64) -> Hermitian;
    fn velocity(&self, t: f64) -> Hermitian;
}

/// `t -> Gamma(t) A Gamma(t)*` for a group curve `Gamma`.
pub struct ConjugationCurve<'a> {
    pub curve: &'a dyn GroupCurve,
    pub a: Hermitian,
}

impl OrbitCurve for ConjugationCurve<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn interval(&self) -> (f64, f64) {
        self.curve.interval()
    }

    fn point(&self, t: f64) -> Hermitian {
        self.a.conjugated_by(&self.curve.point(t))
    }

    /// `Gamma (v A - A v) Gamma*` with `v = Gamma* Gamma'`.
    fn velocity(&self, t: f64) -> Hermitian {
        let v = self.curve.left_velocity(t);
        let inner = Hermitian::symmetrize(v.as_matrix() * self.a.as_matrix() - self.a.as_matrix() * v.as_matrix());
        inner.conjugated_by(&self.curve.point(t))
    }
}

fn check_p2(spec: &OrbitSpec) -> Result<()> {
    if spec.p().get() != 2 {
        return Err(GeoError::InvalidInput(format!("horizontal lifts use p = 2, got p = {}", spec.p())));
    }
    Ok(())
}

fn check_start(spec: &OrbitSpec, x: &Hermitian) -> Result<()> {
    let gap = (x.as_matrix() - spec.a().as_matrix()).norm();
    if gap > 1e-8 * spec.a().norm().max(1.0) {
        return Err(GeoError::InvalidInput(format!("the orbit curve must start at A (distance {gap:.3e})")));
    }
    Ok(())
}

/// `kappa(gamma, gammadot)` for `p = 2`: the Frobenius-minimal solution of
/// `w gamma - gamma w = gammadot`.
fn kappa(spec: &OrbitSpec, x: &Hermitian, xdot: &Hermitian) -> Result<SkewHermitian> {
    spec.point(x)?.solve_tangent(xdot)
}

struct HorizontalTrack {
    times: Vec<f64>,
    lifts: Vec<Unitary>,
    speeds: Vec<f64>,
    horizontality: f64,
    defect: f64,
}

impl HorizontalTrack {
    fn new() -> Self {
        HorizontalTrack { times: Vec::new(), lifts: Vec::new(), speeds: Vec::new(), horizontality: 0.0, defect: 0.0 }
    }

    fn record(&mut self, iso: &SkewSubspace, spec: &OrbitSpec, t: f64, g: &Unitary, x: &Hermitian, k: &SkewHermitian) {
        let left = k.conjugated_by(&g.adjoint());
        self.horizontality = self.horizontality.max(iso.project(&left).norm());
        self.defect = self.defect.max((spec.a().conjugated_by(g).as_matrix() - x.as_matrix()).norm());
        self.speeds.push(k.norm());
        self.times.push(t);
        self.lifts.push(g.clone());
    }

    fn finish(self, h: f64) -> Result<LiftResult> {
        let orbit = simpson(&self.speeds, h);
        let beta = DiscretizedCurve::new(self.times, self.lifts)?;
        let lift = richardson_length(&beta, &[], EvenP::new(2)?)?;
        Ok(LiftResult {
            beta,
            z_path: Vec::new(),
            defect: self.defect,
            lengths: LiftLengths { orbit, lift, source: None, correction: None },
            speed_mismatch: None,
            horizontality: Some(self.horizontality),
        })
    }
}

fn rk4_unitary_step(g: &Unitary, h: f64, k1: &SquareMatrix, k2: &SquareMatrix, k3: &SquareMatrix, k4: &SquareMatrix) -> Unitary {
    // Gamma' = kappa Gamma with the stage generators evaluated along the curve.
    let gm = g.as_matrix();
    let c = crate::linalg::c;
    let s1 = k1 * gm;
    let s2 = k2 * (gm + &s1 * c(0.5 * h));
    let s3 = k3 * (gm + &s2 * c(0.5 * h));
    let s4 = k4 * (gm + &s3 * c(h));
    let next = gm + (s1 + (s2 + s3) * c(2.0) + s4) * c(h / 6.0);
    Unitary::new_unchecked(next).renormalized()
}

/// Horizontal lift `Gamma' = kappa(gammadot) Gamma`, `Gamma(a) = 1`, of a smooth orbit
/// curve starting at `A`; `p = 2` only.
pub fn horizontal_lift_p2_curve(gamma: &dyn OrbitCurve, spec: &OrbitSpec, steps_per_unit: usize) -> Result<LiftResult> {
    check_p2(spec)?;
    let (ta, tb) = gamma.interval();
    check_start(spec, &gamma.point(ta))?;
    let steps = piece_grid(&[ta, tb], steps_per_unit.max(200))[0].2;
    let h = (tb - ta) / steps as f64;
    let iso = super::isotropy_algebra(spec);
    let at = |t: f64| -> Result<(Hermitian, SkewHermitian)> {
        let x = gamma.point(t);
        let k = kappa(spec, &x, &gamma.velocity(t))?;
        Ok((x, k))
    };
    let mut g = Unitary::identity(spec.dim());
    let mut track = HorizontalTrack::new();
    let (mut x0, mut k0) = at(ta)?;
    for step in 0..=steps {
        let t = ta + h * step as f64;
        track.record(&iso, spec, t, &g, &x0, &k0);
        if step == steps {
            break;
        }
        let (_, km) = at(t + 0.5 * h)?;
        let (x1, k1) = at(t + h)?;
        g = rk4_unitary_step(&g, h, &k0, &km, &km, &k1);
        x0 = x1;
        k0 = k1;
    }
    track.finish(h)
}

/// Five-point derivative weights at node `j` of five equally spaced nodes, spacing 1.
fn five_point_weights(j: usize) -> [f64; 5] {
    match j {
        0 => [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25],
        1 => [-0.25, -5.0 / 6.0, 1.5, -0.5, 1.0 / 12.0],
        2 => [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
        3 => [-1.0 / 12.0, 0.5, -1.5, 5.0 / 6.0, 0.25],
        _ => [0.25, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0],
    }
}

/// Horizontal lift of a sampled orbit curve on a uniform grid whose number of intervals
/// is a multiple of 4. Velocities come from five-point differences; RK4 steps span two intervals,
/// so the lift is reported at every other sample.
pub fn horizontal_lift_p2(gamma: &DiscretizedCurve<Hermitian>, spec: &OrbitSpec) -> Result<LiftResult> {
    check_p2(spec)?;
    let times = gamma.times();
    let samples = gamma.samples();
    let m = times.len() - 1;
    if m < 4 || m % 4 != 0 {
        return Err(GeoError::InvalidInput(format!("need a multiple of 4 intervals, got {m}")));
    }
    let h = (times[m] - times[0]) / m as f64;
    if times.iter().enumerate().any(|(k, t)| (t - (times[0] + h * k as f64)).abs() > 1e-9 * h) {
        return Err(GeoError::InvalidInput("sample times must be equally spaced".into()));
    }
    check_start(spec, &samples[0])?;
    let velocity = |k: usize| -> Hermitian {
        let start = k.saturating_sub(2).min(m - 4);
        let w = five_point_weights(k - start);
        let mut d = SquareMatrix::zeros(spec.dim(), spec.dim());
        for (i, wi) in w.iter().enumerate() {
            d += samples[start + i].as_matrix() * crate::linalg::c(wi / h);
        }
        Hermitian::symmetrize(d)
    };
    let kappas: Vec<SkewHermitian> =
        (0..=m).map(|k| kappa(spec, &samples[k], &velocity(k))).collect::<Result<_>>()?;
    let iso = super::isotropy_algebra(spec);
    let mut g = Unitary::identity(spec.dim());
    let mut track = HorizontalTrack::new();
    let mut k = 0;
    loop {
        track.record(&iso, spec, times[k], &g, &samples[k], &kappas[k]);
        if k == m {
            break;
        }
        g = rk4_unitary_step(&g, 2.0 * h, &kappas[k], &kappas[k + 1], &kappas[k + 1], &kappas[k + 2]);
        k += 2;
    }
    track.finish(2.0 * h)
}
