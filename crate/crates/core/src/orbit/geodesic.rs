//! Geodesics of the orbit: `t -> e^{t z} x e^{-t z}` with `z` a minimal lifting.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{minimal_lifting, OrbitPoint, OrbitSpec};
use crate::error::{GeoError, Result};
use crate::expcalc::{dexp_inv, pnorm_pow_gradient, HessianForm};
use crate::group::GeodesicSegment;
use crate::linalg::spectral::{exp_skew, polar_unitary_part, unitary_log};
use crate::linalg::{pnorm, schatten_norm_pow, trace_product, EvenP, Hermitian, SkewHermitian, SquareMatrix, Unitary};

/// The curve `t -> e^{t z} x e^{-t z}`, minimal while `t |z|_p < pi / 4`.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitGeodesic {
    pub start: Hermitian,
    pub velocity: SkewHermitian,
    pub speed: f64,
    /// Minimality holds on `[0, certified_until]`.
    pub certified_until: f64,
}

impl OrbitGeodesic {
    pub fn new(start: Hermitian, velocity: SkewHermitian, p: EvenP) -> Self {
        let speed = pnorm(&velocity, p);
        let certified_until = if speed > 0.0 { FRAC_PI_4 / speed } else { f64::INFINITY };
        OrbitGeodesic { start, velocity, speed, certified_until }
    }

    pub fn point(&self, t: f64) -> Hermitian {
        self.start.conjugated_by(&exp_skew(&self.velocity.scaled(t)))
    }

    /// The lifted one-parameter group on `[0, t1]`.
    pub fn segment(&self, t1: f64) -> Result<GeodesicSegment> {
        GeodesicSegment::new(Unitary::identity(self.start.dim()), self.velocity.clone(), (0.0, t1))
    }

    pub fn is_certified(&self, t: f64) -> bool {
        t.abs() < self.certified_until
    }
}

/// The geodesic leaving `point` with initial velocity `tangent`.
pub fn orbit_geodesic(point: &OrbitPoint, tangent: &Hermitian, p: EvenP) -> Result<OrbitGeodesic> {
    let z = minimal_lifting(point, tangent, p)?;
    Ok(OrbitGeodesic::new(point.x().clone(), z, p))
}

/// A critical point of `g -> |log(u_1 g)|_p` over the isotropy group of `x_0`.
#[derive(Clone, Debug, Serialize)]
pub struct EndpointGeodesic {
    pub geodesic: OrbitGeodesic,
    pub length: f64,
    /// `max_k |Tr(z^{p-1} b_k)|` over an orthonormal basis of the isotropy algebra.
    pub stationarity: f64,
    /// `|e^z x_0 e^{-z} - x_1|_2`
    pub endpoint_residual: f64,
    /// `length < pi / 4`.
    pub certified: bool,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 100;
const STATIONARITY_TOL: f64 = 1e-8;

struct State {
    g: Unitary,
    z: SkewHermitian,
    phi: f64,
}

impl State {
    fn at(u1: &Unitary, g: Unitary, p: EvenP) -> State {
        let z = unitary_log(&u1.compose(&g));
        let phi = schatten_norm_pow(&z, p);
        State { g, z, phi }
    }
}

/// Joins two points of the orbit by the shortest curve of the form `e^{t z} x_0 e^{-t z}`.
///
/// With `u_1 x_0 u_1* = x_1` from matched eigenbases, every connecting unitary is
/// `u_1 g` with `g` fixing `x_0`. A Newton iteration in exponential coordinates
/// `g e^y` minimizes `|log(u_1 g)|_p^p`.
pub fn endpoint_geodesic(spec: &OrbitSpec, x0: &Hermitian, x1: &Hermitian) -> Result<EndpointGeodesic> {
    let p = spec.p();
    let pt0 = spec.point(x0)?;
    let pt1 = spec.point(x1)?;
    if x0.as_matrix() == x1.as_matrix() {
        let geodesic = OrbitGeodesic::new(x0.clone(), SkewHermitian::zeros(spec.dim()), p);
        return Ok(EndpointGeodesic {
            geodesic,
            length: 0.0,
            stationarity: 0.0,
            endpoint_residual: 0.0,
            certified: true,
            iterations: 0,
        });
    }
    let u1 = Unitary::new_unchecked(pt1.spectral().eigenbasis() * pt0.spectral().eigenbasis().adjoint());
    let basis = pt0.isotropy().basis_matrices();
    // Start from the block-diagonal polar factor, which is exact when u_1 nearly commutes with x_0.
    let g0 = polar_unitary_part(&pt0.pinch(&u1.adjoint().into_inner())).unwrap_or_else(|_| Unitary::identity(spec.dim()));
    let mut state = State::at(&u1, g0, p);
    let identity_start = State::at(&u1, Unitary::identity(spec.dim()), p);
    if identity_start.phi < state.phi {
        state = identity_start;
    }
    let traces = |z: &SquareMatrix| -> Vec<f64> {
        let g = pnorm_pow_gradient(z, p) / crate::linalg::c(p.sign() * p.as_f64());
        basis.iter().map(|b| trace_product(&g, b).re).collect()
    };
    let stat_of = |t: &[f64]| t.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let scale = p.sign() * p.as_f64();
    let m = basis.len();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && m > 0 {
        let t = traces(&state.z);
        let stat = stat_of(&t);
        if stat <= 1e-14 * pnorm(&state.z, p).powi(p.get() as i32 - 1).max(1e-300) {
            break;
        }
        iterations += 1;
        // Along g e^{s b}: d/ds |z|_p^p = sign p Tr(z^{p-1} b), since z^{p-1} commutes with z.
        let grad = DVector::from_iterator(m, t.iter().map(|v| scale * v));
        let hess = newton_hessian(&state.z, &basis, p)?;
        let mut accepted = false;
        let newton = super::approx::damped_solve(&hess, &grad);
        for dir in [newton, Some(-&grad)].into_iter().flatten() {
            let slope = grad.dot(&dir);
            if !(slope < 0.0) {
                continue;
            }
            let mut alpha = 1.0;
            while alpha > 1e-12 {
                let step = combine(&basis, &(&dir * alpha));
                let trial = State::at(&u1, state.g.compose(&exp_skew(&step)).renormalized(), p);
                if trial.phi <= state.phi + 1e-4 * alpha * slope || (alpha == 1.0 && trial.phi <= state.phi * (1.0 + 1e-14)) {
                    state = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    let stationarity = stat_of(&traces(&state.z));
    if stationarity > STATIONARITY_TOL {
        return Err(GeoError::NoConvergence { iterations, residual: stationarity });
    }
    let geodesic = OrbitGeodesic::new(x0.clone(), state.z, p);
    let endpoint_residual = (geodesic.point(1.0).as_matrix() - x1.as_matrix()).norm();
    let length = geodesic.speed;
    Ok(EndpointGeodesic { geodesic, length, stationarity, endpoint_residual, certified: length < FRAC_PI_4, iterations })
}

fn combine(basis: &[SquareMatrix], coef: &DVector<f64>) -> SkewHermitian {
    let n = basis[0].nrows();
    let mut out = SquareMatrix::zeros(n, n);
    for (b, k) in basis.iter().zip(coef.iter()) {
        out += b * crate::linalg::c(*k);
    }
    SkewHermitian::skew_part(out)
}

/// Derivative of the gradient along `g e^{s b_l}`: `H_z(zdot_l, b_k)` with
/// `zdot_l = dexp_inv(z, e^z b_l)`; symmetrized.
fn newton_hessian(z: &SkewHermitian, basis: &[SquareMatrix], p: EvenP) -> Result<DMatrix<f64>> {
    let m = basis.len();
    let form = HessianForm::new(z, p);
    let ez = exp_skew(z);
    let mut h = DMatrix::zeros(m, m);
    for (l, bl) in basis.iter().enumerate() {
        let zdot = dexp_inv(z, &(ez.as_matrix() * bl))?;
        for (k, bk) in basis.iter().enumerate() {
            h[(k, l)] = form.eval(&zdot, bk);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}
