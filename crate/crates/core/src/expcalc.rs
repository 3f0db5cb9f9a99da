//! Differential calculus of the exponential map on skew-Hermitian matrices.
//!
//! `ad a` acts by `x -> x a - a x`. In an eigenbasis `a = U diag(i theta) U*` it is
//! diagonal: entry `(j, k)` of `U* x U` is multiplied by `i (theta_k - theta_j)`, so any
//! analytic function of `ad a` is applied entrywise.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::linalg::spectral::hermitian_eigen;
use crate::linalg::{c, opnorm, powers, trace_product, Complex64, EvenP, SkewHermitian, SquareMatrix, Unitary, I};

/// Gaps at or above `2 pi - ETA` make `F(ad a)` numerically singular.
pub const AD_GAP_TOL: f64 = 1e-8;

/// `F(z) = (e^z - 1)/z`, with `F(0) = 1`.
///
/// Evaluated as `e^{z/2} sinh(z/2)/(z/2)`, which has no cancellation for small `z`.
pub fn f_scalar(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        return c(1.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    }
    let h = z / 2.0;
    h.exp() * h.sinh() / h
}

/// `ad a` and functions of it, diagonalized once.
#[derive(Clone, Debug)]
pub struct AdOperator {
    base: SkewHermitian,
    phases: Vec<f64>,
    frame: SquareMatrix,
}

impl AdOperator {
    pub fn new(a: &SkewHermitian) -> Self {
        let (phases, frame) = hermitian_eigen(&(a.as_matrix() * (-I)));
        AdOperator { base: a.clone(), phases, frame }
    }

    pub fn base(&self) -> &SkewHermitian {
        &self.base
    }

    /// Eigenvalues of `-i a`, ascending.
    pub fn eigenphases(&self) -> &[f64] {
        &self.phases
    }

    pub fn frame(&self) -> &SquareMatrix {
        &self.frame
    }

    /// Largest `|theta_j - theta_k|`: `ad a` has spectrum `i (theta_k - theta_j)`.
    pub fn spread(&self) -> f64 {
        match (self.phases.first(), self.phases.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    fn map_entries(&self, x: &SquareMatrix, f: impl Fn(Complex64) -> Complex64) -> SquareMatrix {
        let mut y = self.frame.adjoint() * x * &self.frame;
        let n = y.nrows();
        for k in 0..n {
            for j in 0..n {
                y[(j, k)] *= f(I * (self.phases[k] - self.phases[j]));
            }
        }
        &self.frame * y * self.frame.adjoint()
    }

    /// `x a - a x`.
    pub fn apply(&self, x: &SquareMatrix) -> SquareMatrix {
        x * self.base.as_matrix() - self.base.as_matrix() * x
    }

    /// `F(ad a) b`.
    pub fn apply_f(&self, b: &SquareMatrix) -> SquareMatrix {
        self.map_entries(b, f_scalar)
    }

    /// `F(ad a)^{-1} w`; fails when some eigenphase gap reaches `2 pi`.
    pub fn apply_f_inverse(&self, w: &SquareMatrix) -> Result<SquareMatrix> {
        let gap = self.spread();
        if gap >= 2.0 * PI - AD_GAP_TOL {
            return Err(GeoError::AdNotInvertible { gap });
        }
        Ok(self.map_entries(w, |z| c(1.0) / f_scalar(z)))
    }

    /// `e^a` from the same eigendecomposition.
    pub fn exp_base(&self) -> Unitary {
        let mut scaled = self.frame.clone();
        for (j, &t) in self.phases.iter().enumerate() {
            let e = Complex64::from_polar(1.0, t);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= e);
        }
        Unitary::new_unchecked(scaled * self.frame.adjoint())
    }
}

pub fn f_ad_apply(a: &SkewHermitian, b: &SkewHermitian) -> SkewHermitian {
    SkewHermitian::skew_part(AdOperator::new(a).apply_f(b))
}

pub fn f_ad_inverse_apply(a: &SkewHermitian, w: &SkewHermitian) -> Result<SkewHermitian> {
    Ok(SkewHermitian::skew_part(AdOperator::new(a).apply_f_inverse(w)?))
}

/// Derivative of `exp` at `a` in direction `b`: `e^a F(ad a) b`.
pub fn dexp(a: &SkewHermitian, b: &SkewHermitian) -> SquareMatrix {
    let ad = AdOperator::new(a);
    ad.exp_base().as_matrix() * ad.apply_f(b)
}

/// Inverse of [`dexp`]: the `b` with `dexp(a, b) = w`, i.e. `F(ad a)^{-1}(e^{-a} w)`.
pub fn dexp_inv(a: &SkewHermitian, w: &SquareMatrix) -> Result<SkewHermitian> {
    let ad = AdOperator::new(a);
    let left = ad.exp_base().as_matrix().adjoint() * w;
    Ok(SkewHermitian::skew_part(ad.apply_f_inverse(&left)?))
}

/// `g(r) = r / sin r` on `[0, pi)`, bounding `|F(ad w)^{-1}|` when `|w|_inf <= r`.
pub fn g_bound(r: f64) -> Result<f64> {
    if !(0.0..PI).contains(&r) {
        return Err(GeoError::OutOfDomain(format!("g(r) needs 0 <= r < pi, got {r}")));
    }
    if r < 1e-4 {
        return Ok(1.0 + r * r / 6.0 + 7.0 * r.powi(4) / 360.0);
    }
    Ok(r / r.sin())
}

/// Second derivative of `z -> |z|_p^p` at a fixed base point.
///
/// `H_a(b, c) = (-1)^{p/2} p sum_{k=0}^{p-2} Tr(a^{p-2-k} b a^k c)`; powers of `a` are cached.
#[derive(Clone, Debug)]
pub struct HessianForm {
    p: EvenP,
    powers: Vec<SquareMatrix>,
}

impl HessianForm {
    pub fn new(a: &SquareMatrix, p: EvenP) -> Self {
        HessianForm { p, powers: powers(a, p.get() as usize - 2) }
    }

    pub fn eval(&self, b: &SquareMatrix, cc: &SquareMatrix) -> f64 {
        let top = self.p.get() as usize - 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=top {
            let left = &self.powers[top - k] * b;
            let right = &self.powers[k] * cc;
            acc += trace_product(&left, &right);
        }
        self.p.sign() * self.p.as_f64() * acc.re
    }

    pub fn quadratic(&self, b: &SquareMatrix) -> f64 {
        self.eval(b, b)
    }

    /// Matrix `H_a(b_k, b_l)` over a list of directions.
    pub fn gram(&self, basis: &[SquareMatrix]) -> DMatrix<f64> {
        let top = self.p.get() as usize - 2;
        let m = basis.len();
        let scale = self.p.sign() * self.p.as_f64();
        // sandwiches[k][j] = a^{top-j} b_k a^j
        let sandwiches: Vec<Vec<SquareMatrix>> = basis
            .iter()
            .map(|b| (0..=top).map(|j| &self.powers[top - j] * b * &self.powers[j]).collect())
            .collect();
        let mut h = DMatrix::zeros(m, m);
        for k in 0..m {
            let mut summed = sandwiches[k][0].clone();
            for s in &sandwiches[k][1..] {
                summed += s;
            }
            for l in k..m {
                let v = scale * trace_product(&summed, &basis[l]).re;
                h[(k, l)] = v;
                h[(l, k)] = v;
            }
        }
        h
    }
}

pub fn hessian_h(a: &SkewHermitian, b: &SkewHermitian, cc: &SkewHermitian, p: EvenP) -> f64 {
    HessianForm::new(a, p).eval(b, cc)
}

pub fn quadratic_q(a: &SkewHermitian, b: &SkewHermitian, p: EvenP) -> f64 {
    hessian_h(a, b, b, p)
}

/// Sum-of-squares expression for `Q_a(b)`:
/// `p |b a^{p/2-1}|_2^2 + (p/2) sum_{l+m=p/2-2} |a^l (ab + ba) a^m|_2^2`.
pub fn quadratic_q_sum_of_squares(a: &SkewHermitian, b: &SkewHermitian, p: EvenP) -> f64 {
    let half = p.get() as usize / 2;
    let pw = powers(a, half);
    let pf = p.as_f64();
    let mut total = pf * (b.as_matrix() * &pw[half - 1]).norm_squared();
    if half >= 2 {
        let anti = a.as_matrix() * b.as_matrix() + b.as_matrix() * a.as_matrix();
        for l in 0..=(half - 2) {
            let m = half - 2 - l;
            total += 0.5 * pf * (&pw[l] * &anti * &pw[m]).norm_squared();
        }
    }
    total
}

/// Returns `(Q_a([b, a]), 4 |a|_inf^2 Q_a(b))`; the first never exceeds the second.
pub fn q_commutator_bound_check(a: &SkewHermitian, b: &SkewHermitian, p: EvenP) -> (f64, f64) {
    let form = HessianForm::new(a, p);
    let comm = b.as_matrix() * a.as_matrix() - a.as_matrix() * b.as_matrix();
    let lhs = form.quadratic(&comm);
    let rhs = 4.0 * opnorm(a).powi(2) * form.quadratic(b);
    (lhs, rhs)
}

/// Gradient of `r -> |r|_p^p` as a matrix `G`: the derivative along `d` is `Re Tr(G d)`.
pub fn pnorm_pow_gradient(r: &SquareMatrix, p: EvenP) -> SquareMatrix {
    let k = p.get() as usize - 1;
    let mut m = r.clone();
    for _ in 1..k {
        m = &m * r;
    }
    m * c(p.sign() * p.as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral::exp_skew;
    use crate::linalg::{pnorm, schatten_norm_pow};

    fn pseudo_random(n: usize, seed: u64) -> SquareMatrix {
        let mut s = seed ^ 0x9E3779B97F4A7C15;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        SquareMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()))
    }

    fn skew(n: usize, seed: u64, norm: f64) -> SkewHermitian {
        let z = SkewHermitian::skew_part(pseudo_random(n, seed));
        let s = opnorm(&z);
        z.scaled(norm / s)
    }

    #[test]
    fn f_scalar_branches_agree() {
        for &r in &[1e-7, 9e-7, 1.1e-6, 1e-5] {
            let z = Complex64::new(0.0, r);
            let direct = (z.exp() - 1.0) / z;
            assert!((f_scalar(z) - direct).norm() < 1e-9);
        }
        assert!((f_scalar(Complex64::new(0.0, 2.0 * PI))).norm() < 1e-15);
    }

    #[test]
    fn dexp_matches_integral_form() {
        // Independent route: int_0^1 e^{(1-t)a} b e^{ta} dt by Gauss-Legendre.
        let a = skew(4, 1, 2.0);
        let b = skew(4, 2, 1.0);
        let lhs = dexp(&a, &b);
        let (x, w) = crate::quadrature::gauss_legendre_64();
        let mut acc = SquareMatrix::zeros(4, 4);
        for (&t, &wt) in x.iter().zip(w) {
            let left = exp_skew(&a.scaled(1.0 - t));
            let right = exp_skew(&a.scaled(t));
            acc += left.as_matrix() * b.as_matrix() * right.as_matrix() * c(wt);
        }
        assert!((lhs - acc).norm() < 1e-12);
    }

    #[test]
    fn dexp_inverse_roundtrip() {
        let a = skew(5, 3, 2.5);
        let b = skew(5, 4, 0.7);
        let back = dexp_inv(&a, &dexp(&a, &b)).unwrap();
        assert!((back.as_matrix() - b.as_matrix()).norm() < 1e-11);
    }

    #[test]
    fn inverse_rejects_full_turn_gap() {
        let d = SquareMatrix::from_fn(2, 2, |i, j| if i == j { I * if i == 0 { PI } else { -PI } } else { c(0.0) });
        let a = SkewHermitian::new(d).unwrap();
        let b = skew(2, 5, 1.0);
        assert!(matches!(f_ad_inverse_apply(&a, &b), Err(GeoError::AdNotInvertible { .. })));
    }

    #[test]
    fn ad_apply_convention() {
        let a = skew(3, 6, 1.0);
        let x = pseudo_random(3, 7);
        let ad = AdOperator::new(&a);
        let via_f = ad.map_entries(&x, |z| z);
        assert!((ad.apply(&x) - via_f).norm() < 1e-12);
    }

    #[test]
    fn g_bound_values() {
        assert_eq!(g_bound(0.0).unwrap(), 1.0);
        assert!((g_bound(PI / 2.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((g_bound(1e-5).unwrap() - 1e-5 / (1e-5f64).sin()).abs() < 1e-15);
        assert!(g_bound(PI).is_err());
        assert!(g_bound(-0.1).is_err());
    }

    #[test]
    fn hessian_p2_is_twice_frobenius() {
        let p = EvenP::new(2).unwrap();
        let a = skew(4, 8, 1.3);
        let b = skew(4, 9, 0.4);
        assert!((quadratic_q(&a, &b, p) - 2.0 * b.as_matrix().norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn hessian_is_second_derivative() {
        for p in [2u32, 4, 6] {
            let p = EvenP::new(p).unwrap();
            let a = skew(4, 10, 1.0);
            let b = skew(4, 11, 1.0);
            let h = 1e-3;
            let f = |s: f64| schatten_norm_pow(&(a.as_matrix() + b.as_matrix() * c(s)), p);
            let fd = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            let q = quadratic_q(&a, &b, p);
            assert!((fd - q).abs() < 1e-5 * q.abs().max(1.0), "p={p}: {fd} vs {q}");
        }
    }

    #[test]
    fn sum_of_squares_matches() {
        for p in [2u32, 4, 6] {
            let p = EvenP::new(p).unwrap();
            for seed in 0..5 {
                let a = skew(5, 20 + seed, 1.7);
                let b = skew(5, 40 + seed, 0.8);
                let q = quadratic_q(&a, &b, p);
                let s = quadratic_q_sum_of_squares(&a, &b, p);
                assert!((q - s).abs() <= 1e-8 * q.abs(), "p={p}: {q} vs {s}");
            }
        }
    }

    #[test]
    fn gradient_matches_difference() {
        let p = EvenP::new(6).unwrap();
        let r = skew(3, 50, 1.2);
        let d = skew(3, 51, 1.0);
        let g = pnorm_pow_gradient(&r, p);
        let an = trace_product(&g, &d).re;
        let h = 1e-5;
        let f = |s: f64| schatten_norm_pow(&(r.as_matrix() + d.as_matrix() * c(s)), p);
        let fd = (f(h) - f(-h)) / (2.0 * h);
        assert!((an - fd).abs() < 1e-6 * fd.abs().max(1.0));
        assert!(pnorm(&r, p) > 0.0);
    }
}
