//! Best approximants in a subspace of skew-Hermitian matrices and minimal liftings.

use nalgebra::{DMatrix, DVector};

use super::{OrbitPoint, SkewSubspace};
use crate::error::{GeoError, Result};
use crate::expcalc::{pnorm_pow_gradient, HessianForm};
use crate::linalg::{pnorm, schatten_norm_pow, trace_product, EvenP, Hermitian, SkewHermitian, SquareMatrix};

const MAX_ITERATIONS: usize = 200;
/// Stop when the scaled stationarity residual falls below this.
const TARGET: f64 = 1e-13;
/// Fail when the scaled residual is still above this.
const ACCEPT: f64 = 1e-9;

/// Result of minimizing `|z - y|_p` over `y` in a subspace.
#[derive(Clone, Debug)]
pub struct Approximant {
    pub q: SkewHermitian,
    pub coefficients: Vec<f64>,
    /// `max_k |Tr((z - q)^{p-1} b_k)|` over the basis.
    pub stationarity: f64,
    /// `stationarity / |z - q|_p^{p-1}`.
    pub scaled_stationarity: f64,
    pub iterations: usize,
}

fn residual_traces(r: &SquareMatrix, basis: &[SquareMatrix], p: EvenP) -> Vec<f64> {
    // Tr(r^{p-1} b) is real for skew r and b, up to rounding.
    let g = pnorm_pow_gradient(r, p) / crate::linalg::c(p.sign() * p.as_f64());
    basis.iter().map(|b| trace_product(&g, b).re).collect()
}

fn scaled(stat: f64, r: &SquareMatrix, p: EvenP) -> f64 {
    let scale = pnorm(r, p).powi(p.get() as i32 - 1);
    if scale > 0.0 { stat / scale } else { 0.0 }
}

/// The best approximant `Q_S(z)` of `z` in `span(S)` for `|.|_p` with full diagnostics.
///
/// Starts from the Frobenius projection, which is the answer for `p = 2`, then runs a
/// damped Newton iteration on the coefficients with Armijo backtracking.
pub fn best_approximant(z: &SkewHermitian, s: &SkewSubspace, p: EvenP) -> Result<Approximant> {
    if z.dim() != s.dim_ambient() {
        return Err(GeoError::Dimension { expected: s.dim_ambient(), found: z.dim() });
    }
    let basis = s.basis_matrices();
    let m = basis.len();
    let mut coef = DVector::from_vec(s.coefficients(z));
    let residual = |coef: &DVector<f64>| z.as_matrix() - s.combine(coef.as_slice()).as_matrix();
    let finish = |coef: DVector<f64>, iterations: usize| {
        let r = residual(&coef);
        let stat = residual_traces(&r, &basis, p).iter().fold(0.0_f64, |a, t| a.max(t.abs()));
        Approximant {
            q: s.combine(coef.as_slice()),
            coefficients: coef.as_slice().to_vec(),
            stationarity: stat,
            scaled_stationarity: scaled(stat, &r, p),
            iterations,
        }
    };
    let mut r = residual(&coef);
    // A residual at rounding level means z already lies in the subspace.
    if p.get() == 2 || m == 0 || r.norm() <= 1e-13 * z.norm() {
        return Ok(finish(coef, 0));
    }
    let pf = p.as_f64();
    let mut phi = schatten_norm_pow(&r, p);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let traces = residual_traces(&r, &basis, p);
        let stat = traces.iter().fold(0.0_f64, |a, t| a.max(t.abs()));
        if scaled(stat, &r, p) <= TARGET {
            break;
        }
        iterations += 1;
        // d/dc_k |z - y(c)|_p^p = -sign p Tr(r^{p-1} b_k)
        let grad = DVector::from_iterator(m, traces.iter().map(|t| -p.sign() * pf * t));
        let hess = HessianForm::new(&r, p).gram(&basis);
        let newton = truncated_solve(&hess, &grad);
        let mut accepted = false;
        for dir in [newton, Some(-&grad)].into_iter().flatten() {
            let slope = grad.dot(&dir);
            if !(slope < 0.0) {
                continue;
            }
            let mut alpha = 1.0;
            while alpha > 1e-12 {
                let trial = &coef + &dir * alpha;
                let rt = residual(&trial);
                let pt = schatten_norm_pow(&rt, p);
                // Rounding floor near the optimum: accept non-increasing steps.
                if pt <= phi + 1e-4 * alpha * slope || (pt <= phi * (1.0 + 1e-14) && alpha == 1.0) {
                    coef = trial;
                    r = rt;
                    phi = pt;
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
    let out = finish(coef, iterations);
    if out.scaled_stationarity > ACCEPT {
        return Err(GeoError::NoConvergence { iterations, residual: out.scaled_stationarity });
    }
    Ok(out)
}

/// Solves `H d = -g` for positive semidefinite `H` on the span of its eigenvectors with
/// eigenvalue above `1e-10 * max`. Flat directions carry only rounding noise, so they get no step.
fn truncated_solve(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let eig = h.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, l| a.max(*l));
    if !(top > 0.0) {
        return None;
    }
    let proj = eig.eigenvectors.transpose() * g;
    let scaled = DVector::from_iterator(
        proj.len(),
        proj.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| if *l > 1e-10 * top { -c / l } else { 0.0 }),
    );
    Some(&eig.eigenvectors * scaled)
}

/// Solves `(H + mu I) d = -g` by Cholesky with increasing damping.
pub(super) fn damped_solve(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let m = h.nrows();
    let diag = (0..m).map(|k| h[(k, k)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut mu = 0.0;
    for _ in 0..12 {
        let shifted = h + DMatrix::identity(m, m) * mu;
        if let Some(ch) = shifted.cholesky() {
            return Some(ch.solve(&(-g)));
        }
        mu = if mu == 0.0 { 1e-12 * diag } else { mu * 100.0 };
    }
    None
}

/// `Q_S(z)`.
pub fn best_approximant_q(z: &SkewHermitian, s: &SkewSubspace, p: EvenP) -> Result<SkewHermitian> {
    Ok(best_approximant(z, s, p)?.q)
}

/// `w - Q(w)` for a solution `w` of `w x - x w = X`; independent of the solution chosen.
pub fn minimal_lifting_from(point: &OrbitPoint, w: &SkewHermitian, p: EvenP) -> Result<SkewHermitian> {
    let q = best_approximant_q(w, point.isotropy(), p)?;
    Ok(w - &q)
}

/// The lifting of smallest p-norm of a tangent vector at `point`.
pub fn minimal_lifting(point: &OrbitPoint, tangent: &Hermitian, p: EvenP) -> Result<SkewHermitian> {
    let w = point.solve_tangent(tangent)?;
    minimal_lifting_from(point, &w, p)
}

/// Quotient Finsler norm of a tangent vector.
pub fn quotient_norm(point: &OrbitPoint, tangent: &Hermitian, p: EvenP) -> Result<f64> {
    Ok(pnorm(minimal_lifting(point, tangent, p)?.as_matrix(), p))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{p, spec_diag};
    use super::super::{isotropy_algebra, OrbitSpec};
    use super::*;
    use crate::linalg::{c, frobenius_inner, Complex64};
    use crate::random::{random_hermitian, random_skew, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_in(s: &SkewSubspace, rng: &mut impl Rng) -> SkewHermitian {
        let coef: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        s.combine(&coef)
    }

    #[test]
    fn fixes_subspace_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let s = isotropy_algebra(&spec_diag(&[0.0, 1.0, 1.0, 3.0], 4));
        let y = random_in(&s, &mut rng);
        for k in [2, 4, 6] {
            let q = best_approximant_q(&y, &s, p(k)).unwrap();
            assert!((q.as_matrix() - y.as_matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn p2_is_frobenius_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = isotropy_algebra(&spec_diag(&[0.0, 1.0, 1.0, 3.0], 2));
        let z = random_skew(4, &mut rng);
        let q = best_approximant_q(&z, &s, p(2)).unwrap();
        // Gram-based projection from a skewed, non-orthogonal spanning list.
        let orth = s.basis_matrices();
        let raw: Vec<SquareMatrix> =
            (0..orth.len()).map(|k| &orth[k] * c(1.0 + k as f64) + &orth[(k + 1) % orth.len()] * c(0.5)).collect();
        let gram = DMatrix::from_fn(raw.len(), raw.len(), |i, j| frobenius_inner(&raw[i], &raw[j]));
        let rhs = DVector::from_iterator(raw.len(), raw.iter().map(|b| frobenius_inner(b, &z)));
        let sol = gram.lu().solve(&rhs).unwrap();
        let mut expected = SquareMatrix::zeros(4, 4);
        for (b, k) in raw.iter().zip(sol.iter()) {
            expected += b * c(*k);
        }
        assert!((q.as_matrix() - expected).norm() < 1e-10);
    }

    /// Nested grid search over the diagonal commutant of diag(0, 1, 3).
    fn grid_minimizer(z: &SkewHermitian, pp: EvenP) -> [f64; 3] {
        let phi = |t: [f64; 3]| {
            let mut m = z.as_matrix().clone();
            for k in 0..3 {
                m[(k, k)] -= Complex64::new(0.0, t[k]);
            }
            schatten_norm_pow(&m, pp)
        };
        let mut centre = [z[(0, 0)].im, z[(1, 1)].im, z[(2, 2)].im];
        let mut half = 2.0;
        while half > 1e-6 {
            let steps = 10;
            let mut best = (phi(centre), centre);
            for i in -steps..=steps {
                for j in -steps..=steps {
                    for k in -steps..=steps {
                        let h = half / steps as f64;
                        let t = [centre[0] + i as f64 * h, centre[1] + j as f64 * h, centre[2] + k as f64 * h];
                        let v = phi(t);
                        if v < best.0 {
                            best = (v, t);
                        }
                    }
                }
            }
            centre = best.1;
            half *= 0.25;
        }
        centre
    }

    #[test]
    fn p4_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let spec = spec_diag(&[0.0, 1.0, 3.0], 4);
        let s = isotropy_algebra(&spec);
        for _ in 0..3 {
            let z = random_skew(3, &mut rng);
            let a = best_approximant(&z, &s, p(4)).unwrap();
            assert!(a.scaled_stationarity < 1e-10, "{}", a.scaled_stationarity);
            let t = grid_minimizer(&z, p(4));
            for (k, tk) in t.iter().enumerate() {
                assert!((a.q[(k, k)].im - tk).abs() < 1e-4, "{} vs {tk}", a.q[(k, k)].im);
            }
        }
    }

    #[test]
    fn projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u = random_unitary(5, &mut rng);
        let a = Hermitian::from_real_diagonal(&[0.0, 0.0, 1.0, 2.0, 2.0]).conjugated_by(&u);
        for k in [2, 4, 6] {
            let spec = OrbitSpec::new(a.clone(), p(k), None).unwrap();
            let s = isotropy_algebra(&spec);
            for _ in 0..5 {
                let x = random_skew(5, &mut rng);
                let q = best_approximant_q(&x, &s, p(k)).unwrap();
                let rest = &x - &q;
                assert!(best_approximant_q(&rest, &s, p(k)).unwrap().norm() < 1e-8);
                let lam = rng.random_range(0.1..5.0);
                let ql = best_approximant_q(&x.scaled(lam), &s, p(k)).unwrap();
                assert!((ql.as_matrix() - q.as_matrix() * c(lam)).norm() < 1e-8 * lam.max(1.0));
                assert!(pnorm(&q, p(k)) <= 2.0 * pnorm(&x, p(k)) + 1e-8);
                // Optimality against random competitors.
                let d = pnorm(&rest, p(k));
                for _ in 0..5 {
                    let y = random_in(&s, &mut rng).scaled(0.3);
                    assert!(d <= pnorm(&(&rest - &y), p(k)) + 1e-10);
                }
            }
        }
    }

    #[test]
    fn minimal_lifting_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let spec = spec_diag(&[0.0, 1.0, 1.0, 3.0], 4);
        let pt = spec.point_from_unitary(&random_unitary(4, &mut rng));
        assert!(minimal_lifting(&pt, &Hermitian::zeros(4), p(4)).unwrap().norm() < 1e-14);
        assert_eq!(quotient_norm(&pt, &Hermitian::zeros(4), p(4)).unwrap(), 0.0);
        let x = pt.differential(&random_skew(4, &mut rng));
        // Two different solutions of w x - x w = X give the same lifting.
        let w1 = pt.solve_tangent(&x).unwrap();
        let w2 = &w1 + &random_in(pt.isotropy(), &mut rng);
        for k in [2, 4, 6] {
            let z1 = minimal_lifting_from(&pt, &w1, p(k)).unwrap();
            let z2 = minimal_lifting_from(&pt, &w2, p(k)).unwrap();
            assert!((z1.as_matrix() - z2.as_matrix()).norm() < 1e-6);
            assert!((pt.differential(&z1).as_matrix() - x.as_matrix()).norm() < 1e-10);
        }
        // p = 2: the component orthogonal to the isotropy algebra.
        let z = minimal_lifting(&pt, &x, p(2)).unwrap();
        let expected = &w2 - &pt.isotropy().project(&w2);
        assert!((z.as_matrix() - expected.as_matrix()).norm() < 1e-10);
        assert!((quotient_norm(&pt, &x, p(2)).unwrap() - expected.norm()).abs() < 1e-10);
    }

    #[test]
    fn quotient_norm_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let spec = OrbitSpec::new(random_hermitian(4, &mut rng), p(4), None).unwrap();
        let base = spec.point_from_unitary(&random_unitary(4, &mut rng));
        let x = base.differential(&random_skew(4, &mut rng));
        let u = random_unitary(4, &mut rng);
        let moved = spec.point(&base.x().conjugated_by(&u)).unwrap();
        let moved_tangent = x.conjugated_by(&u);
        let a = quotient_norm(&base, &x, p(4)).unwrap();
        let b = quotient_norm(&moved, &moved_tangent, p(4)).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn stationary_means_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let spec = spec_diag(&[0.0, 1.0, 1.0, 3.0, 5.0], 6);
        let s = isotropy_algebra(&spec);
        for _ in 0..10 {
            let w = random_skew(5, &mut rng);
            let z0 = &w - &best_approximant_q(&w, &s, p(6)).unwrap();
            let traces = residual_traces(&z0, &s.basis_matrices(), p(6));
            assert!(traces.iter().all(|t| t.abs() < 1e-8));
            for _ in 0..20 {
                let y = random_in(&s, &mut rng);
                assert!(pnorm(&z0, p(6)) <= pnorm(&(&z0 - &y), p(6)) + 1e-10);
            }
        }
    }
}
