//! The commutator map `x -> x A - A x`, its lower bound and the local cross section.

use serde::Serialize;

use super::OrbitSpec;
use crate::error::{GeoError, Result};
use crate::linalg::spectral::polar_unitary_part;
use crate::linalg::{c, EvenP, Hermitian, SquareMatrix, Unitary, I};

/// `x A - A x`.
pub fn delta_a(spec: &OrbitSpec, x: &SquareMatrix) -> SquareMatrix {
    let a = spec.a().as_matrix();
    x * a - a * x
}

/// Solves `x A - A x = y` for `y` with vanishing diagonal blocks; the solution has
/// vanishing diagonal blocks too.
pub fn delta_a_inverse(spec: &OrbitSpec, y: &SquareMatrix) -> Result<SquareMatrix> {
    let sp = spec.spectral();
    let v = sp.eigenbasis();
    let labels = sp.cluster_labels();
    let mut t = v.adjoint() * y * &v;
    let n = spec.dim();
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (ci, cj) = (labels[i], labels[j]);
            if ci == cj {
                residual = residual.max(t[(i, j)].norm());
                t[(i, j)] = c(0.0);
            } else {
                t[(i, j)] /= c(sp.eigenvalues[cj] - sp.eigenvalues[ci]);
            }
        }
    }
    if residual > super::TANGENT_TOL * y.norm().max(1.0) {
        return Err(GeoError::NotTangent { residual });
    }
    Ok(&v * t * v.adjoint())
}

/// Smallest gap between distinct eigenvalues of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CaConstant {
    /// `min |lambda_i - lambda_j|`, the constant in `|xA - Ax|_2 >= C |x - P_A x|_2`.
    pub value: f64,
    /// `value^2`, the matching constant for the squared norms.
    pub squared: f64,
    /// Cluster indices attaining the minimum.
    pub pair: (usize, usize),
}

pub fn c_a(spec: &OrbitSpec) -> Result<CaConstant> {
    let lam = &spec.spectral().eigenvalues;
    if lam.len() < 2 {
        return Err(GeoError::SingleCluster);
    }
    // Eigenvalues are sorted, so the minimum gap is between neighbours.
    let (k, gap) = lam
        .windows(2)
        .map(|w| w[1] - w[0])
        .enumerate()
        .fold((0, f64::INFINITY), |best, (k, g)| if g < best.1 { (k, g) } else { best });
    Ok(CaConstant { value: gap, squared: gap * gap, pair: (k, k + 1) })
}

/// `(|x A - A x|_2, C_A |x - P_A x|_2)`; the first is never smaller.
pub fn c_a_bound_check(spec: &OrbitSpec, x: &SquareMatrix) -> Result<(f64, f64)> {
    let ca = c_a(spec)?;
    let lhs = delta_a(spec, x).norm();
    let rhs = ca.value * (x - spec.base_point().pinch(x)).norm();
    Ok((lhs, rhs))
}

/// A unit matrix `v_i v_j*` joining eigenvectors of the closest pair of eigenvalues;
/// it attains equality in the lower bound.
pub fn sharpness_witness(spec: &OrbitSpec) -> Result<SquareMatrix> {
    let ca = c_a(spec)?;
    let frames = &spec.spectral().frames;
    let vi = frames[ca.pair.0].column(0);
    let vj = frames[ca.pair.1].column(0);
    Ok(vi * vj.adjoint())
}

/// One row of the non-closedness table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonClosednessRow {
    pub n: usize,
    /// `|P_A(x_n)|_2`
    pub p_norm: f64,
    /// `|x_n - P_A(x_n)|_2`
    pub complement_norm: f64,
    /// `|x_n A - A x_n|_2`
    pub delta_norm: f64,
    /// `delta_norm / complement_norm`
    pub ratio: f64,
    /// `(2 / n) |A|_2^2` with the Frobenius norm.
    pub delta_sq_bound: f64,
}

/// `x_n = (i / n) * ones` against `A = diag(a_1, ..., a_n)`.
pub fn nonclosedness_row(eigenvalues: &[f64]) -> Result<NonClosednessRow> {
    let n = eigenvalues.len();
    if n < 2 {
        return Err(GeoError::InvalidInput(format!("need n >= 2, got {n}")));
    }
    if eigenvalues.iter().any(|a| !a.is_finite()) {
        return Err(GeoError::InvalidInput("eigenvalues must be finite".into()));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(GeoError::InvalidInput("eigenvalues must be distinct".into()));
    }
    let a = Hermitian::from_real_diagonal(eigenvalues);
    let frob_a = a.norm();
    let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let spec = OrbitSpec::new(a, EvenP::new(2)?, Some(0.5 * min_gap))?;
    let x = SquareMatrix::from_element(n, n, I * (1.0 / n as f64));
    let px = spec.base_point().pinch(&x);
    let complement_norm = (&x - &px).norm();
    let delta_norm = delta_a(&spec, &x).norm();
    Ok(NonClosednessRow {
        n,
        p_norm: px.norm(),
        complement_norm,
        delta_norm,
        ratio: delta_norm / complement_norm,
        delta_sq_bound: 2.0 / n as f64 * frob_a * frob_a,
    })
}

/// Rows for `n = 2..=n_max`, each using the first `n` eigenvalues.
pub fn nonclosedness_demo(eigenvalues: &[f64], n_max: usize) -> Result<Vec<NonClosednessRow>> {
    if n_max < 2 {
        return Err(GeoError::InvalidInput(format!("need n >= 2, got {n_max}")));
    }
    if eigenvalues.len() < n_max {
        return Err(GeoError::InvalidInput(format!(
            "{} eigenvalues given but n goes up to {n_max}",
            eigenvalues.len()
        )));
    }
    (2..=n_max).map(|n| nonclosedness_row(&eigenvalues[..n])).collect()
}

/// `u Omega(P_A(u*))`, a unitary depending only on `b = u A u*` and carrying `A` to `b`.
///
/// Defined on the ball `|b - A|_2 < C_A`; with a single eigenvalue the orbit is a point
/// and the section is the identity.
pub fn cross_section_sigma(spec: &OrbitSpec, u: &Unitary) -> Result<Unitary> {
    if u.dim() != spec.dim() {
        return Err(GeoError::Dimension { expected: spec.dim(), found: u.dim() });
    }
    let ca = match c_a(spec) {
        Ok(ca) => ca,
        Err(GeoError::SingleCluster) => return Ok(Unitary::identity(spec.dim())),
        Err(e) => return Err(e),
    };
    let b = spec.a().conjugated_by(u);
    let dist = (b.as_matrix() - spec.a().as_matrix()).norm();
    if !(dist < ca.value) {
        return Err(GeoError::OutOfDomain(format!(
            "|uAu* - A|_2 = {dist:.6e} is not inside the C_A ball of radius {:.6e}",
            ca.value
        )));
    }
    let pinched = spec.base_point().pinch(&u.adjoint().into_inner());
    let omega = polar_unitary_part(&pinched)?;
    Ok(u.compose(&omega))
}
