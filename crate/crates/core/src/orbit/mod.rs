//! The unitary orbit `{u A u*}` of a Hermitian matrix as a homogeneous space.
//!
//! A point `x = u A u*` has isotropy algebra `{w skew : w x = x w}`: block-diagonal
//! matrices with respect to the spectral projections of `x`. Tangent vectors at `x` are
//! the commutators `w x - x w`.

mod approx;
mod delta;
mod geodesic;
mod lift;

pub use approx::{best_approximant, best_approximant_q, minimal_lifting, minimal_lifting_from, quotient_norm, Approximant};
pub use delta::{
    c_a, c_a_bound_check, cross_section_sigma, delta_a, delta_a_inverse, nonclosedness_demo, nonclosedness_row, sharpness_witness, CaConstant,
    NonClosednessRow,
};
pub use geodesic::{endpoint_geodesic, orbit_geodesic, EndpointGeodesic, OrbitGeodesic};
pub use lift::{
    horizontal_lift_p2, horizontal_lift_p2_curve, isometric_lift, isometric_lift_curve, ConjugationCurve, LiftLengths,
    LiftResult, OrbitCurve,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeoError, Result};
use crate::linalg::spectral::{default_cluster_tol, hermitian_eigen, spectral_projections, SpectralDecomposition};
use crate::linalg::{c, frobenius_inner, opnorm, EvenP, Hermitian, SkewHermitian, SquareMatrix, Unitary, I};

/// Tolerance on within-cluster entries when solving `w x - x w = X`.
pub const TANGENT_TOL: f64 = 1e-8;

/// A Hermitian matrix `A`, its clustered spectrum and the ambient Schatten exponent.
#[derive(Clone, Debug)]
pub struct OrbitSpec {
    a: Hermitian,
    p: EvenP,
    tau: f64,
    spectral: SpectralDecomposition<f64>,
    isotropy: SkewSubspace,
}

impl OrbitSpec {
    /// `tau` defaults to `1e-8 |A|_2`.
    pub fn new(a: Hermitian, p: EvenP, tau: Option<f64>) -> Result<Self> {
        let tau = tau.unwrap_or_else(|| default_cluster_tol(&a));
        if !(tau > 0.0) {
            return Err(GeoError::InvalidInput(format!("clustering tolerance must be positive, got {tau}")));
        }
        let spectral = spectral_projections(&a, tau);
        let isotropy = isotropy_from_frames(&spectral.frames);
        Ok(OrbitSpec { a, p, tau, spectral, isotropy })
    }

    pub fn a(&self) -> &Hermitian {
        &self.a
    }

    pub fn p(&self) -> EvenP {
        self.p
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn spectral(&self) -> &SpectralDecomposition<f64> {
        &self.spectral
    }

    /// Same operator with a different exponent.
    pub fn with_p(&self, p: EvenP) -> OrbitSpec {
        OrbitSpec { p, ..self.clone() }
    }

    /// The base point `A` itself.
    pub fn base_point(&self) -> OrbitPoint {
        OrbitPoint { x: self.a.clone(), spectral: self.spectral.clone(), isotropy: self.isotropy.clone() }
    }

    /// `u A u*`, with spectral data transported exactly.
    pub fn point_from_unitary(&self, u: &Unitary) -> OrbitPoint {
        let frames: Vec<SquareMatrix> = self.spectral.frames.iter().map(|f| u.as_matrix() * f).collect();
        let spectral = SpectralDecomposition {
            eigenvalues: self.spectral.eigenvalues.clone(),
            multiplicities: self.spectral.multiplicities.clone(),
            projections: frames.iter().map(|f| f * f.adjoint()).collect(),
            frames,
        };
        let isotropy = isotropy_from_frames(&spectral.frames);
        OrbitPoint { x: self.a.conjugated_by(u), spectral, isotropy }
    }

    /// A Hermitian matrix on the orbit. Its eigenvalues must match those of `A`
    /// to within `1e-8 max(1, |A|_2)`; eigenvectors are grouped with `A`'s multiplicities.
    pub fn point(&self, x: &Hermitian) -> Result<OrbitPoint> {
        if x.dim() != self.dim() {
            return Err(GeoError::Dimension { expected: self.dim(), found: x.dim() });
        }
        let (vals_x, vecs) = hermitian_eigen(x);
        let (vals_a, _) = hermitian_eigen(&self.a);
        let deviation = vals_x.iter().zip(&vals_a).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        if deviation > 1e-8 * opnorm(&self.a).max(1.0) {
            return Err(GeoError::SpectraMismatch { deviation });
        }
        let n = self.dim();
        let mut frames = Vec::with_capacity(self.spectral.len());
        let mut col = 0;
        for &m in &self.spectral.multiplicities {
            let mut f = SquareMatrix::zeros(n, m);
            for j in 0..m {
                f.set_column(j, &vecs.column(col + j));
            }
            col += m;
            frames.push(f);
        }
        let spectral = SpectralDecomposition {
            eigenvalues: self.spectral.eigenvalues.clone(),
            multiplicities: self.spectral.multiplicities.clone(),
            projections: frames.iter().map(|f| f * f.adjoint()).collect(),
            frames,
        };
        let isotropy = isotropy_from_frames(&spectral.frames);
        Ok(OrbitPoint { x: x.clone(), spectral, isotropy })
    }
}

#[derive(Serialize, Deserialize)]
struct OrbitSpecRepr {
    #[serde(rename = "A")]
    a: Hermitian,
    p: u32,
    tau_cluster: f64,
}

impl Serialize for OrbitSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrbitSpecRepr { a: self.a.clone(), p: self.p.get(), tau_cluster: self.tau }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrbitSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = OrbitSpecRepr::deserialize(d)?;
        let p = EvenP::new(r.p).map_err(D::Error::custom)?;
        OrbitSpec::new(r.a, p, Some(r.tau_cluster)).map_err(D::Error::custom)
    }
}

/// A point of the orbit with its spectral data and isotropy algebra.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    x: Hermitian,
    spectral: SpectralDecomposition<f64>,
    isotropy: SkewSubspace,
}

impl OrbitPoint {
    pub fn x(&self) -> &Hermitian {
        &self.x
    }

    pub fn spectral(&self) -> &SpectralDecomposition<f64> {
        &self.spectral
    }

    pub fn isotropy(&self) -> &SkewSubspace {
        &self.isotropy
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Differential of `u -> u x u*` at the identity: `w -> w x - x w`.
    pub fn differential(&self, w: &SkewHermitian) -> Hermitian {
        Hermitian::symmetrize(w.as_matrix() * self.x.as_matrix() - self.x.as_matrix() * w.as_matrix())
    }

    /// `sum_i p_i y p_i` over the spectral projections of `x`.
    pub fn pinch(&self, y: &SquareMatrix) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(y.nrows(), y.ncols());
        for p in &self.spectral.projections {
            out += p * y * p;
        }
        out
    }

    /// The Frobenius-minimal `w` with `w x - x w = X`: zero diagonal blocks, off-diagonal
    /// entries `X'_ij / (lambda_j - lambda_i)` in the eigenbasis of `x`.
    pub fn solve_tangent(&self, tangent: &Hermitian) -> Result<SkewHermitian> {
        if tangent.dim() != self.dim() {
            return Err(GeoError::Dimension { expected: self.dim(), found: tangent.dim() });
        }
        let v = self.spectral.eigenbasis();
        let labels = self.spectral.cluster_labels();
        let lam = &self.spectral.eigenvalues;
        let mut t = v.adjoint() * tangent.as_matrix() * &v;
        let scale = tangent.norm().max(1.0);
        let mut residual: f64 = 0.0;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let (ci, cj) = (labels[i], labels[j]);
                if ci == cj {
                    residual = residual.max(t[(i, j)].norm());
                    t[(i, j)] = c(0.0);
                } else {
                    t[(i, j)] /= c(lam[cj] - lam[ci]);
                }
            }
        }
        if residual > TANGENT_TOL * scale {
            return Err(GeoError::NotTangent { residual });
        }
        Ok(SkewHermitian::skew_part(&v * t * v.adjoint()))
    }
}

/// Real subspace of skew-Hermitian matrices with a Frobenius-orthonormal basis.
#[derive(Clone, Debug)]
pub struct SkewSubspace {
    dim_ambient: usize,
    basis: Vec<SkewHermitian>,
}

impl SkewSubspace {
    /// Checks that the Gram matrix of `basis` under `Re Tr(x* y)` is the identity to 1e-10.
    pub fn new(dim_ambient: usize, basis: Vec<SkewHermitian>) -> Result<Self> {
        for (k, b) in basis.iter().enumerate() {
            if b.dim() != dim_ambient {
                return Err(GeoError::Dimension { expected: dim_ambient, found: b.dim() });
            }
            for (l, d) in basis.iter().enumerate().skip(k) {
                let g = frobenius_inner(b, d);
                let target = if k == l { 1.0 } else { 0.0 };
                if (g - target).abs() > 1e-10 {
                    return Err(GeoError::InvalidInput(format!("basis is not orthonormal: <b{k}, b{l}> = {g}")));
                }
            }
        }
        Ok(SkewSubspace { dim_ambient, basis })
    }

    /// Orthonormalizes a spanning list by Gram-Schmidt, dropping dependent vectors.
    pub fn from_spanning(dim_ambient: usize, vectors: &[SkewHermitian]) -> Self {
        let mut basis: Vec<SkewHermitian> = Vec::new();
        for v in vectors {
            let mut r = v.as_matrix().clone();
            for _ in 0..2 {
                for b in &basis {
                    let coef = frobenius_inner(b, &r);
                    r -= b.as_matrix() * c(coef);
                }
            }
            let nr = r.norm();
            if nr > 1e-10 * v.norm().max(1e-300) {
                basis.push(SkewHermitian::skew_part(r * c(1.0 / nr)));
            }
        }
        SkewSubspace { dim_ambient, basis }
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SkewHermitian] {
        &self.basis
    }

    pub fn basis_matrices(&self) -> Vec<SquareMatrix> {
        self.basis.iter().map(|b| b.as_matrix().clone()).collect()
    }

    pub fn coefficients(&self, x: &SquareMatrix) -> Vec<f64> {
        self.basis.iter().map(|b| frobenius_inner(b, x)).collect()
    }

    pub fn combine(&self, coef: &[f64]) -> SkewHermitian {
        let n = self.dim_ambient;
        let mut out = SquareMatrix::zeros(n, n);
        for (b, &k) in self.basis.iter().zip(coef) {
            out += b.as_matrix() * c(k);
        }
        SkewHermitian::skew_part(out)
    }

    /// Frobenius-orthogonal projection.
    pub fn project(&self, x: &SkewHermitian) -> SkewHermitian {
        self.combine(&self.coefficients(x))
    }
}

/// Block-diagonal skew-Hermitian basis with respect to orthonormal frames.
fn isotropy_from_frames(frames: &[SquareMatrix]) -> SkewSubspace {
    let n = frames.first().map(|f| f.nrows()).unwrap_or(0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    for f in frames {
        let m = f.ncols();
        for a in 0..m {
            for b in a..m {
                let mut blocks = Vec::new();
                if a == b {
                    let mut e = SquareMatrix::zeros(m, m);
                    e[(a, a)] = I;
                    blocks.push(e);
                } else {
                    let mut e = SquareMatrix::zeros(m, m);
                    e[(a, b)] = c(s);
                    e[(b, a)] = c(-s);
                    blocks.push(e);
                    let mut e = SquareMatrix::zeros(m, m);
                    e[(a, b)] = I * s;
                    e[(b, a)] = I * s;
                    blocks.push(e);
                }
                for e in blocks {
                    basis.push(SkewHermitian::skew_part(f * e * f.adjoint()));
                }
            }
        }
    }
    SkewSubspace { dim_ambient: n, basis }
}

/// Skew-Hermitian matrices commuting with `A`.
pub fn isotropy_algebra(spec: &OrbitSpec) -> SkewSubspace {
    spec.isotropy.clone()
}

/// `P_A(x) = sum_i p_i x p_i` over the spectral projections of `A`.
pub fn trace_projection_pa(spec: &OrbitSpec, x: &SquareMatrix) -> SquareMatrix {
    spec.base_point().pinch(x)
}
