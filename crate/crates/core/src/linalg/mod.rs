//! Dense complex matrices, the three structured matrix classes and Schatten norms.

pub mod json;
pub mod spectral;

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};

pub use nalgebra::Complex;
pub type Complex64 = Complex<f64>;

/// Dense complex matrix. Squareness is checked by the structured wrappers.
pub type SquareMatrix = DMatrix<Complex64>;

/// Relative tolerance for Hermitian, skew-Hermitian and unitary membership tests.
pub const STRUCTURE_TOL: f64 = 1e-8;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> SquareMatrix {
    SquareMatrix::identity(n, n)
}

fn check_square(m: &SquareMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(GeoError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

/// Scale used for relative membership tests.
fn rel_scale(m: &SquareMatrix) -> f64 {
    m.norm().max(1.0)
}

/// `Tr(x y)` without forming the product.
pub fn trace_product(x: &SquareMatrix, y: &SquareMatrix) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..x.ncols() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// Real Frobenius inner product `Re Tr(x* y)`.
pub fn frobenius_inner(x: &SquareMatrix, y: &SquareMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn commutator(x: &SquareMatrix, y: &SquareMatrix) -> SquareMatrix {
    x * y - y * x
}

macro_rules! structured {
    ($name:ident) => {
        impl Deref for $name {
            type Target = SquareMatrix;
            fn deref(&self) -> &SquareMatrix {
                &self.0
            }
        }

        impl AsRef<SquareMatrix> for $name {
            fn as_ref(&self) -> &SquareMatrix {
                &self.0
            }
        }

        impl $name {
            pub fn as_matrix(&self) -> &SquareMatrix {
                &self.0
            }

            pub fn into_inner(self) -> SquareMatrix {
                self.0
            }

            pub fn dim(&self) -> usize {
                self.0.nrows()
            }
        }
    };
}

/// Hermitian matrix `h = h*`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(SquareMatrix);
structured!(Hermitian);

impl Hermitian {
    /// Validates `|m - m*|_F <= 1e-8 * max(1, |m|_F)` and symmetrizes.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        check_square(&m)?;
        let defect = (&m - m.adjoint()).norm();
        if defect > STRUCTURE_TOL * rel_scale(&m) {
            return Err(GeoError::NotHermitian { defect });
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(m + m*)/2`, no check.
    pub fn symmetrize(m: SquareMatrix) -> Self {
        let h = (&m + m.adjoint()) * c(0.5);
        Hermitian(h)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Hermitian(SquareMatrix::from_fn(n, n, |i, j| if i == j { c(d[i]) } else { c(0.0) }))
    }

    pub fn zeros(n: usize) -> Self {
        Hermitian(SquareMatrix::zeros(n, n))
    }

    /// `u h u*`.
    pub fn conjugated_by(&self, u: &Unitary) -> Hermitian {
        Hermitian::symmetrize(&u.0 * &self.0 * u.0.adjoint())
    }
}

/// Skew-Hermitian matrix `z* = -z`: the Lie algebra of the unitary group.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewHermitian(SquareMatrix);
structured!(SkewHermitian);

impl SkewHermitian {
    /// Validates `|m + m*|_F <= 1e-8 * max(1, |m|_F)` and projects.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        check_square(&m)?;
        let defect = (&m + m.adjoint()).norm();
        if defect > STRUCTURE_TOL * rel_scale(&m) {
            return Err(GeoError::NotSkewHermitian { defect });
        }
        Ok(Self::skew_part(m))
    }

    /// Skew-Hermitian part `(m - m*)/2`, no check.
    pub fn skew_part(m: SquareMatrix) -> Self {
        let z = (&m - m.adjoint()) * c(0.5);
        SkewHermitian(z)
    }

    pub fn zeros(n: usize) -> Self {
        SkewHermitian(SquareMatrix::zeros(n, n))
    }

    /// `i h` for Hermitian `h`.
    pub fn from_hermitian(h: &Hermitian) -> Self {
        SkewHermitian(&h.0 * I)
    }

    /// `-i z`, the Hermitian generator.
    pub fn to_hermitian(&self) -> Hermitian {
        Hermitian::symmetrize(&self.0 * (-I))
    }

    pub fn scaled(&self, s: f64) -> Self {
        SkewHermitian(&self.0 * c(s))
    }

    /// `u z u*`.
    pub fn conjugated_by(&self, u: &Unitary) -> SkewHermitian {
        SkewHermitian::skew_part(&u.0 * &self.0 * u.0.adjoint())
    }
}

impl Add<&SkewHermitian> for &SkewHermitian {
    type Output = SkewHermitian;
    fn add(self, rhs: &SkewHermitian) -> SkewHermitian {
        SkewHermitian(&self.0 + &rhs.0)
    }
}

impl Sub<&SkewHermitian> for &SkewHermitian {
    type Output = SkewHermitian;
    fn sub(self, rhs: &SkewHermitian) -> SkewHermitian {
        SkewHermitian(&self.0 - &rhs.0)
    }
}

impl Neg for &SkewHermitian {
    type Output = SkewHermitian;
    fn neg(self) -> SkewHermitian {
        SkewHermitian(-&self.0)
    }
}

impl Mul<f64> for &SkewHermitian {
    type Output = SkewHermitian;
    fn mul(self, s: f64) -> SkewHermitian {
        self.scaled(s)
    }
}

/// Unitary matrix `u* u = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary(SquareMatrix);
structured!(Unitary);

impl Unitary {
    /// Validates `|u*u - 1|_F <= 1e-8 * sqrt(n)` and re-orthonormalizes through the polar part.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let defect = (m.adjoint() * &m - identity(n)).norm();
        if defect > STRUCTURE_TOL * (n as f64).sqrt().max(1.0) {
            return Err(GeoError::NotUnitary { defect });
        }
        spectral::polar_unitary_part(&m)
    }

    /// Wraps a matrix already known to be unitary to working precision.
    pub(crate) fn new_unchecked(m: SquareMatrix) -> Self {
        Unitary(m)
    }

    pub fn identity(n: usize) -> Self {
        Unitary(identity(n))
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary(&self.0 * &other.0)
    }

    /// Re-orthonormalize after a long chain of products.
    pub fn renormalized(&self) -> Unitary {
        spectral::polar_unitary_part(&self.0).unwrap_or_else(|_| self.clone())
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * &self.0 - identity(self.dim())).norm()
    }
}

impl Mul<&Unitary> for &Unitary {
    type Output = Unitary;
    fn mul(self, rhs: &Unitary) -> Unitary {
        self.compose(rhs)
    }
}

/// Even Schatten exponent `p >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvenP(u32);

impl EvenP {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p % 2 != 0 {
            return Err(GeoError::InvalidOrder(p.to_string()));
        }
        Ok(EvenP(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `(-1)^{p/2}`: sign making `(-1)^{p/2} Tr(z^p) = |z|_p^p` for skew-Hermitian `z`.
    pub fn sign(self) -> f64 {
        if (self.0 / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for EvenP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for EvenP {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        let p: u32 = s.trim().parse().map_err(|_| GeoError::InvalidOrder(s.to_string()))?;
        EvenP::new(p)
    }
}

impl TryFrom<u32> for EvenP {
    type Error = GeoError;
    fn try_from(p: u32) -> Result<Self> {
        EvenP::new(p)
    }
}

/// Schatten exponent: an even integer or the operator norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormOrder {
    P(EvenP),
    Inf,
}

impl From<EvenP> for NormOrder {
    fn from(p: EvenP) -> Self {
        NormOrder::P(p)
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::P(p) => write!(f, "{p}"),
            NormOrder::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(NormOrder::Inf),
            other => Ok(NormOrder::P(other.parse()?)),
        }
    }
}

/// Eigenvalues of `m* m`, clipped at zero, ascending.
pub fn gram_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let g = m.adjoint() * m;
    let (vals, _) = spectral::hermitian_eigen(&g);
    vals.into_iter().map(|v| v.max(0.0)).collect()
}

/// Singular values, descending.
pub fn singular_values(m: &SquareMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = gram_eigenvalues(m).into_iter().map(f64::sqrt).collect();
    s.reverse();
    s
}

/// `|m|_p^p` for even `p`, as a sum of powers of the eigenvalues of `m* m`.
pub fn schatten_norm_pow(m: &SquareMatrix, p: EvenP) -> f64 {
    if p.get() == 2 {
        return m.norm_squared();
    }
    let half = (p.get() / 2) as i32;
    gram_eigenvalues(m).into_iter().map(|l| l.powi(half)).sum()
}

/// Schatten norm `(Tr |m|^p)^{1/p}`, or the largest singular value for `p = inf`.
pub fn schatten_norm(m: &SquareMatrix, order: NormOrder) -> f64 {
    match order {
        NormOrder::P(p) if p.get() == 2 => m.norm(),
        NormOrder::P(p) => schatten_norm_pow(m, p).powf(1.0 / p.as_f64()),
        NormOrder::Inf => gram_eigenvalues(m).last().copied().unwrap_or(0.0).sqrt(),
    }
}

/// Shorthand for the finite-`p` norm.
pub fn pnorm(m: &SquareMatrix, p: EvenP) -> f64 {
    schatten_norm(m, NormOrder::P(p))
}

pub fn opnorm(m: &SquareMatrix) -> f64 {
    schatten_norm(m, NormOrder::Inf)
}

/// Integer powers `[1, m, m^2, ..., m^k]`.
pub fn powers(m: &SquareMatrix, k: usize) -> Vec<SquareMatrix> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(identity(m.nrows()));
    for i in 1..=k {
        let next = &out[i - 1] * m;
        out.push(next);
    }
    out
}
