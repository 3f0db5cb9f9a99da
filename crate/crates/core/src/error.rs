use thiserror::Error;

/// Errors raised by the geometry routines.
///
/// Variants split into two families: invalid input (bad Schatten order, malformed
/// matrices, violated preconditions) and numerical failure (non-convergence,
/// singular operators). [`GeoError::is_numerical`] tells them apart; the CLI maps
/// the first family to exit code 2 and the second to exit code 3.
#[derive(Debug, Error)]
pub enum GeoError {
    #[error("Schatten order must be an even integer >= 2 or infinity, got {0}")]
    InvalidOrder(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |m - m*|_F = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("matrix is not skew-Hermitian: |m + m*|_F = {defect:e}")]
    NotSkewHermitian { defect: f64 },

    #[error("matrix is not unitary: |u*u - 1|_F = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error(
        "matrix is numerically singular (smallest singular value {smallest:e}); \
         for the cross section this means |b - A|_2 < C_A was violated upstream"
    )]
    Singular { smallest: f64 },

    #[error(
        "F(ad a) is not invertible: eigenphase gap {gap} reaches 2*pi \
         (sigma(ad a) meets 2*pi*i*Z)"
    )]
    AdNotInvertible { gap: f64 },

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error(
        "consecutive samples {index} and {next} are too far apart (|log| = {norm}); refine the curve",
        next = index + 1
    )]
    Refine { index: usize, norm: f64 },

    #[error(
        "lift coordinate reached |z|_p = {norm} >= pi/2 at t = {t}; subdivide the curve \
         and lift each piece separately"
    )]
    Subdivide { t: f64, norm: f64 },

    #[error("radius precondition violated: {0}")]
    Radius(String),

    #[error("base point lies on a prolongation of the geodesic (aligned configuration)")]
    Aligned,

    #[error("vector is not tangent to the orbit: residual {residual:e}")]
    NotTangent { residual: f64 },

    #[error("optimizer did not converge after {iterations} iterations (gradient residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("spectra are not unitarily equivalent (deviation {deviation:e})")]
    SpectraMismatch { deviation: f64 },

    #[error("operator has a single eigenvalue cluster; delta_A vanishes identically")]
    SingleCluster,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl GeoError {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            GeoError::Singular { .. }
                | GeoError::AdNotInvertible { .. }
                | GeoError::Refine { .. }
                | GeoError::Subdivide { .. }
                | GeoError::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
