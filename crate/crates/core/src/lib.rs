//! Finsler geometry of the unitary group and of unitary orbits under Schatten p-norms.
//!
//! The crate is organized bottom up:
//!
//! - [`linalg`]: structured matrices, Schatten norms, unitary logarithm and exponential.
//! - [`expcalc`]: `dexp`, `F(ad a)`, the bound `r / sin r`, the p-norm Hessian.
//! - [`group`]: lengths and distances in the unitary group, minimality, convexity and
//!   comparison inequalities.
//! - [`orbit`]: the orbit of a Hermitian operator, minimal liftings, isometric lifts,
//!   endpoint geodesics and the cross section.
//! - [`harness`]: randomized experiment suites and reports used by the CLI.

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expcalc;
pub mod group;
pub mod harness;
pub mod linalg;
pub mod orbit;
pub mod quadrature;
pub mod random;

pub use error::{GeoError, Result};
pub use linalg::{EvenP, Hermitian, NormOrder, SkewHermitian, SquareMatrix, Unitary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
