//! C ABI for `schatten_geo`.
//!
//! Matrices and orbits cross the boundary as opaque handles. Every fallible call
//! returns an [`SgStatus`]; on failure, `sg_last_error()` describes the most recent
//! error on the calling thread. Handles and strings returned by the library are
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use schatten_geo::expcalc::{dexp, dexp_inv, g_bound};
use schatten_geo::group::distance_p;
use schatten_geo::linalg::json::{matrix_from_json, matrix_to_json};
use schatten_geo::linalg::spectral::{exp_skew, polar_unitary_part, unitary_log};
use schatten_geo::linalg::{schatten_norm, Complex64, NormOrder, SquareMatrix};
use schatten_geo::orbit::{cross_section_sigma, endpoint_geodesic, minimal_lifting, quotient_norm, OrbitSpec};
use schatten_geo::{EvenP, GeoError, Hermitian, SkewHermitian, Unitary};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Bad input: wrong structure, dimension, order or domain.
    InvalidInput = 2,
    /// The numerics failed: no convergence, singular operator, step too large.
    Numerical = 3,
    /// An internal panic was caught at the boundary.
    Internal = 4,
}

/// Opaque dense complex square matrix.
pub struct SgMatrix {
    m: SquareMatrix,
}

/// Opaque unitary orbit of a Hermitian operator, with its Schatten order.
pub struct SgOrbit {
    spec: OrbitSpec,
}

/// Summary of an endpoint geodesic.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SgGeodesicInfo {
    pub length: f64,
    /// Largest `|Tr(z^{p-1} b)|` over the isotropy basis.
    pub stationarity: f64,
    pub endpoint_residual: f64,
    /// 1 when `length < pi/4`, so the curve is certified minimal.
    pub certified: i32,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("interior nul removed"));
}

enum Failure {
    Status(SgStatus, String),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        let status = if e.is_numerical() { SgStatus::Numerical } else { SgStatus::InvalidInput };
        Failure::Status(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(SgStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Status(SgStatus::InvalidInput, msg.into())
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SgStatus::Internal
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const SgMatrix, what: &str) -> Result<&'a SquareMatrix, Failure> {
    m.as_ref().map(|h| &h.m).ok_or_else(|| null(what))
}

unsafe fn orbit_ref<'a>(o: *const SgOrbit) -> Result<&'a OrbitSpec, Failure> {
    o.as_ref().map(|h| &h.spec).ok_or_else(|| null("orbit"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_matrix(out: *mut *mut SgMatrix, m: SquareMatrix) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(SgMatrix { m })), "output handle")
}

fn even(p: u32) -> Result<EvenP, Failure> {
    Ok(EvenP::new(p)?)
}

fn hermitian(m: &SquareMatrix) -> Result<Hermitian, Failure> {
    Ok(Hermitian::new(m.clone())?)
}

fn skew(m: &SquareMatrix) -> Result<SkewHermitian, Failure> {
    Ok(SkewHermitian::new(m.clone())?)
}

fn unitary(m: &SquareMatrix) -> Result<Unitary, Failure> {
    Ok(Unitary::new(m.clone())?)
}

/// Message for the last failed call on this thread; empty if none. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Builds a `dim x dim` matrix from row-major real and imaginary parts.
/// `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_new(dim: usize, re: *const f64, im: *const f64, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let len = dim.checked_mul(dim).ok_or_else(|| invalid("dimension overflows"))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
        let m = SquareMatrix::from_fn(dim, dim, |i, j| {
            let k = i * dim + j;
            Complex64::new(re[k], im.map_or(0.0, |v| v[k]))
        });
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("entries must be finite"));
        }
        put_matrix(out, m)
    })
}

/// Parses the JSON interchange format `{"dim": n, "entries": [[[re, im], ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_from_json(json: *const c_char, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| invalid(format!("json is not utf-8: {e}")))?;
        put_matrix(out, matrix_from_json(text)?)
    })
}

/// Serializes a matrix; free the result with `sg_string_free`.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_to_json(m: *const SgMatrix, out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        let text = matrix_to_json(matrix_ref(m, "matrix")?);
        put(out, CString::new(text).expect("json has no nul").into_raw(), "output string")
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dimension of the matrix, or 0 for a null handle.
///
/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_dim(m: *const SgMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.m.nrows())
}

/// Copies the entries row-major into `re` and `im` (either may be null), each of length `len >= dim * dim`.
///
/// # Safety
/// Non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_copy_entries(m: *const SgMatrix, re: *mut f64, im: *mut f64, len: usize) -> SgStatus {
    guard(|| {
        let m = matrix_ref(m, "matrix")?;
        let n = m.nrows();
        if len < n * n {
            return Err(invalid(format!("buffer holds {len} entries, need {}", n * n)));
        }
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                if !re.is_null() {
                    *re.add(k) = m[(i, j)].re;
                }
                if !im.is_null() {
                    *im.add(k) = m[(i, j)].im;
                }
            }
        }
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library, or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_matrix_free(m: *mut SgMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Schatten p-norm for even `p >= 2`; `p = 0` selects the operator norm.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_schatten_norm(m: *const SgMatrix, p: u32, out: *mut f64) -> SgStatus {
    guard(|| {
        let m = matrix_ref(m, "matrix")?;
        let order = if p == 0 { NormOrder::Inf } else { NormOrder::P(even(p)?) };
        put(out, schatten_norm(m, order), "output")
    })
}

/// Principal logarithm of a unitary matrix.
///
/// # Safety
/// `u` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_unitary_log(u: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let u = unitary(matrix_ref(u, "u")?)?;
        put_matrix(out, unitary_log(&u).into_inner())
    })
}

/// Exponential of a skew-Hermitian matrix.
///
/// # Safety
/// `z` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_exp_skew(z: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let z = skew(matrix_ref(z, "z")?)?;
        put_matrix(out, exp_skew(&z).into_inner())
    })
}

/// Unitary factor of the polar decomposition of an invertible matrix.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_polar_unitary_part(g: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let g = matrix_ref(g, "g")?;
        put_matrix(out, polar_unitary_part(g)?.into_inner())
    })
}

/// `|log(u* v)|_p`.
///
/// # Safety
/// `u`, `v` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_distance_p(u: *const SgMatrix, v: *const SgMatrix, p: u32, out: *mut f64) -> SgStatus {
    guard(|| {
        let u = unitary(matrix_ref(u, "u")?)?;
        let v = unitary(matrix_ref(v, "v")?)?;
        if u.dim() != v.dim() {
            return Err(GeoError::Dimension { expected: u.dim(), found: v.dim() }.into());
        }
        put(out, distance_p(&u, &v, even(p)?), "output")
    })
}

/// Derivative of the exponential at `a` in direction `b` (both skew-Hermitian).
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_dexp(a: *const SgMatrix, b: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let a = skew(matrix_ref(a, "a")?)?;
        let b = skew(matrix_ref(b, "b")?)?;
        if a.dim() != b.dim() {
            return Err(GeoError::Dimension { expected: a.dim(), found: b.dim() }.into());
        }
        put_matrix(out, dexp(&a, &b))
    })
}

/// Solves `dexp(a, b) = w` for skew-Hermitian `b`.
///
/// # Safety
/// `a`, `w` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_dexp_inv(a: *const SgMatrix, w: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let a = skew(matrix_ref(a, "a")?)?;
        let w = matrix_ref(w, "w")?;
        if a.dim() != w.nrows() {
            return Err(GeoError::Dimension { expected: a.dim(), found: w.nrows() }.into());
        }
        put_matrix(out, dexp_inv(&a, w)?.into_inner())
    })
}

/// `r / sin r` on `[0, pi)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_g_bound(r: f64, out: *mut f64) -> SgStatus {
    guard(|| put(out, g_bound(r)?, "output"))
}

/// Orbit of the Hermitian matrix `a` with Schatten order `p`. `tau` is the eigenvalue
/// clustering tolerance; pass a negative or NaN value for the default.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_orbit_new(a: *const SgMatrix, p: u32, tau: f64, out: *mut *mut SgOrbit) -> SgStatus {
    guard(|| {
        let a = hermitian(matrix_ref(a, "a")?)?;
        let tau = (tau >= 0.0).then_some(tau);
        let spec = OrbitSpec::new(a, even(p)?, tau)?;
        put(out, Box::into_raw(Box::new(SgOrbit { spec })), "output handle")
    })
}

/// # Safety
/// `o` must come from this library, or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_orbit_free(o: *mut SgOrbit) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Minimal lifting of the tangent vector `tangent` at the orbit point `x`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_minimal_lifting(
    orbit: *const SgOrbit,
    x: *const SgMatrix,
    tangent: *const SgMatrix,
    out: *mut *mut SgMatrix,
) -> SgStatus {
    guard(|| {
        let spec = orbit_ref(orbit)?;
        let pt = spec.point(&hermitian(matrix_ref(x, "x")?)?)?;
        let t = hermitian(matrix_ref(tangent, "tangent")?)?;
        put_matrix(out, minimal_lifting(&pt, &t, spec.p())?.into_inner())
    })
}

/// Quotient Finsler norm of `tangent` at `x`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_quotient_norm(
    orbit: *const SgOrbit,
    x: *const SgMatrix,
    tangent: *const SgMatrix,
    out: *mut f64,
) -> SgStatus {
    guard(|| {
        let spec = orbit_ref(orbit)?;
        let pt = spec.point(&hermitian(matrix_ref(x, "x")?)?)?;
        let t = hermitian(matrix_ref(tangent, "tangent")?)?;
        put(out, quotient_norm(&pt, &t, spec.p())?, "output")
    })
}

/// Geodesic `t -> e^{tz} x0 e^{-tz}` of minimal speed joining `x0` to `x1`. Writes the
/// velocity `z` to `out_z` and the summary to `info` (either may be null).
///
/// # Safety
/// Handles must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_endpoint_geodesic(
    orbit: *const SgOrbit,
    x0: *const SgMatrix,
    x1: *const SgMatrix,
    out_z: *mut *mut SgMatrix,
    info: *mut SgGeodesicInfo,
) -> SgStatus {
    guard(|| {
        let spec = orbit_ref(orbit)?;
        let x0 = hermitian(matrix_ref(x0, "x0")?)?;
        let x1 = hermitian(matrix_ref(x1, "x1")?)?;
        let geo = endpoint_geodesic(spec, &x0, &x1)?;
        if !info.is_null() {
            info.write(SgGeodesicInfo {
                length: geo.length,
                stationarity: geo.stationarity,
                endpoint_residual: geo.endpoint_residual,
                certified: geo.certified as i32,
                iterations: geo.iterations,
            });
        }
        if !out_z.is_null() {
            put_matrix(out_z, geo.geodesic.velocity.into_inner())?;
        }
        Ok(())
    })
}

/// Local cross section `u -> sigma(u A u*)` near the base operator.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_cross_section(orbit: *const SgOrbit, u: *const SgMatrix, out: *mut *mut SgMatrix) -> SgStatus {
    guard(|| {
        let spec = orbit_ref(orbit)?;
        let u = unitary(matrix_ref(u, "u")?)?;
        put_matrix(out, cross_section_sigma(spec, &u)?.into_inner())
    })
}
