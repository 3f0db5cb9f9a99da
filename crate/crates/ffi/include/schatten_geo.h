#ifndef SCHATTEN_GEO_H
#define SCHATTEN_GEO_H

#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  /*
   A required pointer was null.
   */
  SG_STATUS_NULL_POINTER = 1,
  /*
   Bad input: wrong structure, dimension, order or domain.
   */
  SG_STATUS_INVALID_INPUT = 2,
  /*
   The numerics failed: no convergence, singular operator, step too large.
   */
  SG_STATUS_NUMERICAL = 3,
  /*
   An internal panic was caught at the boundary.
   */
  SG_STATUS_INTERNAL = 4,
} SgStatus;

/*
 Opaque dense complex square matrix.
 */
typedef struct SgMatrix SgMatrix;

/*
 Opaque unitary orbit of a Hermitian operator, with its Schatten order.
 */
typedef struct SgOrbit SgOrbit;

/*
 Summary of an endpoint geodesic.
 */
typedef struct SgGeodesicInfo {
  double length;
  /*
   Largest `|Tr(z^{p-1} b)|` over the isotropy basis.
   */
  double stationarity;
  double endpoint_residual;
  /*
   1 when `length < pi/4`, so the curve is certified minimal.
   */
  int32_t certified;
  size_t iterations;
} SgGeodesicInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty if none. Valid until the
 next failing call on the same thread.
 */
const char *sg_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sg_version(void);

/*
 Builds a `dim x dim` matrix from row-major real and imaginary parts.
 `im` may be null for a real matrix.

 # Safety
 `re` (and `im` when non-null) must point to `dim * dim` doubles.
 */
enum SgStatus sg_matrix_new(size_t dim, const double *re, const double *im, struct SgMatrix **out);

/*
 Parses the JSON interchange format `{"dim": n, "entries": [[[re, im], ...], ...]}`.

 # Safety
 `json` must be a NUL-terminated string.
 */
enum SgStatus sg_matrix_from_json(const char *json, struct SgMatrix **out);

/*
 Serializes a matrix; free the result with `sg_string_free`.

 # Safety
 `m` must be a live handle.
 */
enum SgStatus sg_matrix_to_json(const struct SgMatrix *m, char **out);

/*
 # Safety
 `s` must come from this library, or be null.
 */
void sg_string_free(char *s);

/*
 Dimension of the matrix, or 0 for a null handle.

 # Safety
 `m` must be a live handle or null.
 */
size_t sg_matrix_dim(const struct SgMatrix *m);

/*
 Copies the entries row-major into `re` and `im` (either may be null), each of length `len >= dim * dim`.

 # Safety
 Non-null buffers must hold `len` doubles.
 */
enum SgStatus sg_matrix_copy_entries(const struct SgMatrix *m,
                                     double *re,
                                     double *im,
                                     size_t len);

/*
 # Safety
 `m` must come from this library, or be null; it must not be used afterwards.
 */
void sg_matrix_free(struct SgMatrix *m);

/*
 Schatten p-norm for even `p >= 2`; `p = 0` selects the operator norm.

 # Safety
 `m` must be a live handle and `out` writable.
 */
enum SgStatus sg_schatten_norm(const struct SgMatrix *m, uint32_t p, double *out);

/*
 Principal logarithm of a unitary matrix.

 # Safety
 `u` must be a live handle and `out` writable.
 */
enum SgStatus sg_unitary_log(const struct SgMatrix *u, struct SgMatrix **out);

/*
 Exponential of a skew-Hermitian matrix.

 # Safety
 `z` must be a live handle and `out` writable.
 */
enum SgStatus sg_exp_skew(const struct SgMatrix *z, struct SgMatrix **out);

/*
 Unitary factor of the polar decomposition of an invertible matrix.

 # Safety
 `g` must be a live handle and `out` writable.
 */
enum SgStatus sg_polar_unitary_part(const struct SgMatrix *g, struct SgMatrix **out);

/*
 `|log(u* v)|_p`.

 # Safety
 `u`, `v` must be live handles and `out` writable.
 */
enum SgStatus sg_distance_p(const struct SgMatrix *u,
                            const struct SgMatrix *v,
                            uint32_t p,
                            double *out);

/*
 Derivative of the exponential at `a` in direction `b` (both skew-Hermitian).

 # Safety
 `a`, `b` must be live handles and `out` writable.
 */
enum SgStatus sg_dexp(const struct SgMatrix *a, const struct SgMatrix *b, struct SgMatrix **out);

/*
 Solves `dexp(a, b) = w` for skew-Hermitian `b`.

 # Safety
 `a`, `w` must be live handles and `out` writable.
 */
enum SgStatus sg_dexp_inv(const struct SgMatrix *a,
                          const struct SgMatrix *w,
                          struct SgMatrix **out);

/*
 `r / sin r` on `[0, pi)`.

 # Safety
 `out` must be writable.
 */
enum SgStatus sg_g_bound(double r, double *out);

/*
 Orbit of the Hermitian matrix `a` with Schatten order `p`. `tau` is the eigenvalue
 clustering tolerance; pass a negative or NaN value for the default.

 # Safety
 `a` must be a live handle and `out` writable.
 */
enum SgStatus sg_orbit_new(const struct SgMatrix *a, uint32_t p, double tau, struct SgOrbit **out);

/*
 # Safety
 `o` must come from this library, or be null; it must not be used afterwards.
 */
void sg_orbit_free(struct SgOrbit *o);

/*
 Minimal lifting of the tangent vector `tangent` at the orbit point `x`.

 # Safety
 Handles must be live and `out` writable.
 */
enum SgStatus sg_minimal_lifting(const struct SgOrbit *orbit,
                                 const struct SgMatrix *x,
                                 const struct SgMatrix *tangent,
                                 struct SgMatrix **out);

/*
 Quotient Finsler norm of `tangent` at `x`.

 # Safety
 Handles must be live and `out` writable.
 */
enum SgStatus sg_quotient_norm(const struct SgOrbit *orbit,
                               const struct SgMatrix *x,
                               const struct SgMatrix *tangent,
                               double *out);

/*
 Geodesic `t -> e^{tz} x0 e^{-tz}` of minimal speed joining `x0` to `x1`. Writes the
 velocity `z` to `out_z` and the summary to `info` (either may be null).

 # Safety
 Handles must be live; non-null outputs must be writable.
 */
enum SgStatus sg_endpoint_geodesic(const struct SgOrbit *orbit,
                                   const struct SgMatrix *x0,
                                   const struct SgMatrix *x1,
                                   struct SgMatrix **out_z,
                                   struct SgGeodesicInfo *info);

/*
 Local cross section `u -> sigma(u A u*)` near the base operator.

 # Safety
 Handles must be live and `out` writable.
 */
enum SgStatus sg_cross_section(const struct SgOrbit *orbit,
                               const struct SgMatrix *u,
                               struct SgMatrix **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHATTEN_GEO_H */
