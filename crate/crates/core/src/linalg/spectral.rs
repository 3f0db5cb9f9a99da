//! Spectral calculus: Hermitian and unitary eigendecompositions, clustered
//! spectral projections, the exponential and principal logarithm, polar parts.
//!
//! Everything here goes through the Hermitian eigensolver. Unitary matrices are
//! diagonalized by splitting with Hermitian parts `Re(e^{-i phi} u)` rather than
//! by a complex Schur decomposition.

use std::f64::consts::PI;

use super::{c, identity, opnorm, Complex64, Hermitian, SkewHermitian, SquareMatrix, Unitary, I};
use crate::error::{GeoError, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// The input is symmetrized first, so nearly Hermitian input is fine.
pub fn hermitian_eigen(h: &SquareMatrix) -> (Vec<f64>, SquareMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), SquareMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = SquareMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Applies a real function to a Hermitian matrix through its eigendecomposition.
pub fn hermitian_function(h: &SquareMatrix, f: impl Fn(f64) -> Complex64) -> SquareMatrix {
    let (vals, v) = hermitian_eigen(h);
    let mut scaled = v.clone();
    for (j, &l) in vals.iter().enumerate() {
        let fl = f(l);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= fl);
    }
    scaled * v.adjoint()
}

/// Spectral data grouped into eigenvalue clusters.
///
/// `frames[k]` holds an orthonormal basis (as columns) of the `k`-th eigenspace and
/// `projections[k] = frames[k] frames[k]*`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub multiplicities: Vec<usize>,
    pub frames: Vec<SquareMatrix>,
    pub projections: Vec<SquareMatrix>,
}

impl<T: Copy> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frames.first().map(|f| f.nrows()).unwrap_or(0)
    }

    /// Unitary whose columns are the concatenated frames.
    pub fn eigenbasis(&self) -> SquareMatrix {
        let n = self.dim();
        let mut out = SquareMatrix::zeros(n, n);
        let mut col = 0;
        for f in &self.frames {
            for j in 0..f.ncols() {
                out.set_column(col, &f.column(j));
                col += 1;
            }
        }
        out
    }

    /// Cluster index of every column of [`Self::eigenbasis`].
    pub fn cluster_labels(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .enumerate()
            .flat_map(|(k, &m)| std::iter::repeat(k).take(m))
            .collect()
    }
}

impl SpectralDecomposition<f64> {
    /// `sum_k lambda_k P_k`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.dim();
        let mut out = SquareMatrix::zeros(n, n);
        for (l, p) in self.eigenvalues.iter().zip(&self.projections) {
            out += p * c(*l);
        }
        out
    }

    /// Smallest distance between distinct cluster eigenvalues.
    pub fn min_gap(&self) -> Option<f64> {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }
}

/// Default clustering tolerance `1e-8 |a|_2`, or `1e-8` for the zero matrix.
pub fn default_cluster_tol(a: &SquareMatrix) -> f64 {
    let s = opnorm(a);
    if s > 0.0 {
        1e-8 * s
    } else {
        1e-8
    }
}

fn group_columns(vecs: &SquareMatrix, groups: &[Vec<usize>]) -> (Vec<usize>, Vec<SquareMatrix>, Vec<SquareMatrix>) {
    let n = vecs.nrows();
    let mut mult = Vec::new();
    let mut frames = Vec::new();
    let mut projs = Vec::new();
    for g in groups {
        let mut f = SquareMatrix::zeros(n, g.len());
        for (j, &k) in g.iter().enumerate() {
            f.set_column(j, &vecs.column(k));
        }
        projs.push(&f * f.adjoint());
        mult.push(g.len());
        frames.push(f);
    }
    (mult, frames, projs)
}

/// Chain clustering of ascending values: a new cluster starts where consecutive
/// values differ by more than `tau`.
fn chain_clusters(vals: &[f64], tau: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - vals[*g.last().unwrap()] <= tau => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Spectral projections of a Hermitian matrix, clustering eigenvalues within `tau`.
/// Cluster eigenvalues are the means of their members, ascending.
pub fn spectral_projections(a: &Hermitian, tau: f64) -> SpectralDecomposition<f64> {
    let (vals, vecs) = hermitian_eigen(a);
    let groups = chain_clusters(&vals, tau);
    let eigenvalues = groups
        .iter()
        .map(|g| g.iter().map(|&k| vals[k]).sum::<f64>() / g.len() as f64)
        .collect();
    let (multiplicities, frames, projections) = group_columns(&vecs, &groups);
    SpectralDecomposition { eigenvalues, multiplicities, frames, projections }
}

/// Clustering tolerance for the Hermitian splits inside [`unitary_eigen`].
const SPLIT_TOL: f64 = 1e-3;
const SPLIT_ANGLE: f64 = 1.0;

/// `log(1 + x)` by its power series; `|x|_2` must be well below one.
fn log_near_identity(m: &SquareMatrix) -> SquareMatrix {
    let n = m.nrows();
    let x = m - identity(n);
    let mut term = x.clone();
    let mut out = x.clone();
    for k in 2..200 {
        term = &term * &x;
        let coef = if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64;
        out += &term * c(coef);
        if term.norm() / (k as f64) < 1e-18 {
            break;
        }
    }
    out
}

fn split_unitary(u: &SquareMatrix, phi: f64, depth: usize) -> (Vec<f64>, SquareMatrix) {
    let n = u.nrows();
    if n == 1 {
        return (vec![u[(0, 0)].arg()], identity(1));
    }
    if depth >= 2 {
        // Every eigenvalue here agrees with the mean to within ~1e-2, so the
        // logarithm of the normalized block is a convergent series.
        let mean = u.trace() / c(n as f64);
        let lambda = if mean.norm() > 0.0 { mean / mean.norm() } else { c(1.0) };
        let rel = u * lambda.conj();
        let log = log_near_identity(&rel);
        let (mu, w) = hermitian_eigen(&(log * (-I)));
        let base = lambda.arg();
        return (mu.into_iter().map(|m| base + m).collect(), w);
    }
    let rot = Complex64::from_polar(1.0, -phi);
    let h = (u * rot + u.adjoint() * rot.conj()) * c(0.5);
    let (vals, vecs) = hermitian_eigen(&h);
    let groups = chain_clusters(&vals, SPLIT_TOL);
    let mut phases = Vec::with_capacity(n);
    let mut out = SquareMatrix::zeros(n, n);
    let mut col = 0;
    for g in groups {
        if g.len() == 1 {
            let v = vecs.column(g[0]).into_owned();
            let rq = (v.adjoint() * u * &v)[(0, 0)];
            phases.push(rq.arg());
            out.set_column(col, &v);
            col += 1;
            continue;
        }
        let mut frame = SquareMatrix::zeros(n, g.len());
        for (j, &k) in g.iter().enumerate() {
            frame.set_column(j, &vecs.column(k));
        }
        let block = frame.adjoint() * u * &frame;
        let (sub_phases, sub_vecs) = split_unitary(&block, phi + PI / 2.0, depth + 1);
        let lifted = &frame * sub_vecs;
        for j in 0..g.len() {
            out.set_column(col, &lifted.column(j));
            col += 1;
        }
        phases.extend(sub_phases);
    }
    (phases, out)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn principal_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Eigenphases in `(-pi, pi]`, ascending, and orthonormal eigenvectors of a unitary matrix.
pub fn unitary_eigen(u: &Unitary) -> (Vec<f64>, SquareMatrix) {
    let (phases, vecs) = split_unitary(u, SPLIT_ANGLE, 0);
    let n = phases.len();
    let phases: Vec<f64> = phases.into_iter().map(principal_angle).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let sorted = order.iter().map(|&k| phases[k]).collect();
    let v = SquareMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (sorted, v)
}

/// Unitary spectrum clustered by chordal distance `|e^{ia} - e^{ib}| <= tau`,
/// merging across the branch cut at `-1`.
pub fn unitary_spectrum(u: &Unitary, tau: f64) -> SpectralDecomposition<Complex64> {
    let (phases, vecs) = unitary_eigen(u);
    let pts: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..pts.len() {
        match groups.last_mut() {
            Some(g) if (pts[k] - pts[*g.last().unwrap()]).norm() <= tau => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    if groups.len() > 1 {
        let first = groups[0][0];
        let last = *groups.last().unwrap().last().unwrap();
        if (pts[first] - pts[last]).norm() <= tau {
            let head = groups.remove(0);
            groups.last_mut().unwrap().extend(head);
        }
    }
    let eigenvalues = groups
        .iter()
        .map(|g| {
            let s: Complex64 = g.iter().map(|&k| pts[k]).sum();
            s / s.norm()
        })
        .collect();
    let (multiplicities, frames, projections) = group_columns(&vecs, &groups);
    SpectralDecomposition { eigenvalues, multiplicities, frames, projections }
}

/// `e^z` for skew-Hermitian `z`, through the eigendecomposition of `-i z`.
pub fn exp_skew(z: &SkewHermitian) -> Unitary {
    let m = hermitian_function(&(z.as_matrix() * (-I)), |l| Complex64::from_polar(1.0, l));
    Unitary::new_unchecked(m)
}

/// `t -> e^{t z}` with the eigendecomposition of `z` computed once.
#[derive(Clone, Debug)]
pub struct ExpRay {
    phases: Vec<f64>,
    frame: SquareMatrix,
}

impl ExpRay {
    pub fn new(z: &SkewHermitian) -> Self {
        let (phases, frame) = hermitian_eigen(&(z.as_matrix() * (-I)));
        ExpRay { phases, frame }
    }

    pub fn at(&self, t: f64) -> Unitary {
        let mut scaled = self.frame.clone();
        for (j, &l) in self.phases.iter().enumerate() {
            let e = Complex64::from_polar(1.0, t * l);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= e);
        }
        Unitary::new_unchecked(scaled * self.frame.adjoint())
    }
}

/// Principal logarithm: eigenphases in `(-pi, pi]`, with `-1` sent to `+i pi`.
pub fn unitary_log(u: &Unitary) -> SkewHermitian {
    let (phases, v) = unitary_eigen(u);
    let mut scaled = v.clone();
    for (j, &t) in phases.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= I * t);
    }
    SkewHermitian::skew_part(scaled * v.adjoint())
}

fn extreme_singular_values(g: &SquareMatrix) -> (f64, f64) {
    match g.clone().try_svd(false, false, f64::EPSILON, 10_000) {
        Some(svd) => {
            let sv = svd.singular_values;
            (sv.min(), sv.max())
        }
        None => {
            let (vals, _) = hermitian_eigen(&(g.adjoint() * g));
            let lo = vals.first().copied().unwrap_or(0.0).max(0.0).sqrt();
            let hi = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
            (lo, hi)
        }
    }
}

/// Unitary polar factor `g (g* g)^{-1/2}`.
///
/// Fails when the smallest singular value is at most `1e-10 |g|_2`.
pub fn polar_unitary_part(g: &SquareMatrix) -> Result<Unitary> {
    if g.nrows() != g.ncols() {
        return Err(GeoError::NotSquare { rows: g.nrows(), cols: g.ncols() });
    }
    // The Gram eigenvalues cannot resolve singular values below ~1e-8 |g|, so the
    // singularity test uses an SVD.
    let (smallest, largest) = extreme_singular_values(g);
    if smallest <= 1e-10 * largest || largest == 0.0 {
        return Err(GeoError::Singular { smallest });
    }
    let gram = g.adjoint() * g;
    let (vals, v) = hermitian_eigen(&gram);
    let mut scaled = v.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = c(1.0 / l.sqrt());
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= s);
    }
    Ok(Unitary::new_unchecked(g * scaled * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[Complex64]) -> SquareMatrix {
        let n = d.len();
        SquareMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { c(0.0) })
    }

    fn pseudo_random(n: usize, seed: u64) -> SquareMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        SquareMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()))
    }

    fn random_skew(n: usize, seed: u64, scale: f64) -> SkewHermitian {
        SkewHermitian::skew_part(pseudo_random(n, seed) * c(scale))
    }

    #[test]
    fn exp_of_half_turn_is_reflection() {
        let z = SkewHermitian::new(diag(&[I * PI, c(0.0)])).unwrap();
        let u = exp_skew(&z);
        assert!((u.as_matrix() - diag(&[c(-1.0), c(1.0)])).norm() < 1e-15);
    }

    #[test]
    fn log_of_minus_one_takes_positive_branch() {
        let u = Unitary::new(diag(&[c(-1.0), c(1.0)])).unwrap();
        let l = unitary_log(&u);
        assert!((l.as_matrix() - diag(&[I * PI, c(0.0)])).norm() < 1e-14);
    }

    #[test]
    fn log_exp_roundtrip() {
        for n in 1..=8 {
            for seed in 0..20 {
                let z = random_skew(n, seed * 31 + n as u64, 1.5);
                let theta_max = opnorm(&z);
                if theta_max >= PI - 1e-6 {
                    continue;
                }
                let back = unitary_log(&exp_skew(&z));
                assert!((back.as_matrix() - z.as_matrix()).norm() < 1e-10, "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn unitary_eigen_degenerate_and_conjugate_pairs() {
        // Repeated phases and a conjugate pair +-theta, conjugated by a random unitary.
        let d = diag(&[
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -0.4),
            Complex64::from_polar(1.0, 2.0),
            c(1.0),
            c(1.0),
        ]);
        let q = polar_unitary_part(&pseudo_random(6, 7)).unwrap();
        let u = Unitary::new_unchecked(q.as_matrix() * d * q.as_matrix().adjoint());
        let (phases, v) = unitary_eigen(&u);
        let mut expected = vec![0.4, 0.4, -0.4, 2.0, 0.0, 0.0];
        expected.sort_by(f64::total_cmp);
        for (a, b) in phases.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{phases:?}");
        }
        let recon = &v * diag(&phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>()) * v.adjoint();
        assert!((recon - u.as_matrix()).norm() < 1e-12);
        assert!((v.adjoint() * &v - identity(6)).norm() < 1e-12);
    }

    #[test]
    fn polar_reconstructs_and_rejects_singular() {
        let g = pseudo_random(5, 3);
        let u = polar_unitary_part(&g).unwrap();
        assert!(u.unitarity_defect() < 1e-13);
        // g = u (g* g)^{1/2}: u* g must be Hermitian positive.
        let p = u.as_matrix().adjoint() * &g;
        assert!((&p - p.adjoint()).norm() < 1e-12);
        let (vals, _) = hermitian_eigen(&p);
        assert!(vals[0] > 0.0);
        let mut s = g.clone();
        s.set_column(0, &g.column(1).into_owned());
        assert!(matches!(polar_unitary_part(&s), Err(GeoError::Singular { .. })));
    }

    #[test]
    fn projections_cluster_and_resolve_identity() {
        let a = Hermitian::from_real_diagonal(&[1.0, 1.0, 2.0, 3.0 + 1e-12]);
        let q = polar_unitary_part(&pseudo_random(4, 11)).unwrap();
        let a = a.conjugated_by(&q);
        let sd = spectral_projections(&a, default_cluster_tol(&a));
        assert_eq!(sd.multiplicities, vec![2, 1, 1]);
        let mut sum = SquareMatrix::zeros(4, 4);
        for (i, p) in sd.projections.iter().enumerate() {
            assert!((p * p - p).norm() < 1e-12);
            for (j, r) in sd.projections.iter().enumerate() {
                if i != j {
                    assert!((p * r).norm() < 1e-12);
                }
            }
            sum += p;
        }
        assert!((sum - identity(4)).norm() < 1e-12);
        assert!((sd.reconstruct() - a.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn zero_matrix_single_cluster() {
        let a = Hermitian::zeros(3);
        let sd = spectral_projections(&a, default_cluster_tol(&a));
        assert_eq!(sd.multiplicities, vec![3]);
    }

    #[test]
    fn unitary_spectrum_merges_across_cut() {
        let u = Unitary::new(diag(&[Complex64::from_polar(1.0, PI), Complex64::from_polar(1.0, -PI + 1e-12), c(1.0)])).unwrap();
        let sd = unitary_spectrum(&u, 1e-8);
        assert_eq!(sd.len(), 2);
        assert!(sd.multiplicities.contains(&2));
    }
}
