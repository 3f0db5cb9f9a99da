//! Random matrices for experiments and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::spectral::polar_unitary_part;
use crate::linalg::{opnorm, pnorm, Complex64, EvenP, Hermitian, SkewHermitian, SquareMatrix, Unitary};

/// Complex Ginibre matrix: independent entries with `E|g_ij|^2 = 1`.
pub fn ginibre(n: usize, rng: &mut impl Rng) -> SquareMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SquareMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> Hermitian {
    Hermitian::symmetrize(ginibre(n, rng))
}

pub fn random_skew(n: usize, rng: &mut impl Rng) -> SkewHermitian {
    SkewHermitian::skew_part(ginibre(n, rng))
}

/// Random direction with `|z|_p = 1`.
pub fn random_skew_unit(n: usize, p: EvenP, rng: &mut impl Rng) -> SkewHermitian {
    loop {
        let z = random_skew(n, rng);
        let s = pnorm(&z, p);
        if s > 1e-12 {
            return z.scaled(1.0 / s);
        }
    }
}

/// Random skew-Hermitian matrix with operator norm exactly `r`.
pub fn random_skew_with_opnorm(n: usize, r: f64, rng: &mut impl Rng) -> SkewHermitian {
    loop {
        let z = random_skew(n, rng);
        let s = opnorm(&z);
        if s > 1e-12 {
            return z.scaled(r / s);
        }
    }
}

/// Random skew-Hermitian matrix with `|z|_p` uniform in `[0, r)`.
pub fn random_skew_in_ball(n: usize, p: EvenP, r: f64, rng: &mut impl Rng) -> SkewHermitian {
    let radius = r * rng.random::<f64>();
    random_skew_unit(n, p, rng).scaled(radius)
}

/// Haar-distributed unitary: the polar factor of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Unitary {
    loop {
        if let Ok(u) = polar_unitary_part(&ginibre(n, rng)) {
            return u;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_matrices_have_their_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = EvenP::new(4).unwrap();
        for n in 1..6 {
            let u = random_unitary(n, &mut rng);
            assert!(u.unitarity_defect() < 1e-13);
            let z = random_skew_unit(n, p, &mut rng);
            assert!((pnorm(&z, p) - 1.0).abs() < 1e-13);
            assert!((z.as_matrix() + z.adjoint()).norm() < 1e-15);
            let w = random_skew_with_opnorm(n, 2.5, &mut rng);
            assert!((opnorm(&w) - 2.5).abs() < 1e-12);
        }
    }
}
