//! Metric geometry of the unitary group with the left-invariant Schatten p-norm.

mod curves;
mod experiments;

pub use curves::{ExpFactor, ExponentialProduct, GroupCurve, PiecewiseGeodesic, Profile};
pub use experiments::{
    clarkson_check, convexity_profile, first_variation_check, geodesic_family_bound, minimality_experiment,
    semi_parallelogram_gap, ConvexityProfile, FamilyBoundReport, FirstVariation, MinimalityReport, VariationFamily,
};

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::linalg::spectral::{exp_skew, unitary_log};
use crate::linalg::{opnorm, pnorm, EvenP, SkewHermitian, Unitary};

/// Chord logs at or beyond this operator norm leave the principal branch.
pub const CHORD_LIMIT: f64 = std::f64::consts::PI - 1e-9;

/// One-parameter group through `base`: `t -> base exp((t - t0) z)` on `[t0, t1]`.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSegment {
    pub base: Unitary,
    pub velocity: SkewHermitian,
    pub interval: (f64, f64),
}

impl GeodesicSegment {
    pub fn new(base: Unitary, velocity: SkewHermitian, interval: (f64, f64)) -> Result<Self> {
        if base.dim() != velocity.dim() {
            return Err(GeoError::Dimension { expected: base.dim(), found: velocity.dim() });
        }
        if !(interval.0 < interval.1) {
            return Err(GeoError::InvalidInput(format!("empty interval [{}, {}]", interval.0, interval.1)));
        }
        Ok(GeodesicSegment { base, velocity, interval })
    }

    /// The short geodesic `u exp(t log(u* v))` on `[0, 1]`.
    pub fn joining(u: &Unitary, v: &Unitary) -> Self {
        let z = unitary_log(&u.adjoint().compose(v));
        GeodesicSegment { base: u.clone(), velocity: z, interval: (0.0, 1.0) }
    }

    pub fn point(&self, t: f64) -> Unitary {
        self.base.compose(&exp_skew(&self.velocity.scaled(t - self.interval.0)))
    }

    pub fn start(&self) -> Unitary {
        self.base.clone()
    }

    pub fn end(&self) -> Unitary {
        self.point(self.interval.1)
    }

    pub fn length(&self, p: EvenP) -> f64 {
        (self.interval.1 - self.interval.0) * pnorm(&self.velocity, p)
    }
}

/// Samples of a curve on a strictly increasing time grid.
#[derive(Clone, Debug, Serialize)]
pub struct DiscretizedCurve<T> {
    times: Vec<f64>,
    samples: Vec<T>,
}

impl<T: AsRef<crate::linalg::SquareMatrix>> DiscretizedCurve<T> {
    pub fn new(times: Vec<f64>, samples: Vec<T>) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(GeoError::Dimension { expected: times.len(), found: samples.len() });
        }
        if times.len() < 2 {
            return Err(GeoError::InvalidInput("a discretized curve needs at least two samples".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(GeoError::InvalidInput("sample times must be strictly increasing".into()));
        }
        let n = samples[0].as_ref().nrows();
        if let Some(bad) = samples.iter().find(|s| s.as_ref().nrows() != n) {
            return Err(GeoError::Dimension { expected: n, found: bad.as_ref().nrows() });
        }
        Ok(DiscretizedCurve { times, samples })
    }

    /// Samples `f` on `n + 1` equally spaced times in `[a, b]`.
    pub fn sample(a: f64, b: f64, n: usize, f: impl Fn(f64) -> T) -> Result<Self> {
        let times: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let samples = times.iter().map(|&t| f(t)).collect();
        Self::new(times, samples)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].as_ref().nrows()
    }
}

/// `|log(u* v)|_p`, the length of the short geodesic from `u` to `v`.
pub fn distance_p(u: &Unitary, v: &Unitary, p: EvenP) -> f64 {
    pnorm(&unitary_log(&u.adjoint().compose(v)), p)
}

fn chord_logs(c: &DiscretizedCurve<Unitary>) -> Result<Vec<SkewHermitian>> {
    let s = c.samples();
    (0..s.len() - 1)
        .map(|k| {
            let l = unitary_log(&s[k].adjoint().compose(&s[k + 1]));
            let norm = opnorm(&l);
            if norm >= CHORD_LIMIT {
                return Err(GeoError::Refine { index: k, norm });
            }
            Ok(l)
        })
        .collect()
}

/// Chordal length `sum_k |log(c_k* c_{k+1})|_p`.
pub fn curve_length(c: &DiscretizedCurve<Unitary>, p: EvenP) -> Result<f64> {
    Ok(chord_logs(c)?.iter().map(|l| pnorm(l, p)).sum())
}

/// Chordal length extrapolated from the full grid and every other sample.
///
/// The chordal rule has an `O(h^2)` error on smooth pieces, so `(4 L_h - L_2h) / 3`
/// is fourth order. `breaks` lists sample indices where the curve may have corners;
/// each piece between breaks must have an even number of intervals.
pub fn richardson_length(c: &DiscretizedCurve<Unitary>, breaks: &[usize], p: EvenP) -> Result<f64> {
    let logs = chord_logs(c)?;
    let s = c.samples();
    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut bounds = vec![0];
    bounds.extend(breaks.iter().copied().filter(|&b| b > 0 && b < s.len() - 1));
    bounds.push(s.len() - 1);
    bounds.dedup();
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (b - a) % 2 != 0 {
            return Err(GeoError::InvalidInput(format!("piece [{a}, {b}] has an odd number of intervals")));
        }
        fine += logs[a..b].iter().map(|l| pnorm(l, p)).sum::<f64>();
        let mut k = a;
        while k < b {
            coarse += distance_p(&s[k], &s[k + 2], p);
            k += 2;
        }
    }
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Discretization tolerance of the chordal rule with `n` intervals.
pub fn tol_disc(n: usize) -> f64 {
    10.0 / (n as f64 * n as f64)
}
