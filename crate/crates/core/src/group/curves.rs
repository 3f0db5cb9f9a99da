//! Curves in the unitary group with known left velocity `g* g'`.

use std::f64::consts::PI;

use super::{chord_logs, DiscretizedCurve, GeodesicSegment};
use crate::error::{GeoError, Result};
use crate::linalg::spectral::exp_skew;
use crate::linalg::{SkewHermitian, Unitary};

/// A piecewise smooth curve `g : [a, b] -> U(n)`.
pub trait GroupCurve: Sync {
    fn dim(&self) -> usize;
    fn interval(&self) -> (f64, f64);
    fn point(&self, t: f64) -> Unitary;
    /// `g(t)* g'(t)`; right derivative at corners.
    fn left_velocity(&self, t: f64) -> SkewHermitian;
    /// Times where the curve may fail to be smooth, including both endpoints.
    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.interval();
        vec![a, b]
    }
}

impl GroupCurve for GeodesicSegment {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn interval(&self) -> (f64, f64) {
        self.interval
    }

    fn point(&self, t: f64) -> Unitary {
        GeodesicSegment::point(self, t)
    }

    fn left_velocity(&self, _t: f64) -> SkewHermitian {
        self.velocity.clone()
    }
}

/// Time profile of one exponential factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `c t`
    Linear(f64),
    /// `c t^2`
    Quadratic(f64),
    /// `c sin(pi t)`
    Sine(f64),
}

impl Profile {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Profile::Linear(c) => c * t,
            Profile::Quadratic(c) => c * t * t,
            Profile::Sine(c) => c * (PI * t).sin(),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Profile::Linear(c) => c,
            Profile::Quadratic(c) => 2.0 * c * t,
            Profile::Sine(c) => c * PI * (PI * t).cos(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpFactor {
    pub profile: Profile,
    pub generator: SkewHermitian,
}

/// `base * exp(f_1(t) z_1) * ... * exp(f_k(t) z_k)`.
///
/// The left velocity is exact: `sum_i f_i'(t) T_i* z_i T_i` with `T_i` the product of
/// the factors after the `i`-th.
#[derive(Clone, Debug)]
pub struct ExponentialProduct {
    pub base: Unitary,
    pub factors: Vec<ExpFactor>,
    pub interval: (f64, f64),
}

impl ExponentialProduct {
    pub fn new(base: Unitary, factors: Vec<(Profile, SkewHermitian)>, interval: (f64, f64)) -> Result<Self> {
        let n = base.dim();
        if let Some((_, z)) = factors.iter().find(|(_, z)| z.dim() != n) {
            return Err(GeoError::Dimension { expected: n, found: z.dim() });
        }
        Ok(ExponentialProduct {
            base,
            factors: factors.into_iter().map(|(profile, generator)| ExpFactor { profile, generator }).collect(),
            interval,
        })
    }

    fn factor_values(&self, t: f64) -> Vec<Unitary> {
        self.factors.iter().map(|f| exp_skew(&f.generator.scaled(f.profile.value(t)))).collect()
    }
}

impl GroupCurve for ExponentialProduct {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn interval(&self) -> (f64, f64) {
        self.interval
    }

    fn point(&self, t: f64) -> Unitary {
        self.factor_values(t).iter().fold(self.base.clone(), |acc, e| acc.compose(e))
    }

    fn left_velocity(&self, t: f64) -> SkewHermitian {
        let values = self.factor_values(t);
        let n = self.dim();
        let mut tail = Unitary::identity(n);
        let mut v = SkewHermitian::zeros(n);
        for (f, e) in self.factors.iter().zip(&values).rev() {
            let term = f.generator.scaled(f.profile.derivative(t)).conjugated_by(&tail.adjoint());
            v = &v + &term;
            tail = e.compose(&tail);
        }
        v
    }
}

/// Curve through given samples, following the short geodesic on each interval.
#[derive(Clone, Debug)]
pub struct PiecewiseGeodesic {
    times: Vec<f64>,
    starts: Vec<Unitary>,
    velocities: Vec<SkewHermitian>,
}

impl PiecewiseGeodesic {
    /// Fails with a refinement error if consecutive samples are not joined by a principal log.
    pub fn from_samples(c: &DiscretizedCurve<Unitary>) -> Result<Self> {
        let logs = chord_logs(c)?;
        let times = c.times().to_vec();
        let velocities = logs.iter().zip(times.windows(2)).map(|(l, w)| l.scaled(1.0 / (w[1] - w[0]))).collect();
        let starts = c.samples()[..c.len() - 1].to_vec();
        Ok(PiecewiseGeodesic { times, starts, velocities })
    }

    fn segment_index(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&s| s <= t);
        k.saturating_sub(1).min(self.starts.len() - 1)
    }
}

impl GroupCurve for PiecewiseGeodesic {
    fn dim(&self) -> usize {
        self.starts[0].dim()
    }

    fn interval(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn point(&self, t: f64) -> Unitary {
        let k = self.segment_index(t);
        self.starts[k].compose(&exp_skew(&self.velocities[k].scaled(t - self.times[k])))
    }

    fn left_velocity(&self, t: f64) -> SkewHermitian {
        self.velocities[self.segment_index(t)].clone()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.times.clone()
    }
}
