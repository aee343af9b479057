//! Probability models of the input signal.
//!
//! The quantizer design pipeline is built around a symmetric, unit-variance
//! Laplacian source, for which every quantity it needs has a closed form.
//! The [`Source`] trait abstracts those quantities so tests can substitute
//! analytic toy densities.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

use std::f64::consts::SQRT_2;

/// A symmetric probability density together with the integrals the
/// companding design needs.
pub trait Source {
    /// Signal power σ².
    fn variance(&self) -> f64;

    /// Density p(x); even in x and normalized to 1 over the real line.
    fn density(&self, x: f64) -> f64;

    /// P[a ≤ X ≤ b]. Rejects a > b; infinite bounds are allowed.
    fn interval_probability(&self, a: f64, b: f64) -> Result<f64, Error>;

    /// Conditional mean E[X | X ≥ t] of the right tail, t > 0.
    fn tail_centroid(&self, t: f64) -> Result<f64, Error>;

    /// ∫_a^b p^{1/3}(x) dx for 0 ≤ a ≤ b.
    fn cube_root_density_integral(&self, a: f64, b: f64) -> Result<f64, Error>;

    /// Inverse of t ↦ ∫_0^t p^{1/3}(x) dx on [0, ∞).
    ///
    /// The default implementation brackets by doubling and bisects; sources
    /// with a closed form should override it.
    fn inverse_cube_root_integral(&self, area: f64) -> Result<f64, Error> {
        if !(area >= 0.0) || !area.is_finite() {
            return Err(Error::UnreachableArea(area));
        }
        if area == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        let mut doublings = 0;
        while self.cube_root_density_integral(0.0, hi)? < area {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(Error::UnreachableArea(area));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cube_root_density_integral(0.0, mid)? < area {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Quantile function F⁻¹(u) for u ∈ (0, 1).
    fn inverse_cdf(&self, u: f64) -> f64;
}

/// Zero-mean Laplacian (two-sided exponential) source.
///
/// With standard deviation σ the density is p(x) = exp(−√2·|x|/σ)/(√2·σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplacian {
    sigma: f64,
}

impl Laplacian {
    /// The reference source the design pipeline uses: σ² = 1.
    pub fn unit_variance() -> Self {
        Laplacian { sigma: 1.0 }
    }

    /// Laplacian with the given variance σ² > 0.
    pub fn with_variance(variance: f64) -> Result<Self, Error> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidVariance(variance));
        }
        Ok(Laplacian {
            sigma: variance.sqrt(),
        })
    }

    /// Standard deviation σ.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Right-tail probability P[X ≥ x] for x ≥ 0, in closed form.
    ///
    /// Segment and cell probabilities are differences of this function, so
    /// sums over adjacent cells telescope exactly.
    pub(crate) fn upper_tail(&self, x: f64) -> f64 {
        0.5 * (-SQRT_2 * x / self.sigma).exp()
    }
}

impl Source for Laplacian {
    fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    fn density(&self, x: f64) -> f64 {
        (-x.abs() * SQRT_2 / self.sigma).exp() / (SQRT_2 * self.sigma)
    }

    fn interval_probability(&self, a: f64, b: f64) -> Result<f64, Error> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::InvalidInterval { a, b });
        }
        // Decompose by symmetry so each branch subtracts tail values of the
        // same sign and small probabilities keep full relative accuracy.
        let p = if a >= 0.0 {
            self.upper_tail(a) - self.upper_tail(b)
        } else if b <= 0.0 {
            self.upper_tail(-b) - self.upper_tail(-a)
        } else {
            1.0 - self.upper_tail(-a) - self.upper_tail(b)
        };
        Ok(p.max(0.0))
    }

    fn tail_centroid(&self, t: f64) -> Result<f64, Error> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTail(t));
        }
        // Memoryless tail: E[X | X >= t] = t + sigma/sqrt(2).
        Ok(t + self.sigma / SQRT_2)
    }

    fn cube_root_density_integral(&self, a: f64, b: f64) -> Result<f64, Error> {
        if a < 0.0 || a.is_nan() {
            return Err(Error::NegativeBound(a));
        }
        if a > b || b.is_nan() {
            return Err(Error::InvalidInterval { a, b });
        }
        let k = SQRT_2 / (3.0 * self.sigma);
        Ok(self.cube_root_prefactor() * ((-k * a).exp() - (-k * b).exp()))
    }

    fn inverse_cube_root_integral(&self, area: f64) -> Result<f64, Error> {
        if !(area >= 0.0) || !area.is_finite() {
            return Err(Error::UnreachableArea(area));
        }
        let ratio = area / self.cube_root_prefactor();
        if ratio >= 1.0 {
            return Err(Error::UnreachableArea(area));
        }
        Ok(-(3.0 * self.sigma / SQRT_2) * (1.0 - ratio).ln())
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let b = self.sigma / SQRT_2;
        if u < 0.5 {
            b * (2.0 * u).ln()
        } else {
            -b * (2.0 * (1.0 - u)).ln()
        }
    }
}

impl Laplacian {
    /// ∫_0^∞ p^{1/3}(x) dx = (√2·σ)^{−1/3} · 3σ/√2.
    fn cube_root_prefactor(&self) -> f64 {
        (SQRT_2 * self.sigma).powf(-1.0 / 3.0) * 3.0 * self.sigma / SQRT_2
    }
}

/// Draw `n` pseudorandom samples by the inverse-CDF transform.
///
/// The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
/// `seed_from_u64(seed)` on stream 0, so the sequence is reproducible
/// across platforms and releases.
pub fn sample<S: Source + ?Sized>(source: &S, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| source.inverse_cdf(rng.sample(Open01)))
        .collect()
}
