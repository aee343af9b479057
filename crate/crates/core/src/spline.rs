//! Continuous piecewise-linear (first-degree spline) interpolants.
//!
//! The compressor approximation g(x) is such a spline over the segment
//! thresholds. Only the positive half-axis is stored; callers apply odd
//! symmetry g(−x) = −g(x) where they need the full characteristic.

use crate::compressor::OptimalCompressor;
use crate::error::Error;
use crate::source::Source;

/// Piecewise-linear interpolant through (knot_i, value_i).
///
/// Piece i spans [knot_{i−1}, knot_i) with slope
/// m_i = (value_i − value_{i−1})/(knot_i − knot_{i−1}); a point exactly on
/// a knot belongs to the right piece, which makes evaluation at knots
/// reproduce the stored values bit-exactly. Outside the knot range the
/// first and last pieces extend linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstDegreeSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl FirstDegreeSpline {
    /// Interpolate the given values over strictly increasing knots.
    pub fn build(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, Error> {
        if knots.len() < 2 {
            return Err(Error::TooFewKnots(knots.len()));
        }
        if knots.len() != values.len() {
            return Err(Error::LengthMismatch {
                knots: knots.len(),
                values: values.len(),
            });
        }
        for i in 1..knots.len() {
            if !(knots[i] > knots[i - 1]) {
                return Err(Error::KnotsNotIncreasing(i));
            }
        }
        let slopes = (1..knots.len())
            .map(|i| (values[i] - values[i - 1]) / (knots[i] - knots[i - 1]))
            .collect();
        Ok(FirstDegreeSpline {
            knots,
            values,
            slopes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-piece slopes m_1…m_L; entry i − 1 belongs to [knot_{i−1}, knot_i].
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Anchor knot index and slope index of the piece owning `x`.
    fn piece(&self, x: f64) -> (usize, usize) {
        let idx = self.knots.partition_point(|&k| k <= x);
        if idx == 0 {
            (0, 0)
        } else if idx == self.knots.len() {
            (self.knots.len() - 1, self.slopes.len() - 1)
        } else {
            (idx - 1, idx - 1)
        }
    }

    /// Evaluate the spline, extending the end pieces outside the knots.
    pub fn eval(&self, x: f64) -> f64 {
        let (anchor, slope) = self.piece(x);
        self.values[anchor] + self.slopes[slope] * (x - self.knots[anchor])
    }

    /// Solve eval(x) = y on a strictly increasing spline.
    pub fn invert(&self, y: f64) -> Result<f64, Error> {
        if self.slopes.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::NotMonotone);
        }
        let (lo, hi) = (self.values[0], *self.values.last().unwrap());
        if !(y >= lo && y <= hi) {
            return Err(Error::OutsideRange { y, lo, hi });
        }
        let idx = self.values.partition_point(|&v| v <= y);
        let (anchor, slope) = if idx == 0 {
            (0, 0)
        } else if idx == self.values.len() {
            (self.values.len() - 1, self.slopes.len() - 1)
        } else {
            (idx - 1, idx - 1)
        };
        Ok(self.knots[anchor] + (y - self.values[anchor]) / self.slopes[slope])
    }

    /// Max deviation from the exact compressor over a uniform grid on
    /// [0, x_max].
    pub fn max_abs_error<S: Source>(
        &self,
        c: &OptimalCompressor<S>,
        grid: usize,
    ) -> Result<f64, Error> {
        if grid < 2 {
            return Err(Error::GridTooSmall(grid));
        }
        let mut worst = 0.0f64;
        for k in 0..grid {
            let x = c.x_max() * k as f64 / (grid - 1) as f64;
            worst = worst.max((self.eval(x) - c.compress(x)?).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::source::Laplacian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const X_MAX: f64 = 7.9787103216196352;
    const KNOTS: [f64; 5] = [
        0.0,
        0.60479145465105021,
        1.4540062817299036,
        2.892006297706953,
        7.9787103216196352,
    ];
    const VALUES: [f64; 5] = [
        0.0,
        2.0263391293002248,
        4.0526782586004496,
        6.0790173879006745,
        7.9787103216196352,
    ];
    const SLOPES: [f64; 4] = [
        3.3504757941220791,
        2.3861325364165718,
        1.4091370700878806,
        0.37346244735067579,
    ];

    fn compressor_spline() -> FirstDegreeSpline {
        FirstDegreeSpline::build(KNOTS.to_vec(), VALUES.to_vec()).unwrap()
    }

    #[test]
    fn two_point_identity_line() {
        let s = FirstDegreeSpline::build(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(s.slopes(), &[1.0]);
        assert_eq!(s.eval(0.25), 0.25);
        assert_eq!(s.invert(0.7).unwrap(), 0.7);
    }

    #[test]
    fn difference_quotient_slopes() {
        let s = FirstDegreeSpline::build(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.slopes(), &[1.0, 0.0]);
    }

    #[test]
    fn compressor_knot_slopes() {
        let s = compressor_spline();
        for (m, want) in s.slopes().iter().zip(SLOPES) {
            assert!(((m - want) / want).abs() < 1e-12);
        }
        // Concavity of c: slopes strictly decreasing, all positive.
        for w in s.slopes().windows(2) {
            assert!(w[0] > w[1] && w[1] > 0.0);
        }
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(FirstDegreeSpline::build(vec![0.0], vec![0.0]).is_err());
        assert!(FirstDegreeSpline::build(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(FirstDegreeSpline::build(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(FirstDegreeSpline::build(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn eval_reproduces_knot_values_exactly() {
        let s = compressor_spline();
        for (k, v) in KNOTS.iter().zip(VALUES) {
            assert_eq!(s.eval(*k), v);
        }
    }

    #[test]
    fn eval_midpoints_average_endpoints() {
        let s = compressor_spline();
        for i in 1..KNOTS.len() {
            let mid = 0.5 * (KNOTS[i - 1] + KNOTS[i]);
            let mean = 0.5 * (VALUES[i - 1] + VALUES[i]);
            assert!((s.eval(mid) - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_extends_end_pieces() {
        let s = compressor_spline();
        let above = s.eval(X_MAX + 1.0);
        assert!((above - (VALUES[4] + SLOPES[3])).abs() < 1e-12);
        let below = s.eval(-1.0);
        assert!((below - (0.0 - SLOPES[0])).abs() < 1e-12);
    }

    #[test]
    fn continuity_at_interior_knots() {
        let s = compressor_spline();
        for i in 1..KNOTS.len() - 1 {
            let left = VALUES[i - 1] + s.slopes()[i - 1] * (KNOTS[i] - KNOTS[i - 1]);
            assert!(((left - VALUES[i]) / VALUES[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn invert_is_exact_at_knots_and_tight_elsewhere() {
        let s = compressor_spline();
        for (k, v) in KNOTS.iter().zip(VALUES) {
            assert_eq!(s.invert(v).unwrap(), *k);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = rng.random_range(0.0..X_MAX);
            let back = s.invert(s.eval(x)).unwrap();
            assert!((back - x).abs() < 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn invert_rejects_flat_and_out_of_range() {
        let flat = FirstDegreeSpline::build(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(flat.invert(0.5), Err(Error::NotMonotone)));
        let s = compressor_spline();
        assert!(s.invert(-0.1).is_err());
        assert!(s.invert(X_MAX + 0.1).is_err());
    }

    #[test]
    fn refinement_shrinks_approximation_error() {
        let c = OptimalCompressor::new(Laplacian::unit_variance(), X_MAX).unwrap();
        let coarse = compressor_spline();
        let coarse_err = coarse.max_abs_error(&c, 1000).unwrap();
        assert!(coarse_err > 0.0);

        let dense: Vec<f64> = (0..=1000).map(|k| X_MAX * k as f64 / 1000.0).collect();
        let dense_vals: Vec<f64> = dense.iter().map(|&x| c.compress(x).unwrap()).collect();
        let fine = FirstDegreeSpline::build(dense, dense_vals).unwrap();
        assert!(fine.max_abs_error(&c, 997).unwrap() < coarse_err);

        assert!(coarse.max_abs_error(&c, 1).is_err());
    }
}
