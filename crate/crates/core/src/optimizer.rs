//! Support-region threshold optimization.
//!
//! Moving x_max only reshapes the last segment (interior geometry is
//! frozen), so the total distortion is minimized by minimizing the last
//! segment's granular share plus the overload term:
//!
//! ```text
//! D_L(x) = 2·((x − x_{L−1})/n_L)²/12 · P[x_{L−1} ≤ X ≤ x] + (σ²/2)·e^{−√2·x/σ}
//! ```
//!
//! A 0.01-step coarse scan brackets the dip, golden-section search
//! refines it; both are deterministic and evaluation-order independent.

use crate::compressor::OptimalCompressor;
use crate::error::Error;
use crate::exec;
use crate::quantizer::{allocate_levels, default_support_threshold, segment_thresholds};
use crate::source::Laplacian;

use std::f64::consts::SQRT_2;
use std::io;

const COARSE_STEP: f64 = 0.01;
const REFINE_TOL: f64 = 1e-6;

/// D_L grid evaluation, ready for CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    candidates: Vec<f64>,
    d_last: Vec<f64>,
    argmin: usize,
}

impl SweepCurve {
    /// Scanned x_max values, strictly increasing.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    /// D_L at each candidate.
    pub fn d_last(&self) -> &[f64] {
        &self.d_last
    }

    pub fn argmin_index(&self) -> usize {
        self.argmin
    }

    /// (x_max, D_L) of the grid minimum.
    pub fn argmin(&self) -> (f64, f64) {
        (self.candidates[self.argmin], self.d_last[self.argmin])
    }

    /// Write `x_max,d_last` rows. Floats use the shortest round-trip
    /// decimal form, so output is byte-stable across runs.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x_max,d_last")?;
        for (x, d) in self.candidates.iter().zip(&self.d_last) {
            writeln!(w, "{x},{d}")?;
        }
        Ok(())
    }
}

/// No-validation core of the last-segment objective; callers guarantee x > x_frozen.
fn d_last_raw(x: f64, x_frozen: f64, n_last_cells: usize, source: &Laplacian) -> f64 {
    let w = (x - x_frozen) / n_last_cells as f64;
    let p = source.upper_tail(x_frozen) - source.upper_tail(x);
    let sigma = source.sigma();
    2.0 * (w * w / 12.0) * p + 0.5 * sigma * sigma * (-SQRT_2 * x / sigma).exp()
}

/// Total distortion of the last segment when its outer edge sits at
/// `x_cand`: granular Δ²/12 share over [x_frozen, x_cand] plus overload.
pub fn last_segment_distortion(
    x_cand: f64,
    x_frozen: f64,
    n_last_cells: usize,
    source: &Laplacian,
) -> Result<f64, Error> {
    if n_last_cells == 0 {
        return Err(Error::InvalidCellCount(n_last_cells));
    }
    if !(x_frozen >= 0.0) || !x_frozen.is_finite() {
        return Err(Error::NegativeBound(x_frozen));
    }
    if !(x_cand > x_frozen) || !x_cand.is_finite() {
        return Err(Error::SupportTooSmall {
            x_max: x_cand,
            x_frozen,
        });
    }
    Ok(d_last_raw(x_cand, x_frozen, n_last_cells, source))
}

/// Frozen last-segment geometry of the default design: (x_{L−1}, n_L,
/// default x_max).
fn frozen_geometry(
    n_levels: usize,
    segments: usize,
    source: &Laplacian,
) -> Result<(f64, usize, f64), Error> {
    let allocation = allocate_levels(n_levels, segments)?;
    let x_default = default_support_threshold(n_levels, source);
    let c = OptimalCompressor::new(*source, x_default)?;
    let thr = segment_thresholds(n_levels, segments, x_default, &c)?;
    Ok((
        thr[segments - 1],
        *allocation.per_segment().last().unwrap(),
        x_default,
    ))
}

/// Index of the smallest value; first one on ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Golden-section minimization of a unimodal function on [a, b] down to
/// an interval of width `tol`; returns the midpoint and its value.
fn golden_section_minimize<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Minimize D_L over the support threshold for the (N, L) design.
///
/// Scans from just above the frozen threshold to twice the default
/// support threshold in 0.01 steps, refines the bracket around the best
/// candidate down to 1e-6, and never returns anything worse than the
/// best coarse candidate. Fully deterministic.
pub fn optimize_support(
    n_levels: usize,
    segments: usize,
    source: &Laplacian,
) -> Result<(f64, f64), Error> {
    let (x_frozen, n_last, x_default) = frozen_geometry(n_levels, segments, source)?;
    let lo = x_frozen + 10.0 * f64::EPSILON * x_frozen.max(1.0);
    let hi = 2.0 * x_default;
    let count = ((hi - lo) / COARSE_STEP).floor() as usize + 1;
    let coarse = exec::map_collect(count, |k| {
        d_last_raw(lo + k as f64 * COARSE_STEP, x_frozen, n_last, source)
    });
    let best = argmin(&coarse);
    let a = lo + best.saturating_sub(1) as f64 * COARSE_STEP;
    let b = lo + (best + 1).min(count - 1) as f64 * COARSE_STEP;
    let (x_fine, d_fine) =
        golden_section_minimize(|x| d_last_raw(x, x_frozen, n_last, source), a, b, REFINE_TOL);
    if d_fine <= coarse[best] {
        Ok((x_fine, d_fine))
    } else {
        Ok((lo + best as f64 * COARSE_STEP, coarse[best]))
    }
}

struct SweepPlan {
    lo: f64,
    step: f64,
    count: usize,
    x_frozen: f64,
    n_last: usize,
    source: Laplacian,
}

impl SweepPlan {
    fn new(
        n_levels: usize,
        segments: usize,
        lo: f64,
        hi: f64,
        step: f64,
        source: &Laplacian,
    ) -> Result<Self, Error> {
        let (x_frozen, n_last, _) = frozen_geometry(n_levels, segments, source)?;
        if !(step > 0.0) || !step.is_finite() || !(hi > lo) || !lo.is_finite() {
            return Err(Error::InvalidGrid { lo, hi, step });
        }
        if !(lo > x_frozen) {
            return Err(Error::SupportTooSmall {
                x_max: lo,
                x_frozen,
            });
        }
        let count = ((hi - lo) / step).floor() as usize + 1;
        Ok(SweepPlan {
            lo,
            step,
            count,
            x_frozen,
            n_last,
            source: *source,
        })
    }

    fn eval(&self, k: usize) -> (f64, f64) {
        let x = self.lo + k as f64 * self.step;
        (x, d_last_raw(x, self.x_frozen, self.n_last, &self.source))
    }

    fn finish(self, points: Vec<(f64, f64)>) -> SweepCurve {
        let (candidates, d_last): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let argmin = argmin(&d_last);
        SweepCurve {
            candidates,
            d_last,
            argmin,
        }
    }
}

/// Evaluate D_L on the grid lo, lo + step, …, up to hi.
pub fn sweep(
    n_levels: usize,
    segments: usize,
    lo: f64,
    hi: f64,
    step: f64,
    source: &Laplacian,
) -> Result<SweepCurve, Error> {
    let plan = SweepPlan::new(n_levels, segments, lo, hi, step, source)?;
    let points = exec::map_collect(plan.count, |k| plan.eval(k));
    Ok(plan.finish(points))
}

/// Sequential reference for [`sweep`]; identical output.
pub fn sweep_seq(
    n_levels: usize,
    segments: usize,
    lo: f64,
    hi: f64,
    step: f64,
    source: &Laplacian,
) -> Result<SweepCurve, Error> {
    let plan = SweepPlan::new(n_levels, segments, lo, hi, step, source)?;
    let points = exec::map_collect_seq(plan.count, |k| plan.eval(k));
    Ok(plan.finish(points))
}
