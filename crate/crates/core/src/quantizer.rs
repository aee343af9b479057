//! Companding quantizer geometry: segments, cells, encode and decode.
//!
//! A design splits each quadrant of the support region [−x_max, x_max]
//! into L segments at compressor-derived thresholds, fills each segment
//! with uniform cells, and reproduces granular cells at their midpoints.
//! Inputs beyond the support map to the overload level ±y_N.

use crate::compressor::OptimalCompressor;
use crate::error::Error;
use crate::source::{Laplacian, Source};
use crate::spline::FirstDegreeSpline;

use std::f64::consts::SQRT_2;

/// Granular cell counts per quadrant segment.
///
/// Segments 1…L−1 hold N/(2L) cells each and the last segment one fewer,
/// so each quadrant has (N−2)/2 granular cells and the two overload cells
/// bring the total number of reproduction levels to N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAllocation {
    per_segment: Vec<usize>,
}

impl LevelAllocation {
    pub fn per_segment(&self) -> &[usize] {
        &self.per_segment
    }

    /// Granular cells in one quadrant, (N−2)/2.
    pub fn total(&self) -> usize {
        self.per_segment.iter().sum()
    }
}

/// Support threshold that matches the quantizer's resolution:
/// x_max = σ·(3/√2)·ln((N+1)/3).
pub fn default_support_threshold(n_levels: usize, source: &Laplacian) -> f64 {
    source.sigma() * 3.0 / SQRT_2 * ((n_levels as f64 + 1.0) / 3.0).ln()
}

/// Distribute the granular cells of one quadrant over L segments.
pub fn allocate_levels(n_levels: usize, segments: usize) -> Result<LevelAllocation, Error> {
    if n_levels < 4 || !n_levels.is_multiple_of(2) {
        return Err(Error::InvalidLevelCount(n_levels));
    }
    if segments == 0 || !n_levels.is_multiple_of(2 * segments) {
        return Err(Error::NotDivisible { n_levels, segments });
    }
    let inner = n_levels / (2 * segments);
    let last = (n_levels - 2) / 2 - (segments - 1) * inner;
    if last < 1 {
        return Err(Error::EmptyLastSegment { n_levels, segments });
    }
    let mut per_segment = vec![inner; segments - 1];
    per_segment.push(last);
    Ok(LevelAllocation { per_segment })
}

/// Segment thresholds x_0 = 0 < x_1 < … < x_L = x_max.
///
/// Interior thresholds are compressor preimages of the uniform-quantizer
/// segment boundaries, x_i = c⁻¹(i·(N/2L)·Δ) with Δ = 2·x_max/(N−2).
/// `c` must have been built with this same `x_max`.
pub fn segment_thresholds<S: Source>(
    n_levels: usize,
    segments: usize,
    x_max: f64,
    c: &OptimalCompressor<S>,
) -> Result<Vec<f64>, Error> {
    let allocation = allocate_levels(n_levels, segments)?;
    if c.x_max() != x_max {
        return Err(Error::InvalidSupport(x_max));
    }
    let step = 2.0 * x_max / (n_levels as f64 - 2.0);
    let inner = allocation.per_segment()[0] as f64;
    let mut thresholds = Vec::with_capacity(segments + 1);
    thresholds.push(0.0);
    for i in 1..segments {
        thresholds.push(c.decompress(i as f64 * inner * step)?);
    }
    thresholds.push(x_max);
    Ok(thresholds)
}

/// Complete quantizer geometry, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerDesign {
    n_levels: usize,
    segments_per_quadrant: usize,
    x_max: f64,
    x_max_design: f64,
    step: f64,
    segment_thresholds: Vec<f64>,
    allocation: LevelAllocation,
    cell_widths: Vec<f64>,
    spline: FirstDegreeSpline,
    overload_level: f64,
    /// Cumulative cell counts, offsets[i] = cells in segments before i.
    offsets: Vec<usize>,
}

/// Build the design for (N, L) with support threshold `x_max`.
///
/// The spline knots and the uniform step Δ always come from the
/// `x_max_design` compressor. With `x_max == x_max_design` this is the
/// plain design; with a different `x_max` (e.g. the optimized support
/// threshold) the interior knots and Δ stay frozen and only the last
/// knot moves, so the last segment keeps N/(2L)−1 cells that stretch or
/// shrink to cover [x_{L−1}, x_max].
pub fn build_design<S: Source + Clone>(
    n_levels: usize,
    segments: usize,
    x_max: f64,
    x_max_design: f64,
    source: &S,
) -> Result<QuantizerDesign, Error> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidSupport(x_max));
    }
    let allocation = allocate_levels(n_levels, segments)?;
    let compressor = OptimalCompressor::new(source.clone(), x_max_design)?;
    let mut thresholds = segment_thresholds(n_levels, segments, x_max_design, &compressor)?;
    let frozen = thresholds[segments - 1];
    if x_max <= frozen {
        return Err(Error::SupportTooSmall {
            x_max,
            x_frozen: frozen,
        });
    }
    thresholds[segments] = x_max;

    let step = 2.0 * x_max_design / (n_levels as f64 - 2.0);
    let inner = allocation.per_segment()[0] as f64;
    // Spline values are the uniform-quantizer segment boundaries; the last
    // one is pinned to x_max_design so c(x_max) = x_max survives rounding.
    let mut values: Vec<f64> = (0..segments).map(|i| i as f64 * inner * step).collect();
    values.push(x_max_design);
    let spline = FirstDegreeSpline::build(thresholds.clone(), values)?;

    let counts = allocation.per_segment();
    let cell_widths: Vec<f64> = (0..segments)
        .map(|i| (thresholds[i + 1] - thresholds[i]) / counts[i] as f64)
        .collect();

    let mut offsets = Vec::with_capacity(segments + 1);
    offsets.push(0);
    for &c in counts {
        offsets.push(offsets.last().unwrap() + c);
    }

    let overload_level = source.tail_centroid(x_max)?;

    Ok(QuantizerDesign {
        n_levels,
        segments_per_quadrant: segments,
        x_max,
        x_max_design,
        step,
        segment_thresholds: thresholds,
        allocation,
        cell_widths,
        spline,
        overload_level,
        offsets,
    })
}

impl QuantizerDesign {
    /// Reassemble a design from stored fields, revalidating invariants.
    /// Used by the JSON loader.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n_levels: usize,
        segments_per_quadrant: usize,
        x_max: f64,
        x_max_design: f64,
        step: f64,
        segment_thresholds: Vec<f64>,
        allocation: Vec<usize>,
        cell_widths: Vec<f64>,
        spline: FirstDegreeSpline,
        overload_level: f64,
    ) -> Result<Self, Error> {
        let expect = allocate_levels(n_levels, segments_per_quadrant)?;
        if expect.per_segment() != allocation {
            return Err(Error::DesignFile(format!(
                "allocation {allocation:?} does not match N = {n_levels}, L = {segments_per_quadrant}"
            )));
        }
        let l = segments_per_quadrant;
        if segment_thresholds.len() != l + 1 || cell_widths.len() != l {
            return Err(Error::DesignFile(
                "threshold/width lengths do not match the segment count".into(),
            ));
        }
        if segment_thresholds[0] != 0.0
            || segment_thresholds.windows(2).any(|w| !(w[1] > w[0]))
            || segment_thresholds[l] != x_max
        {
            return Err(Error::DesignFile(
                "segment thresholds must increase from 0 to x_max".into(),
            ));
        }
        if spline.knots() != segment_thresholds.as_slice() {
            return Err(Error::DesignFile(
                "spline knots must equal the segment thresholds".into(),
            ));
        }
        for i in 0..l {
            let span = segment_thresholds[i + 1] - segment_thresholds[i];
            let rebuilt = span / expect.per_segment()[i] as f64;
            if !((cell_widths[i] - rebuilt).abs() <= 1e-9 * span.max(1.0)) {
                return Err(Error::DesignFile(format!(
                    "cell width {} is inconsistent with segment {i}",
                    cell_widths[i]
                )));
            }
        }
        let mut offsets = Vec::with_capacity(l + 1);
        offsets.push(0);
        for &c in expect.per_segment() {
            offsets.push(offsets.last().unwrap() + c);
        }
        Ok(QuantizerDesign {
            n_levels,
            segments_per_quadrant,
            x_max,
            x_max_design,
            step,
            segment_thresholds,
            allocation: expect,
            cell_widths,
            spline,
            overload_level,
            offsets,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    /// Segments per quadrant, L.
    pub fn segments_per_quadrant(&self) -> usize {
        self.segments_per_quadrant
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// The support threshold the spline and Δ were derived from.
    pub fn x_max_design(&self) -> f64 {
        self.x_max_design
    }

    /// Uniform quantizer step Δ = 2·x_max_design/(N−2).
    pub fn step(&self) -> f64 {
        self.step
    }

    /// x_0 = 0 through x_L = x_max.
    pub fn segment_thresholds(&self) -> &[f64] {
        &self.segment_thresholds
    }

    pub fn allocation(&self) -> &LevelAllocation {
        &self.allocation
    }

    /// Uniform cell width of each segment, Δ/m_i.
    pub fn cell_widths(&self) -> &[f64] {
        &self.cell_widths
    }

    /// The compressor approximation g restricted to [0, x_max].
    pub fn spline(&self) -> &FirstDegreeSpline {
        &self.spline
    }

    /// Overload reproduction magnitude y_N (tail centroid of x_max).
    pub fn overload_level(&self) -> f64 {
        self.overload_level
    }

    /// Edges [lo, hi] of cell `cell` in segment `segment` (positive side).
    ///
    /// The last cell's upper edge is the next segment threshold itself,
    /// so edges shared between cells and segments are bit-identical and
    /// probability sums telescope.
    pub fn cell_bounds(&self, segment: usize, cell: usize) -> Result<(f64, f64), Error> {
        let counts = self.allocation.per_segment();
        if segment >= counts.len() || cell >= counts[segment] {
            return Err(Error::InvalidCell { segment, cell });
        }
        let lo = self.segment_thresholds[segment] + cell as f64 * self.cell_widths[segment];
        let hi = if cell + 1 == counts[segment] {
            self.segment_thresholds[segment + 1]
        } else {
            self.segment_thresholds[segment] + (cell + 1) as f64 * self.cell_widths[segment]
        };
        Ok((lo, hi))
    }

    /// Quantize an amplitude to its code index in [0, N−1].
    ///
    /// Codes 0 and N−1 are the negative and positive overload cells;
    /// within each sign, granular codes order by magnitude, so index
    /// N/2 is the first positive cell. Cells are half-open [lo, hi).
    pub fn encode(&self, x: f64) -> Result<usize, Error> {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        let half = self.n_levels / 2;
        let a = x.abs();
        let rank = if a >= self.x_max {
            None
        } else {
            let seg = self.segment_thresholds.partition_point(|&t| t <= a) - 1;
            let seg = seg.min(self.segments_per_quadrant - 1);
            let count = self.allocation.per_segment()[seg];
            let j = ((a - self.segment_thresholds[seg]) / self.cell_widths[seg]) as usize;
            Some(self.offsets[seg] + j.min(count - 1))
        };
        Ok(match (rank, x >= 0.0) {
            (None, true) => self.n_levels - 1,
            (None, false) => 0,
            (Some(r), true) => half + r,
            (Some(r), false) => half - 1 - r,
        })
    }

    /// Reproduction level of a code index: cell midpoint, or ±y_N for the
    /// overload codes.
    pub fn decode(&self, index: usize) -> Result<f64, Error> {
        if index >= self.n_levels {
            return Err(Error::IndexOutOfRange {
                index,
                n_levels: self.n_levels,
            });
        }
        let half = self.n_levels / 2;
        if index == 0 {
            return Ok(-self.overload_level);
        }
        if index == self.n_levels - 1 {
            return Ok(self.overload_level);
        }
        let (rank, negative) = if index >= half {
            (index - half, false)
        } else {
            (half - 1 - index, true)
        };
        let seg = self.offsets.partition_point(|&o| o <= rank) - 1;
        let j = rank - self.offsets[seg];
        let mid =
            self.segment_thresholds[seg] + (j as f64 + 0.5) * self.cell_widths[seg];
        Ok(if negative { -mid } else { mid })
    }
}
