//! Companding scalar quantizer design for a Laplacian source.
//!
//! The pipeline builds an N-level quantizer whose compressor is a
//! first-degree spline approximation of the SQNR-optimal characteristic:
//!
//! 1. [`quantizer::default_support_threshold`] picks the support region
//!    [−x_max, x_max] matched to N.
//! 2. [`compressor::OptimalCompressor`] maps segment boundaries of a
//!    uniform quantizer back to amplitude space, giving the spline knots
//!    ([`quantizer::segment_thresholds`]).
//! 3. [`quantizer::build_design`] assembles segments, uniform cells per
//!    segment, midpoint reproduction levels, and the tail-centroid
//!    overload level.
//! 4. [`distortion::evaluate`] reports granular/overload distortion and
//!    SQNR in closed form; [`distortion::monte_carlo_mse`] cross-checks
//!    through the real encode/decode path.
//! 5. [`optimizer::optimize_support`] shrinks the support threshold to
//!    the point where last-segment granular distortion and overload
//!    distortion balance, and [`optimizer::sweep`] exports the whole
//!    trade-off curve.
//!
//! # Determinism
//!
//! All randomness flows from `ChaCha8Rng::seed_from_u64(seed)` with one
//! stream per Monte Carlo worker, and parallel reductions fold worker
//! results in index order. For a fixed (seed, n, workers) triple every
//! result is bit-identical, with or without the `parallel` feature, on
//! any thread count.
//!
//! # Features
//!
//! * `parallel` (default): Monte Carlo estimation and sweep grids run on
//!   a rayon pool. Disabling the feature swaps in sequential loops with
//!   identical results; `*_seq` variants of both entry points are always
//!   available as references.

// Validation guards are written as negated comparisons so NaN inputs fail
// the guard and are rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compressor;
pub mod design_file;
pub mod distortion;
pub mod error;
mod exec;
pub mod optimizer;
pub mod quantizer;
pub mod source;
pub mod spline;

pub use compressor::{optimal_compandor_report, OptimalCompressor};
pub use design_file::{DesignFile, SplineRecord, SCHEMA_VERSION};
pub use distortion::{
    cell_probability, evaluate, granular_distortion, granular_distortion_exact,
    granular_distortion_per_cell, monte_carlo_mse, monte_carlo_mse_seq, overload_distortion,
    DistortionReport, MonteCarloEstimate,
};
pub use error::Error;
pub use optimizer::{last_segment_distortion, optimize_support, sweep, sweep_seq, SweepCurve};
pub use quantizer::{
    allocate_levels, build_design, default_support_threshold, segment_thresholds,
    LevelAllocation, QuantizerDesign,
};
pub use source::{sample, Laplacian, Source};
pub use spline::FirstDegreeSpline;
