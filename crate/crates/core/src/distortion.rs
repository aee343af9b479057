//! Distortion evaluation: closed forms, exact moments, and Monte Carlo.
//!
//! The granular model is the high-rate Δ²/12 rule summed per segment;
//! [`granular_distortion_exact`] integrates the per-cell second moments
//! instead and quantifies the model bias. [`monte_carlo_mse`] is a fully
//! independent estimate through the actual encode/decode path.

use crate::error::Error;
use crate::exec;
use crate::quantizer::QuantizerDesign;
use crate::source::{Laplacian, Source};

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use std::f64::consts::SQRT_2;

/// Distortion decomposition of one design against one source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    /// Granular (inside-support) distortion D_g.
    pub granular: f64,
    /// Overload (tail) distortion D_o.
    pub overload: f64,
    /// D = D_g + D_o.
    pub total: f64,
    /// 10·log10(σ²/D).
    pub sqnr_db: f64,
}

impl DistortionReport {
    /// Assemble a report; `total` and `sqnr_db` are derived here so the
    /// struct invariants hold by construction.
    pub fn from_parts(granular: f64, overload: f64, variance: f64) -> Self {
        let total = granular + overload;
        DistortionReport {
            granular,
            overload,
            total,
            sqnr_db: 10.0 * (variance / total).log10(),
        }
    }
}

/// P[X in cell (segment, cell)] on the positive half-axis.
pub fn cell_probability(
    d: &QuantizerDesign,
    segment: usize,
    cell: usize,
    source: &Laplacian,
) -> Result<f64, Error> {
    let (lo, hi) = d.cell_bounds(segment, cell)?;
    source.interval_probability(lo, hi)
}

/// Granular distortion 2·Σ_i (w_i²/12)·P_i, with cells uniform per
/// segment so the inner cell sum collapses to the segment probability.
pub fn granular_distortion(d: &QuantizerDesign, source: &Laplacian) -> Result<f64, Error> {
    let thr = d.segment_thresholds();
    let mut acc = 0.0;
    for (i, &w) in d.cell_widths().iter().enumerate() {
        let p = source.interval_probability(thr[i], thr[i + 1])?;
        acc += w * w / 12.0 * p;
    }
    Ok(2.0 * acc)
}

/// Granular distortion summed cell by cell, 2·Σ_{i,j} (w_i²/12)·P_{i,j}.
///
/// Algebraically identical to [`granular_distortion`]; kept as a separate
/// path so the reduction can be cross-checked.
pub fn granular_distortion_per_cell(
    d: &QuantizerDesign,
    source: &Laplacian,
) -> Result<f64, Error> {
    let mut acc = 0.0;
    for (i, &w) in d.cell_widths().iter().enumerate() {
        for j in 0..d.allocation().per_segment()[i] {
            acc += w * w / 12.0 * cell_probability(d, i, j, source)?;
        }
    }
    Ok(2.0 * acc)
}

/// Granular distortion from exact per-cell second moments about the
/// reproduction levels, with no high-rate approximation.
///
/// The difference to [`granular_distortion`] is the model bias of the
/// Δ²/12 rule for this design.
pub fn granular_distortion_exact(
    d: &QuantizerDesign,
    source: &Laplacian,
) -> Result<f64, Error> {
    let lambda = SQRT_2 / source.sigma();
    // Antiderivative: d/dt [-g(t, r)/2] = (λ/2)·e^{−λt}·(t − r)².
    let g = |t: f64, r: f64| {
        let u = t - r;
        (-lambda * t).exp() * (u * u + 2.0 * u / lambda + 2.0 / (lambda * lambda))
    };
    let thr = d.segment_thresholds();
    let mut acc = 0.0;
    for (i, &w) in d.cell_widths().iter().enumerate() {
        for j in 0..d.allocation().per_segment()[i] {
            let (lo, hi) = d.cell_bounds(i, j)?;
            let level = thr[i] + (j as f64 + 0.5) * w;
            acc += 0.5 * (g(lo, level) - g(hi, level));
        }
    }
    Ok(2.0 * acc)
}

/// Overload distortion (σ²/2)·e^{−√2·x_max/σ}, the closed form that
/// results when the overload level is the tail centroid (the build
/// guarantees it is).
pub fn overload_distortion(d: &QuantizerDesign, source: &Laplacian) -> f64 {
    let sigma = source.sigma();
    0.5 * sigma * sigma * (-SQRT_2 * d.x_max() / sigma).exp()
}

/// Full analytic report: D_g, D_o, D and SQNR.
pub fn evaluate(d: &QuantizerDesign, source: &Laplacian) -> Result<DistortionReport, Error> {
    Ok(DistortionReport::from_parts(
        granular_distortion(d, source)?,
        overload_distortion(d, source),
        source.variance(),
    ))
}

/// Monte Carlo mean squared error together with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mse: f64,
    pub std_error: f64,
    /// Number of samples drawn.
    pub n: usize,
    /// Worker count the run was keyed to; part of the reproducibility
    /// contract, since each worker draws from its own ChaCha8 stream.
    pub workers: usize,
}

fn worker_share(n: usize, workers: usize, w: usize) -> usize {
    n / workers + usize::from(w < n % workers)
}

/// Sum of squared errors and of their squares for one worker's stream.
fn worker_sums<S: Source>(
    d: &QuantizerDesign,
    source: &S,
    seed: u64,
    worker: u64,
    count: usize,
) -> Result<(f64, f64), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..count {
        let x = source.inverse_cdf(rng.sample(Open01));
        let err = x - d.decode(d.encode(x)?)?;
        let sq = err * err;
        sum += sq;
        sum_sq += sq * sq;
    }
    Ok((sum, sum_sq))
}

fn combine(
    per_worker: Vec<Result<(f64, f64), Error>>,
    n: usize,
    workers: usize,
) -> Result<MonteCarloEstimate, Error> {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for r in per_worker {
        let (s, s2) = r?;
        sum += s;
        sum_sq += s2;
    }
    let nf = n as f64;
    let mse = sum / nf;
    let variance = (sum_sq / nf - mse * mse).max(0.0);
    Ok(MonteCarloEstimate {
        mse,
        std_error: (variance / nf).sqrt(),
        n,
        workers,
    })
}

/// Estimate the quantizer's MSE from `n` seeded samples.
///
/// Worker `w` draws its share from ChaCha8 stream `w` of the master seed
/// (worker 0 therefore reproduces [`crate::source::sample`]); the partial
/// sums are folded in worker order, so the result depends only on
/// `(seed, n, workers)`, never on scheduling or thread count.
pub fn monte_carlo_mse<S: Source + Sync>(
    d: &QuantizerDesign,
    source: &S,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate, Error> {
    if workers == 0 {
        return Err(Error::NoWorkers);
    }
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let per_worker = exec::map_collect(workers, |w| {
        worker_sums(d, source, seed, w as u64, worker_share(n, workers, w))
    });
    combine(per_worker, n, workers)
}

/// Sequential reference for [`monte_carlo_mse`]; bit-identical results.
pub fn monte_carlo_mse_seq<S: Source + Sync>(
    d: &QuantizerDesign,
    source: &S,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate, Error> {
    if workers == 0 {
        return Err(Error::NoWorkers);
    }
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let per_worker = exec::map_collect_seq(workers, |w| {
        worker_sums(d, source, seed, w as u64, worker_share(n, workers, w))
    });
    combine(per_worker, n, workers)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::quantizer::build_design;

    const X_MAX_128: f64 = 7.9787103216196352;
    const X_MAX_64: f64 = 6.5247040398897317;

    fn source() -> Laplacian {
        Laplacian::unit_variance()
    }

    fn design_128_4() -> QuantizerDesign {
        build_design(128, 4, X_MAX_128, X_MAX_128, &source()).unwrap()
    }

    fn design_128_8() -> QuantizerDesign {
        build_design(128, 8, X_MAX_128, X_MAX_128, &source()).unwrap()
    }

    #[test]
    fn report_derives_its_fields() {
        let r = DistortionReport::from_parts(3e-4, 1e-5, 1.0);
        assert_eq!(r.total, 3.1e-4);
        assert!((r.sqnr_db - 10.0 * (1.0f64 / 3.1e-4).log10()).abs() < 1e-15);
    }

    #[test]
    fn granular_closed_forms() {
        let s = source();
        let g4 = granular_distortion(&design_128_4(), &s).unwrap();
        assert!(((g4 - 3.7337200003706961e-4) / g4).abs() < 1e-12);
        let g8 = granular_distortion(&design_128_8(), &s).unwrap();
        assert!(((g8 - 2.9391209921831172e-4) / g8).abs() < 1e-12);
    }

    #[test]
    fn per_cell_sum_matches_the_reduction() {
        let s = source();
        for d in [
            design_128_4(),
            design_128_8(),
            build_design(128, 4, 6.78, X_MAX_128, &s).unwrap(),
        ] {
            let reduced = granular_distortion(&d, &s).unwrap();
            let cells = granular_distortion_per_cell(&d, &s).unwrap();
            assert!(((cells - reduced) / reduced).abs() < 1e-15);
        }
    }

    #[test]
    fn segment_probabilities() {
        let s = source();
        let d = design_128_4();
        let want = [
            0.28742309668517424,
            0.14861211847640716,
            0.055594452666408595,
            0.0083640434175607179,
        ];
        for (i, want) in want.iter().enumerate() {
            let sum: f64 = (0..d.allocation().per_segment()[i])
                .map(|j| cell_probability(&d, i, j, &s).unwrap())
                .sum();
            assert!(((sum - want) / want).abs() < 1e-12, "segment {i}");
        }
        assert!(cell_probability(&d, 0, 16, &s).is_err());
    }

    #[test]
    fn probability_closure() {
        let s = source();
        for d in [
            design_128_4(),
            design_128_8(),
            build_design(64, 4, X_MAX_64, X_MAX_64, &s).unwrap(),
            build_design(128, 4, 6.78, X_MAX_128, &s).unwrap(),
        ] {
            let granular: f64 = (0..d.segments_per_quadrant())
                .flat_map(|i| {
                    (0..d.allocation().per_segment()[i]).map(move |j| (i, j))
                })
                .map(|(i, j)| cell_probability(&d, i, j, &s).unwrap())
                .sum();
            let tail = s.interval_probability(d.x_max(), f64::INFINITY).unwrap();
            assert!((2.0 * granular + 2.0 * tail - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overload_closed_form() {
        let s = source();
        let o = overload_distortion(&design_128_4(), &s);
        assert!(((o - 6.2887544492937729e-6) / o).abs() < 1e-12);
        let opt = build_design(128, 4, 6.78, X_MAX_128, &s).unwrap();
        let o_opt = overload_distortion(&opt, &s);
        assert!(((o_opt - 3.4260580082169929e-5) / o_opt).abs() < 1e-12);
        assert!(o_opt > o);
        let wide = build_design(128, 4, 40.0, X_MAX_128, &s).unwrap();
        assert!(overload_distortion(&wide, &s) < 1e-24);
    }

    #[test]
    fn analytic_reports() {
        let s = source();
        let r4 = evaluate(&design_128_4(), &s).unwrap();
        assert!(((r4.total - 3.7966075448636339e-4) / r4.total).abs() < 1e-12);
        assert!((r4.sqnr_db - 34.206042935394388).abs() < 1e-9);
        let r8 = evaluate(&design_128_8(), &s).unwrap();
        assert!((r8.sqnr_db - 35.225880771073943).abs() < 1e-9);
        let r64 = evaluate(
            &build_design(64, 4, X_MAX_64, X_MAX_64, &s).unwrap(),
            &s,
        )
        .unwrap();
        assert!((r64.sqnr_db - 28.89436620468609).abs() < 1e-9);
    }

    #[test]
    fn exact_moments_bound_the_model_bias() {
        let s = source();
        let d = design_128_4();
        let exact = granular_distortion_exact(&d, &s).unwrap();
        assert!(((exact - 3.7465422558300314e-4) / exact).abs() < 1e-12);
        let model = evaluate(&d, &s).unwrap().total;
        let total_exact = exact + overload_distortion(&d, &s);
        assert!((total_exact - model).abs() / model < 0.01);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = source();
        let d = design_128_4();
        let a = monte_carlo_mse(&d, &s, 20_000, 9, 3).unwrap();
        let b = monte_carlo_mse(&d, &s, 20_000, 9, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.workers, 3);
        assert_eq!(a.n, 20_000);
        let c = monte_carlo_mse(&d, &s, 20_000, 10, 3).unwrap();
        assert_ne!(a.mse, c.mse);
    }

    #[test]
    fn parallel_and_sequential_estimates_are_bit_identical() {
        let s = source();
        let d = design_128_8();
        for workers in [1, 2, 5] {
            let par = monte_carlo_mse(&d, &s, 30_000, 77, workers).unwrap();
            let seq = monte_carlo_mse_seq(&d, &s, 30_000, 77, workers).unwrap();
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_the_analytic_total() {
        let s = source();
        let d = design_128_4();
        let analytic = evaluate(&d, &s).unwrap().total;
        let mc = monte_carlo_mse(&d, &s, 1_000_000, 1, 8).unwrap();
        assert!(
            (mc.mse - analytic).abs() <= 3.0 * mc.std_error,
            "mse {} vs analytic {} (3se = {})",
            mc.mse,
            analytic,
            3.0 * mc.std_error
        );
    }

    #[test]
    fn estimate_matches_a_manual_fold_of_the_sample_stream() {
        let s = source();
        let d = design_128_4();
        let n = 50_000;
        let mc = monte_carlo_mse(&d, &s, n, 21, 1).unwrap();
        // Worker 0 draws from the same stream as `sample`, so a manual
        // fold over that stream must reproduce both statistics exactly.
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for x in crate::source::sample(&s, 21, n) {
            let err = x - d.decode(d.encode(x).unwrap()).unwrap();
            let sq = err * err;
            sum += sq;
            sum_sq += sq * sq;
        }
        let mse = sum / n as f64;
        let se = ((sum_sq / n as f64 - mse * mse).max(0.0) / n as f64).sqrt();
        assert_eq!(mc.mse, mse);
        assert_eq!(mc.std_error, se);
    }

    #[test]
    fn standard_error_shrinks_with_more_samples() {
        // The squared-error distribution is heavy-tailed (rare overload
        // hits dominate its fourth moment), so the √n law only emerges
        // slowly; assert the direction and a generous ratio band.
        let s = source();
        let d = design_128_4();
        let small = monte_carlo_mse(&d, &s, 100_000, 4, 4).unwrap();
        let large = monte_carlo_mse(&d, &s, 400_000, 4, 4).unwrap();
        assert!(large.std_error < small.std_error);
        let ratio = small.std_error / large.std_error;
        assert!(ratio > 1.3 && ratio < 3.5, "ratio {ratio}");
    }

    #[test]
    fn monte_carlo_rejects_degenerate_runs() {
        let s = source();
        let d = design_128_4();
        assert!(matches!(
            monte_carlo_mse(&d, &s, 1000, 0, 0),
            Err(Error::NoWorkers)
        ));
        assert!(matches!(
            monte_carlo_mse(&d, &s, 0, 0, 2),
            Err(Error::NoSamples)
        ));
    }
}
