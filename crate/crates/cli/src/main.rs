//! Command-line front end: design, optimize, sweep, compare, quantize.
//!
//! Exit codes follow one contract everywhere: 0 on success, 2 for an invalid
//! configuration (flags that cannot describe a quantizer), 3 for I/O or data
//! errors (unreadable files, malformed streams, broken design files). All
//! file output is byte-deterministic for identical flags.

mod streams;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use compandor::{
    build_design, default_support_threshold, evaluate, optimal_compandor_report, optimize_support,
    sweep, DesignFile, Laplacian, QuantizerDesign,
};

use streams::SampleFormat;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

#[derive(Parser)]
#[command(
    name = "compandor",
    version,
    about = "Design and exercise companding scalar quantizers for a Laplacian source"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a quantizer design and write it as JSON.
    Design {
        /// Total number of quantization levels N.
        #[arg(long)]
        n: usize,
        /// Total segment count over both quadrants (2L).
        #[arg(long)]
        segments: usize,
        /// Support threshold; defaults to the closed-form value for N.
        #[arg(long = "x-max")]
        x_max: Option<f64>,
        /// Output path for the design JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the support threshold minimizing the last-segment distortion.
    Optimize {
        #[arg(long)]
        n: usize,
        /// Total segment count over both quadrants (2L).
        #[arg(long)]
        segments: usize,
        /// Optionally write the optimized design JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the last-segment distortion over a threshold grid, as CSV.
    Sweep {
        #[arg(long)]
        n: usize,
        /// Total segment count over both quadrants (2L).
        #[arg(long)]
        segments: usize,
        /// Lowest candidate threshold.
        #[arg(long)]
        lo: f64,
        /// Highest candidate threshold.
        #[arg(long)]
        hi: f64,
        /// Grid spacing.
        #[arg(long)]
        step: f64,
        /// Output path for the CSV curve.
        #[arg(long)]
        out: PathBuf,
    },
    /// Report SQNR for the default design, the optimized design, and the
    /// optimal-compandor benchmark.
    Compare {
        #[arg(long)]
        n: usize,
        /// Total segment count over both quadrants (2L).
        #[arg(long)]
        segments: usize,
        /// Emit the comparison as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Quantize a sample stream through a saved design.
    Quantize {
        /// Design JSON produced by `design` or `optimize --out`.
        #[arg(long)]
        design: PathBuf,
        /// Input sample stream.
        #[arg(long = "in")]
        input: PathBuf,
        /// Reconstructed stream, written in the input's format.
        #[arg(long)]
        out: PathBuf,
        /// Optional destination for the raw index bytes.
        #[arg(long)]
        indices: Option<PathBuf>,
        /// Stream format for both input and reconstruction.
        #[arg(long, value_enum, default_value = "text")]
        format: SampleFormat,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design { n, segments, x_max, out } => cmd_design(n, segments, x_max, &out),
        Command::Optimize { n, segments, out } => cmd_optimize(n, segments, out.as_deref()),
        Command::Sweep { n, segments, lo, hi, step, out } => {
            cmd_sweep(n, segments, lo, hi, step, &out)
        }
        Command::Compare { n, segments, json } => cmd_compare(n, segments, json),
        Command::Quantize { design, input, out, indices, format } => {
            cmd_quantize(&design, &input, &out, indices.as_deref(), format)
        }
    }
}

/// `--segments` carries the total 2L; the library works per quadrant.
fn per_quadrant(segments: usize) -> Result<usize, CliError> {
    if segments < 2 || !segments.is_multiple_of(2) {
        return Err(CliError::config(format!(
            "--segments is the total over both quadrants (2L) and must be even and at least 2, got {segments}"
        )));
    }
    Ok(segments / 2)
}

fn write_design_file(d: &QuantizerDesign, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    DesignFile::from_design(d)
        .write_json(&mut w)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    w.write_all(b"\n")
        .and_then(|()| w.flush())
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn cmd_design(
    n: usize,
    segments: usize,
    x_max: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let l = per_quadrant(segments)?;
    let source = Laplacian::unit_variance();
    let x_default = default_support_threshold(n, &source);
    let x_max = x_max.unwrap_or(x_default);
    let design = build_design(n, l, x_max, x_default, &source)
        .map_err(|e| CliError::config(e.to_string()))?;
    let report = evaluate(&design, &source).map_err(|e| CliError::config(e.to_string()))?;
    write_design_file(&design, out)?;
    println!(
        "N = {n}, 2L = {segments}, x_max = {x_max:.4}, SQNR = {:.2} dB",
        report.sqnr_db
    );
    Ok(())
}

fn cmd_optimize(n: usize, segments: usize, out: Option<&Path>) -> Result<(), CliError> {
    let l = per_quadrant(segments)?;
    let source = Laplacian::unit_variance();
    let (x_opt, d_min) =
        optimize_support(n, l, &source).map_err(|e| CliError::config(e.to_string()))?;
    println!("x_opt = {x_opt:.2}");
    println!("d_min = {d_min:.3e}");
    if let Some(path) = out {
        let x_default = default_support_threshold(n, &source);
        let design = build_design(n, l, x_opt, x_default, &source)
            .map_err(|e| CliError::config(e.to_string()))?;
        write_design_file(&design, path)?;
    }
    Ok(())
}

fn cmd_sweep(
    n: usize,
    segments: usize,
    lo: f64,
    hi: f64,
    step: f64,
    out: &Path,
) -> Result<(), CliError> {
    let l = per_quadrant(segments)?;
    let source = Laplacian::unit_variance();
    let curve =
        sweep(n, l, lo, hi, step, &source).map_err(|e| CliError::config(e.to_string()))?;
    let file = fs::File::create(out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    curve
        .write_csv(&mut w)
        .and_then(|()| w.flush())
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", out.display())))?;
    let (x, d) = curve.argmin();
    println!(
        "rows = {}, argmin x_max = {x:.4}, d_last = {d:.3e}",
        curve.candidates().len()
    );
    Ok(())
}

#[derive(Serialize)]
struct CompareReport {
    n_levels: usize,
    segments: usize,
    x_max_default: f64,
    x_opt: f64,
    sqnr_f_db: f64,
    sqnr_n_db: f64,
    sqnr_o_db: f64,
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn cmd_compare(n: usize, segments: usize, json: bool) -> Result<(), CliError> {
    let l = per_quadrant(segments)?;
    let source = Laplacian::unit_variance();
    let config_err = |e: compandor::Error| CliError::config(e.to_string());

    let x_default = default_support_threshold(n, &source);
    let default_design = build_design(n, l, x_default, x_default, &source).map_err(config_err)?;
    let sqnr_f = evaluate(&default_design, &source).map_err(config_err)?.sqnr_db;

    let (x_opt, _) = optimize_support(n, l, &source).map_err(config_err)?;
    let optimized = build_design(n, l, x_opt, x_default, &source).map_err(config_err)?;
    let sqnr_n = evaluate(&optimized, &source).map_err(config_err)?.sqnr_db;

    let sqnr_o = optimal_compandor_report(&source, n, x_default)
        .map_err(config_err)?
        .sqnr_db;

    if json {
        let report = CompareReport {
            n_levels: n,
            segments,
            x_max_default: x_default,
            x_opt,
            sqnr_f_db: round2(sqnr_f),
            sqnr_n_db: round2(sqnr_n),
            sqnr_o_db: round2(sqnr_o),
        };
        let text = serde_json::to_string(&report)
            .map_err(|e| CliError::data(format!("cannot encode report: {e}")))?;
        println!("{text}");
    } else {
        println!("N = {n}, 2L = {segments}");
        println!("SQNR_F = {sqnr_f:.2} dB");
        println!("SQNR_N = {sqnr_n:.2} dB");
        println!("SQNR_O = {sqnr_o:.2} dB");
    }
    Ok(())
}

fn cmd_quantize(
    design_path: &Path,
    input: &Path,
    out: &Path,
    indices_path: Option<&Path>,
    format: SampleFormat,
) -> Result<(), CliError> {
    let file = fs::File::open(design_path)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", design_path.display())))?;
    let design = DesignFile::read_json(file)
        .and_then(|f| f.to_design())
        .map_err(|e| CliError::data(format!("invalid design {}: {e}", design_path.display())))?;
    if design.n_levels() > 256 {
        return Err(CliError::config(format!(
            "design has N = {} levels; one-byte index codes require N <= 256",
            design.n_levels()
        )));
    }

    let samples = streams::read_samples(input, format)?;
    if samples.is_empty() {
        return Err(CliError::data(format!(
            "input {} contains no samples",
            input.display()
        )));
    }

    let mut indices = Vec::with_capacity(samples.len());
    let mut reconstructed = Vec::with_capacity(samples.len());
    let mut signal_power = 0.0;
    let mut noise_power = 0.0;
    for &x in &samples {
        let index = design.encode(x).map_err(|e| CliError::data(e.to_string()))?;
        let xhat = design.decode(index).map_err(|e| CliError::data(e.to_string()))?;
        indices.push(index as u8);
        reconstructed.push(xhat);
        signal_power += x * x;
        noise_power += (x - xhat) * (x - xhat);
    }

    if let Some(path) = indices_path {
        streams::write_bytes(path, &indices)?;
    }
    streams::write_samples(out, format, &reconstructed)?;

    println!("samples = {}", samples.len());
    println!("empirical SQNR = {:.2} dB", 10.0 * (signal_power / noise_power).log10());
    Ok(())
}
