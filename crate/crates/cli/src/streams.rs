//! Sample-stream I/O for the quantize command.
//!
//! Two wire formats: `text` holds one decimal sample per line, `f64le` holds
//! raw 64-bit little-endian reals. Readers reject non-finite samples with a
//! line or byte-offset diagnostic; writers mirror the input format so a
//! stream can round-trip through the quantizer untouched.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SampleFormat {
    /// One decimal sample per line.
    Text,
    /// Raw 64-bit little-endian floats.
    F64le,
}

pub fn read_samples(path: &Path, format: SampleFormat) -> Result<Vec<f64>, CliError> {
    match format {
        SampleFormat::Text => read_text(path),
        SampleFormat::F64le => read_f64le(path),
    }
}

fn read_text(path: &Path) -> Result<Vec<f64>, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.map_err(|e| CliError::data(format!("read error in {}: {e}", path.display())))?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let value: f64 = token.parse().map_err(|_| {
            CliError::data(format!("line {}: cannot parse {token:?} as a real", k + 1))
        })?;
        if !value.is_finite() {
            return Err(CliError::data(format!("line {}: non-finite sample {value}", k + 1)));
        }
        samples.push(value);
    }
    Ok(samples)
}

fn read_f64le(path: &Path) -> Result<Vec<f64>, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))?;
    if !bytes.len().is_multiple_of(8) {
        return Err(CliError::data(format!(
            "byte offset {}: truncated 8-byte record ({} trailing bytes)",
            bytes.len() / 8 * 8,
            bytes.len() % 8
        )));
    }
    let mut samples = Vec::with_capacity(bytes.len() / 8);
    for (k, chunk) in bytes.chunks_exact(8).enumerate() {
        let value = f64::from_le_bytes(chunk.try_into().unwrap());
        if !value.is_finite() {
            return Err(CliError::data(format!(
                "byte offset {}: non-finite sample {value}",
                k * 8
            )));
        }
        samples.push(value);
    }
    Ok(samples)
}

pub fn write_samples(path: &Path, format: SampleFormat, samples: &[f64]) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    match format {
        SampleFormat::Text => {
            for v in samples {
                writeln!(w, "{v}").map_err(|e| CliError::data(format!("write error: {e}")))?;
            }
        }
        SampleFormat::F64le => {
            for v in samples {
                w.write_all(&v.to_le_bytes())
                    .map_err(|e| CliError::data(format!("write error: {e}")))?;
            }
        }
    }
    w.flush().map_err(|e| CliError::data(format!("write error: {e}")))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}
