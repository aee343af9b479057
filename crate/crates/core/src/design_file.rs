//! On-disk JSON representation of a quantizer design (schema version 1).
//!
//! Every real is written with 17 significant digits, enough to round-trip
//! any f64 bit-exactly, and field order is fixed, so serialization is
//! deterministic byte for byte.

use crate::error::Error;
use crate::quantizer::QuantizerDesign;
use crate::spline::FirstDegreeSpline;

use serde::{Deserialize, Serialize};

use std::io;

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized spline: knots with their values and derived slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineRecord {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// The design-file document. Mirrors [`QuantizerDesign`] field by field;
/// loading revalidates every structural invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub schema_version: u32,
    pub n_levels: usize,
    pub segments_per_quadrant: usize,
    pub x_max: f64,
    pub x_max_design: f64,
    pub step: f64,
    pub segment_thresholds: Vec<f64>,
    pub cell_widths: Vec<f64>,
    pub allocation: Vec<usize>,
    pub overload_level: f64,
    pub spline: SplineRecord,
}

/// JSON formatter that writes every f64 as d.16 scientific notation
/// (17 significant digits); everything else is compact JSON.
struct Precise17;

impl serde_json::ser::Formatter for Precise17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

impl DesignFile {
    pub fn from_design(d: &QuantizerDesign) -> Self {
        DesignFile {
            schema_version: SCHEMA_VERSION,
            n_levels: d.n_levels(),
            segments_per_quadrant: d.segments_per_quadrant(),
            x_max: d.x_max(),
            x_max_design: d.x_max_design(),
            step: d.step(),
            segment_thresholds: d.segment_thresholds().to_vec(),
            cell_widths: d.cell_widths().to_vec(),
            allocation: d.allocation().per_segment().to_vec(),
            overload_level: d.overload_level(),
            spline: SplineRecord {
                knots: d.spline().knots().to_vec(),
                values: d.spline().values().to_vec(),
                slopes: d.spline().slopes().to_vec(),
            },
        }
    }

    /// Rebuild the working design, revalidating all invariants.
    pub fn to_design(&self) -> Result<QuantizerDesign, Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::DesignFile(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let spline =
            FirstDegreeSpline::build(self.spline.knots.clone(), self.spline.values.clone())?;
        if self.spline.slopes.len() != spline.slopes().len() {
            return Err(Error::DesignFile("slope count mismatch".into()));
        }
        for (stored, derived) in self.spline.slopes.iter().zip(spline.slopes()) {
            if !((stored - derived).abs() <= 1e-12 * derived.abs().max(1.0)) {
                return Err(Error::DesignFile(format!(
                    "stored slope {stored} disagrees with knots and values"
                )));
            }
        }
        QuantizerDesign::from_parts(
            self.n_levels,
            self.segments_per_quadrant,
            self.x_max,
            self.x_max_design,
            self.step,
            self.segment_thresholds.clone(),
            self.allocation.clone(),
            self.cell_widths.clone(),
            spline,
            self.overload_level,
        )
    }

    /// Serialize as deterministic compact JSON with 17-digit reals.
    pub fn write_json<W: io::Write>(&self, writer: W) -> Result<(), Error> {
        let mut ser = serde_json::Serializer::with_formatter(writer, Precise17);
        self.serialize(&mut ser)
            .map_err(|e| Error::DesignFile(e.to_string()))
    }

    pub fn read_json<R: io::Read>(reader: R) -> Result<Self, Error> {
        serde_json::from_reader(reader).map_err(|e| Error::DesignFile(e.to_string()))
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::quantizer::build_design;
    use crate::source::Laplacian;

    const X_MAX_128: f64 = 7.9787103216196352;

    fn designs() -> Vec<QuantizerDesign> {
        let s = Laplacian::unit_variance();
        vec![
            build_design(128, 4, X_MAX_128, X_MAX_128, &s).unwrap(),
            build_design(128, 4, 6.78, X_MAX_128, &s).unwrap(),
            build_design(64, 8, 6.5247040398897317, 6.5247040398897317, &s).unwrap(),
        ]
    }

    fn to_bytes(f: &DesignFile) -> Vec<u8> {
        let mut buf = Vec::new();
        f.write_json(&mut buf).unwrap();
        buf
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for d in designs() {
            let file = DesignFile::from_design(&d);
            let bytes = to_bytes(&file);
            let parsed = DesignFile::read_json(bytes.as_slice()).unwrap();
            assert_eq!(parsed, file);
            assert_eq!(to_bytes(&parsed), bytes);
            assert_eq!(parsed.to_design().unwrap(), d);
        }
    }

    #[test]
    fn reals_carry_seventeen_digits() {
        let file = DesignFile::from_design(&designs()[0]);
        let text = String::from_utf8(to_bytes(&file)).unwrap();
        assert!(text.contains("7.9787103216196353e0"), "{text}");
        assert!(text.contains("1.2664619558126405e-1"), "{text}");
        assert!(text.contains("\"schema_version\":1"));
    }

    #[test]
    fn loader_rejects_tampered_documents() {
        let good = DesignFile::from_design(&designs()[0]);

        let mut wrong_version = good.clone();
        wrong_version.schema_version = 2;
        assert!(wrong_version.to_design().is_err());

        let mut wrong_alloc = good.clone();
        wrong_alloc.allocation[3] = 16;
        assert!(wrong_alloc.to_design().is_err());

        let mut wrong_thresholds = good.clone();
        wrong_thresholds.segment_thresholds.swap(1, 2);
        assert!(wrong_thresholds.to_design().is_err());

        let mut wrong_slopes = good.clone();
        wrong_slopes.spline.slopes[0] *= 1.5;
        assert!(wrong_slopes.to_design().is_err());

        let mut wrong_width = good.clone();
        wrong_width.cell_widths[2] *= 2.0;
        assert!(wrong_width.to_design().is_err());
    }

    #[test]
    fn reloaded_design_decodes_identically() {
        let d = designs().remove(1);
        let reloaded = DesignFile::from_design(&d).to_design().unwrap();
        for index in 0..d.n_levels() {
            assert_eq!(reloaded.decode(index).unwrap(), d.decode(index).unwrap());
        }
    }

    #[test]
    fn malformed_json_is_reported() {
        assert!(DesignFile::read_json(&b"{not json"[..]).is_err());
        assert!(DesignFile::read_json(&b"{}"[..]).is_err());
    }
}
