//! On-disk formats.
//!
//! Ensembles are JSON documents with complex entries as `[re, im]` pairs:
//!
//! ```json
//! {"format": "qregion-ensemble", "version": 1, "kind": "measurement",
//!  "dim": 2, "label": "...", "elements": [[[[re, im], ...], ...], ...]}
//! ```
//!
//! Probability clouds are delimited text, one vector per line. Commas,
//! semicolons, tabs or runs of spaces separate columns, `#` starts a comment
//! and a non-numeric first line is read as a header.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Ensemble, EnsembleKind};
use crate::error::{Error, Result};
use crate::operator::{CMatrix, HermitianOperator};

pub const ENSEMBLE_FORMAT: &str = "qregion-ensemble";
pub const ENSEMBLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub format: String,
    pub version: u32,
    pub kind: EnsembleKind,
    pub dim: usize,
    #[serde(default)]
    pub label: String,
    /// `elements[i][row][col] = [re, im]`.
    pub elements: Vec<Vec<Vec<[f64; 2]>>>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        let elements = e
            .elements()
            .iter()
            .map(|el| {
                let m = el.matrix();
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            format: ENSEMBLE_FORMAT.into(),
            version: ENSEMBLE_FORMAT_VERSION,
            kind: e.kind(),
            dim: e.dim(),
            label: e.label().to_string(),
            elements,
        }
    }

    /// Structural checks only; physical validity is the caller's business.
    pub fn into_ensemble(self) -> Result<Ensemble> {
        if self.format != ENSEMBLE_FORMAT {
            return Err(Error::Parse(format!(
                "expected format `{ENSEMBLE_FORMAT}`, found `{}`",
                self.format
            )));
        }
        if self.version != ENSEMBLE_FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {}", self.version)));
        }
        let d = self.dim;
        if d == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        if self.elements.is_empty() {
            return Err(Error::Parse("no elements".into()));
        }
        let mut ops = Vec::with_capacity(self.elements.len());
        for (idx, rows) in self.elements.into_iter().enumerate() {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Parse(format!("element {idx} is not {d}×{d}")));
            }
            if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("element {idx} has a non-finite entry")));
            }
            let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
            ops.push(HermitianOperator::from_matrix_unchecked(m));
        }
        Ensemble::new(self.kind, ops, self.label)
    }
}

pub fn ensemble_to_json(e: &Ensemble) -> Result<String> {
    Ok(serde_json::to_string_pretty(&EnsembleFile::from_ensemble(e))?)
}

pub fn ensemble_from_json(text: &str) -> Result<Ensemble> {
    let file: EnsembleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_ensemble()
}

pub fn read_ensemble(path: &Path) -> Result<Ensemble> {
    ensemble_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_ensemble(path: &Path, e: &Ensemble) -> Result<()> {
    let mut text = ensemble_to_json(e)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudFile {
    pub header: Option<Vec<String>>,
    pub points: Vec<DVector<f64>>,
}

fn detect_delimiter(line: &str) -> Option<u8> {
    b",;\t".iter().copied().find(|&c| line.as_bytes().contains(&c))
}

/// Reads a probability cloud. Rows must have equal length and finite values.
pub fn read_cloud<R: Read>(mut reader: R) -> Result<CloudFile> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::Parse("cloud file has no data".into()))?;
    let (delimiter, body) = match detect_delimiter(first) {
        Some(c) => (c, text.clone()),
        None => (
            b' ',
            text.lines()
                .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
    };
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(body.as_bytes());

    let mut header = None;
    let mut points: Vec<DVector<f64>> = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if idx == 0 && header.is_none() && points.is_empty() => {
                header = Some(record.iter().map(String::from).collect());
                continue;
            }
            Err(e) => {
                return Err(Error::Parse(format!("record {}: {e}", idx + 1)));
            }
        };
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("record {}: non-finite value {x}", idx + 1)));
        }
        let expected = points
            .first()
            .map(|p| p.len())
            .or(header.as_ref().map(Vec::len))
            .unwrap_or(row.len());
        if row.len() != expected {
            return Err(Error::Parse(format!(
                "record {}: {} columns, expected {expected}",
                idx + 1,
                row.len()
            )));
        }
        points.push(DVector::from_vec(row));
    }
    if points.is_empty() {
        return Err(Error::Parse("cloud file has no data rows".into()));
    }
    Ok(CloudFile { header, points })
}

pub fn read_cloud_file(path: &Path) -> Result<CloudFile> {
    read_cloud(std::fs::File::open(path)?)
}

/// Writes a comma-separated cloud with full round-trip precision.
pub fn write_cloud<W: Write>(writer: W, cloud: &CloudFile) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    if let Some(h) = &cloud.header {
        w.write_record(h).map_err(csv_err)?;
    }
    for p in &cloud.points {
        w.write_record(p.iter().map(|x| format!("{x:?}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Row-major nested vectors, for reports.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Complex matrix as nested `[re, im]` rows, for reports.
pub fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Parses `"0.5,0.25,0.25"` (commas and/or spaces).
pub fn parse_point(text: &str) -> Result<DVector<f64>> {
    let values: std::result::Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values = values.map_err(|e| Error::Parse(format!("point `{text}`: {e}")))?;
    if values.is_empty() {
        return Err(Error::Parse("empty point".into()));
    }
    Ok(DVector::from_vec(values))
}
