//! CSV and JSON artifacts. Floats in CSV files carry 17 significant digits
//! so every value reads back bit-identical; JSON numbers use the shortest
//! round-trip representation.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::Sector;
use crate::classical::{PhaseContour, Trajectory};
use crate::model::PhysParams;
use crate::semiclassical::SemiclassicalLevel;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unexpected header {found:?}, wanted {wanted:?}")]
    Header { found: Vec<String>, wanted: &'static [&'static str] },
    #[error("bad number {text:?} on line {line}")]
    Number { line: u64, text: String },
}

pub const TRAJECTORY_HEADER: &[&str] = &["t", "x", "xdot", "p", "H"];
pub const CONTOUR_HEADER: &[&str] = &["p", "x_plus", "x_minus"];
pub const WAVEFUNCTION_HEADER: &[&str] = &["p", "re", "im"];

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().map(fmt)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn from_csv(text: &str, wanted: &'static [&'static str]) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != wanted {
        return Err(FormatError::Header { found: header, wanted });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| FormatError::Number { line, text: f.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    to_csv(
        TRAJECTORY_HEADER,
        (0..traj.len()).map(|i| {
            let s = traj.states[i];
            vec![traj.times[i], s.x, s.xdot, traj.momenta[i], traj.energies[i]]
        }),
    )
}

/// Rows `[t, x, xdot, p, H]`.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<[f64; 5]>, FormatError> {
    Ok(from_csv(text, TRAJECTORY_HEADER)?
        .into_iter()
        .map(|r| [r[0], r[1], r[2], r[3], r[4]])
        .collect())
}

pub fn contour_csv(contour: &PhaseContour) -> String {
    to_csv(CONTOUR_HEADER, contour.points.iter().map(|c| vec![c.p, c.x_plus, c.x_minus]))
}

/// Rows `[p, x_plus, x_minus]`.
pub fn read_contour_csv(text: &str) -> Result<Vec<[f64; 3]>, FormatError> {
    Ok(from_csv(text, CONTOUR_HEADER)?.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}

pub fn wavefunction_csv(grid: &[f64], values: &[Complex64]) -> String {
    to_csv(WAVEFUNCTION_HEADER, grid.iter().zip(values).map(|(&p, v)| vec![p, v.re, v.im]))
}

pub fn read_wavefunction_csv(text: &str) -> Result<Vec<(f64, Complex64)>, FormatError> {
    Ok(from_csv(text, WAVEFUNCTION_HEADER)?
        .into_iter()
        .map(|r| (r[0], Complex64::new(r[1], r[2])))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Analytic,
    Shooting,
    Semiclassical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: usize,
    #[serde(rename = "A_n", skip_serializing_if = "Option::is_none", default)]
    pub amplitude: Option<f64>,
    #[serde(rename = "E_n")]
    pub energy: f64,
}

/// Spectrum listing shared by every method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    /// Highest level index listed.
    #[serde(rename = "N")]
    pub top: Option<usize>,
    pub omega: f64,
    pub k: f64,
    pub hbar: f64,
    pub method: SpectrumMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sector: Option<Sector>,
    pub levels: Vec<SpectrumEntry>,
}

impl SpectrumDocument {
    pub fn new(method: SpectrumMethod, sector: Option<Sector>, levels: Vec<SpectrumEntry>, params: &PhysParams) -> Self {
        Self {
            top: levels.iter().map(|l| l.n).max(),
            omega: params.omega(),
            k: params.k(),
            hbar: params.hbar(),
            method,
            sector,
            levels,
        }
    }

    pub fn semiclassical(levels: &[SemiclassicalLevel], params: &PhysParams) -> Self {
        let entries = levels
            .iter()
            .map(|l| SpectrumEntry { n: l.n, amplitude: Some(l.amplitude), energy: l.energy })
            .collect();
        Self::new(SpectrumMethod::Semiclassical, None, entries, params)
    }

    /// Entries `n = 0, 1, ...` from a list of energies.
    pub fn from_energies(method: SpectrumMethod, sector: Sector, energies: &[f64], params: &PhysParams) -> Self {
        let entries = energies
            .iter()
            .enumerate()
            .map(|(n, &e)| SpectrumEntry { n, amplitude: None, energy: e })
            .collect();
        Self::new(method, Some(sector), entries, params)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to a temporary file beside `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), FormatError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
