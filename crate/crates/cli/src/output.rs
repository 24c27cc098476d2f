//! CSV rendering, atomic file writes and the sweep manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qbm_core::bath::spectral_density;
use qbm_core::decoherence::CurveSeries;
use qbm_core::{Cutoff, SpectralDensity};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CURVE_HEADER: [&str; 9] =
    ["t", "magnitude", "phase", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "method", "err_flag"];
pub const SPECTRA_HEADER: [&str; 4] = ["omega", "J_abrupt", "J_DL", "J_exp"];

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == 0.0 {
        // no "-0" in files
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn curve_csv(series: &CurveSeries) -> Result<Vec<u8>, CliError> {
    csv_bytes(
        &CURVE_HEADER,
        series.points.iter().map(|p| {
            vec![
                num(p.t),
                num(p.magnitude),
                num(p.phase),
                num(p.lambda1.re),
                num(p.lambda1.im),
                num(p.lambda2.re),
                num(p.lambda2.im),
                p.method.name().to_string(),
                p.flags.label(),
            ]
        }),
    )
}

/// J(w) of the three cutoff models sharing `sd.s`, `sd.lambda`, `sd.gamma`.
pub fn spectra_csv(sd: &SpectralDensity, omega: &[f64]) -> Result<Vec<u8>, CliError> {
    let models = Cutoff::ALL.map(|cutoff| SpectralDensity { cutoff, ..*sd });
    let mut rows = Vec::with_capacity(omega.len());
    for &w in omega {
        let mut row = vec![num(w)];
        for m in &models {
            row.push(num(spectral_density(m, w)?));
        }
        rows.push(row);
    }
    csv_bytes(&SPECTRA_HEADER, rows.into_iter())
}

/// Write through a temporary file in the same directory and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    /// File written, some rows carry an err_flag.
    Partial,
    /// No file written.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub file: Option<String>,
    pub params: BTreeMap<String, String>,
    pub status: PointStatus,
    pub failed_rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub points: Vec<ManifestEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(&dir.join(MANIFEST_NAME), text.as_bytes())
    }
}

/// `p0003_cutoff-abrupt_s-0.5.csv`
pub fn point_file_name(index: usize, axes: &[(String, String)]) -> String {
    let mut name = format!("p{index:04}");
    for (k, v) in axes {
        let clean: String = v.chars().map(|c| if c.is_ascii_alphanumeric() || "+-.".contains(c) { c } else { '_' }).collect();
        name.push_str(&format!("_{k}-{clean}"));
    }
    name.push_str(".csv");
    name
}
