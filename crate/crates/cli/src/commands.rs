use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qbm_core::decoherence::curve as compute_curve;
use qbm_core::validation::{self, Level};
use rayon::prelude::*;

use crate::config::{ConfigFile, RunConfig, SweepPoint};
use crate::error::CliError;
use crate::output::{curve_csv, point_file_name, spectra_csv, write_atomic, Manifest, ManifestEntry, PointStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Curve,
    Spectra,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Curve => "curve",
            Kind::Spectra => "spectra",
        }
    }
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn out_path(cli: Option<PathBuf>, cfg: &ConfigFile) -> Result<PathBuf, CliError> {
    cli.or_else(|| cfg.out.clone()).ok_or_else(|| CliError::Config("no output path: pass --out or set out= in the config".into()))
}

/// Render one point. Returns the file contents and the number of rows
/// that carry an error flag.
fn render(kind: Kind, cfg: &RunConfig) -> Result<(Vec<u8>, usize), CliError> {
    match kind {
        Kind::Curve => {
            let series = compute_curve(&cfg.sys, &cfg.sd, &cfg.regime, &cfg.sep, &cfg.grid, cfg.method)?;
            Ok((curve_csv(&series)?, series.failures()))
        }
        Kind::Spectra => Ok((spectra_csv(&cfg.sd, &cfg.omega_grid)?, 0)),
    }
}

/// Single-point run: one file at `out`. A single point never needs a
/// manifest; several points go through [`sweep`].
pub fn single(kind: Kind, cfg_path: &Path, out: Option<PathBuf>) -> Result<String, CliError> {
    let cfg = load(cfg_path)?;
    let out = out_path(out, &cfg)?;
    let points = cfg.expand()?;
    if points.len() > 1 {
        return sweep(kind, cfg_path, Some(out));
    }
    let (bytes, failed) = render(kind, &points[0].config)?;
    write_atomic(&out, &bytes)?;
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} rows of {} carry an error flag", out.display())));
    }
    Ok(format!("wrote {}", out.display()))
}

fn run_point(kind: Kind, dir: &Path, p: &SweepPoint) -> ManifestEntry {
    let file = point_file_name(p.index, &p.axes);
    let params: BTreeMap<String, String> = p.axes.iter().cloned().collect();
    let entry = |file: Option<String>, status, failed_rows, message| ManifestEntry { index: p.index, file, params: params.clone(), status, failed_rows, message };
    match render(kind, &p.config) {
        Ok((bytes, failed)) => match write_atomic(&dir.join(&file), &bytes) {
            Ok(()) if failed == 0 => entry(Some(file), PointStatus::Ok, 0, None),
            Ok(()) => entry(Some(file), PointStatus::Partial, failed, Some(format!("{failed} rows flagged"))),
            Err(e) => entry(None, PointStatus::Failed, 0, Some(e.to_string())),
        },
        Err(e) => entry(None, PointStatus::Failed, 0, Some(e.to_string())),
    }
}

/// One file per point of the cross product, plus `manifest.json`.
/// Points run concurrently; the manifest lists every point once.
pub fn sweep(kind: Kind, cfg_path: &Path, out: Option<PathBuf>) -> Result<String, CliError> {
    let cfg = load(cfg_path)?;
    let dir = out_path(out, &cfg)?;
    let points = cfg.expand()?;
    fs::create_dir_all(&dir)?;
    let entries: Vec<ManifestEntry> = points.par_iter().map(|p| run_point(kind, &dir, p)).collect();
    let manifest = Manifest { command: kind.name().to_string(), points: entries };
    manifest.write(&dir)?;
    let bad: Vec<String> = manifest
        .points
        .iter()
        .filter(|e| e.status != PointStatus::Ok)
        .map(|e| format!("point {}: {}", e.index, e.message.as_deref().unwrap_or("failed")))
        .collect();
    if bad.is_empty() {
        Ok(format!("wrote {} files and manifest to {}", manifest.points.len(), dir.display()))
    } else {
        Err(CliError::Numerical(bad.join("; ")))
    }
}

pub fn validate(level: Level, out: Option<PathBuf>) -> Result<String, CliError> {
    let report = validation::run(level);
    for c in &report.checks {
        println!("{}", c.summary_line());
    }
    if let Some(path) = &out {
        write_atomic(path, report.to_json()?.as_bytes())?;
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.id.as_str()).collect();
    if failed.is_empty() {
        Ok(format!("all {} checks pass", report.checks.len()))
    } else {
        Err(CliError::Validation(format!("failing checks: {}", failed.join(", "))))
    }
}
