use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qbm_core::validation::ValidationReport;
use tempfile::TempDir;

const CURVE_HEADER: &str = "t,magnitude,phase,lambda1_re,lambda1_im,lambda2_re,lambda2_im,method,err_flag";

fn qbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbm")).args(args).env_remove("QBM_WORKERS").output().expect("spawn qbm")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_cfg(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, cfg: &Path, out: &Path) -> Output {
    qbm(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_rows(path);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect();
    v.sort();
    v
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const BASE: &str = "omega0 = 10\nomega_c = 1\nlambda = 1e3\ndx = 1\ndy = 1\n";

fn low_t(extra: &str) -> String {
    format!("{BASE}regime = low\nomega_th = 0.01\n{extra}")
}

#[test]
fn single_curve_has_exact_header_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("cutoff = exponential\nt_points = 40\n"));
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&run("curve", &cfg, &a)), 0);
    assert_eq!(code(&run("curve", &cfg, &b)), 0);
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().next().unwrap(), CURVE_HEADER);
    assert_eq!(text.lines().count(), 41);
    assert!(!text.contains('\r'));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("cutoff = abrupt\ncutoff = exponential\nt_points = 30\n"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&qbm(&["sweep", "--workers", "1", "--config", c, "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&qbm(&["sweep", "--workers", "4", "--config", c, "--out", b.to_str().unwrap()])), 0);
    for (fa, fb) in csv_files(&a).iter().zip(csv_files(&b)) {
        assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap());
    }
    assert_eq!(fs::read(a.join("manifest.json")).unwrap(), fs::read(b.join("manifest.json")).unwrap());
}

#[test]
fn uncoupled_bath_gives_unit_magnitude() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("gamma = 0\nt_points = 25\n"));
    let out = dir.path().join("g0.csv");
    assert_eq!(code(&run("curve", &cfg, &out)), 0);
    let m = column(&out, "magnitude");
    assert_eq!(m.len(), 25);
    assert!(m.iter().all(|&x| x == 1.0), "{m:?}");
}

#[test]
fn values_round_trip_to_17_digits() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("cutoff = drude_lorentz\nt_points = 30\n"));
    let out = dir.path().join("c.csv");
    assert_eq!(code(&run("curve", &cfg, &out)), 0);
    let (_, rows) = read_rows(&out);
    for row in rows {
        for cell in &row[..7] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), *cell);
        }
    }
}

#[test]
fn three_cutoffs_give_three_files_and_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("s = 1\ncutoff = abrupt\ncutoff = drude_lorentz\ncutoff = exponential\n"));
    let out = dir.path().join("cutoffs");
    assert_eq!(code(&run("curve", &cfg, &out)), 0);
    let files = csv_files(&out);
    assert_eq!(files.len(), 3);
    let m = manifest(&out);
    let points = m["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    for (p, f) in points.iter().zip(&files) {
        assert_eq!(p["status"], "ok");
        assert_eq!(p["file"].as_str().unwrap(), f.file_name().unwrap().to_str().unwrap());
    }
    let mut cutoffs: Vec<&str> = points.iter().map(|p| p["params"]["cutoff"].as_str().unwrap()).collect();
    cutoffs.sort();
    assert_eq!(cutoffs, ["abrupt", "drude_lorentz", "exponential"]);
}

fn s_by_cutoff_sweep(temperature: &str) {
    let dir = TempDir::new().unwrap();
    let text = format!("{BASE}{temperature}s = 0.5\ns = 1\ns = 1.5\ncutoff = abrupt\ncutoff = drude_lorentz\ncutoff = exponential\nt_points = 40\n");
    let cfg = write_cfg(&dir, "c.cfg", &text);
    let out = dir.path().join("sweep");
    assert_eq!(code(&run("sweep", &cfg, &out)), 0);
    assert_eq!(csv_files(&out).len(), 9);
    let m = manifest(&out);
    let points = m["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    let mut idx: Vec<u64> = points.iter().map(|p| p["index"].as_u64().unwrap()).collect();
    idx.dedup();
    assert_eq!(idx, (0..9).collect::<Vec<_>>());
    assert!(points.iter().all(|p| p["status"] == "ok"));
}

#[test]
fn sweep_over_s_and_cutoff_low_temperature() {
    s_by_cutoff_sweep("regime = low\nomega_th = 0.01\n");
}

#[test]
fn sweep_over_s_and_cutoff_high_temperature() {
    s_by_cutoff_sweep("regime = high\nomega_th = 1e3\n");
}

#[test]
fn sweep_without_axes_is_a_single_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &low_t("t_points = 20\n"));
    let out = dir.path().join("one");
    assert_eq!(code(&run("sweep", &cfg, &out)), 0);
    assert_eq!(csv_files(&out).len(), 1);
    assert_eq!(manifest(&out)["points"].as_array().unwrap().len(), 1);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    for (name, text) in [
        ("unknown.cfg", format!("{}colour = red\n", low_t(""))),
        ("syntax.cfg", format!("{}omega0 10\n", low_t(""))),
        ("value.cfg", low_t("s = -1\n").replace("omega0 = 10", "omega0 = ten")),
        ("missing.cfg", "omega_c = 1\nlambda = 10\n".to_string()),
        ("cap.cfg", low_t("sweep_cap = 2\ns = 0.5\ns = 1\ns = 1.5\n")),
    ] {
        let cfg = write_cfg(&dir, name, &text);
        let o = run("curve", &cfg, &out);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = qbm(&["curve", "--config", dir.path().join("absent.cfg").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let cfg = write_cfg(&dir, "ok.cfg", &low_t("t_points = 5\n"));
    let o = qbm(&["curve", "--workers", "0", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn non_convergence_exits_3_and_keeps_flagged_file() {
    let dir = TempDir::new().unwrap();
    let text = format!("{BASE}regime = high\nomega_th = 0.01\nt_start = 1e-3\nt_end = 1e12\nt_points = 5\n");
    let cfg = write_cfg(&dir, "c.cfg", &text);
    let out = dir.path().join("bad.csv");
    assert_eq!(code(&run("curve", &cfg, &out)), 3);
    let (header, rows) = read_rows(&out);
    assert_eq!(header.join(","), CURVE_HEADER);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][8], "0");
    assert!(rows.iter().any(|r| r[8] != "0"));
}

#[test]
fn partial_sweep_is_recorded_in_manifest() {
    let dir = TempDir::new().unwrap();
    let text = format!("{BASE}regime = high\nomega_th = 0.01\nt_start = 1e-3\nt_end = 1\nt_end = 1e12\nt_points = 5\n");
    let cfg = write_cfg(&dir, "c.cfg", &text);
    let out = dir.path().join("sweep");
    assert_eq!(code(&run("sweep", &cfg, &out)), 3);
    let m = manifest(&out);
    let status: Vec<&str> = m["points"].as_array().unwrap().iter().map(|p| p["status"].as_str().unwrap()).collect();
    assert_eq!(status, ["ok", "partial"]);
    assert_eq!(csv_files(&out).len(), 2);
}

#[test]
fn spectra_abrupt_vanishes_beyond_cutoff() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "s.cfg", "omega0 = 10\nomega_c = 1\nlambda = 1e3\nomega_min = 1\nomega_max = 5e3\nomega_points = 400\n");
    let out = dir.path().join("j.csv");
    assert_eq!(code(&run("spectra", &cfg, &out)), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "omega,J_abrupt,J_DL,J_exp");
    let w = column(&out, "omega");
    let (ab, dl, ex) = (column(&out, "J_abrupt"), column(&out, "J_DL"), column(&out, "J_exp"));
    assert!((w[399] - 5e3).abs() < 1e-9);
    let mut beyond = 0;
    for i in 0..w.len() {
        if w[i] > 1e3 {
            beyond += 1;
            assert_eq!(ab[i], 0.0);
            assert!(dl[i] > 0.0 && ex[i] > 0.0);
        }
    }
    assert!(beyond > 50);
}

#[test]
fn spectra_converge_for_large_cutoff() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "s.cfg", "omega0 = 10\nomega_c = 1\nlambda = 1e6\nomega_min = 1e-3\nomega_max = 1e3\nomega_points = 300\n");
    let out = dir.path().join("j.csv");
    assert_eq!(code(&run("spectra", &cfg, &out)), 0);
    let cols = [column(&out, "J_abrupt"), column(&out, "J_DL"), column(&out, "J_exp")];
    for i in 0..cols[0].len() {
        let v = [cols[0][i], cols[1][i], cols[2][i]];
        let hi = v.iter().cloned().fold(f64::MIN, f64::max);
        let lo = v.iter().cloned().fold(f64::MAX, f64::min);
        assert!((hi - lo) / hi < 2e-3, "row {i}: {v:?}");
    }
}

#[test]
fn spectra_low_frequency_slope_is_s() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "s.cfg", "omega0 = 10\nomega_c = 1\nlambda = 1e3\nomega_min = 1e-3\nomega_max = 1\nomega_points = 200\ns = 0.5\ns = 1\ns = 1.5\n");
    let out = dir.path().join("slopes");
    assert_eq!(code(&run("spectra", &cfg, &out)), 0);
    let m = manifest(&out);
    let points = m["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    for p in points {
        let s: f64 = p["params"]["s"].as_str().unwrap().parse().unwrap();
        let f = out.join(p["file"].as_str().unwrap());
        let x: Vec<f64> = column(&f, "omega").iter().map(|w| w.ln()).collect();
        for name in ["J_abrupt", "J_DL", "J_exp"] {
            let y: Vec<f64> = column(&f, name).iter().map(|j| j.ln()).collect();
            let n = x.len() as f64;
            let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
            let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
            let slope = sxy / sxx;
            assert!((slope - s).abs() < 0.01, "{name} s={s}: slope {slope}");
        }
    }
}

#[test]
fn validate_reports_every_check_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = qbm(&["validate", "--level", "fast", "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    let report = ValidationReport::from_json(&text).unwrap();
    assert_eq!(ValidationReport::from_json(&report.to_json().unwrap()).unwrap(), report);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")).count(), report.checks.len());
    for n in 1..=8 {
        let id = format!("AC{n}");
        assert_eq!(report.checks.iter().filter(|c| c.id == id).count(), 1, "{id}");
    }
    let expected = if report.passed() { 0 } else { 1 };
    assert_eq!(code(&o), expected);
    assert!(report.checks.iter().filter(|c| c.id.starts_with("specfun")).all(|c| c.passed()));
}
