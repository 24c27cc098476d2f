//! Flat `key = value` run configurations. A key given more than once
//! becomes a sweep axis; the run is the cross product of all axes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qbm_core::decoherence::{default_grid, log_grid, CurveMethod, Separation};
use qbm_core::{Cutoff, ModeConvention, SpectralDensity, SystemParams, ThermalRegime};

use crate::error::CliError;

pub const DEFAULT_SWEEP_CAP: usize = 10_000;

/// Keys accepted in a config file. Anything else is rejected.
const KEYS: &[&str] = &[
    "omega0",
    "omega_c",
    "omega_th",
    "regime",
    "gamma",
    "s",
    "cutoff",
    "lambda",
    "dx",
    "dy",
    "t_start",
    "t_end",
    "t_points",
    "t_spacing",
    "method",
    "convention",
    "omega_min",
    "omega_max",
    "omega_points",
    "sweep_cap",
    "out",
];

/// Keys that may not be swept.
const SINGLE: &[&str] = &["sweep_cap", "out"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    /// Values per key in file order; keys sorted.
    values: BTreeMap<String, Vec<String>>,
    pub sweep_cap: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sys: SystemParams,
    pub sd: SpectralDensity,
    pub regime: ThermalRegime,
    pub sep: Separation,
    pub method: CurveMethod,
    pub grid: Vec<f64>,
    pub omega_grid: Vec<f64>,
}

/// One point of the cross product.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    /// Values of the swept keys only, in key order.
    pub axes: Vec<(String, String)>,
    pub config: RunConfig,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| config_err(format!("line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(config_err(format!("line {}: unknown key '{k}'", n + 1)));
            }
            if v.is_empty() {
                return Err(config_err(format!("line {}: empty value for '{k}'", n + 1)));
            }
            values.entry(k.to_string()).or_default().push(v.to_string());
        }
        for k in SINGLE {
            if values.get(*k).is_some_and(|v| v.len() > 1) {
                return Err(config_err(format!("'{k}' cannot be swept")));
            }
        }
        let sweep_cap = match values.remove("sweep_cap") {
            Some(v) => v[0].parse().map_err(|_| config_err(format!("sweep_cap: '{}' is not a count", v[0])))?,
            None => DEFAULT_SWEEP_CAP,
        };
        let out = values.remove("out").map(|v| PathBuf::from(&v[0]));
        Ok(ConfigFile { values, sweep_cap, out })
    }

    /// Keys with more than one value.
    pub fn axes(&self) -> Vec<&str> {
        self.values.iter().filter(|(_, v)| v.len() > 1).map(|(k, _)| k.as_str()).collect()
    }

    pub fn size(&self) -> usize {
        self.values.values().map(Vec::len).try_fold(1usize, |acc, n| acc.checked_mul(n)).unwrap_or(usize::MAX)
    }

    /// All points of the cross product, first key slowest.
    pub fn expand(&self) -> Result<Vec<SweepPoint>, CliError> {
        let size = self.size();
        if size > self.sweep_cap {
            return Err(config_err(format!("sweep has {size} points, cap is {}", self.sweep_cap)));
        }
        let keys: Vec<&String> = self.values.keys().collect();
        let mut points = Vec::with_capacity(size);
        for index in 0..size {
            let mut rest = index;
            let mut chosen = BTreeMap::new();
            for k in keys.iter().rev() {
                let vs = &self.values[*k];
                chosen.insert(k.as_str(), vs[rest % vs.len()].as_str());
                rest /= vs.len();
            }
            let axes = self
                .axes()
                .into_iter()
                .map(|k| (k.to_string(), chosen[k].to_string()))
                .collect();
            let config = build(&chosen).map_err(|e| match e {
                CliError::Config(m) if !self.axes().is_empty() => config_err(format!("sweep point {index}: {m}")),
                other => other,
            })?;
            points.push(SweepPoint { index, axes, config });
        }
        Ok(points)
    }
}

fn number(map: &BTreeMap<&str, &str>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| config_err(format!("{key}: '{v}' is not a finite number"))),
    }
}

fn required(map: &BTreeMap<&str, &str>, key: &str) -> Result<f64, CliError> {
    number(map, key)?.ok_or_else(|| config_err(format!("missing required key '{key}'")))
}

fn spacing(v: Option<&&str>) -> Result<Spacing, CliError> {
    match v.copied() {
        None | Some("log") => Ok(Spacing::Log),
        Some("linear") => Ok(Spacing::Linear),
        Some(other) => Err(config_err(format!("t_spacing: '{other}' is not log or linear"))),
    }
}

fn grid_between(a: f64, b: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    match spacing {
        Spacing::Log => log_grid(a, b, n),
        Spacing::Linear if n == 1 => vec![a],
        Spacing::Linear => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn count(map: &BTreeMap<&str, &str>, key: &str, default: usize) -> Result<usize, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(|| config_err(format!("{key}: '{v}' is not a positive count"))),
    }
}

/// Resolve one point's scalar settings. Frequencies in gamma/m, time in
/// m/gamma, lengths in sqrt(hbar/gamma); m = hbar = 1.
fn build(map: &BTreeMap<&str, &str>) -> Result<RunConfig, CliError> {
    let omega0 = required(map, "omega0")?;
    let omega_c = required(map, "omega_c")?;
    let lambda = required(map, "lambda")?;
    let omega_th = number(map, "omega_th")?;
    let gamma = number(map, "gamma")?.unwrap_or(1.0);
    let s = number(map, "s")?.unwrap_or(1.0);
    let cutoff: Cutoff = map.get("cutoff").copied().unwrap_or("exponential").parse().map_err(|e: qbm_core::Error| config_err(e.to_string()))?;
    // no temperature given means the zero-temperature kernel
    let default_regime = if omega_th.is_some() { "exact" } else { "low" };
    let regime = match map.get("regime").copied().unwrap_or(default_regime) {
        "high" => ThermalRegime::HighTemperature { omega_th: omega_th.ok_or_else(|| config_err("regime=high needs omega_th"))? },
        "exact" => ThermalRegime::Exact { omega_th: omega_th.ok_or_else(|| config_err("regime=exact needs omega_th"))? },
        "low" => ThermalRegime::LowTemperature,
        other => return Err(config_err(format!("regime: '{other}' is not high, low or exact"))),
    };
    let method = match map.get("method").copied().unwrap_or("quadrature") {
        "quadrature" => CurveMethod::Quadrature,
        "time_domain" => CurveMethod::TimeDomain,
        "closed" => CurveMethod::ClosedFormWhereValid,
        other => return Err(config_err(format!("method: '{other}' is not quadrature, time_domain or closed"))),
    };
    let convention = match map.get("convention").copied().unwrap_or("printed") {
        "printed" => ModeConvention::Printed,
        "physical" => ModeConvention::Physical,
        other => return Err(config_err(format!("convention: '{other}' is not printed or physical"))),
    };
    let mut sys = SystemParams::new(omega0, omega_c, omega_th.unwrap_or(0.0));
    sys.gamma = gamma;
    sys.convention = convention;
    sys.validate().map_err(|e| config_err(e.to_string()))?;
    let sd = SpectralDensity::new(s, cutoff, lambda, gamma).map_err(|e| config_err(e.to_string()))?;
    regime.validate().map_err(|e| config_err(e.to_string()))?;
    let sep = Separation::new(number(map, "dx")?.unwrap_or(1.0), number(map, "dy")?.unwrap_or(1.0)).map_err(|e| config_err(e.to_string()))?;

    let grid = match (number(map, "t_start")?, number(map, "t_end")?) {
        (None, None) if !map.contains_key("t_points") && !map.contains_key("t_spacing") => default_grid(lambda),
        (a, b) => {
            // unset ends take the default grid's ends
            let d = default_grid(lambda);
            let (a, b) = (a.unwrap_or(d[0]), b.unwrap_or(d[d.len() - 1]));
            let n = count(map, "t_points", 200)?;
            let sp = spacing(map.get("t_spacing"))?;
            if !(b > a) || a < 0.0 || (sp == Spacing::Log && a <= 0.0) {
                return Err(config_err(format!("time grid [{a}, {b}] is not valid for {sp:?} spacing")));
            }
            grid_between(a, b, n, sp)
        }
    };
    let omega_min = number(map, "omega_min")?.unwrap_or(1e-3);
    let omega_max = number(map, "omega_max")?.unwrap_or(5.0 * lambda);
    if !(omega_min > 0.0 && omega_max > omega_min) {
        return Err(config_err(format!("frequency grid [{omega_min}, {omega_max}] must be positive and increasing")));
    }
    let omega_grid = log_grid(omega_min, omega_max, count(map, "omega_points", 500)?);
    Ok(RunConfig { sys, sd, regime, sep, method, grid, omega_grid })
}
