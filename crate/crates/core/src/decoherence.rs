//! Decoherence exponents D_1, D_2 and the off-diagonal ratio
//! rho(t)/rho(0) = exp[-(D_1 + D_2)].
//!
//! D_1 = (dx^2 + dy^2) int_0^t lambda_1 and D_2 = 2 dx dy int_0^t lambda_2,
//! the factor 2 following exp[-int D] with D = lambda_1 (dx^2+dy^2) +
//! 2 lambda_2 dx dy.

use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{Cutoff, SpectralDensity, ThermalRegime};
use crate::coefficients::{lambda_closed, lambda_with_integrals, LambdaMethod, LambdaPair, TimeDomainIntegrator};
use crate::dynamics::{mode_constants, SystemParams};
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::specfun::EULER_GAMMA;

/// Magnitudes below this are clamped and flagged.
pub const MAGNITUDE_FLOOR: f64 = 1e-300;

/// dx = x - x', dy = y - y'.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub dx: f64,
    pub dy: f64,
}

impl Separation {
    pub fn new(dx: f64, dy: f64) -> Result<Self> {
        let s = Separation { dx, dy };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dx.is_finite() && self.dy.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("separation ({}, {}) must be finite", self.dx, self.dy)))
        }
    }

    /// dx^2 + dy^2
    pub fn radial(&self) -> f64 {
        self.dx * self.dx + self.dy * self.dy
    }

    /// 2 dx dy
    pub fn cross(&self) -> f64 {
        2.0 * self.dx * self.dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceExponent {
    pub d1: Complex64,
    pub d2: Complex64,
    pub t: f64,
}

impl DecoherenceExponent {
    /// Build from the time integrals of lambda_1 and lambda_2.
    pub fn from_integrals(sep: &Separation, int1: Complex64, int2: Complex64, t: f64) -> Self {
        DecoherenceExponent { d1: int1 * sep.radial(), d2: int2 * sep.cross(), t }
    }

    pub fn total(&self) -> Complex64 {
        self.d1 + self.d2
    }

    pub fn ratio(&self) -> DensityRatio {
        DensityRatio::from_exponent(self.total())
    }
}

/// |rho(t)/rho(0)| and its phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRatio {
    pub magnitude: f64,
    pub phase: f64,
    /// ln magnitude = -Re(D_1 + D_2), never clamped.
    pub log_magnitude: f64,
    pub clamped: bool,
}

impl DensityRatio {
    pub fn from_exponent(d: Complex64) -> Self {
        let log_magnitude = -d.re;
        let m = log_magnitude.exp();
        let clamped = !(m >= MAGNITUDE_FLOOR);
        DensityRatio { magnitude: if clamped { MAGNITUDE_FLOOR } else { m }, phase: -d.im, log_magnitude, clamped }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} must be non-negative")))
    }
}

/// D_1(t), D_2(t) by the quadrature route.
pub fn exponents(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, sep: &Separation, t: f64) -> Result<DecoherenceExponent> {
    sep.validate()?;
    check_time(t)?;
    let s = lambda_with_integrals(sys, sd, regime, t)?;
    Ok(DecoherenceExponent::from_integrals(sep, s.int_lambda1.into(), s.int_lambda2.into(), t))
}

pub fn density_ratio(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, sep: &Separation, t: f64) -> Result<DensityRatio> {
    Ok(exponents(sys, sd, regime, sep, t)?.ratio())
}

/// Long-time high-temperature rate as published: gamma Omega_th (dx^2+dy^2) / (2 hbar).
///
/// The exact long-time slope of D_1 from the published lambda_1 is pi
/// times this, see `crate::findings`.
pub fn hightemp_rate(sys: &SystemParams, sep: &Separation) -> f64 {
    sys.gamma * sys.omega_th * sep.radial() / (2.0 * sys.hbar)
}

/// rho(t)/rho(0) ~ (c t)^(-exponent) at low temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub log_c: f64,
    pub c_const: f64,
}

/// Published low-temperature power law for the abrupt cutoff.
pub fn lowtemp_powerlaw(sys: &SystemParams, sd: &SpectralDensity, sep: &Separation) -> Result<PowerLaw> {
    sep.validate()?;
    sd.validate()?;
    if sd.cutoff != Cutoff::Abrupt || (sd.s - 1.0).abs() > 1e-12 {
        return Err(Error::NotAvailable("the power law is given for the Ohmic abrupt cutoff only".into()));
    }
    let mc = mode_constants(sys)?;
    let lam = sd.lambda;
    let (a2, b2) = (mc.a_prime * mc.a_prime, mc.b_prime * mc.b_prime);
    if !(lam > mc.a_prime) {
        return Err(Error::Domain(format!("Lambda = {lam} must exceed A' = {}", mc.a_prime)));
    }
    let l2 = lam * lam;
    let gl = EULER_GAMMA + lam.ln();
    let bracket = l2 * l2 * gl - l2 * (mc.p_coef + gl) * b2 + a2 * (-l2 * (mc.m_coef + gl) + 1.0 + gl) * b2;
    let log_c = 2.0 * bracket / ((l2 - a2) * (l2 - b2));
    Ok(PowerLaw { exponent: sys.gamma * sep.radial() / sys.hbar, log_c, c_const: log_c.exp() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    /// Frequency-domain quadrature, points evaluated independently.
    Quadrature,
    /// Nested tau-domain quadrature with cumulative integrals.
    TimeDomain,
    /// Verified closed forms, integrated along the grid; points outside
    /// their validity fall back to quadrature.
    ClosedFormWhereValid,
}

/// Per-point diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointFlags {
    pub clamped: bool,
    /// Closed form unavailable here, quadrature used instead.
    pub fallback: bool,
    /// Re D_1 < 0 (allowed outside the high-temperature regime).
    pub negative_d1: bool,
    pub error: Option<String>,
}

impl PointFlags {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// `0` when clean, otherwise `|`-joined tags.
    pub fn label(&self) -> String {
        let mut tags = Vec::new();
        if self.error.is_some() {
            tags.push("error");
        }
        if self.clamped {
            tags.push("clamped");
        }
        if self.fallback {
            tags.push("fallback");
        }
        if self.negative_d1 {
            tags.push("negative_d1");
        }
        if tags.is_empty() {
            "0".to_string()
        } else {
            tags.join("|")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub magnitude: f64,
    pub phase: f64,
    pub log_magnitude: f64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub exponent: DecoherenceExponent,
    pub method: LambdaMethod,
    pub error: f64,
    pub flags: PointFlags,
}

impl CurvePoint {
    fn new(sep: &Separation, pair: LambdaPair, int1: Complex64, int2: Complex64, error: f64) -> Self {
        let exponent = DecoherenceExponent::from_integrals(sep, int1, int2, pair.t);
        let r = exponent.ratio();
        CurvePoint {
            t: pair.t,
            magnitude: r.magnitude,
            phase: r.phase,
            log_magnitude: r.log_magnitude,
            lambda1: pair.lambda1,
            lambda2: pair.lambda2,
            exponent,
            method: pair.method,
            error,
            flags: PointFlags { clamped: r.clamped, negative_d1: exponent.d1.re < 0.0, ..PointFlags::default() },
        }
    }

    fn failed(t: f64, method: LambdaMethod, e: &Error) -> Self {
        CurvePoint {
            t,
            magnitude: f64::NAN,
            phase: f64::NAN,
            log_magnitude: f64::NAN,
            lambda1: Complex64::new(f64::NAN, f64::NAN),
            lambda2: Complex64::new(f64::NAN, f64::NAN),
            exponent: DecoherenceExponent { d1: Complex64::new(f64::NAN, 0.0), d2: Complex64::new(f64::NAN, 0.0), t },
            method,
            error: f64::NAN,
            flags: PointFlags { error: Some(e.to_string()), ..PointFlags::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub points: Vec<CurvePoint>,
}

impl CurveSeries {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.magnitude).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phase).collect()
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.flags.is_ok()).count()
    }
}

/// 200 log-spaced points from 1e-3/Lambda to min(1, 700/Lambda).
pub fn default_grid(lambda: f64) -> Vec<f64> {
    log_grid(1e-3 / lambda, (700.0 / lambda).min(1.0), 200)
}

pub fn log_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), end.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(Error::Domain("grid must start at t >= 0".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn quadrature_point(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, sep: &Separation, t: f64) -> CurvePoint {
    match lambda_with_integrals(sys, sd, regime, t) {
        Ok(s) => CurvePoint::new(sep, s.lambda, s.int_lambda1.into(), s.int_lambda2.into(), s.lambda.est_error.max(s.int_error)),
        Err(e) => CurvePoint::failed(t, LambdaMethod::Quadrature, &e),
    }
}

/// int_a^b of the closed-form lambdas. `scale` bounds |lambda| on the
/// segment; it sets the absolute tolerance, since lambda_2 is pure
/// round-off near t = 0.
fn closed_segment(
    sys: &SystemParams,
    sd: &SpectralDensity,
    regime: &ThermalRegime,
    a: f64,
    b: f64,
    scale: f64,
) -> Result<(Complex64, Complex64)> {
    if b == a {
        return Ok(Default::default());
    }
    let failure = RefCell::new(None);
    let f = |t: f64| match lambda_closed(sys, sd, regime, t) {
        Ok(p) => [p.lambda1.re, p.lambda1.im, p.lambda2.re, p.lambda2.im],
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            [0.0; 4]
        }
    };
    let top = sd.lambda.max(mode_constants(sys)?.a_prime);
    let pts = quad::panels(a, b, 2.0 * std::f64::consts::PI / top, &[]);
    let e = quad::integrate(f, &pts, &QuadOptions::with_tol((1e-13 * scale * (b - a)).max(1e-300), 1e-10));
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let v = e.ok("closed-form time integral")?.value;
    Ok((Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])))
}

fn closed_curve(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, sep: &Separation, grid: &[f64]) -> Vec<CurvePoint> {
    // (t, int lambda_1, int lambda_2) at the last good point
    let mut base = (0.0, Complex64::default(), Complex64::default());
    let mut out = Vec::with_capacity(grid.len());
    let mut scale: f64 = 0.0;
    for &t in grid {
        let closed = lambda_closed(sys, sd, regime, t).and_then(|p| {
            scale = scale.max(p.lambda1.norm()).max(p.lambda2.norm());
            closed_segment(sys, sd, regime, base.0, t, scale).map(|(i1, i2)| (p, base.1 + i1, base.2 + i2))
        });
        let (point, ints) = match closed {
            Ok((p, i1, i2)) => (CurvePoint::new(sep, p, i1, i2, 0.0), Some((i1, i2))),
            Err(_) => match lambda_with_integrals(sys, sd, regime, t) {
                Ok(s) => {
                    let (i1, i2) = (s.int_lambda1.into(), s.int_lambda2.into());
                    let mut p = CurvePoint::new(sep, s.lambda, i1, i2, s.lambda.est_error.max(s.int_error));
                    p.flags.fallback = true;
                    (p, Some((i1, i2)))
                }
                Err(e) => (CurvePoint::failed(t, LambdaMethod::Quadrature, &e), None),
            },
        };
        if let Some((i1, i2)) = ints {
            base = (t, i1, i2);
        }
        out.push(point);
    }
    out
}

fn time_domain_curve(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, sep: &Separation, grid: &[f64]) -> Vec<CurvePoint> {
    let mut it = match TimeDomainIntegrator::new(sys, sd, regime) {
        Ok(it) => it,
        Err(e) => return grid.iter().map(|&t| CurvePoint::failed(t, LambdaMethod::TimeDomain, &e)).collect(),
    };
    grid.iter()
        .map(|&t| match it.advance(t) {
            Ok((p, i1, i2)) => {
                let err = p.est_error * t;
                CurvePoint::new(sep, p, i1.into(), i2.into(), err)
            }
            Err(e) => CurvePoint::failed(t, LambdaMethod::TimeDomain, &e),
        })
        .collect()
}

/// |rho(t)/rho(0)| along `grid`. Numerical failures are recorded per point.
pub fn curve(
    sys: &SystemParams,
    sd: &SpectralDensity,
    regime: &ThermalRegime,
    sep: &Separation,
    grid: &[f64],
    method: CurveMethod,
) -> Result<CurveSeries> {
    sys.validate()?;
    sd.validate()?;
    regime.validate()?;
    sep.validate()?;
    check_grid(grid)?;
    let points = match method {
        CurveMethod::Quadrature => grid.par_iter().map(|&t| quadrature_point(sys, sd, regime, sep, t)).collect(),
        CurveMethod::TimeDomain => time_domain_curve(sys, sd, regime, sep, grid),
        CurveMethod::ClosedFormWhereValid => closed_curve(sys, sd, regime, sep, grid),
    };
    Ok(CurveSeries { points })
}

/// Least-squares line y = slope x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain("linear fit needs at least two (x, y) pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("linear fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2(cut: Cutoff, omega_th: f64) -> (SystemParams, SpectralDensity, ThermalRegime) {
        let sys = SystemParams::new(10.0, 1.0, omega_th);
        let sd = SpectralDensity::ohmic(cut, 1e3, 1.0).unwrap();
        (sys, sd, ThermalRegime::HighTemperature { omega_th })
    }

    #[test]
    fn trivial_cases() {
        let (sys, sd, r) = fig2(Cutoff::Abrupt, 1e3);
        let sep = Separation::new(1.0, 1.0).unwrap();
        let z = exponents(&sys, &sd, &r, &sep, 0.0).unwrap();
        assert_eq!(z.total(), Complex64::default());
        assert_eq!(density_ratio(&sys, &sd, &r, &sep, 0.0).unwrap().magnitude, 1.0);
        let origin = Separation::new(0.0, 0.0).unwrap();
        assert_eq!(exponents(&sys, &sd, &r, &origin, 0.3).unwrap().total(), Complex64::default());
        assert!(Separation::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn published_rate_formula() {
        let sep = Separation::new(1.0, 1.0).unwrap();
        let mut sys = SystemParams::new(10.0, 1.0, 1e3);
        assert_eq!(hightemp_rate(&sys, &sep), 1e3);
        sys.omega_c = 10.0;
        assert_eq!(hightemp_rate(&sys, &sep), 1e3);
        assert_eq!(hightemp_rate(&sys, &Separation::new(0.0, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn power_law_exponent_and_domain() {
        let sep = Separation::new(1.0, 1.0).unwrap();
        let sys = SystemParams::new(10.0, 1.0, 0.01);
        let sd = SpectralDensity::ohmic(Cutoff::Abrupt, 1e3, 1.0).unwrap();
        let p = lowtemp_powerlaw(&sys, &sd, &sep).unwrap();
        assert_eq!(p.exponent, 2.0);
        assert!((p.log_c.exp() - p.c_const).abs() <= 1e-12 * p.c_const);
        let small = SpectralDensity::ohmic(Cutoff::Abrupt, 1.0, 1.0).unwrap();
        assert!(matches!(lowtemp_powerlaw(&sys, &small, &sep), Err(Error::Domain(_))));
        let exp = SpectralDensity::ohmic(Cutoff::Exponential, 1e3, 1.0).unwrap();
        assert!(lowtemp_powerlaw(&sys, &exp, &sep).is_err());
    }

    #[test]
    fn power_law_constant_tends_to_twice_log_lambda() {
        // A', B' -> 0: log c -> 2 (gamma_E + ln Lambda)
        let sys = SystemParams::new(1e-6, 1e-6, 0.01);
        let sd = SpectralDensity::ohmic(Cutoff::Abrupt, 1e3, 1.0).unwrap();
        let p = lowtemp_powerlaw(&sys, &sd, &Separation::new(1.0, 1.0).unwrap()).unwrap();
        assert!((p.log_c - 2.0 * (EULER_GAMMA + 1e3f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn clamp_keeps_log() {
        let r = DensityRatio::from_exponent(Complex64::new(800.0, 0.5));
        assert!(r.clamped);
        assert_eq!(r.magnitude, MAGNITUDE_FLOOR);
        assert_eq!(r.log_magnitude, -800.0);
        assert_eq!(r.phase, -0.5);
    }

    #[test]
    fn grid_checks_and_default() {
        let g = default_grid(1e3);
        assert_eq!(g.len(), 200);
        assert!((g[0] - 1e-6).abs() < 1e-20 && (g[199] - 0.7).abs() < 1e-12);
        assert_eq!(*default_grid(10.0).last().unwrap(), 1.0);
        assert!(check_grid(&[0.0, 0.1, 0.1]).is_err());
        assert!(check_grid(&[-0.1, 0.1]).is_err());
        assert!(check_grid(&[0.0, 0.1]).is_ok());
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (s, i) = linear_fit(&x, &y).unwrap();
        assert!((s - 3.0).abs() < 1e-14 && (i + 1.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn flag_labels() {
        assert_eq!(PointFlags::default().label(), "0");
        let f = PointFlags { clamped: true, fallback: true, ..PointFlags::default() };
        assert_eq!(f.label(), "clamped|fallback");
    }
}
