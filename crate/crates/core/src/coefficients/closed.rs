//! Closed forms of lambda_1, lambda_2 for Ohmic baths.
//!
//! `ClosedVariant::Printed` evaluates the published expressions verbatim,
//! complex special functions included. `ClosedVariant::Amended` applies
//! only the algebra corrections listed in `crate::findings` and reduces
//! conjugate pairs (Ci(w) + Ci(conj w) = 2 Re Ci(w), ...), so the result is
//! real by construction. [`lambda1_closed`] / [`lambda2_closed`] return the
//! forms verified against quadrature of the true kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LambdaMethod, LambdaPair};
use crate::bath::{Cutoff, SpectralDensity, ThermalRegime};
use crate::dynamics::{mode_constants, ModeConstants, SystemParams};
use crate::elementary::{q_int, s_int};
use crate::error::{Error, Result};
use crate::specfun::{ci, shi, si};

/// Lambda t above which cosh(Lambda t) overflows.
const DL_WINDOW: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedVariant {
    Printed,
    Amended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GFunction {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    G8,
}

/// Parameters shared by the g-functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GContext {
    pub lambda: f64,
    pub omega_th: f64,
    /// Only the printed g7 uses it.
    pub a_prime: f64,
    pub t: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// (sin vt - vt cos vt)/v^2
fn sin_minus_xcos(v: f64, t: f64) -> f64 {
    let x = v * t;
    if x.abs() < 0.1 {
        let x2 = x * x;
        t * t * x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0)
    } else {
        (x.sin() - x * x.cos()) / (v * v)
    }
}

fn real_arg(z: Complex64, which: GFunction) -> Result<f64> {
    if z.im != 0.0 {
        return Err(Error::Domain(format!("{which:?} takes a real frequency, got {z}")));
    }
    Ok(z.re)
}

fn nonzero(v: f64, which: GFunction) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::Domain(format!("{which:?} needs v' != 0")));
    }
    Ok(())
}

/// w = (i + Lambda t) z / Lambda, the argument shared by g5..g8.
fn shifted(z: f64, ctx: &GContext) -> Complex64 {
    Complex64::new(ctx.t * z, z / ctx.lambda)
}

pub fn g_function(which: GFunction, ctx: &GContext, z: Complex64, v: f64, variant: ClosedVariant) -> Result<Complex64> {
    let lam = ctx.lambda;
    let t = ctx.t;
    let o = ctx.omega_th;
    if !(lam > 0.0) {
        return Err(Error::Domain("Lambda must be positive".into()));
    }
    let amended = variant == ClosedVariant::Amended;
    let lt = lam * t;
    let l2 = lam * lam;
    match which {
        GFunction::G1 => {
            let z = real_arg(z, which)?;
            let (sz, cz) = (z * t).sin_cos();
            let ch = if amended { lt.cosh() } else { lt.cos() };
            let first = l2 * cot(lam / o) * (lam * cz * lt.sinh() + ch * sz * z) / (l2 + z * z);
            let second = if amended {
                c(-PI * o * q_int(z, t)) + (I + PI * o * t) * s_int(z, t)
            } else {
                (c(PI * o * (-1.0 + cz)) + (I + PI * o * t) * z * sz) / (z * z)
            };
            let k = if amended { l2 } else { 1.0 };
            Ok(c(first) - k * second)
        }
        GFunction::G2 => {
            nonzero(v, which)?;
            let (sv, cv) = (v * t).sin_cos();
            let sl = if amended { lt.sinh() } else { lt.sin() };
            let first = l2 * cot(lam / o) * (lam * sv * sl + (1.0 - cv * lt.cosh()) * v) / (l2 + v * v);
            let second = if amended {
                l2 * (c(-PI * o * sin_minus_xcos(v, t)) - I * (1.0 - cv) / v)
            } else {
                (c(-PI * o * sv) - I * v * (1.0 + Complex64::new(-1.0, PI * o * t) * cv)) / (v * v)
            };
            Ok(z * (first + second))
        }
        GFunction::G3 => {
            let z = real_arg(z, which)?;
            let (sz, cz) = (z * t).sin_cos();
            let d = l2 + z * z;
            if amended {
                Ok(c((lam * lt.sinh() * cz + z * lt.cosh() * sz) / d))
            } else {
                Ok(c((2.0 * lam * sz * lt.sinh() * z + cz * lt.cosh() * (l2 - z * z) + z * z - l2) / (d * d)))
            }
        }
        GFunction::G4 => {
            nonzero(v, which)?;
            let (sv, cv) = (v * t).sin_cos();
            let d = l2 + v * v;
            if amended {
                Ok(-z * (lam * lt.sinh() * sv - v * lt.cosh() * cv + v) / d)
            } else {
                Ok(z * (2.0 * lam * cv * lt.sinh() * v + lt.cosh() * sv * (v * v - l2) - v * d * t) / (d * d))
            }
        }
        GFunction::G5 => {
            let z = real_arg(z, which)?;
            let y = z / lam;
            if z == 0.0 {
                return Ok(c(PI - 2.0 * 1.0f64.atan2(lt)));
            }
            let w = shifted(z, ctx);
            if amended {
                Ok(c(y.cosh() * (PI - 2.0 * ci(w)?.im) - 2.0 * y.sinh() * si(w)?.re))
            } else {
                let wb = w.conj();
                Ok(-I * y.cosh() * (ci(wb)? - ci(w)? + I * PI) - y.sinh() * (si(wb)? + si(w)?))
            }
        }
        GFunction::G6 => {
            nonzero(v, which)?;
            let y = v / lam;
            let w = shifted(v, ctx);
            let iy = Complex64::new(0.0, y);
            if amended {
                let cis = 2.0 * ci(iy)?.re - 2.0 * ci(w)?.re;
                let sis = 2.0 * shi(y)? - 2.0 * si(w)?.im;
                Ok(z * (cis * y.sinh() - y.cosh() * sis))
            } else {
                let wb = w.conj();
                let cis = ci(-iy)? + ci(iy)? - ci(wb)? - ci(w)?;
                let sis = 2.0 * si(c(y))? - I * (si(wb)? - si(w)?);
                Ok(z * cis * y.sinh() - z * y.cosh() * sis)
            }
        }
        GFunction::G7 => {
            let z = real_arg(z, which)?;
            let y = z / lam;
            let head = 2.0 * t * l2 * (z * t).cos();
            if amended && z == 0.0 {
                return Ok(c(head));
            }
            let w = shifted(z, ctx);
            let k = 1.0 + lt * lt;
            if amended {
                let brace = (2.0 * ci(w)?.im - PI) * y.sinh() + 2.0 * y.cosh() * si(w)?.re;
                Ok(c(head + k * brace * z))
            } else {
                let wb = w.conj();
                let brace = I * (ci(wb)? - ci(w)? + I * PI) * y.sinh() + y.cosh() * (si(wb)? + si(w)?);
                Ok(head + k * brace * ctx.a_prime)
            }
        }
        GFunction::G8 => {
            nonzero(v, which)?;
            let y = v / lam;
            let w = shifted(v, ctx);
            let iy = Complex64::new(0.0, y);
            let k = 1.0 + lt * lt;
            let head = 2.0 * I * l2 * t * z * (v * t).sin();
            if amended {
                let cis = 2.0 * ci(iy)?.re - 2.0 * ci(w)?.re;
                let sis = Complex64::new(0.0, -2.0 * shi(y)? + 2.0 * si(w)?.im);
                Ok(head + I * z * y.cosh() * k * cis * v + z * k * y.sinh() * sis * v)
            } else {
                let wb = w.conj();
                let cm = ci(-iy)?;
                let a = I * z * y.cosh() * cm * v;
                let b = I * z * y.cosh() * (lt * lt * cm + k * (ci(iy)? - ci(wb)? - ci(w)?)) * v;
                let d = z * k * y.sinh() * (-2.0 * I * si(c(y))? - si(wb)? + si(w)?) * v;
                Ok(head + a + b + d)
            }
        }
    }
}

struct Setup {
    mc: ModeConstants,
    lam: f64,
    gamma: f64,
    hbar: f64,
    /// Omega_th of the regime, or of the system for the low-T cot factor.
    omega: f64,
    high: bool,
}

fn setup(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<Setup> {
    let mc = mode_constants(sys)?;
    sd.validate()?;
    regime.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be non-negative")));
    }
    if (sd.s - 1.0).abs() > 1e-12 {
        return Err(Error::NotAvailable(format!("lambda closed forms exist only for s = 1, got s = {}", sd.s)));
    }
    let (omega, high) = match *regime {
        ThermalRegime::Exact { .. } => {
            return Err(Error::NotAvailable("no lambda closed form in the exact regime".into()));
        }
        ThermalRegime::HighTemperature { omega_th } => (omega_th, true),
        ThermalRegime::LowTemperature => (sys.omega_th, false),
    };
    let lam = sd.lambda;
    match sd.cutoff {
        Cutoff::Abrupt if lam <= mc.a_prime => {
            return Err(Error::Domain(format!("abrupt closed forms need Lambda > A' ({lam} <= {})", mc.a_prime)));
        }
        Cutoff::DrudeLorentz if lam * t > DL_WINDOW => {
            return Err(Error::OutsideWindow(format!("Lambda t = {} exceeds {DL_WINDOW}", lam * t)));
        }
        Cutoff::DrudeLorentz if !(omega > 0.0) => {
            return Err(Error::InvalidParams("Drude-Lorentz closed forms carry cot(Lambda/Omega_th); Omega_th must be positive".into()));
        }
        _ => {}
    }
    Ok(Setup { mc, lam, gamma: sd.gamma, hbar: sys.hbar, omega, high })
}

fn si_re(x: f64) -> Result<f64> {
    Ok(si(c(x))?.re)
}

fn ctx(s: &Setup, t: f64) -> GContext {
    GContext { lambda: s.lam, omega_th: s.omega, a_prime: s.mc.a_prime, t }
}

fn lambda1_impl(s: &Setup, cutoff: Cutoff, t: f64, variant: ClosedVariant) -> Result<Complex64> {
    let (m, p) = (s.mc.m_coef, s.mc.p_coef);
    let (a, b) = (s.mc.a_prime, s.mc.b_prime);
    let (lam, g, h, o) = (s.lam, s.gamma, s.hbar, s.omega);
    let cx = ctx(s, t);
    let gf = |which, z: f64| g_function(which, &cx, c(z), 0.0, variant);
    match (cutoff, s.high) {
        (Cutoff::Abrupt, true) => {
            let f1 = |x: f64| si_re(x);
            let v = -m * f1(t * (a - lam))? - p * f1(t * (b - lam))? + m * f1(t * (a + lam))? + p * f1(t * (b + lam))?;
            Ok(c(g * o / (2.0 * h) * v))
        }
        (Cutoff::Abrupt, false) => {
            if t == 0.0 {
                return Ok(c(0.0));
            }
            let part = |coef: f64, z: f64| -> Result<f64> {
                Ok(coef * z * t * (si_re((lam - z) * t)? + 2.0 * si_re(z * t)? - si_re((lam + z) * t)?))
            };
            let brace = -2.0 * (-1.0 + (lam * t).cos()) * (m * (a * t).cos() + p * (b * t).cos()) + part(m, a)? + part(p, b)?;
            Ok(c(g / h * brace / (2.0 * t)))
        }
        (Cutoff::DrudeLorentz, true) => Ok(g * PI / (2.0 * h) * (m * gf(GFunction::G1, a)? + p * gf(GFunction::G1, b)?)),
        (Cutoff::DrudeLorentz, false) => {
            Ok(g * PI * lam * lam / (2.0 * h) * cot(lam / o) * (m * gf(GFunction::G3, a)? + p * gf(GFunction::G3, b)?))
        }
        (Cutoff::Exponential, true) => Ok(g * o / (2.0 * h) * (m * gf(GFunction::G5, a)? + p * gf(GFunction::G5, b)?)),
        (Cutoff::Exponential, false) => {
            let k = 1.0 / (2.0 + 2.0 * t * t * lam * lam);
            Ok(k * g / h * (m * gf(GFunction::G7, a)? + p * gf(GFunction::G7, b)?))
        }
    }
}

fn lambda2_impl(s: &Setup, cutoff: Cutoff, t: f64, variant: ClosedVariant) -> Result<Complex64> {
    let (a, b) = (s.mc.a_prime, s.mc.b_prime);
    let gg = s.mc.g_coef;
    if gg == 0.0 || b == 0.0 {
        return Ok(c(0.0));
    }
    let (lam, g, h, o) = (s.lam, s.gamma, s.hbar, s.omega);
    let (za, zb) = (Complex64::new(0.0, a), Complex64::new(0.0, b));
    let ab = za * zb;
    let cx = ctx(s, t);
    let pair = |which| -> Result<Complex64> { Ok(g_function(which, &cx, za, b, variant)? - g_function(which, &cx, zb, a, variant)?) };
    let printed = match (cutoff, s.high) {
        (Cutoff::Abrupt, true) => {
            if t == 0.0 {
                return Ok(c(0.0));
            }
            let f2 = |x: f64| -> Result<Complex64> { ci(c(x)) };
            let hh = |x: f64| -> Result<Complex64> { Ok(f2(t * (lam - x))? - f2(t * (lam + x))? + ((lam + x) / (lam - x)).ln()) };
            -I * o * g / (2.0 * h) * gg * (zb * hh(a)? - za * hh(b)?)
        }
        (Cutoff::Abrupt, false) => {
            return Err(Error::NotAvailable(
                "abrupt low-temperature lambda_2 is written with an undefined f3; use lambda_quadrature".into(),
            ))
        }
        (Cutoff::DrudeLorentz, true) => I * g * gg * PI / (2.0 * h) * pair(GFunction::G2)?,
        (Cutoff::DrudeLorentz, false) => -I * g * PI * lam * lam * gg / (2.0 * h) * cot(lam / o) * pair(GFunction::G4)?,
        (Cutoff::Exponential, true) => -I * g * gg * o / (2.0 * h) * pair(GFunction::G6)?,
        (Cutoff::Exponential, false) => {
            let k = 1.0 / (2.0 + 2.0 * t * t * lam * lam);
            k * g * gg / h * pair(GFunction::G8)?
        }
    };
    Ok(match variant {
        ClosedVariant::Printed => printed,
        ClosedVariant::Amended => printed / ab,
    })
}

/// lambda_1 from the published (`Printed`) or corrected (`Amended`) form.
pub fn lambda1_variant(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64, variant: ClosedVariant) -> Result<Complex64> {
    let s = setup(sys, sd, regime, t)?;
    lambda1_impl(&s, sd.cutoff, t, variant)
}

pub fn lambda2_variant(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64, variant: ClosedVariant) -> Result<Complex64> {
    let s = setup(sys, sd, regime, t)?;
    lambda2_impl(&s, sd.cutoff, t, variant)
}

pub fn lambda_variant(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64, variant: ClosedVariant) -> Result<LambdaPair> {
    let s = setup(sys, sd, regime, t)?;
    Ok(LambdaPair {
        lambda1: lambda1_impl(&s, sd.cutoff, t, variant)?,
        lambda2: lambda2_impl(&s, sd.cutoff, t, variant)?,
        t,
        method: LambdaMethod::ClosedForm,
        est_error: 0.0,
    })
}

/// int_0^t e^{-L tau} cos(a tau) dtau
fn exp_cos(lam: f64, a: f64, t: f64) -> f64 {
    let e = (-lam * t).exp();
    (lam - e * (lam * (a * t).cos() - a * (a * t).sin())) / (lam * lam + a * a)
}

/// int_0^t e^{-L tau} sin(a tau) dtau / a
fn exp_sin_over(lam: f64, a: f64, t: f64) -> f64 {
    let e = (-lam * t).exp();
    if a * t < 1e-4 {
        // int tau e^{-L tau}
        let lt = lam * t;
        return (1.0 - e * (1.0 + lt)) / (lam * lam);
    }
    (a - e * (lam * (a * t).sin() + a * (a * t).cos())) / ((lam * lam + a * a) * a)
}

fn dl_high_temperature(s: &Setup, t: f64) -> (f64, f64) {
    let (lam, g, h, o) = (s.lam, s.gamma, s.hbar, s.omega);
    let pref = PI * g * o * lam / (2.0 * h);
    let mc = &s.mc;
    let l1 = pref * (mc.m_coef * exp_cos(lam, mc.a_prime, t) + mc.p_coef * exp_cos(lam, mc.b_prime, t));
    let l2 = if mc.b_prime == 0.0 {
        0.0
    } else {
        pref * mc.g_coef * (exp_sin_over(lam, mc.b_prime, t) - exp_sin_over(lam, mc.a_prime, t))
    };
    (l1, l2)
}

/// Verified closed form of lambda_1.
pub fn lambda1_closed(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<Complex64> {
    let s = setup(sys, sd, regime, t)?;
    match (sd.cutoff, s.high) {
        (Cutoff::DrudeLorentz, true) => Ok(c(dl_high_temperature(&s, t).0)),
        (Cutoff::DrudeLorentz, false) => Err(Error::NotAvailable(
            "Drude-Lorentz low-temperature kernel has no elementary lambda; use lambda_quadrature".into(),
        )),
        (cut, _) => lambda1_impl(&s, cut, t, ClosedVariant::Amended),
    }
}

/// Verified closed form of lambda_2.
pub fn lambda2_closed(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<Complex64> {
    let s = setup(sys, sd, regime, t)?;
    match (sd.cutoff, s.high) {
        (Cutoff::DrudeLorentz, true) => Ok(c(dl_high_temperature(&s, t).1)),
        (Cutoff::DrudeLorentz, false) => Err(Error::NotAvailable(
            "Drude-Lorentz low-temperature kernel has no elementary lambda; use lambda_quadrature".into(),
        )),
        (cut, _) => lambda2_impl(&s, cut, t, ClosedVariant::Amended),
    }
}

/// Verified closed forms of both coefficients.
pub fn lambda_closed(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<LambdaPair> {
    Ok(LambdaPair {
        lambda1: lambda1_closed(sys, sd, regime, t)?,
        lambda2: lambda2_closed(sys, sd, regime, t)?,
        t,
        method: LambdaMethod::ClosedForm,
        est_error: 0.0,
    })
}
