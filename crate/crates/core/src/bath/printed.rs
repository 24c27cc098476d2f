//! Kernels exactly as published, kept for comparison with the verified
//! forms. See `crate::findings` for what differs.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::closed::Exponent;
use super::{Cutoff, SpectralDensity, ThermalRegime};
use crate::error::{Error, Result};
use crate::specfun::{erf, erfc, erfi, gamma, hypergeometric_pfq, lerch_phi, PfqParams};

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedKernel {
    pub value: Complex64,
    /// Ids of the findings that apply to this entry.
    pub findings: &'static [&'static str],
}

fn f12(a: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    Ok(hypergeometric_pfq(&PfqParams::new(&[a], &[b1, b2]), z)?.value)
}

fn real(v: f64, findings: &'static [&'static str]) -> Result<PrintedKernel> {
    if v.is_finite() {
        Ok(PrintedKernel { value: Complex64::new(v, 0.0), findings })
    } else {
        Err(Error::Range("printed kernel overflows".into()))
    }
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// Published noise kernel. The low-temperature Drude-Lorentz entries carry
/// cot(Lambda/Omega_th), so `omega_th` must be given for them even though
/// the regime itself does not hold a temperature.
pub fn noise_kernel_printed(sd: &SpectralDensity, regime: &ThermalRegime, tau: f64, omega_th: Option<f64>) -> Result<PrintedKernel> {
    sd.validate()?;
    regime.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    let e = Exponent::of(sd.s).ok_or_else(|| Error::NotAvailable(format!("no printed kernel for s = {}", sd.s)))?;
    let lam = sd.lambda;
    let g = sd.gamma;
    let x = lam * tau;
    let r = x.sqrt();
    let o = regime.omega_th().or(omega_th);
    let need_o = || o.ok_or_else(|| Error::InvalidParams("printed entry needs Omega_th".into()));

    match (regime, sd.cutoff, e) {
        (ThermalRegime::Exact { omega_th }, Cutoff::DrudeLorentz, Exponent::One) => {
            let c = lam / (PI * omega_th);
            let q = (-PI * omega_th * tau).exp();
            let zm = Complex64::new(q, 0.0);
            let zp = Complex64::new(1.0 / q, 0.0);
            let lower = lerch_phi(zm, 1.0, 1.0 - c)? + lerch_phi(zm, 1.0, 1.0 + c)?;
            let upper = lerch_phi(zp, 1.0, 1.0 - c)? + lerch_phi(zp, 1.0, 1.0 + c)?;
            let v = PI * g * lam * lam * (0.5 * x.cosh() * cot(lam / omega_th) + q * lower + upper / q);
            Ok(PrintedKernel { value: v, findings: &["K7"] })
        }
        (ThermalRegime::Exact { .. }, _, _) => Err(Error::NotAvailable("no printed exact-regime kernel for this bath".into())),

        (ThermalRegime::HighTemperature { omega_th }, cut, e) => {
            let o = *omega_th;
            match (cut, e) {
                (Cutoff::Abrupt, Exponent::One) => real(if tau == 0.0 { g * o * lam } else { g * o * x.sin() / tau }, &[]),
                (Cutoff::DrudeLorentz, Exponent::One) => {
                    let v = Complex64::new(PI * g * lam * lam / 2.0 * cot(lam / o) * x.cosh(), 0.0)
                        - Complex64::new(0.0, PI * g * lam * lam / 2.0) * Complex64::new(1.0, -PI * o * tau);
                    Ok(PrintedKernel { value: v, findings: &["K6"] })
                }
                (Cutoff::Exponential, Exponent::One) => real(g * lam * o / (1.0 + x * x), &[]),
                (Cutoff::Abrupt, Exponent::ThreeHalves) => real(2.0 / 3.0 * g * lam.powf(1.5) * o * f12(0.75, 0.5, 1.75, x * x / 4.0)?, &["K1"]),
                (Cutoff::Abrupt, Exponent::Half) => real(2.0 * g * lam.sqrt() * o * f12(0.25, 0.5, 1.25, x * x / 4.0)?, &["K1"]),
                (Cutoff::DrudeLorentz, Exponent::ThreeHalves) => {
                    real(g * o * lam.powf(1.5) * (1.0 + x * x).powf(-0.75) * (1.5 * x.atan()).cos() * gamma(1.5)?, &["K3"])
                }
                (Cutoff::DrudeLorentz, Exponent::Half) => {
                    real(g * o * lam.sqrt() * (1.0 + x * x).powf(-0.25) * (0.5 * x.atan()).cos() * gamma(0.5)?, &["K3"])
                }
                (Cutoff::Exponential, Exponent::ThreeHalves) => real(
                    (-x).exp() * PI * o * lam.powf(1.5) * (1.0 + (2.0 * x).exp() * erfc(r) - erfi(r)?) / (2.0 * SQRT_2),
                    &["K3", "K4"],
                ),
                (Cutoff::Exponential, Exponent::Half) => real(
                    (-x).exp() * PI * o * lam.sqrt() * (1.0 + (2.0 * x).exp() * erfc(r) + erfi(r)?) / (2.0 * SQRT_2),
                    &["K3", "K4"],
                ),
            }
        }

        (ThermalRegime::LowTemperature, cut, e) => match (cut, e) {
            (Cutoff::Abrupt, Exponent::One) => {
                if tau == 0.0 {
                    real(g * lam * lam / 2.0, &[])
                } else {
                    real(g * (-1.0 + x.cos() + x * x.sin()) / (tau * tau), &[])
                }
            }
            (Cutoff::DrudeLorentz, Exponent::One) => real(g * lam * lam * PI / 2.0 * cot(lam / need_o()?) * x.cosh(), &["K6"]),
            (Cutoff::Exponential, Exponent::One) => {
                let a = 1.0 / (lam * lam);
                real(g * (a - tau * tau) / (a + tau * tau).powi(2), &[])
            }
            (Cutoff::Abrupt, Exponent::ThreeHalves) => {
                real(0.4 * g * lam.powf(2.5) * need_o()? * f12(1.25, 0.5, 2.25, x * x / 4.0)?, &["K1", "K2"])
            }
            (Cutoff::Abrupt, Exponent::Half) => real(2.0 / 3.0 * g * lam.powf(1.5) * need_o()? * f12(0.75, 0.5, 1.75, x * x / 4.0)?, &["K1", "K2"]),
            (Cutoff::DrudeLorentz, Exponent::ThreeHalves) => {
                real(g * lam.powf(2.5) * (1.0 + x * x).powf(-1.25) * (2.5 * x.atan()).cos() * gamma(2.5)?, &["K3"])
            }
            (Cutoff::DrudeLorentz, Exponent::Half) => {
                real(g * lam.powf(1.5) * (1.0 + x * x).powf(-0.75) * (1.5 * x.atan()).cos() * gamma(1.5)?, &["K3"])
            }
            (Cutoff::Exponential, Exponent::ThreeHalves) => {
                if tau == 0.0 {
                    return Err(Error::Pole("printed kernel diverges at tau = 0".into()));
                }
                let h = lam.sqrt();
                let v = g * lam * lam
                    * (2.0 * SQRT_PI / tau.powf(0.25) - 2.0 * PI * h * x.cosh() + h * x.exp() * PI * erf(r) - h * (-x).exp() * PI * erfi(r)?)
                    / (2.0 * SQRT_2);
                real(v, &["K3", "K5"])
            }
            (Cutoff::Exponential, Exponent::Half) => real(
                (-x).exp() * PI * g * lam.powf(1.5) * (1.0 + (2.0 * x).exp() * erfc(r) - erfi(r)?) / (2.0 * SQRT_2),
                &["K3"],
            ),
        },
    }
}
