use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{Cutoff, SpectralDensity, ThermalRegime};
use crate::error::{finite, Error, Result};
use crate::specfun::{dawson, erfcx, exp_e1, exp_neg_ei, gamma, hypergeometric_pfq, lerch_phi, PfqParams};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Ohmicity exponents with tabulated closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Exponent {
    Half,
    One,
    ThreeHalves,
}

impl Exponent {
    pub(crate) fn of(s: f64) -> Option<Self> {
        if (s - 0.5).abs() < 1e-12 {
            Some(Exponent::Half)
        } else if (s - 1.0).abs() < 1e-12 {
            Some(Exponent::One)
        } else if (s - 1.5).abs() < 1e-12 {
            Some(Exponent::ThreeHalves)
        } else {
            None
        }
    }
}

/// Range of x = Lambda tau on which a closed form is evaluated.
/// `min_exclusive` marks forms that are singular at tau = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWindow {
    pub max_x: f64,
    pub min_exclusive: bool,
}

impl KernelWindow {
    pub fn contains(&self, x: f64) -> bool {
        x <= self.max_x && (x > 0.0 || (!self.min_exclusive && x == 0.0))
    }
}

/// Validity window of [`noise_kernel_closed`].
pub fn closed_form_window(sd: &SpectralDensity, regime: &ThermalRegime) -> Result<KernelWindow> {
    let e = Exponent::of(sd.s).ok_or_else(|| Error::NotAvailable(format!("no closed kernel for s = {}", sd.s)))?;
    let low = matches!(regime, ThermalRegime::LowTemperature);
    if matches!(regime, ThermalRegime::Exact { .. }) {
        return Err(Error::NotAvailable("exact thermal factor has no elementary kernel".into()));
    }
    Ok(match (sd.cutoff, e) {
        (Cutoff::Abrupt, Exponent::One) | (Cutoff::Exponential, _) => KernelWindow { max_x: f64::INFINITY, min_exclusive: false },
        (Cutoff::Abrupt, _) => KernelWindow { max_x: 15.0, min_exclusive: false },
        (Cutoff::DrudeLorentz, Exponent::Half) => KernelWindow { max_x: 700.0, min_exclusive: false },
        (Cutoff::DrudeLorentz, _) => KernelWindow { max_x: 700.0, min_exclusive: low },
    })
}

fn f12(a: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    Ok(hypergeometric_pfq(&PfqParams::new(&[a], &[b1, b2]), z)?.value)
}

/// (cos x - 1 + x sin x) / x^2
fn abrupt_ohmic_low(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        0.5 - x2 / 8.0 + x2 * x2 / 144.0
    } else {
        (x.cos() - 1.0 + x * x.sin()) / (x * x)
    }
}

/// Verified closed forms of nu(tau) in the high and low temperature limits.
pub fn noise_kernel_closed(sd: &SpectralDensity, regime: &ThermalRegime, tau: f64) -> Result<f64> {
    sd.validate()?;
    regime.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    let window = closed_form_window(sd, regime)?;
    let lam = sd.lambda;
    let g = sd.gamma;
    let x = lam * tau;
    if !window.contains(x) {
        if x == 0.0 {
            return Err(Error::Pole("kernel diverges at tau = 0".into()));
        }
        return Err(Error::OutsideWindow(format!("Lambda tau = {x} exceeds {}", window.max_x)));
    }
    let e = Exponent::of(sd.s).expect("checked by window");
    let ht = regime.omega_th();
    let r = x.sqrt();
    let v = match (sd.cutoff, e, ht) {
        (Cutoff::Abrupt, Exponent::One, Some(o)) => {
            if x == 0.0 {
                g * o * lam
            } else {
                g * o * x.sin() / tau
            }
        }
        (Cutoff::Abrupt, Exponent::One, None) => g * lam * lam * abrupt_ohmic_low(x),
        (Cutoff::Abrupt, Exponent::ThreeHalves, Some(o)) => 2.0 / 3.0 * g * o * lam.powf(1.5) * f12(0.75, 0.5, 1.75, -x * x / 4.0)?,
        (Cutoff::Abrupt, Exponent::ThreeHalves, None) => 0.4 * g * lam.powf(2.5) * f12(1.25, 0.5, 2.25, -x * x / 4.0)?,
        (Cutoff::Abrupt, Exponent::Half, Some(o)) => 2.0 * g * o * lam.sqrt() * f12(0.25, 0.5, 1.25, -x * x / 4.0)?,
        (Cutoff::Abrupt, Exponent::Half, None) => 2.0 / 3.0 * g * lam.powf(1.5) * f12(0.75, 0.5, 1.75, -x * x / 4.0)?,

        (Cutoff::DrudeLorentz, Exponent::One, Some(o)) => PI * g * o * lam / 2.0 * (-x).exp(),
        (Cutoff::DrudeLorentz, Exponent::One, None) => -g * lam * lam / 2.0 * (exp_neg_ei(x)? - exp_e1(x)?),
        (Cutoff::DrudeLorentz, Exponent::ThreeHalves, Some(o)) => {
            g * PI * o * lam.powf(1.5) * ((-x).exp() + erfcx(r) - 2.0 / SQRT_PI * dawson(r)) / (2.0 * SQRT_2)
        }
        (Cutoff::DrudeLorentz, Exponent::ThreeHalves, None) => {
            let bracket = (-x).exp() + erfcx(r) + 2.0 / SQRT_PI * dawson(r);
            g * lam * lam * (2.0 * SQRT_PI / tau.sqrt() - PI * lam.sqrt() * bracket) / (2.0 * SQRT_2)
        }
        (Cutoff::DrudeLorentz, Exponent::Half, Some(o)) => {
            g * PI * o * lam.sqrt() * ((-x).exp() + erfcx(r) + 2.0 / SQRT_PI * dawson(r)) / (2.0 * SQRT_2)
        }
        (Cutoff::DrudeLorentz, Exponent::Half, None) => {
            g * PI * lam.powf(1.5) * ((-x).exp() + erfcx(r) - 2.0 / SQRT_PI * dawson(r)) / (2.0 * SQRT_2)
        }

        (Cutoff::Exponential, Exponent::One, Some(o)) => g * lam * o / (1.0 + x * x),
        (Cutoff::Exponential, Exponent::One, None) => g * lam * lam * (1.0 - x * x) / (1.0 + x * x).powi(2),
        (Cutoff::Exponential, e, ht) => {
            // Gamma(p) Lambda^p (1 + x^2)^{-p/2} cos(p atan x), p = s or s + 1
            let p = match (e, ht) {
                (Exponent::Half, Some(_)) => 0.5,
                (Exponent::Half, None) | (Exponent::ThreeHalves, Some(_)) => 1.5,
                _ => 2.5,
            };
            let pref = g * ht.unwrap_or(1.0);
            pref * gamma(p)? * lam.powf(p) * (1.0 + x * x).powf(-p / 2.0) * (p * x.atan()).cos()
        }
    };
    finite(v, "closed-form kernel")
}

/// nu(tau) for an Ohmic Drude-Lorentz bath with the full coth factor,
/// as a Matsubara sum written with the Lerch transcendent.
pub fn drude_lorentz_exact_kernel(sd: &SpectralDensity, omega_th: f64, tau: f64) -> Result<f64> {
    sd.validate()?;
    if sd.cutoff != Cutoff::DrudeLorentz || Exponent::of(sd.s) != Some(Exponent::One) {
        return Err(Error::NotAvailable("Matsubara form needs an Ohmic Drude-Lorentz bath".into()));
    }
    if !(omega_th > 0.0) || !omega_th.is_finite() {
        return Err(Error::InvalidParams(format!("Omega_th = {omega_th} must be positive")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be positive")));
    }
    let lam = sd.lambda;
    let g = sd.gamma;
    let u = lam / omega_th;
    let c = u / PI;
    if (c - c.round()).abs() < 1e-12 || u.sin().abs() < 1e-14 {
        return Err(Error::Pole(format!("Lambda / (pi Omega_th) = {c} hits a Matsubara frequency")));
    }
    let q = (-PI * omega_th * tau).exp();
    let zq = Complex64::new(q, 0.0);
    let phi = lerch_phi(zq, 1.0, 1.0 - c)? + lerch_phi(zq, 1.0, 1.0 + c)?;
    let v = PI * g * lam * lam / 2.0 * (-lam * tau).exp() / u.tan() + g * lam * lam / 2.0 * q * phi.re;
    finite(v, "Drude-Lorentz exact kernel")
}
