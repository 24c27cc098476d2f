//! Bath spectral densities, thermal regimes and the noise/dissipation
//! kernels, both by quadrature and in closed form.

mod closed;
mod kernels;
mod printed;

pub use closed::{closed_form_window, drude_lorentz_exact_kernel, noise_kernel_closed, KernelWindow};
pub use kernels::{dissipation_kernel_quadrature, noise_kernel_quadrature, KernelValue};
pub use printed::{noise_kernel_printed, PrintedKernel};

pub(crate) use kernels::integrate_spectrum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Abrupt,
    DrudeLorentz,
    Exponential,
}

impl Cutoff {
    pub const ALL: [Cutoff; 3] = [Cutoff::Abrupt, Cutoff::DrudeLorentz, Cutoff::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Cutoff::Abrupt => "abrupt",
            Cutoff::DrudeLorentz => "drude_lorentz",
            Cutoff::Exponential => "exponential",
        }
    }
}

impl std::str::FromStr for Cutoff {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "abrupt" => Ok(Cutoff::Abrupt),
            "drude_lorentz" | "drude" | "dl" | "lorentz" => Ok(Cutoff::DrudeLorentz),
            "exponential" | "exp" => Ok(Cutoff::Exponential),
            other => Err(Error::InvalidParams(format!("unknown cutoff '{other}'"))),
        }
    }
}

/// J(w) = gamma w^s f_cut(w / Lambda).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub s: f64,
    pub cutoff: Cutoff,
    pub lambda: f64,
    pub gamma: f64,
}

impl SpectralDensity {
    pub fn new(s: f64, cutoff: Cutoff, lambda: f64, gamma: f64) -> Result<Self> {
        let sd = SpectralDensity { s, cutoff, lambda, gamma };
        sd.validate()?;
        Ok(sd)
    }

    pub fn ohmic(cutoff: Cutoff, lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(1.0, cutoff, lambda, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParams(format!("exponent s = {} must be positive", self.s)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("cutoff Lambda = {} must be positive", self.lambda)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("coupling gamma = {} must be non-negative", self.gamma)));
        }
        Ok(())
    }

    /// Cutoff factor f_cut(w / Lambda).
    pub fn cutoff_factor(&self, w: f64) -> f64 {
        let x = w / self.lambda;
        match self.cutoff {
            Cutoff::Abrupt => {
                if x <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Cutoff::DrudeLorentz => 1.0 / (1.0 + x * x),
            Cutoff::Exponential => (-x).exp(),
        }
    }

    /// Spectral density J(w) for w >= 0.
    pub fn value(&self, w: f64) -> Result<f64> {
        self.validate()?;
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::Domain(format!("J(w) needs w >= 0, got {w}")));
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(self.gamma * w.powf(self.s) * self.cutoff_factor(w))
    }
}

/// Shorthand for [`SpectralDensity::value`].
pub fn spectral_density(sd: &SpectralDensity, w: f64) -> Result<f64> {
    sd.value(w)
}

/// Temperature treatment of coth(w / Omega_th), Omega_th = 2 k_B T / hbar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThermalRegime {
    Exact { omega_th: f64 },
    HighTemperature { omega_th: f64 },
    LowTemperature,
}

impl ThermalRegime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThermalRegime::Exact { omega_th } | ThermalRegime::HighTemperature { omega_th } => {
                if omega_th > 0.0 && omega_th.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!("Omega_th = {omega_th} must be positive")))
                }
            }
            ThermalRegime::LowTemperature => Ok(()),
        }
    }

    pub fn omega_th(&self) -> Option<f64> {
        match *self {
            ThermalRegime::Exact { omega_th } | ThermalRegime::HighTemperature { omega_th } => Some(omega_th),
            ThermalRegime::LowTemperature => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThermalRegime::Exact { .. } => "exact",
            ThermalRegime::HighTemperature { .. } => "high",
            ThermalRegime::LowTemperature => "low",
        }
    }

    /// The thermal factor multiplying J(w).
    pub fn factor(&self, w: f64) -> f64 {
        match *self {
            ThermalRegime::Exact { omega_th } => {
                let x = w / omega_th;
                if x < 1e-6 {
                    1.0 / x + x / 3.0
                } else if x > 20.0 {
                    1.0 + 2.0 * (-2.0 * x).exp()
                } else {
                    1.0 / x.tanh()
                }
            }
            ThermalRegime::HighTemperature { omega_th } => omega_th / w,
            ThermalRegime::LowTemperature => 1.0,
        }
    }
}

/// W(w) = J(w) c(w), with the 1/w of the thermal factor cancelled
/// analytically so that w -> 0 is well behaved.
pub fn spectral_weight(sd: &SpectralDensity, regime: &ThermalRegime, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let cut = sd.cutoff_factor(w);
    if cut == 0.0 {
        return 0.0;
    }
    let g = sd.gamma * cut;
    match *regime {
        ThermalRegime::LowTemperature => g * w.powf(sd.s),
        ThermalRegime::HighTemperature { omega_th } => g * omega_th * w.powf(sd.s - 1.0),
        ThermalRegime::Exact { omega_th } => {
            let x = w / omega_th;
            if x < 1e-6 {
                g * omega_th * w.powf(sd.s - 1.0) * (1.0 + x * x / 3.0)
            } else {
                g * w.powf(sd.s) * regime.factor(w)
            }
        }
    }
}

/// Power p in W(w) ~ w^p as w -> 0.
pub(crate) fn small_w_exponent(sd: &SpectralDensity, regime: &ThermalRegime) -> f64 {
    match regime {
        ThermalRegime::LowTemperature => sd.s,
        _ => sd.s - 1.0,
    }
}

/// Power p in W(w) ~ w^p as w -> infinity (Drude-Lorentz only).
pub(crate) fn large_w_exponent(sd: &SpectralDensity, regime: &ThermalRegime) -> f64 {
    match regime {
        ThermalRegime::HighTemperature { .. } => sd.s - 3.0,
        _ => sd.s - 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ohmic_below_cutoff() {
        let sd = SpectralDensity::ohmic(Cutoff::Abrupt, 100.0, 1.0).unwrap();
        assert_eq!(sd.value(10.0).unwrap(), 10.0);
        assert_eq!(sd.value(100.0).unwrap(), 100.0);
        assert_eq!(sd.value(100.1).unwrap(), 0.0);
    }

    #[test]
    fn cutoffs_at_lambda() {
        let dl = SpectralDensity::ohmic(Cutoff::DrudeLorentz, 2.0, 1.0).unwrap();
        assert!((dl.value(2.0).unwrap() - 1.0).abs() < 1e-15);
        let ex = SpectralDensity::ohmic(Cutoff::Exponential, 2.0, 1.0).unwrap();
        assert!((ex.value(2.0).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn zero_frequency_and_negative() {
        let sd = SpectralDensity::new(0.5, Cutoff::Exponential, 1.0, 1.0).unwrap();
        assert_eq!(sd.value(0.0).unwrap(), 0.0);
        assert!(matches!(sd.value(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_parameters() {
        assert!(SpectralDensity::new(0.0, Cutoff::Abrupt, 1.0, 1.0).is_err());
        assert!(SpectralDensity::new(1.0, Cutoff::Abrupt, -1.0, 1.0).is_err());
        assert!(SpectralDensity::new(1.0, Cutoff::Abrupt, 1.0, -1.0).is_err());
        assert!(SpectralDensity::new(1.0, Cutoff::Abrupt, 1.0, 0.0).is_ok());
    }

    #[test]
    fn exact_weight_limits() {
        let sd = SpectralDensity::ohmic(Cutoff::Exponential, 1e3, 1.0).unwrap();
        let ex = ThermalRegime::Exact { omega_th: 5.0 };
        let ht = ThermalRegime::HighTemperature { omega_th: 5.0 };
        let lt = ThermalRegime::LowTemperature;
        let w = 1e-4;
        assert!((spectral_weight(&sd, &ex, w) / spectral_weight(&sd, &ht, w) - 1.0).abs() < 1e-8);
        let w = 500.0;
        assert!((spectral_weight(&sd, &ex, w) / spectral_weight(&sd, &lt, w) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_parses() {
        assert_eq!("drude-lorentz".parse::<Cutoff>().unwrap(), Cutoff::DrudeLorentz);
        assert_eq!("EXP".parse::<Cutoff>().unwrap(), Cutoff::Exponential);
        assert!("sharp".parse::<Cutoff>().is_err());
    }
}
