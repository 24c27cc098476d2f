use std::f64::consts::PI;

use super::{large_w_exponent, small_w_exponent, spectral_weight, Cutoff, SpectralDensity, ThermalRegime};
use crate::error::{Error, Result};
use crate::quad::{self, Estimate, QuadOptions};

/// Exponential-cutoff integrals are truncated here (e^{-80} ~ 1e-35).
const EXP_TRUNCATION: f64 = 80.0;
/// Drude-Lorentz finite part extends to this many cutoff scales.
const DL_FINITE: f64 = 50.0;
const MAX_PANELS: f64 = 2.0e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
}

/// Integrate `full(w)` over the bath spectrum, w in (0, inf).
///
/// `full` must already include the spectral weight. `freq` is the
/// oscillation frequency of the integrand in w (0 if none). For the
/// Drude-Lorentz tail the integrand is split into a non-oscillating part
/// `smooth` and an oscillating part `osc` with `smooth + osc = full`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_spectrum<const N: usize>(
    sd: &SpectralDensity,
    regime: &ThermalRegime,
    freq: f64,
    features: &[f64],
    full: &(dyn Fn(f64) -> [f64; N] + Sync),
    smooth: &(dyn Fn(f64) -> [f64; N] + Sync),
    osc: &(dyn Fn(f64) -> [f64; N] + Sync),
    opts: &QuadOptions,
) -> Estimate<N> {
    let lam = sd.lambda;
    let omega = regime.omega_th();
    let top_feature = features.iter().copied().fold(0.0f64, f64::max);
    let end = match sd.cutoff {
        Cutoff::Abrupt => lam,
        Cutoff::Exponential => EXP_TRUNCATION * lam + 4.0 * top_feature,
        Cutoff::DrudeLorentz => {
            let mut e = DL_FINITE * lam;
            if let Some(o) = omega {
                e = e.max(DL_FINITE * o);
            }
            if freq > 0.0 {
                e = e.max(DL_FINITE / freq);
            }
            e.max(4.0 * top_feature)
        }
    };

    let mut breaks: Vec<f64> = features.to_vec();
    breaks.push(lam);
    if let (ThermalRegime::Exact { .. }, Some(o)) = (regime, omega) {
        breaks.push(o);
        breaks.push(10.0 * o);
    }
    let width = if freq > 0.0 { (2.0 * PI / freq).max(end / MAX_PANELS) } else { f64::INFINITY };
    let mut pts = quad::panels(0.0, end, width, &breaks);
    if pts.len() < 3 {
        // Keep a separate first panel for the w -> 0 treatment.
        pts = quad::panels(0.0, end, end / 4.0, &breaks);
    }

    let p = small_w_exponent(sd, regime);
    let mut parts = Vec::with_capacity(4);
    if p < 0.0 {
        parts.push(quad::integrate_endpoint_singular(|w| full(w), 0.0, pts[1], p, opts));
        parts.push(quad::integrate(|w| full(w), &pts[1..], opts));
    } else {
        parts.push(quad::integrate(|w| full(w), &pts, opts));
    }

    if sd.cutoff == Cutoff::DrudeLorentz {
        if freq > 0.0 {
            parts.push(quad::integrate_to_infinity(|w| smooth(w), end, opts));
            parts.push(quad::integrate_oscillatory_tail(|w| osc(w), end, PI / freq, opts));
        } else {
            parts.push(quad::integrate_to_infinity(|w| full(w), end, opts));
        }
    }
    quad::combine(&parts)
}

fn kernel_scale(sd: &SpectralDensity, regime: &ThermalRegime, tau: f64) -> f64 {
    let w = if tau > 0.0 { sd.lambda.min(1.0 / tau) } else { sd.lambda };
    (spectral_weight(sd, regime, w) * w).abs().max(f64::MIN_POSITIVE)
}

fn kernel_opts(sd: &SpectralDensity, regime: &ThermalRegime, tau: f64) -> QuadOptions {
    let base = QuadOptions::default();
    QuadOptions { abs_tol: base.abs_tol * kernel_scale(sd, regime, tau), ..base }
}

/// Noise kernel nu(tau) = int_0^inf J(w) c(w) cos(w tau) dw by quadrature.
pub fn noise_kernel_quadrature(sd: &SpectralDensity, regime: &ThermalRegime, tau: f64) -> Result<KernelValue> {
    sd.validate()?;
    regime.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    if sd.gamma == 0.0 {
        return Ok(KernelValue { value: 0.0, error: 0.0 });
    }
    if tau == 0.0 && sd.cutoff == Cutoff::DrudeLorentz && large_w_exponent(sd, regime) >= -1.0 {
        return Err(Error::Domain("nu(0) diverges for this Drude-Lorentz bath".into()));
    }
    let f = |w: f64| [spectral_weight(sd, regime, w) * (w * tau).cos()];
    let zero = |_: f64| [0.0];
    let e = integrate_spectrum(sd, regime, tau, &[], &f, &zero, &f, &kernel_opts(sd, regime, tau)).ok("noise kernel")?;
    Ok(KernelValue { value: e.value[0], error: e.error[0] })
}

/// Dissipation kernel eta(tau) = int_0^inf J(w) sin(w tau) dw by quadrature.
pub fn dissipation_kernel_quadrature(sd: &SpectralDensity, tau: f64) -> Result<KernelValue> {
    sd.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    if tau == 0.0 || sd.gamma == 0.0 {
        return Ok(KernelValue { value: 0.0, error: 0.0 });
    }
    let regime = ThermalRegime::LowTemperature;
    let f = |w: f64| [spectral_weight(sd, &regime, w) * (w * tau).sin()];
    let zero = |_: f64| [0.0];
    let e = integrate_spectrum(sd, &regime, tau, &[], &f, &zero, &f, &kernel_opts(sd, &regime, tau)).ok("dissipation kernel")?;
    Ok(KernelValue { value: e.value[0], error: e.error[0] })
}
