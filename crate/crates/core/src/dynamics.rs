//! Closed-system quantities of the charged oscillator: mode frequencies,
//! the weights F1..F4 and the Heisenberg transfer matrix.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::bath::{integrate_spectrum, spectral_weight, Cutoff, SpectralDensity, ThermalRegime};
use crate::elementary::c_int;
use crate::error::{Error, Result};
use crate::quad::QuadOptions;

/// Which frequency normalisation to use for A', B'.
///
/// `Printed` is A' = sqrt(2w0^2 + wc^2 + wc R)/2; all closed forms are
/// written in it. `Physical` multiplies A', B' and G by sqrt(2), giving
/// the true normal-mode frequencies of x'' = -w0^2 x + wc y'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConvention {
    #[default]
    Printed,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub m: f64,
    pub omega0: f64,
    pub omega_c: f64,
    pub gamma: f64,
    pub hbar: f64,
    pub omega_th: f64,
    #[serde(default)]
    pub convention: ModeConvention,
}

impl SystemParams {
    /// Code units m = gamma = hbar = 1.
    pub fn new(omega0: f64, omega_c: f64, omega_th: f64) -> Self {
        SystemParams { m: 1.0, omega0, omega_c, gamma: 1.0, hbar: 1.0, omega_th, convention: ModeConvention::Printed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParams(format!("{what} = {v}")));
        if !(self.m > 0.0) || !self.m.is_finite() {
            return bad("m", self.m);
        }
        if !(self.omega0 >= 0.0) || !self.omega0.is_finite() {
            return bad("omega0", self.omega0);
        }
        if !(self.omega_c >= 0.0) || !self.omega_c.is_finite() {
            return bad("omega_c", self.omega_c);
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return bad("hbar", self.hbar);
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return bad("gamma", self.gamma);
        }
        if !(self.omega_th >= 0.0) {
            return bad("omega_th", self.omega_th);
        }
        if self.omega0 == 0.0 && self.omega_c == 0.0 {
            return Err(Error::InvalidParams("omega0 and omega_c both vanish: mode constants degenerate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeConstants {
    pub a_prime: f64,
    pub b_prime: f64,
    pub m_coef: f64,
    pub p_coef: f64,
    pub g_coef: f64,
}

impl ModeConstants {
    /// Trap and cyclotron frequencies of the equations of motion solved
    /// by [`heisenberg_transfer`]: (sqrt(A'B'), A' - B').
    pub fn eom_frequencies(&self) -> (f64, f64) {
        ((self.a_prime * self.b_prime).sqrt(), self.a_prime - self.b_prime)
    }
}

pub fn mode_constants(sys: &SystemParams) -> Result<ModeConstants> {
    sys.validate()?;
    let (w0, wc) = (sys.omega0, sys.omega_c);
    let r = (4.0 * w0 * w0 + wc * wc).sqrt();
    let a = (2.0 * w0 * w0 + wc * wc + wc * r).sqrt() / 2.0;
    // B' = w0^2 / (2A') avoids the cancellation in 2w0^2 + wc^2 - wc R.
    let b = w0 * w0 / (2.0 * a);
    let scale = match sys.convention {
        ModeConvention::Printed => 1.0,
        ModeConvention::Physical => SQRT_2,
    };
    Ok(ModeConstants {
        a_prime: scale * a,
        b_prime: scale * b,
        m_coef: (r - wc) / (2.0 * r),
        p_coef: (r + wc) / (2.0 * r),
        g_coef: scale * SQRT_2 * w0 * w0 / r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FWeight {
    F1,
    F2,
    F3,
    F4,
}

/// sin(a tau)/a, equal to tau at a = 0.
fn sin_over(a: f64, tau: f64) -> f64 {
    if a == 0.0 {
        tau
    } else {
        (a * tau).sin() / a
    }
}

/// d/da [sin(a tau)/a]
fn sin_over_da(a: f64, tau: f64) -> f64 {
    let x = a * tau;
    if x.abs() < 1e-3 {
        -a * tau * tau * tau / 3.0
    } else {
        (x * x.cos() - x.sin()) / (a * a)
    }
}

fn f2_bracket(mc: &ModeConstants, tau: f64) -> f64 {
    let (a, b) = (mc.a_prime, mc.b_prime);
    if (a - b).abs() < 1e-6 * a {
        (b - a) * sin_over_da(0.5 * (a + b), tau)
    } else {
        sin_over(b, tau) - sin_over(a, tau)
    }
}

pub fn f_weight(sys: &SystemParams, tau: f64, which: FWeight) -> Result<f64> {
    let mc = mode_constants(sys)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    Ok(f_weight_with(sys, &mc, tau, which))
}

pub(crate) fn f_weight_with(sys: &SystemParams, mc: &ModeConstants, tau: f64, which: FWeight) -> f64 {
    let (a, b) = (mc.a_prime, mc.b_prime);
    let wc = sys.omega_c;
    let r = (4.0 * sys.omega0.powi(2) + wc * wc).sqrt();
    match which {
        FWeight::F1 => mc.m_coef * (a * tau).cos() + mc.p_coef * (b * tau).cos(),
        FWeight::F2 => mc.g_coef * f2_bracket(mc, tau),
        FWeight::F3 => -((wc + r) * sin_over(a, tau) + (r - wc) * sin_over(b, tau)) / (sys.m * SQRT_2 * r),
        FWeight::F4 => 2.0 * wc * ((a * tau).cos() + (b * tau).cos()) / (sys.m * r),
    }
}

/// Row-major 4x4 matrix mapping (X, Y, Vx, Vy) to (x, y, x', y') at tau.
pub type Transfer = [[f64; 4]; 4];

pub fn heisenberg_transfer(sys: &SystemParams, tau: f64) -> Result<Transfer> {
    let mc = mode_constants(sys)?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau = {tau} must be non-negative")));
    }
    let (a, b) = (mc.a_prime, mc.b_prime);
    let re = a + b;
    let (m, p) = (b / re, a / re);
    let (sa, ca) = (a * tau).sin_cos();
    let (sb, cb) = (b * tau).sin_cos();
    Ok([
        [m * ca + p * cb, m * sa - p * sb, (sb + sa) / re, (cb - ca) / re],
        [p * sb - m * sa, p * cb + m * ca, (ca - cb) / re, (sb + sa) / re],
        [-m * a * sa - p * b * sb, m * a * ca - p * b * cb, (b * cb + a * ca) / re, (a * sa - b * sb) / re],
        [p * b * cb - m * a * ca, -p * b * sb - m * a * sa, (b * sb - a * sa) / re, (b * cb + a * ca) / re],
    ])
}

/// Largest residual of the equations of motion x'' = -w0^2 x + wc y',
/// y'' = -w0^2 y - wc x' (with the frequencies of
/// [`ModeConstants::eom_frequencies`]) over the four columns of T(tau),
/// by central differences. Scaled by 1 + A'^2.
pub fn eom_residual(sys: &SystemParams, tau: f64) -> Result<f64> {
    let mc = mode_constants(sys)?;
    let (w0, wc) = mc.eom_frequencies();
    let h = 1e-4 / mc.a_prime.max(1.0);
    let t0 = heisenberg_transfer(sys, tau)?;
    let tp = heisenberg_transfer(sys, tau + h)?;
    let lo = (tau - h).max(0.0);
    let tm = heisenberg_transfer(sys, lo)?;
    let span = tau + h - lo;
    let scale = 1.0 + mc.a_prime * mc.a_prime;
    let mut worst: f64 = 0.0;
    for col in 0..4 {
        let d = |row: usize| (tp[row][col] - tm[row][col]) / span;
        let (x, y, vx, vy) = (t0[0][col], t0[1][col], t0[2][col], t0[3][col]);
        worst = worst
            .max((d(0) - vx).abs())
            .max((d(1) - vy).abs())
            .max((d(2) - (-w0 * w0 * x + wc * vy)).abs())
            .max((d(3) - (-w0 * w0 * y - wc * vx)).abs());
    }
    Ok(worst / scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyShift {
    pub value: f64,
    pub error: f64,
    /// |shift(2 t_max) - shift(t_max)|
    pub tail: f64,
}

fn shift_truncated(sys: &SystemParams, mc: &ModeConstants, sd: &SpectralDensity, t: f64) -> Result<(f64, f64)> {
    // int_0^T sin(w tau) cos(a tau) dtau = [C(w + a) + C(w - a)]/2
    let terms = [(mc.m_coef, mc.a_prime), (mc.p_coef, mc.b_prime)];
    let regime = ThermalRegime::LowTemperature;
    let full = |w: f64| {
        let j = spectral_weight(sd, &regime, w);
        [j * terms.iter().map(|&(c, a)| c * 0.5 * (c_int(w + a, t) + c_int(w - a, t))).sum::<f64>()]
    };
    let smooth = |w: f64| {
        let j = spectral_weight(sd, &regime, w);
        [j * terms.iter().map(|&(c, a)| c * 0.5 * (1.0 / (w + a) + 1.0 / (w - a))).sum::<f64>()]
    };
    let osc = |w: f64| {
        let j = spectral_weight(sd, &regime, w);
        [-j * terms.iter().map(|&(c, a)| c * 0.5 * (((w + a) * t).cos() / (w + a) + ((w - a) * t).cos() / (w - a))).sum::<f64>()]
    };
    // int J(w)/w dw is of order J(Lambda)
    let scale = spectral_weight(sd, &regime, sd.lambda);
    let opts = QuadOptions { abs_tol: 1e-12 * scale.abs().max(f64::MIN_POSITIVE), ..QuadOptions::default() };
    let e = integrate_spectrum(sd, &regime, t, &[mc.a_prime, mc.b_prime], &full, &smooth, &osc, &opts).ok("frequency shift")?;
    let k = -2.0 / sys.m;
    Ok((k * e.value[0], k.abs() * e.error[0]))
}

/// Frequency shift -(2/m) int_0^{t_max} eta(tau) F1(tau) dtau.
///
/// Evaluated in the frequency domain with the tau integral done
/// analytically; the truncation tail is estimated by doubling t_max.
pub fn frequency_shift(sys: &SystemParams, sd: &SpectralDensity, t_max: f64) -> Result<FrequencyShift> {
    let mc = mode_constants(sys)?;
    sd.validate()?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max = {t_max} must be positive")));
    }
    if sd.gamma == 0.0 {
        return Ok(FrequencyShift { value: 0.0, error: 0.0, tail: 0.0 });
    }
    if sd.cutoff == Cutoff::DrudeLorentz && sd.s >= 2.0 {
        return Err(Error::Domain("shift integrand does not decay for s >= 2 with a Drude-Lorentz cutoff".into()));
    }
    let (v, e) = shift_truncated(sys, &mc, sd, t_max)?;
    let (v2, _) = shift_truncated(sys, &mc, sd, 2.0 * t_max)?;
    Ok(FrequencyShift { value: v, error: e, tail: (v2 - v).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_limit() {
        let mc = mode_constants(&SystemParams::new(1.0, 0.0, 1.0)).unwrap();
        let h = 1.0 / SQRT_2;
        assert!((mc.a_prime - h).abs() < 1e-15 && (mc.b_prime - h).abs() < 1e-15);
        assert_eq!((mc.m_coef, mc.p_coef), (0.5, 0.5));
        assert!((mc.g_coef - h).abs() < 1e-15);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(mode_constants(&SystemParams::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn printed_identities() {
        let mc = mode_constants(&SystemParams::new(10.0, 1.0, 1.0)).unwrap();
        let (a, b) = (mc.a_prime, mc.b_prime);
        assert!((mc.m_coef - b / (a + b)).abs() < 1e-15);
        assert!((mc.g_coef / b - 2.0 * mc.p_coef).abs() < 1e-13);
        assert!((mc.g_coef / a - 2.0 * mc.m_coef).abs() < 1e-13);
    }

    #[test]
    fn f2_small_splitting_is_continuous() {
        let sys = SystemParams::new(2.0, 1e-8, 1.0);
        for &tau in &[0.0, 0.3, 5.0] {
            assert!(f_weight(&sys, tau, FWeight::F2).unwrap().abs() < 1e-6);
        }
        let a = f_weight(&SystemParams::new(2.0, 3e-6, 1.0), 0.7, FWeight::F2).unwrap();
        let b = f_weight(&SystemParams::new(2.0, 3.1e-6, 1.0), 0.7, FWeight::F2).unwrap();
        assert!((a / b - 3.0 / 3.1).abs() < 1e-6);
    }

    #[test]
    fn free_particle() {
        let sys = SystemParams::new(0.0, 2.0, 1.0);
        let mc = mode_constants(&sys).unwrap();
        assert_eq!(mc.b_prime, 0.0);
        assert_eq!(f_weight(&sys, 1.3, FWeight::F2).unwrap(), 0.0);
        let t = heisenberg_transfer(&sys, 0.4).unwrap();
        assert!(t.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn zero_coupling_shift() {
        let sys = SystemParams::new(1.0, 0.0, 1.0);
        let sd = SpectralDensity::ohmic(Cutoff::Exponential, 10.0, 0.0).unwrap();
        assert_eq!(frequency_shift(&sys, &sd, 5.0).unwrap().value, 0.0);
    }
}
