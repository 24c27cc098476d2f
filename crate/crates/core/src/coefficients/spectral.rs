use num_complex::Complex64;

use super::{LambdaMethod, LambdaPair};
use crate::bath::{integrate_spectrum, spectral_weight, SpectralDensity, ThermalRegime};
use crate::dynamics::{mode_constants, ModeConstants, SystemParams};
use crate::elementary::{c_int, cos_moments, q_int, s_int, u_int};
use crate::error::{Error, Result};
use crate::quad::QuadOptions;

/// lambda_1,2(t) together with int_0^t lambda_1,2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub lambda: LambdaPair,
    pub int_lambda1: f64,
    pub int_lambda2: f64,
    pub int_error: f64,
}

/// Terms kept in the small-A't expansion of F_2.
const SERIES_TERMS: usize = 8;
const MOMENTS: usize = 2 * SERIES_TERMS + 3;

/// Inner tau integrals for one mode frequency `a` at bath frequency `w`.
struct Inner {
    t: f64,
    terms: [(f64, f64); 2],
    g: f64,
    modes: [f64; 2],
    /// For A't <= 1/2: F_2 / G = sum_j c_j tau^{2j+1}, j >= 1. The
    /// direct form subtracts nearly equal terms there.
    series: Option<[f64; SERIES_TERMS]>,
}

impl Inner {
    fn new(mc: &ModeConstants, t: f64) -> Self {
        let g = if mc.b_prime > 0.0 { mc.g_coef } else { 0.0 };
        let (a, b) = (mc.a_prime, mc.b_prime);
        let series = (a * t <= 0.5).then(|| {
            // (-1)^j (b^{2j} - a^{2j}) / (2j+1)!, the difference factored
            // through b^2 - a^2
            let (a2, b2) = (a * a, b * b);
            let mut c = [0.0; SERIES_TERMS];
            let mut sum = 1.0;
            let mut fact = 6.0;
            let mut ap = 1.0;
            for (i, cj) in c.iter_mut().enumerate() {
                let j = i + 1;
                if j > 1 {
                    ap *= a2;
                    sum = sum * b2 + ap;
                    fact *= ((2 * j) * (2 * j + 1)) as f64;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *cj = sign * (b2 - a2) * sum / fact;
            }
            c
        });
        Inner { t, terms: [(mc.m_coef, a), (mc.p_coef, b)], g, modes: [b, a], series }
    }

    /// [K1, K2, L1/t, L2/t] where K are the lambda kernels and L their
    /// time integrals.
    fn full(&self, w: f64) -> [f64; 4] {
        let t = self.t;
        let mut k1 = 0.0;
        let mut l1 = 0.0;
        for &(c, a) in &self.terms {
            k1 += c * 0.5 * (s_int(w - a, t) + s_int(w + a, t));
            l1 += c * 0.5 * (q_int(w - a, t) + q_int(w + a, t));
        }
        let (mut k2, mut l2) = (0.0, 0.0);
        if let (true, Some(c)) = (self.g != 0.0, &self.series) {
            let m = cos_moments::<MOMENTS>(w * t);
            let mut tp = t * t * t * t;
            for (j, &cj) in c.iter().enumerate() {
                let n = 2 * j + 3;
                k2 += cj * tp * m[n];
                l2 += cj * tp * t * (m[n] - m[n + 1]);
                tp *= t * t;
            }
            k2 *= self.g;
            l2 *= self.g;
        } else if self.g != 0.0 {
            let k = |x: f64| 0.5 * (c_int(w + x, t) - c_int(w - x, t)) / x;
            let l = |x: f64| 0.5 * (u_int(w + x, t) - u_int(w - x, t)) / x;
            let [b, a] = self.modes;
            k2 = self.g * (k(b) - k(a));
            l2 = self.g * (l(b) - l(a));
        }
        [k1, k2, l1 / t, l2 / t]
    }

    /// Non-oscillating part for w above every mode frequency.
    fn smooth(&self, w: f64) -> [f64; 4] {
        let t = self.t;
        let mut l1 = 0.0;
        for &(c, a) in &self.terms {
            l1 += c * 0.5 * (1.0 / (w - a).powi(2) + 1.0 / (w + a).powi(2));
        }
        let (mut k2, mut l2) = (0.0, 0.0);
        if self.g != 0.0 {
            let [b, a] = self.modes;
            let d = (a - b) * (a + b) / ((w - a) * (w + a) * (w - b) * (w + b));
            k2 = self.g * d;
            l2 = self.g * t * d;
        }
        [0.0, k2, l1 / t, l2 / t]
    }

    fn osc(&self, w: f64) -> [f64; 4] {
        let t = self.t;
        let (mut k1, mut l1) = (0.0, 0.0);
        for &(c, a) in &self.terms {
            let (bm, bp) = (w - a, w + a);
            k1 += c * 0.5 * ((bm * t).sin() / bm + (bp * t).sin() / bp);
            l1 -= c * 0.5 * ((bm * t).cos() / (bm * bm) + (bp * t).cos() / (bp * bp));
        }
        let (mut k2, mut l2) = (0.0, 0.0);
        if self.g != 0.0 {
            let k = |x: f64| 0.5 * (((w - x) * t).cos() / (w - x) - ((w + x) * t).cos() / (w + x)) / x;
            let l = |x: f64| 0.5 * (((w - x) * t).sin() / (w - x).powi(2) - ((w + x) * t).sin() / (w + x).powi(2)) / x;
            let [b, a] = self.modes;
            k2 = self.g * (k(b) - k(a));
            l2 = self.g * (l(b) - l(a));
        }
        [k1, k2, l1 / t, l2 / t]
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} must be non-negative")))
    }
}

/// lambda and int_0^t lambda by the frequency-domain route.
pub fn lambda_with_integrals(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<SpectralSample> {
    let mc = mode_constants(sys)?;
    sd.validate()?;
    regime.validate()?;
    check_t(t)?;
    if t == 0.0 || sd.gamma == 0.0 {
        return Ok(SpectralSample {
            lambda: LambdaPair::zero(t, LambdaMethod::Quadrature),
            int_lambda1: 0.0,
            int_lambda2: 0.0,
            int_error: 0.0,
        });
    }
    let inner = Inner::new(&mc, t);
    let weighted = |f: [f64; 4], w: f64| {
        let wt = spectral_weight(sd, regime, w);
        if wt == 0.0 {
            [0.0; 4]
        } else {
            f.map(|v| wt * v)
        }
    };
    let full = |w: f64| weighted(inner.full(w), w);
    let smooth = |w: f64| weighted(inner.smooth(w), w);
    let osc = |w: f64| weighted(inner.osc(w), w);

    let ws = sd.lambda.min(1.0 / t);
    let scale = (spectral_weight(sd, regime, ws) * ws * t).abs().max(f64::MIN_POSITIVE);
    let opts = QuadOptions { abs_tol: 1e-13 * scale, ..QuadOptions::default() };
    let e = integrate_spectrum(sd, regime, t, &[mc.a_prime, mc.b_prime], &full, &smooth, &osc, &opts).ok("lambda")?;
    let h = sys.hbar;
    let lambda = LambdaPair {
        lambda1: Complex64::new(e.value[0] / h, 0.0),
        lambda2: Complex64::new(e.value[1] / h, 0.0),
        t,
        method: LambdaMethod::Quadrature,
        est_error: e.error[0].max(e.error[1]) / h,
    };
    Ok(SpectralSample {
        lambda,
        int_lambda1: e.value[2] * t / h,
        int_lambda2: e.value[3] * t / h,
        int_error: e.error[2].max(e.error[3]) * t / h,
    })
}

/// lambda_1,2(t) = (1/hbar) int_0^t nu(tau) F_1,2(tau) dtau, evaluated in
/// the frequency domain.
pub fn lambda_quadrature(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<LambdaPair> {
    Ok(lambda_with_integrals(sys, sd, regime, t)?.lambda)
}
