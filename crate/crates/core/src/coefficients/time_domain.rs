use std::cell::RefCell;

use num_complex::Complex64;

use super::{LambdaMethod, LambdaPair};
use crate::bath::{noise_kernel_quadrature, Cutoff, SpectralDensity, ThermalRegime};
use crate::dynamics::{f_weight_with, mode_constants, FWeight, ModeConstants, SystemParams};
use crate::error::{Error, Result};
use crate::quad::{self, Estimate, QuadOptions};

const REL_TOL: f64 = 1e-7;

/// Cumulative tau-domain integration along an increasing time grid.
///
/// Keeps I0 = int_0^t nu F and I1 = int_0^t tau nu F so that
/// int_0^t lambda = t I0 - I1 never needs a second pass from 0.
pub struct TimeDomainIntegrator {
    sys: SystemParams,
    mc: ModeConstants,
    sd: SpectralDensity,
    regime: ThermalRegime,
    t: f64,
    i0: [f64; 2],
    i1: [f64; 2],
    err: f64,
}

impl TimeDomainIntegrator {
    pub fn new(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime) -> Result<Self> {
        let mc = mode_constants(sys)?;
        sd.validate()?;
        regime.validate()?;
        Ok(TimeDomainIntegrator { sys: *sys, mc, sd: *sd, regime: *regime, t: 0.0, i0: [0.0; 2], i1: [0.0; 2], err: 0.0 })
    }

    fn singular_at_zero(&self) -> bool {
        self.sd.cutoff == Cutoff::DrudeLorentz
            && crate::bath::large_w_exponent(&self.sd, &self.regime) >= -1.0
    }

    fn integrand<'a>(&'a self, failure: &'a RefCell<Option<Error>>) -> impl Fn(f64) -> [f64; 4] + 'a {
        move |tau: f64| match noise_kernel_quadrature(&self.sd, &self.regime, tau) {
            Ok(nu) => {
                let f1 = f_weight_with(&self.sys, &self.mc, tau, FWeight::F1);
                let f2 = f_weight_with(&self.sys, &self.mc, tau, FWeight::F2);
                let v = nu.value;
                [v * f1, v * f2, tau * v * f1, tau * v * f2]
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                [0.0; 4]
            }
        }
    }

    fn segment(&self, a: f64, b: f64) -> Result<Estimate<4>> {
        let failure = RefCell::new(None);
        let f = self.integrand(&failure);
        let top = self.sd.lambda.max(self.mc.a_prime);
        let width = 2.0 * std::f64::consts::PI / top;
        let scale = noise_scale(&self.sd, &self.regime);
        let opts = QuadOptions { abs_tol: 1e-12 * scale * (b - a), rel_tol: REL_TOL, ..QuadOptions::default() };
        let est = if a == 0.0 && self.singular_at_zero() {
            // nu diverges like tau^{1-s} (or log) at tau = 0
            let first = (b - a).min(width);
            let mut parts = vec![quad::integrate_endpoint_singular(&f, 0.0, first, -0.5, &opts)];
            if first < b {
                parts.push(quad::integrate(&f, &quad::panels(first, b, width, &[]), &opts));
            }
            quad::combine(&parts)
        } else {
            quad::integrate(&f, &quad::panels(a, b, width, &[]), &opts)
        };
        drop(f);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        est.ok("tau-domain lambda")
    }

    /// Advance to `t` and return (lambda, int_0^t lambda_1, int_0^t lambda_2).
    pub fn advance(&mut self, t: f64) -> Result<(LambdaPair, f64, f64)> {
        if !(t >= self.t) || !t.is_finite() {
            return Err(Error::Domain(format!("grid must be increasing: {t} after {}", self.t)));
        }
        if t > self.t && self.sd.gamma != 0.0 {
            let e = self.segment(self.t, t)?;
            self.i0[0] += e.value[0];
            self.i0[1] += e.value[1];
            self.i1[0] += e.value[2];
            self.i1[1] += e.value[3];
            self.err += e.error[0].max(e.error[1]);
        }
        self.t = t;
        let h = self.sys.hbar;
        let pair = LambdaPair {
            lambda1: Complex64::new(self.i0[0] / h, 0.0),
            lambda2: Complex64::new(self.i0[1] / h, 0.0),
            t,
            method: LambdaMethod::TimeDomain,
            est_error: self.err / h,
        };
        Ok((pair, (t * self.i0[0] - self.i1[0]) / h, (t * self.i0[1] - self.i1[1]) / h))
    }
}

fn noise_scale(sd: &SpectralDensity, regime: &ThermalRegime) -> f64 {
    let w = sd.lambda;
    (crate::bath::spectral_weight(sd, regime, w) * w).abs().max(f64::MIN_POSITIVE)
}

/// lambda_1,2(t) by nested quadrature in the time domain.
pub fn lambda_time_domain(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<LambdaPair> {
    let mut it = TimeDomainIntegrator::new(sys, sd, regime)?;
    Ok(it.advance(t)?.0)
}

/// lambda_1,2 and their time integrals for the *printed* kernel, by
/// direct tau quadrature. Validates closed-form algebra independently of
/// whether the printed kernel is physical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SameKernelLambda {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub int_lambda1: Complex64,
    pub int_lambda2: Complex64,
}

pub fn lambda_printed_kernel(sys: &SystemParams, sd: &SpectralDensity, regime: &ThermalRegime, t: f64) -> Result<SameKernelLambda> {
    let mc = mode_constants(sys)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be non-negative")));
    }
    let omega = Some(sys.omega_th).filter(|&o| o > 0.0);
    let failure = RefCell::new(None);
    let f = |tau: f64| match crate::bath::noise_kernel_printed(sd, regime, tau, omega) {
        Ok(k) => {
            let k = k.value;
            let f1 = f_weight_with(sys, &mc, tau, FWeight::F1);
            let f2 = f_weight_with(sys, &mc, tau, FWeight::F2);
            let r = t - tau;
            [k.re * f1, k.im * f1, k.re * f2, k.im * f2, r * k.re * f1, r * k.im * f1, r * k.re * f2, r * k.im * f2]
        }
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            [0.0; 8]
        }
    };
    let top = sd.lambda.max(mc.a_prime);
    let pts = quad::panels(0.0, t, 2.0 * std::f64::consts::PI / top, &[]);
    let e = quad::integrate(f, &pts, &QuadOptions::with_tol(1e-300, 1e-11));
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let v = e.ok("printed-kernel lambda")?.value;
    let h = sys.hbar;
    Ok(SameKernelLambda {
        lambda1: Complex64::new(v[0], v[1]) / h,
        lambda2: Complex64::new(v[2], v[3]) / h,
        int_lambda1: Complex64::new(v[4], v[5]) / h,
        int_lambda2: Complex64::new(v[6], v[7]) / h,
    })
}
