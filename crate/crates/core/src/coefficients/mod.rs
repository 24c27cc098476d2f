//! Decoherence coefficients lambda_1(t), lambda_2(t) and their time
//! integrals.
//!
//! Three routes:
//! - [`lambda_quadrature`]: frequency domain. The tau integral of
//!   F(tau) cos(w tau) is elementary, so one adaptive integral over w gives
//!   lambda and int_0^t lambda together. This is the default.
//! - [`lambda_time_domain`]: nested quadrature, nu(tau) by quadrature and
//!   then int_0^t nu F. Kept as an independent oracle.
//! - closed forms, see [`closed`].

pub mod closed;
mod spectral;
mod time_domain;

pub use closed::{
    g_function, lambda1_closed, lambda1_variant, lambda2_closed, lambda2_variant, lambda_closed, lambda_variant,
    ClosedVariant, GContext, GFunction,
};
pub use spectral::{lambda_quadrature, lambda_with_integrals, SpectralSample};
pub use time_domain::{lambda_printed_kernel, lambda_time_domain, SameKernelLambda, TimeDomainIntegrator};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMethod {
    Quadrature,
    TimeDomain,
    ClosedForm,
}

impl LambdaMethod {
    pub fn name(self) -> &'static str {
        match self {
            LambdaMethod::Quadrature => "quadrature",
            LambdaMethod::TimeDomain => "time_domain",
            LambdaMethod::ClosedForm => "closed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub t: f64,
    pub method: LambdaMethod,
    pub est_error: f64,
}

impl LambdaPair {
    pub(crate) fn zero(t: f64, method: LambdaMethod) -> Self {
        LambdaPair { lambda1: Complex64::new(0.0, 0.0), lambda2: Complex64::new(0.0, 0.0), t, method, est_error: 0.0 }
    }
}
