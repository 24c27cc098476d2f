//! Special functions: complex sine/cosine integrals, gamma, the error
//! function family, exponential integrals, Lerch transcendent and the
//! generalized hypergeometric series.

mod erf;
mod expint;
mod gamma;
mod lerch;
mod pfq;
mod sici;

pub use erf::{dawson, erf, erfc, erfcx, erfi};
pub use expint::{e1, ei, exp_e1, exp_neg_ei};
pub use gamma::gamma;
pub use lerch::lerch_phi;
pub use pfq::{hypergeometric_pfq, PfqParams, PfqValue};
pub use sici::{ci, cin, shi, si, si_ci, si_ci_with, SiCiMethod};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
