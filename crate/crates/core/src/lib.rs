//! Decoherence of a charged particle in a harmonic trap and a uniform
//! magnetic field, linearly coupled to a bosonic bath.
//!
//! Units: the library carries `m`, `hbar` and `gamma` explicitly.

pub mod bath;
pub mod coefficients;
pub mod decoherence;
pub mod dynamics;
mod elementary;
pub mod error;
pub mod findings;
pub mod quad;
pub mod specfun;
pub mod validation;

pub use bath::{Cutoff, SpectralDensity, ThermalRegime};
pub use dynamics::{ModeConstants, ModeConvention, SystemParams};
pub use error::{Error, Result};
