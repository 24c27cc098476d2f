//! Shared parameter sets for the criterion benches.

use qbm_core::{Cutoff, SpectralDensity, SystemParams, ThermalRegime};

/// omega0 = 10, omega_c = 1, Lambda = 1e3, Ohmic.
pub fn system() -> SystemParams {
    SystemParams::new(10.0, 1.0, 0.01)
}

pub fn bath(cutoff: Cutoff, s: f64) -> SpectralDensity {
    SpectralDensity::new(s, cutoff, 1e3, 1.0).expect("valid bath")
}

pub fn regimes() -> [(&'static str, ThermalRegime); 3] {
    [
        ("low", ThermalRegime::LowTemperature),
        ("high", ThermalRegime::HighTemperature { omega_th: 1e3 }),
        ("exact", ThermalRegime::Exact { omega_th: 0.01 }),
    ]
}
