use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbm_core::decoherence::{curve, default_grid, exponents, log_grid, CurveMethod, Separation};
use qbm_core::{Cutoff, SpectralDensity, SystemParams, ThermalRegime};

fn sep() -> Separation {
    Separation::new(1.0, 1.0).unwrap()
}

#[test]
fn uncoupled_bath_keeps_full_coherence() {
    let sys = SystemParams::new(10.0, 1.0, 0.01);
    let grid = log_grid(1e-4, 1.0, 25);
    for cut in Cutoff::ALL {
        let sd = SpectralDensity::ohmic(cut, 1e3, 0.0).unwrap();
        for method in [CurveMethod::Quadrature, CurveMethod::TimeDomain, CurveMethod::ClosedFormWhereValid] {
            let c = curve(&sys, &sd, &ThermalRegime::LowTemperature, &sep(), &grid, method).unwrap();
            assert!(c.magnitudes().iter().all(|&m| m == 1.0), "{cut:?} {method:?}");
        }
    }
}

#[test]
fn high_temperature_curves_do_not_increase() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let sys = SystemParams::new(rng.gen_range(0.5..10.0), rng.gen_range(0.0..10.0), rng.gen_range(1.0..200.0));
        let cut = Cutoff::ALL[rng.gen_range(0..3)];
        let sd = SpectralDensity::ohmic(cut, rng.gen_range(50.0..500.0), 1.0).unwrap();
        let regime = ThermalRegime::HighTemperature { omega_th: sys.omega_th };
        let grid = log_grid(1e-4, 0.5, 30);
        let c = curve(&sys, &sd, &regime, &Separation::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap(), &grid, CurveMethod::Quadrature)
            .unwrap();
        assert_eq!(c.failures(), 0);
        for w in c.points.windows(2) {
            assert!(w[1].log_magnitude <= w[0].log_magnitude + 1e-12, "{cut:?} t={}: {} > {}", w[1].t, w[1].magnitude, w[0].magnitude);
        }
    }
}

#[test]
fn cutoff_models_converge_for_large_cutoff() {
    // High temperature only: at low temperature log c depends on the cutoff
    // shape by an O(1) constant for every Lambda.
    let lam = 1e6;
    let grid = default_grid(lam);
    {
        let regime = ThermalRegime::HighTemperature { omega_th: 1e3 };
        let sys = SystemParams::new(10.0, 1.0, 1e3);
        let curves: Vec<Vec<f64>> = Cutoff::ALL
            .iter()
            .map(|&cut| {
                let sd = SpectralDensity::ohmic(cut, lam, 1.0).unwrap();
                curve(&sys, &sd, &regime, &sep(), &grid, CurveMethod::Quadrature).unwrap().magnitudes()
            })
            .collect();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let worst = curves[a].iter().zip(&curves[b]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst < 0.02, "{} {a} vs {b}: {worst}", regime.name());
        }
    }
}

#[test]
fn curve_routes_agree() {
    let sys = SystemParams::new(5.0, 2.0, 20.0);
    let grid = log_grid(1e-3, 0.8, 12);
    for (cut, regime) in [
        (Cutoff::Exponential, ThermalRegime::HighTemperature { omega_th: 20.0 }),
        (Cutoff::Abrupt, ThermalRegime::HighTemperature { omega_th: 20.0 }),
        (Cutoff::Exponential, ThermalRegime::LowTemperature),
    ] {
        let sd = SpectralDensity::ohmic(cut, 200.0, 1.0).unwrap();
        let q = curve(&sys, &sd, &regime, &sep(), &grid, CurveMethod::Quadrature).unwrap();
        for method in [CurveMethod::TimeDomain, CurveMethod::ClosedFormWhereValid] {
            let other = curve(&sys, &sd, &regime, &sep(), &grid, method).unwrap();
            for (a, b) in q.points.iter().zip(&other.points) {
                assert!(!b.flags.fallback, "{cut:?} {method:?} fell back at t={}", b.t);
                let d = (a.log_magnitude - b.log_magnitude).abs();
                assert!(d <= 1e-6 * a.log_magnitude.abs() + 1e-12, "{cut:?} {method:?} t={}: {} vs {}", a.t, a.log_magnitude, b.log_magnitude);
            }
        }
    }
}

#[test]
fn closed_curve_falls_back_where_no_form_exists() {
    let sys = SystemParams::new(5.0, 2.0, 0.01);
    let sd = SpectralDensity::ohmic(Cutoff::DrudeLorentz, 100.0, 1.0).unwrap();
    let grid = [0.01, 0.1];
    let c = curve(&sys, &sd, &ThermalRegime::LowTemperature, &sep(), &grid, CurveMethod::ClosedFormWhereValid).unwrap();
    assert!(c.points.iter().all(|p| p.flags.fallback && p.flags.error.is_none()));
    assert_eq!(c.points[0].flags.label(), "fallback");
}

#[test]
fn invalid_grids_are_rejected() {
    let sys = SystemParams::new(5.0, 2.0, 0.01);
    let sd = SpectralDensity::ohmic(Cutoff::Exponential, 100.0, 1.0).unwrap();
    let r = ThermalRegime::LowTemperature;
    assert!(curve(&sys, &sd, &r, &sep(), &[0.2, 0.1], CurveMethod::Quadrature).is_err());
    assert!(curve(&sys, &sd, &r, &sep(), &[-1.0, 0.1], CurveMethod::Quadrature).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exchange_and_reflection_symmetry(dx in -3.0f64..3.0, dy in -3.0f64..3.0, t in 0.01f64..0.5) {
        let sys = SystemParams::new(4.0, 1.5, 10.0);
        let sd = SpectralDensity::ohmic(Cutoff::Exponential, 80.0, 1.0).unwrap();
        let r = ThermalRegime::HighTemperature { omega_th: 10.0 };
        let a = exponents(&sys, &sd, &r, &Separation::new(dx, dy).unwrap(), t).unwrap();
        let s = exponents(&sys, &sd, &r, &Separation::new(dy, dx).unwrap(), t).unwrap();
        let f = exponents(&sys, &sd, &r, &Separation::new(dx, -dy).unwrap(), t).unwrap();
        prop_assert_eq!(a.d1, s.d1);
        prop_assert_eq!(a.d2, s.d2);
        prop_assert_eq!(a.d1, f.d1);
        prop_assert_eq!(a.d2, -f.d2);
    }

    #[test]
    fn coherence_is_lost_not_gained_at_high_temperature(t in 1e-3f64..0.5) {
        let sys = SystemParams::new(3.0, 1.0, 50.0);
        let sd = SpectralDensity::ohmic(Cutoff::DrudeLorentz, 100.0, 1.0).unwrap();
        let r = ThermalRegime::HighTemperature { omega_th: 50.0 };
        let d = exponents(&sys, &sd, &r, &sep(), t).unwrap();
        prop_assert!(d.total().re > 0.0);
    }
}
