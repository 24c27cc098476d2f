use std::f64::consts::PI;

use crate::error::{Error, Result};

const G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos, g = 7, with reflection).
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma(NaN)".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(format!("gamma has a pole at {x}")));
    }
    if x > 171.62 {
        return Err(Error::Range(format!("gamma({x}) overflows")));
    }
    if x == x.floor() && x <= 30.0 {
        let mut f = 1.0;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    let v = if x < 0.5 {
        let s = (PI * x).sin();
        PI / (s * lanczos(1.0 - x))
    } else {
        lanczos(x)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("gamma({x}) out of range")))
    }
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    // Split the power to delay overflow for large x.
    let p = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * p * (p * (-t).exp()) * a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer() {
        let g = gamma(0.5).unwrap();
        assert!((g * g - PI).abs() < 1e-12);
        assert!((gamma(1.5).unwrap() - 0.5 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn integers_are_factorials() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(6.0).unwrap(), 120.0);
    }

    #[test]
    fn poles() {
        assert!(matches!(gamma(0.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(-3.0), Err(Error::Pole(_))));
    }

    #[test]
    fn overflow() {
        assert!(matches!(gamma(200.0), Err(Error::Range(_))));
    }

    #[test]
    fn negative_non_integer() {
        // Gamma(-1/2) = -2 sqrt(pi)
        assert!((gamma(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }
}
