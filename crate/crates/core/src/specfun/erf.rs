use std::f64::consts::PI;

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// sum 2^n x^{2n+1} / (2n+1)!!, so that erf(x) = 2/sqrt(pi) e^{-x^2} S(x).
fn erf_series_sum(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 0..500 {
        term *= 2.0 * x2 / (2.0 * n as f64 + 3.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Laplace continued fraction: returns sqrt(pi) e^{x^2} erfc(x), x >= 1.
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let del = c * d;
        f *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    1.0 / f
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        FRAC_2_SQRT_PI * (-x * x).exp() * erf_series_sum(x)
    } else {
        x.signum() * (1.0 - erfc(ax))
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 1.0 {
        if x > -1.0 {
            1.0 - erf(x)
        } else {
            2.0 - erfc(-x)
        }
    } else if x > 27.3 {
        0.0
    } else {
        (-x * x).exp() * erfc_cf(x) / PI.sqrt()
    }
}

/// Scaled complementary error function e^{x^2} erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x >= 1.0 {
        erfc_cf(x) / PI.sqrt()
    } else if x > -1.0 {
        (x * x).exp() - FRAC_2_SQRT_PI * erf_series_sum(x)
    } else {
        2.0 * (x * x).exp() - erfcx(-x)
    }
}

/// Dawson's function F(x) = e^{-x^2} int_0^x e^{t^2} dt.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 6.0 {
        let x2 = ax * ax;
        // x^{2n+1}/(n!(2n+1)) with term ratio x^2 (2n+1)/((n+1)(2n+3))
        let mut p = ax;
        let mut sum = ax;
        for n in 0..2000 {
            let nf = n as f64;
            p *= x2 / (nf + 1.0);
            let term = p / (2.0 * nf + 3.0);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        (-x2).exp() * sum
    } else {
        let y = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..200 {
            let next = term * (2.0 * k as f64 + 1.0) * y;
            if next >= term || next < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * ax)
    };
    x.signum() * v
}

/// Imaginary error function erfi(x) = -i erf(ix).
pub fn erfi(x: f64) -> Result<f64> {
    if x * x > 709.0 {
        return Err(Error::Range(format!("erfi({x}) overflows")));
    }
    let v = FRAC_2_SQRT_PI * (x * x).exp() * dawson(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("erfi({x}) overflows")))
    }
}
