use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::EULER_GAMMA;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 4000;
const MAX_CF: usize = 20_000;

fn clean(z: Complex64) -> Complex64 {
    // -0.0 imaginary parts would put negative reals on the lower lip of the cut.
    Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im })
}

fn check(w: Complex64, what: &str) -> Result<Complex64> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(clean(w))
    } else {
        Err(Error::Range(format!("{what} overflows")))
    }
}

fn overflows(z: Complex64) -> bool {
    z.im.abs() > 709.0
}

fn use_series(z: Complex64) -> bool {
    let r = z.norm();
    r - z.im.abs() <= 8.0 && r <= 750.0
}

fn si_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut p = z;
    let mut sum = z;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        p = -p * z2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        let term = p / (2.0 * kf + 3.0);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && z2.norm() < (2.0 * kf + 2.0) * (2.0 * kf + 3.0) {
            break;
        }
    }
    sum
}

/// Entire function Cin(z) = int_0^z (1 - cos t)/t dt.
fn cin_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut q = z2 * 0.5;
    let mut sum = q * 0.5;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        q = -q * z2 / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        let term = q / (2.0 * kf + 2.0);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && z2.norm() < (2.0 * kf + 1.0) * (2.0 * kf + 2.0) {
            break;
        }
    }
    sum
}

/// e^w E1(w) by the modified Lentz continued fraction.
fn exp_e1_cf(w: Complex64) -> Result<Complex64> {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = w + 1.0;
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..MAX_CF {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        d = d.inv();
        c = b + an / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-15 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence(format!("E1 continued fraction at {w}")))
}

/// Si and Ci for Re z > 0 from E1(+-iz).
fn si_ci_cf(z: Complex64) -> Result<(Complex64, Complex64)> {
    let i = Complex64::i();
    let iz = i * z;
    let e1p = (-iz).exp() * exp_e1_cf(iz)?;
    let e1m = iz.exp() * exp_e1_cf(-iz)?;
    let ci = -(e1p + e1m) * 0.5;
    let si = FRAC_PI_2 + (e1p - e1m) / (2.0 * i);
    Ok((si, ci))
}

/// Sine integral Si(z), entire.
pub fn si(z: Complex64) -> Result<Complex64> {
    let z = clean(z);
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    if overflows(z) {
        return Err(Error::Range(format!("Si({z}) overflows")));
    }
    if use_series(z) {
        return check(si_series(z), "Si");
    }
    let v = if z.re > 0.0 { si_ci_cf(z)?.0 } else { -si_ci_cf(-z)?.0 };
    check(v, "Si")
}

/// Cosine integral Ci(z), principal branch with the cut on the negative
/// real axis: Ci(-x) = Ci(x) + i pi for x > 0.
pub fn ci(z: Complex64) -> Result<Complex64> {
    let z = clean(z);
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole("Ci has a logarithmic singularity at 0".into()));
    }
    if overflows(z) {
        return Err(Error::Range(format!("Ci({z}) overflows")));
    }
    if use_series(z) {
        return check(EULER_GAMMA + z.ln() - cin_series(z), "Ci");
    }
    let v = if z.re > 0.0 {
        si_ci_cf(z)?.1
    } else {
        let mz = -z;
        si_ci_cf(mz)?.1 + z.ln() - mz.ln()
    };
    check(v, "Ci")
}

/// Evaluation route for [`si_ci_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiCiMethod {
    Series,
    ContinuedFraction,
}

/// Si and Ci by a forced route, ignoring the region rule. Used to check
/// that the two routes agree where they hand over.
pub fn si_ci_with(z: Complex64, method: SiCiMethod) -> Result<(Complex64, Complex64)> {
    let z = clean(z);
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole("Ci has a logarithmic singularity at 0".into()));
    }
    match method {
        SiCiMethod::Series => Ok((check(si_series(z), "Si")?, check(EULER_GAMMA + z.ln() - cin_series(z), "Ci")?)),
        SiCiMethod::ContinuedFraction => {
            if z.re > 0.0 {
                let (s, c) = si_ci_cf(z)?;
                Ok((check(s, "Si")?, check(c, "Ci")?))
            } else {
                let mz = -z;
                let (s, c) = si_ci_cf(mz)?;
                Ok((check(-s, "Si")?, check(c + z.ln() - mz.ln(), "Ci")?))
            }
        }
    }
}

/// Both integrals at once.
pub fn si_ci(z: Complex64) -> Result<(Complex64, Complex64)> {
    Ok((si(z)?, ci(z)?))
}

/// Cin(z) = gamma_E + ln z - Ci(z), entire.
pub fn cin(z: Complex64) -> Result<Complex64> {
    let z = clean(z);
    if use_series(z) {
        return check(cin_series(z), "Cin");
    }
    check(EULER_GAMMA + z.ln() - ci(z)?, "Cin")
}

/// Hyperbolic sine integral Shi(x) = -i Si(ix).
pub fn shi(x: f64) -> Result<f64> {
    let v = si(Complex64::new(0.0, x))?;
    let r = v.im;
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Range("Shi overflows".into()))
    }
}
