use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000_000;

fn power_term(k: usize, s: f64, a: f64) -> Result<f64> {
    let base = k as f64 + a;
    if base > 0.0 {
        Ok(base.powf(-s))
    } else if s == s.trunc() {
        Ok(base.powi(-(s as i32)))
    } else {
        Err(Error::Domain(format!("(k + a)^(-s) is complex for k + a = {base}, s = {s}")))
    }
}

/// Lerch transcendent Phi(z, s, a) = sum_k z^k / (k + a)^s for |z| < 1.
///
/// Direct summation; stops once a certified geometric bound on the tail is
/// below 1e-15 of the partial sum.
pub fn lerch_phi(z: Complex64, s: f64, a: f64) -> Result<Complex64> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::Domain(format!("|z| = {r} outside the unit disk")));
    }
    if a <= 0.0 && a == a.trunc() {
        return Err(Error::Pole(format!("a = {a} is a non-positive integer")));
    }
    if !s.is_finite() || !a.is_finite() {
        return Err(Error::Domain("non-finite s or a".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 0..MAX_TERMS {
        let p = power_term(k, s, a)?;
        let term = zk * p;
        sum += term;
        let base = k as f64 + a;
        if base > 0.0 {
            let next = (base / (base + 1.0)).powf(s);
            let rho = if s >= 0.0 { r } else { r * next };
            if rho < 1.0 {
                let bound = term.norm() * rho / (1.0 - rho);
                if bound <= 1e-15 * sum.norm() || bound < 1e-300 {
                    return Ok(sum);
                }
            }
        }
        zk *= z;
        if zk.norm() == 0.0 && base > 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("Lerch series at |z| = {r} after {MAX_TERMS} terms")))
}
