use super::EULER_GAMMA;
use crate::error::{Error, Result};

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} needs a positive finite argument, got {x}")))
    }
}

/// e^x E1(x) for x > 0.
pub fn exp_e1(x: f64) -> Result<f64> {
    positive(x, "exp_e1")?;
    if x < 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(x.exp() * (-EULER_GAMMA - x.ln() - sum));
    }
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence(format!("E1 continued fraction at {x}")))
}

/// e^{-x} Ei(x) for x > 0.
pub fn exp_neg_ei(x: f64) -> Result<f64> {
    positive(x, "exp_neg_ei")?;
    if x <= 40.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..500 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        return Ok((-x).exp() * (EULER_GAMMA + x.ln() + sum));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * k as f64 / x;
        if next >= term || next < 1e-17 {
            break;
        }
        term = next;
        sum += term;
    }
    Ok(sum / x)
}

/// Exponential integral E1(x), x > 0.
pub fn e1(x: f64) -> Result<f64> {
    Ok(exp_e1(x)? * (-x).exp())
}

/// Exponential integral Ei(x), x > 0.
pub fn ei(x: f64) -> Result<f64> {
    let v = exp_neg_ei(x)? * x.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("Ei({x}) overflows")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        // mpmath
        assert!((e1(0.5).unwrap() - 0.559_773_594_776_160_8).abs() < 1e-15);
        assert!((e1(3.0).unwrap() / 0.013_048_381_094_197_04 - 1.0).abs() < 1e-14);
        assert!((ei(0.5).unwrap() - 0.454_219_904_863_173_6).abs() < 1e-15);
        assert!((ei(5.0).unwrap() / 40.185_275_355_803_18 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_branch_meets_series() {
        // mpmath
        let a = exp_neg_ei(41.0).unwrap();
        assert!((a / 0.025_016_506_856_911_832 - 1.0).abs() < 1e-14, "{a}");
        let b = exp_neg_ei(100.0).unwrap();
        assert!((b / 0.010_102_062_527_748_357 - 1.0).abs() < 1e-14, "{b}");
    }

    #[test]
    fn rejects_non_positive() {
        assert!(exp_e1(0.0).is_err());
        assert!(exp_neg_ei(-1.0).is_err());
    }
}
