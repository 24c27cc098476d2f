use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const LOSS_LIMIT: f64 = 1e12;

/// Parameters of pFq: upper a_1..a_p and lower b_1..b_q.
#[derive(Debug, Clone, PartialEq)]
pub struct PfqParams {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl PfqParams {
    pub fn new(upper: &[f64], lower: &[f64]) -> Self {
        PfqParams { upper: upper.to_vec(), lower: lower.to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfqValue {
    pub value: f64,
    pub error_bound: f64,
    pub terms: usize,
}

fn non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.trunc()
}

/// Generalized hypergeometric series pFq(a; b; z) for real z.
///
/// Kahan-compensated summation. Raises `PrecisionLoss` when the largest
/// partial sum exceeds 1e12 times the result.
pub fn hypergeometric_pfq(params: &PfqParams, z: f64) -> Result<PfqValue> {
    if let Some(b) = params.lower.iter().find(|&&b| non_positive_integer(b)) {
        return Err(Error::Pole(format!("lower parameter {b} is a non-positive integer")));
    }
    let terminating = params.upper.iter().any(|&a| non_positive_integer(a));
    let p = params.upper.len();
    let q = params.lower.len();
    if !terminating && z != 0.0 {
        if p > q + 1 {
            return Err(Error::Domain(format!("{p}F{q} diverges for z != 0")));
        }
        if p == q + 1 && z.abs() >= 1.0 {
            return Err(Error::Domain(format!("{p}F{q} series diverges for |z| = {}", z.abs())));
        }
    }

    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0f64;
    let mut max_partial = 1.0f64;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let mut ratio = z / (nf + 1.0);
        for &a in &params.upper {
            ratio *= a + nf;
        }
        for &b in &params.lower {
            ratio /= b + nf;
        }
        term *= ratio;
        n += 1;
        if term == 0.0 {
            break;
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_partial = max_partial.max(sum.abs()).max(term.abs());
        if !sum.is_finite() {
            return Err(Error::Range("pFq overflow".into()));
        }
        if term.abs() <= 1e-16 * sum.abs() && ratio.abs() < 0.5 {
            break;
        }
        if n >= MAX_TERMS {
            return Err(Error::NonConvergence(format!("pFq not converged after {MAX_TERMS} terms")));
        }
    }
    if max_partial > LOSS_LIMIT * sum.abs() {
        return Err(Error::PrecisionLoss(format!(
            "partial sums reach {max_partial:e} for a result of {sum:e}"
        )));
    }
    let error_bound = f64::EPSILON * max_partial * (n as f64).sqrt() + term.abs();
    Ok(PfqValue { value: sum, error_bound, terms: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        let v = hypergeometric_pfq(&PfqParams::new(&[0.75], &[0.5, 1.75]), 0.0).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn exponential() {
        let v = hypergeometric_pfq(&PfqParams::new(&[], &[]), 1.5).unwrap();
        assert!((v.value - 1.5f64.exp()).abs() < 1e-15 * 1.5f64.exp());
    }

    #[test]
    fn cosine_as_0f1() {
        // cos x = 0F1(; 1/2; -x^2/4)
        let x: f64 = 3.0;
        let v = hypergeometric_pfq(&PfqParams::new(&[], &[0.5]), -x * x / 4.0).unwrap();
        assert!((v.value - x.cos()).abs() < 1e-14);
    }

    #[test]
    fn terminating_polynomial() {
        // 2F1(-2, 1; 1; z) = (1 - z)^2
        let v = hypergeometric_pfq(&PfqParams::new(&[-2.0, 1.0], &[1.0]), 3.0).unwrap();
        assert!((v.value - 4.0).abs() < 1e-14);
    }

    #[test]
    fn divergent_and_pole() {
        assert!(matches!(hypergeometric_pfq(&PfqParams::new(&[1.0, 1.0], &[1.0]), 1.5), Err(Error::Domain(_))));
        assert!(matches!(hypergeometric_pfq(&PfqParams::new(&[1.0], &[-1.0]), 0.5), Err(Error::Pole(_))));
    }

    #[test]
    fn cancellation_flagged() {
        let r = hypergeometric_pfq(&PfqParams::new(&[0.75], &[0.5, 1.75]), -(60.0f64 * 60.0) / 4.0);
        assert!(matches!(r, Err(Error::PrecisionLoss(_))));
    }
}
