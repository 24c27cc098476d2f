//! Elementary inner time integrals used by the frequency-domain routes.
//! Each is written so that b -> 0 loses no precision.

use num_complex::Complex64;

/// int_0^t cos(b tau) dtau = sin(bt)/b
pub(crate) fn s_int(b: f64, t: f64) -> f64 {
    if b == 0.0 {
        t
    } else {
        (b * t).sin() / b
    }
}

/// int_0^t sin(b tau) dtau = (1 - cos bt)/b
pub(crate) fn c_int(b: f64, t: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        let h = (0.5 * b * t).sin();
        2.0 * h * h / b
    }
}

/// int_0^t S(b, t') dt' = (1 - cos bt)/b^2
pub(crate) fn q_int(b: f64, t: f64) -> f64 {
    if b == 0.0 {
        0.5 * t * t
    } else {
        let h = (0.5 * b * t).sin();
        2.0 * h * h / (b * b)
    }
}

/// int_0^t C(b, t') dt' = (bt - sin bt)/b^2
pub(crate) fn u_int(b: f64, t: f64) -> f64 {
    let x = b * t;
    if x.abs() < 0.1 {
        let x2 = x * x;
        // t^3 b/6 (1 - x^2/20 + x^4/840 - x^6/60480)
        t * t * t * b / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        (x - x.sin()) / (b * b)
    }
}

/// Re E_k for k < N, E_k(theta) = int_0^1 s^k e^{i theta s} ds.
///
/// E_k = (e^{i theta} - k E_{k-1})/(i theta) is stable upward for
/// k <= theta and downward above, where the downward run starts from zero
/// far enough up that the start error dies out.
pub(crate) fn cos_moments<const N: usize>(theta: f64) -> [f64; N] {
    let e = Complex64::new(theta.cos(), theta.sin());
    let it = Complex64::new(0.0, theta);
    let mut out = [Complex64::default(); N];
    // last index filled upward
    let up = if theta >= 1.0 { Some((theta.floor() as usize).min(N - 1)) } else { None };
    if let Some(k0) = up {
        out[0] = (e - 1.0) / it;
        for k in 1..=k0 {
            out[k] = (e - k as f64 * out[k - 1]) / it;
        }
    }
    let low = up.map_or(0, |k0| k0 + 1);
    if low < N {
        let mut ek = Complex64::default();
        for k in (low + 1..N + 80).rev() {
            ek = (e - it * ek) / k as f64;
            if k <= N {
                out[k - 1] = ek;
            }
        }
    }
    out.map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_quadrature() {
        use crate::quad::{integrate_scalar, QuadOptions};
        for &theta in &[0.0, 0.3, 4.0, 15.9, 16.0, 40.0, 300.0] {
            let m = cos_moments::<17>(theta);
            for (k, &v) in m.iter().enumerate() {
                let q = integrate_scalar(|s| s.powi(k as i32) * (theta * s).cos(), 0.0, 1.0, &QuadOptions::with_tol(1e-17, 1e-13))
                    .unwrap()
                    .0;
                assert!((v - q).abs() < 1e-14, "theta={theta} k={k}: {v} vs {q}");
            }
        }
    }

    #[test]
    fn u_series_meets_direct() {
        let t = 2.0;
        let b = 0.0499999 / 1.0;
        let a = u_int(b, t);
        let x: f64 = 0.1000001;
        let direct = (x - x.sin()) / (0.05000005f64 * 0.05000005);
        assert!((a - direct).abs() < 1e-5 * direct);
        assert!((u_int(1e-9, 1.0) - 1e-9 / 6.0).abs() < 1e-24);
    }

    #[test]
    fn derivatives() {
        let (b, t, h) = (3.0, 0.7, 1e-5);
        let dq = (q_int(b, t + h) - q_int(b, t - h)) / (2.0 * h);
        assert!((dq - s_int(b, t)).abs() < 1e-8);
        let du = (u_int(b, t + h) - u_int(b, t - h)) / (2.0 * h);
        assert!((du - c_int(b, t)).abs() < 1e-8);
    }
}
