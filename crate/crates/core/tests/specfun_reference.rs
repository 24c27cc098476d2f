use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use qbm_core::specfun::*;
use qbm_core::Error;

// (re z, im z, Re Si, Im Si, Re Ci, Im Ci), 30-digit mpmath values.
const SICI: [(f64, f64, f64, f64, f64, f64); 26] = [
    (0.5, 0.0, 0.493107418043066689, 0.0, -0.177784078806612901, 0.0),
    (1.0, 0.0, 0.946083070367183015, 0.0, 0.337403922900968135, 0.0),
    (3.0, 0.0, 1.84865252799946826, 0.0, 0.119629786008000328, 0.0),
    (7.9, 0.0, 1.56167107021455022, 0.0, 0.123638007059717841, 0.0),
    (8.1, 0.0, 1.58636662246364306, 0.0, 0.12001667326059658, 0.0),
    (15.0, 0.0, 1.61819444370836874, 0.0, 0.0462786776743604396, 0.0),
    (60.0, 0.0, 1.58674561625994741, 0.0, -0.00481324337744321529, 0.0),
    (250.0, 0.0, 1.56984793137239732, 0.0, -0.00388584331726587652, 0.0),
    (-2.0, 0.0, -1.60541297680269485, 0.0, 0.422980828774864996, 3.14159265358979324),
    (-20.0, 0.0, -1.54824170104343984, 0.0, 0.0444198208453533165, 3.14159265358979324),
    (2.0, 1.0, 1.83320992150484362, 0.457691711286688006, 0.584475996878247679, -0.297495177638134021),
    (5.0, -3.0, 0.469128095943387153, 1.43119314747293824, -1.43843830251652488, -1.10445333086130872),
    (10.0, 0.01, 1.65835151759216342, -0.000544032793538906027, -0.0454595726773605902, -0.000839083420552378222),
    (10.0, -0.01, 1.65835151759216342, 0.000544032793538906027, -0.0454595726773605902, 0.000839083420552378222),
    (30.0, 5.0, 0.877000369380756392, -2.34879523825165132, -2.34901507299924638, 0.693805210083142529),
    (-12.0, 4.0, 0.509251294783994222, -0.696650839878379431, -0.697798547168400285, 1.06235393885764638),
    (-12.0, -4.0, 0.509251294783994222, 0.696650839878379431, -0.697798547168400285, -1.06235393885764638),
    (0.0, 3.0, 0.0, 4.9734404758598068, 4.96039209476560976, 1.57079632679489662),
    (0.0, -20.0, 0.0, -12807826.3320282945, 12807826.3320282944, -1.57079632679489662),
    (0.3, 50.0, 1.53309194077887061e+19, 5.06581714144239717e+19, 5.06581714144239717e+19, -1.53309194077887061e+19),
    (40.0, -60.0, 7.93921481769241152e+23, 1.07122897197824917e+23, -1.07122897197824917e+23, 7.93921481769241152e+23),
    (100.0, 0.01, 1.56222503319413781, -0.0000506373791448874996, -0.00514907401583751463, 0.0000862333410256500283),
    (-100.0, 0.01, -1.56222503319413781, -0.0000506373791448874996, -0.00514907401583751463, 3.14150642024876759),
    (0.0001, 0.0001, 0.000100000000111111116, 0.0000999999998888888936, -8.28655111679467718, 0.78539815839744831),
    (0.02, -1.0, 0.0235034379571592141, -1.05717730098583782, 0.837940479136969527, -1.53993775190644146),
    (500.0, -1.0, 1.57352470037038438, 0.0011007509201989214, -0.00144231018130447041, 0.00207671000223820915),
];

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn sici_matches_high_precision_table() {
    for &(x, y, sr, siv, cr, civ) in &SICI {
        let z = Complex64::new(x, y);
        let s = si(z).unwrap();
        let c = ci(z).unwrap();
        assert!(rel(s, Complex64::new(sr, siv)) < 1e-12, "Si({z}) = {s}, want {sr}+{siv}i");
        assert!(rel(c, Complex64::new(cr, civ)) < 1e-12, "Ci({z}) = {c}, want {cr}+{civ}i");
    }
}

/// Plain power series with exact-integer factorials, summed in reverse.
fn si_taylor_oracle(z: Complex64) -> Complex64 {
    let mut terms = Vec::new();
    let mut p = z;
    for k in 0..80 {
        let n = 2 * k + 1;
        terms.push(p / n as f64);
        p = -p * z * z / (((n + 1) * (n + 2)) as f64);
    }
    terms.iter().rev().sum()
}

fn ci_taylor_oracle(z: Complex64) -> Complex64 {
    let mut terms = Vec::new();
    let mut p = -z * z / 2.0;
    for k in 1..80 {
        let n = 2 * k;
        terms.push(p / n as f64);
        p = -p * z * z / (((n + 1) * (n + 2)) as f64);
    }
    let s: Complex64 = terms.iter().rev().sum();
    EULER_GAMMA + z.ln() + s
}

proptest! {
    #[test]
    fn sici_agree_with_taylor_oracle_inside_radius_five(r in 0.01f64..5.0, th in -3.1f64..3.1) {
        let z = Complex64::from_polar(r, th);
        prop_assert!(rel(si(z).unwrap(), si_taylor_oracle(z)) < 1e-12);
        prop_assert!(rel(ci(z).unwrap(), ci_taylor_oracle(z)) < 1e-12);
    }

    #[test]
    fn si_is_odd_and_conjugate_symmetric(x in -40.0f64..40.0, y in -30.0f64..30.0) {
        let z = Complex64::new(x, y);
        let s = si(z).unwrap();
        prop_assert!(rel(si(-z).unwrap(), -s) < 1e-13);
        prop_assert!(rel(si(z.conj()).unwrap(), s.conj()) < 1e-13);
    }

    #[test]
    fn ci_conjugate_symmetric_off_cut(x in 0.05f64..40.0, y in -30.0f64..30.0) {
        let z = Complex64::new(x, y);
        prop_assert!(rel(ci(z.conj()).unwrap(), ci(z).unwrap().conj()) < 1e-13);
    }

    #[test]
    fn gamma_recurrence(x in -9.9f64..60.0) {
        prop_assume!((x - x.round()).abs() > 1e-3 || x > 0.5);
        let g = gamma(x).unwrap();
        let g1 = gamma(x + 1.0).unwrap();
        prop_assert!((g1 / (x * g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erf_odd_and_bounded(x in -8.0f64..8.0) {
        prop_assert!((erf(-x) + erf(x)).abs() < 1e-15);
        prop_assert!(erf(x).abs() <= 1.0);
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pfq_stable_under_term_doubling(x in 0.0f64..12.0) {
        let p = PfqParams::new(&[0.75], &[0.5, 1.75]);
        let v = hypergeometric_pfq(&p, -x * x / 4.0).unwrap();
        let direct = direct_pfq(&p, -x * x / 4.0, 2 * v.terms + 10);
        prop_assert!((v.value - direct).abs() < 1e-8 * v.value.abs().max(1.0));
    }
}

fn direct_pfq(p: &PfqParams, z: f64, n: usize) -> f64 {
    let mut t = 1.0;
    let mut s = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let mut r = z / (kf + 1.0);
        for a in &p.upper {
            r *= a + kf;
        }
        for b in &p.lower {
            r /= b + kf;
        }
        t *= r;
        s += t;
    }
    s
}

#[test]
fn sici_routes_agree_on_handover_curve() {
    // The series is used while |z| - |Im z| <= 8.
    for k in 0..=64 {
        let y = -40.0 + 80.0 * k as f64 / 64.0;
        let x = ((8.0 + y.abs()).powi(2) - y * y).sqrt();
        for z in [Complex64::new(x, y), Complex64::new(-x, y)] {
            let (s1, c1) = si_ci_with(z, SiCiMethod::Series).unwrap();
            let (s2, c2) = si_ci_with(z, SiCiMethod::ContinuedFraction).unwrap();
            assert!(rel(s1, s2) < 1e-10, "Si at {z}: {s1} vs {s2}");
            assert!(rel(c1, c2) < 1e-10, "Ci at {z}: {c1} vs {c2}");
        }
    }
}

#[test]
fn gamma_half_squared_is_pi() {
    let g = gamma(0.5).unwrap();
    assert!((g * g - std::f64::consts::PI).abs() < 1e-12);
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn erf_against_simpson_quadrature() {
    let k = 2.0 / std::f64::consts::PI.sqrt();
    for &x in &[0.05, 0.4, 1.0, 1.7, 2.5, 3.3] {
        let q = k * simpson(|t| (-t * t).exp(), 0.0, x, 4000);
        assert!((erf(x) - q).abs() < 1e-12, "erf({x})");
        let qi = k * simpson(|t| (t * t).exp(), 0.0, x, 40000);
        assert!((erfi(x).unwrap() / qi - 1.0).abs() < 1e-12, "erfi({x})");
    }
}

#[test]
fn erfcx_and_dawson_consistent() {
    for &x in &[0.2, 0.99, 1.0, 3.0, 9.0] {
        assert!((erfcx(x) - (x * x).exp() * erfc(x)).abs() < 1e-13 * erfcx(x));
        let d = dawson(x);
        let e = erfi(x).unwrap();
        assert!((d - std::f64::consts::PI.sqrt() / 2.0 * (-x * x).exp() * e).abs() < 1e-14);
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// 200 terms in exact rational arithmetic.
fn pfq_exact(upper: &[f64], lower: &[f64], z: f64) -> f64 {
    let z = rational(z);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for n in 0..200u32 {
        let nn = BigRational::from_integer(BigInt::from(n));
        for &a in upper {
            term *= rational(a) + &nn;
        }
        for &b in lower {
            term /= rational(b) + &nn;
        }
        term *= &z;
        term /= &nn + BigRational::one();
        sum += &term;
    }
    sum.to_f64().unwrap()
}

#[test]
fn pfq_against_exact_rational_sum() {
    for &(a, b1, b2, z) in &[(0.75, 0.5, 1.75, -0.25), (0.75, 0.5, 1.75, -6.25), (1.25, 0.5, 2.25, -16.0), (0.25, 0.5, 1.25, -9.0)] {
        let v = hypergeometric_pfq(&PfqParams::new(&[a], &[b1, b2]), z).unwrap();
        let exact = pfq_exact(&[a], &[b1, b2], z);
        assert!((v.value - exact).abs() < 1e-13 * exact.abs().max(1.0), "{a} {b1} {b2} {z}: {} vs {exact}", v.value);
        assert!(v.error_bound < 1e-12);
    }
}

#[test]
fn pfq_reference_values() {
    // mpmath hyper
    let v = hypergeometric_pfq(&PfqParams::new(&[0.75], &[0.5, 1.75]), -6.25).unwrap();
    assert!((v.value + 0.366_025_222_300_847_03).abs() < 1e-14);
    let v = hypergeometric_pfq(&PfqParams::new(&[1.25], &[0.5, 2.25]), -16.0).unwrap();
    assert!((v.value - 0.284_050_446_786_343_57).abs() < 1e-13, "{}", v.value);
}

#[test]
fn lerch_reference_values() {
    // mpmath lerchphi
    let cases = [
        (Complex64::new(0.5, 0.0), 2.0, 1.0, Complex64::new(1.164_481_052_930_025, 0.0)),
        (Complex64::new(0.3, 0.6), 1.0, 0.25, Complex64::new(4.043_331_386_739_794_7, 0.573_233_984_687_174_3)),
        (Complex64::new(0.9, 0.0), 1.5, 3.7, Complex64::new(0.474_902_965_309_488_8, 0.0)),
        (Complex64::new(-0.8, 0.0), 1.0, 2.5, Complex64::new(0.257_896_840_185_043_5, 0.0)),
        (Complex64::new(0.99, 0.0), 1.0, 0.01, Complex64::new(104.589_401_454_637_94, 0.0)),
    ];
    for (z, s, a, want) in cases {
        let v = lerch_phi(z, s, a).unwrap();
        assert!(rel(v, want) < 1e-12, "Phi({z},{s},{a}) = {v}");
    }
}

#[test]
fn lerch_rejects_outside_disk() {
    assert!(matches!(lerch_phi(Complex64::new(0.0, 1.0), 1.0, 1.0), Err(Error::Domain(_))));
}
