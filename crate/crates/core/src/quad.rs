//! Adaptive Gauss-Kronrod quadrature for vector-valued integrands.
//!
//! Every integrand returns `[f64; N]`; all components share nodes and the
//! adaptive loop refines until each component meets its own tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-8, max_intervals: 200_000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
    pub converged: bool,
}

impl<const N: usize> Estimate<N> {
    fn zero() -> Self {
        Estimate { value: [0.0; N], error: [0.0; N], evaluations: 0, converged: true }
    }

    fn add(&mut self, other: &Estimate<N>) {
        for k in 0..N {
            self.value[k] += other.value[k];
            self.error[k] += other.error[k];
        }
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }

    /// Turn an unconverged estimate into `Error::NonConvergence`.
    pub fn ok(self, what: &str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence(format!(
                "{what}: error estimate {:?} above tolerance",
                self.error
            )))
        }
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    resabs: [f64; N],
}

fn gk21<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> Segment<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut resg = [0.0; N];
    let mut resk = [0.0; N];
    let mut resabs = [0.0; N];
    for k in 0..N {
        resk[k] = fc[k] * WGK[10];
        resabs[k] = resk[k].abs();
    }
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..N {
            let s = f1[k] + f2[k];
            resk[k] += WGK[j] * s;
            resabs[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            if j % 2 == 1 {
                resg[k] += WG[j / 2] * s;
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut abs_int = [0.0; N];
    for k in 0..N {
        abs_int[k] = resabs[k] * abs_half;
        let mean = 0.5 * resk[k];
        let mut resasc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        let err = (resk[k] - resg[k]) * half;
        value[k] = resk[k] * half;
        error[k] = rescale_error(err, resabs[k] * abs_half, resasc * abs_half);
        if !value[k].is_finite() {
            error[k] = f64::INFINITY;
        }
    }
    Segment { a, b, value, error, resabs: abs_int }
}

struct Keyed(f64, usize);

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Adaptive GK21 over the consecutive intervals defined by `points`
/// (sorted, at least two entries). Never evaluates the end points.
///
/// Component k is accepted when its error is below
/// max(abs_tol, rel_tol |I_k|, 100 eps int|f_k|); the last term is the
/// round-off floor for integrals dominated by cancellation.
pub fn integrate<const N: usize, F>(mut f: F, points: &[f64], opts: &QuadOptions) -> Estimate<N>
where
    F: FnMut(f64) -> [f64; N],
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut segs: Vec<Segment<N>> = Vec::with_capacity(points.len() * 2);
    let mut total = [0.0; N];
    let mut err = [0.0; N];
    let mut absint = [0.0; N];
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let s = gk21(&mut f, w[0], w[1]);
        for k in 0..N {
            total[k] += s.value[k];
            err[k] += s.error[k];
            absint[k] += s.resabs[k];
        }
        segs.push(s);
    }
    let mut evals = 21 * segs.len();
    let floor: [f64; N] = std::array::from_fn(|k| 100.0 * f64::EPSILON * absint[k]);

    let tol = |total: &[f64; N], k: usize| opts.abs_tol.max(opts.rel_tol * total[k].abs()).max(floor[k]);
    let priority = |s: &Segment<N>, total: &[f64; N]| {
        let mut p = 0.0f64;
        for k in 0..N {
            let r = s.error[k] / tol(total, k);
            p = if r.is_nan() { f64::INFINITY } else { p.max(r) };
        }
        p
    };

    let mut heap: BinaryHeap<Keyed> =
        segs.iter().enumerate().map(|(i, s)| Keyed(priority(s, &total), i)).collect();

    let satisfied = |total: &[f64; N], err: &[f64; N]| (0..N).all(|k| err[k] <= tol(total, k));

    let mut converged = true;
    while !satisfied(&total, &err) {
        if segs.len() >= opts.max_intervals {
            converged = false;
            break;
        }
        let Some(Keyed(_, i)) = heap.pop() else {
            converged = false;
            break;
        };
        let (a, b) = (segs[i].a, segs[i].b);
        let mid = 0.5 * (a + b);
        if !(mid > a.min(b) && mid < a.max(b)) || (b - a).abs() <= 4.0 * f64::EPSILON * mid.abs() {
            // Not splittable; keep its error and move on.
            continue;
        }
        let left = gk21(&mut f, a, mid);
        let right = gk21(&mut f, mid, b);
        evals += 42;
        for k in 0..N {
            total[k] += left.value[k] + right.value[k] - segs[i].value[k];
            err[k] += left.error[k] + right.error[k] - segs[i].error[k];
        }
        let pl = priority(&left, &total);
        let pr = priority(&right, &total);
        segs[i] = left;
        heap.push(Keyed(pl, i));
        segs.push(right);
        heap.push(Keyed(pr, segs.len() - 1));
    }

    // Re-sum to remove drift from the incremental updates.
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for s in &segs {
        for k in 0..N {
            value[k] += s.value[k];
            error[k] += s.error[k];
        }
    }
    Estimate { value, error, evaluations: evals, converged }
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)> {
    let e = integrate(|x| [f(x)], &[a, b], opts).ok("integral")?;
    Ok((e.value[0], e.error[0]))
}

/// Split `[a, b]` into panels no wider than `width`, keeping the given
/// interior break points. Returns sorted, deduplicated points.
pub fn panels(a: f64, b: f64, width: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if !(width > 0.0) || !width.is_finite() {
        return pts;
    }
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        for j in 0..n {
            out.push(w[0] + j as f64 * h);
        }
    }
    out.push(b);
    out
}

/// Integrate over `[a, b]` when the integrand behaves like `(x - a)^p`,
/// `-1 < p < 0`, near `a`. Uses `x = a + (b - a) u^{1/(1+p)}`.
pub fn integrate_endpoint_singular<const N: usize, F>(mut f: F, a: f64, b: f64, p: f64, opts: &QuadOptions) -> Estimate<N>
where
    F: FnMut(f64) -> [f64; N],
{
    if p >= 0.0 {
        return integrate(f, &[a, b], opts);
    }
    let q = 1.0 / (1.0 + p);
    let h = b - a;
    integrate(
        |u: f64| {
            let x = a + h * u.powf(q);
            let jac = h * q * u.powf(q - 1.0);
            let mut y = f(x);
            for v in y.iter_mut() {
                *v *= jac;
            }
            y
        },
        &[0.0, 1.0],
        opts,
    )
}

/// Integral over `[start, inf)` of a non-oscillating integrand decaying
/// faster than `1/x`. Maps `x = start / u`.
pub fn integrate_to_infinity<const N: usize, F>(mut f: F, start: f64, opts: &QuadOptions) -> Estimate<N>
where
    F: FnMut(f64) -> [f64; N],
{
    assert!(start > 0.0);
    integrate(
        |u: f64| {
            let x = start / u;
            let jac = start / (u * u);
            let mut y = f(x);
            for v in y.iter_mut() {
                *v = if jac.is_finite() { *v * jac } else { 0.0 };
                if !v.is_finite() {
                    *v = 0.0;
                }
            }
            y
        },
        &[0.0, 1.0],
        opts,
    )
}

/// Repeated averaging of the most recent partial sums (Euler transform).
fn euler_average(sums: &[f64]) -> f64 {
    const WINDOW: usize = 24;
    let start = sums.len().saturating_sub(WINDOW);
    let mut row: Vec<f64> = sums[start..].to_vec();
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
    }
    row[0]
}

/// Oscillatory tail `int_start^inf f`, where `f` oscillates with the given
/// half period and decays. Each half period is integrated adaptively and
/// the partial sums are accelerated by repeated averaging.
pub fn integrate_oscillatory_tail<const N: usize, F>(
    mut f: F,
    start: f64,
    half_period: f64,
    opts: &QuadOptions,
) -> Estimate<N>
where
    F: FnMut(f64) -> [f64; N],
{
    const MAX_SEGMENTS: usize = 10_000;
    const MIN_SEGMENTS: usize = 8;
    let chunk_opts = QuadOptions { rel_tol: opts.rel_tol * 0.1, abs_tol: opts.abs_tol * 0.01, ..*opts };

    let mut sums: Vec<Vec<f64>> = vec![Vec::new(); N];
    let mut running = [0.0; N];
    let mut seg_err = [0.0; N];
    let mut last = [f64::NAN; N];
    let mut prev_diff = [f64::INFINITY; N];
    let mut evals = 0;
    let mut converged = false;
    let mut estimate = [0.0; N];
    let mut diffs = [f64::INFINITY; N];

    for n in 0..MAX_SEGMENTS {
        let a = start + n as f64 * half_period;
        let e = integrate(&mut f, &[a, a + half_period], &chunk_opts);
        evals += e.evaluations;
        for k in 0..N {
            running[k] += e.value[k];
            seg_err[k] += e.error[k];
            sums[k].push(running[k]);
            estimate[k] = euler_average(&sums[k]);
            diffs[k] = (estimate[k] - last[k]).abs();
        }
        if n >= MIN_SEGMENTS {
            let ok = (0..N).all(|k| {
                let tol = opts.abs_tol.max(opts.rel_tol * estimate[k].abs());
                diffs[k] <= tol && prev_diff[k] <= tol
            });
            if ok {
                converged = true;
                break;
            }
        }
        prev_diff = diffs;
        last = estimate;
    }
    let mut error = [0.0; N];
    for k in 0..N {
        error[k] = diffs[k].max(prev_diff[k]) + seg_err[k];
        if !error[k].is_finite() {
            error[k] = f64::INFINITY;
        }
    }
    Estimate { value: estimate, error, evaluations: evals, converged }
}

/// Sum of several estimates (e.g. finite part plus tails).
pub fn combine<const N: usize>(parts: &[Estimate<N>]) -> Estimate<N> {
    let mut out = Estimate::zero();
    for p in parts {
        out.add(p);
    }
    out
}
