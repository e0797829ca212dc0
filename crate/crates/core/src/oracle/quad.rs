//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::OracleError;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Integrate `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Complex64, OracleError> {
    let (v, e) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.norm()) {
        if heap.len() >= opts.max_intervals {
            return Err(OracleError::NonConvergent(format!(
                "quadrature on [{}, {}] did not reach tolerance (error estimate {:.3e})",
                a, b, total_err
            )));
        }
        let s = heap.pop().expect("heap is never empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            // interval exhausted at float resolution; keep what we have
            heap.push(Segment { err: 0.0, ..s });
            total_err = heap.iter().map(|x| x.err).sum();
            if heap.iter().all(|x| x.err == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = kronrod(&f, s.a, m);
        let (v2, e2) = kronrod(&f, m, s.b);
        total += v1 + v2 - s.value;
        total_err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, err: e2 });
        if total_err < 0.0 {
            total_err = heap.iter().map(|x| x.err).sum();
        }
    }
    // resum to shed accumulated rounding in the running totals
    Ok(heap.iter().map(|s| s.value).sum())
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64, OracleError> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, opts).map(|v| v.re)
}

/// Integrate over [a, inf) with t = a + u/(1-u).
pub fn integrate_semi_infinite<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    opts: QuadOptions,
) -> Result<Complex64, OracleError> {
    integrate(
        |u| {
            let w = 1.0 - u;
            // nodes that round onto the endpoint contribute nothing for a decaying f
            if w <= f64::EPSILON {
                return Complex64::new(0.0, 0.0);
            }
            f(a + u / w) / (w * w)
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integrate over the whole real line with x = v/(1-v^2).
pub fn integrate_real_line<F: Fn(f64) -> Complex64>(f: F, opts: QuadOptions) -> Result<Complex64, OracleError> {
    integrate(
        |v| {
            let w = 1.0 - v * v;
            if w <= f64::EPSILON {
                return Complex64::new(0.0, 0.0);
            }
            f(v / w) * ((1.0 + v * v) / (w * w))
        },
        -1.0,
        1.0,
        opts,
    )
}
