//! Multivariate polynomial gcd by recursive primitive remainder sequences.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{Poly, Symbol};

/// Normalized gcd: coprime integer coefficients, positive leading coefficient.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let (m, other) = if a.is_monomial() { (a, b) } else { (b, a) };
        let mm = m.leading().unwrap().0.clone();
        let g = mm.gcd(&other.monomial_content());
        return Poly::term(num_traits::One::one(), g);
    }
    let va = a.vars();
    let vb = b.vars();
    if let Some(v) = va.iter().find(|v| !vb.contains(*v)) {
        return poly_gcd(&content_in(a, v), b);
    }
    if let Some(v) = vb.iter().find(|v| !va.contains(*v)) {
        return poly_gcd(a, &content_in(b, v));
    }
    if coprime_by_specialization(a, b, &va) {
        return Poly::one();
    }
    let v = va
        .iter()
        .min_by_key(|v| (a.degree_in(v).min(b.degree_in(v)), a.degree_in(v) + b.degree_in(v)))
        .unwrap()
        .clone();
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = poly_gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(&v) >= pb.degree_in(&v) { (pa, pb) } else { (pb, pa) };
    while !g.is_zero() {
        let r = prem(&f, &g, &v);
        f = g;
        g = if r.is_zero() { r } else { primitive_in(&r, &v) };
    }
    let h = primitive_in(&f, &v);
    normalize(&(&c * &h))
}

/// Sufficient test for gcd(a, b) = 1. For each variable v, the others are set
/// to integers that keep the leading coefficients in v nonzero; a common factor
/// of positive degree in v would survive as a common univariate factor.
fn coprime_by_specialization(a: &Poly, b: &Poly, vars: &std::collections::BTreeSet<Symbol>) -> bool {
    'vars: for v in vars {
        for attempt in 0..3i64 {
            let vals: BTreeMap<Symbol, Poly> = vars
                .iter()
                .filter(|w| *w != v)
                .enumerate()
                .map(|(k, w)| (w.clone(), Poly::from_int(3 + 7 * k as i64 + 13 * attempt + (k as i64 * k as i64) % 5)))
                .collect();
            let ua = univariate(&a.subst_many(&vals), v);
            let ub = univariate(&b.subst_many(&vals), v);
            if ua.len() != a.degree_in(v) as usize + 1 || ub.len() != b.degree_in(v) as usize + 1 {
                continue;
            }
            if uni_gcd_degree(ua, ub) == 0 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

fn univariate(p: &Poly, v: &Symbol) -> Vec<BigRational> {
    let mut c: Vec<BigRational> =
        p.coeffs_in(v).iter().map(|x| x.as_constant().unwrap_or_else(BigRational::zero)).collect();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn uni_gcd_degree(mut f: Vec<BigRational>, mut g: Vec<BigRational>) -> usize {
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_empty() {
        // f mod g, made monic to keep the numbers small
        let lc = g.last().unwrap().clone();
        let g_monic: Vec<BigRational> = g.iter().map(|x| x / &lc).collect();
        while f.len() >= g_monic.len() && !f.is_empty() {
            let q = f.last().unwrap().clone();
            let off = f.len() - g_monic.len();
            for (i, c) in g_monic.iter().enumerate() {
                f[off + i] = &f[off + i] - &(&q * c);
            }
            while f.last().is_some_and(|x| x.is_zero()) {
                f.pop();
            }
        }
        f = std::mem::replace(&mut g, f);
    }
    f.len().saturating_sub(1)
}

pub fn normalize(p: &Poly) -> Poly {
    p.primitive_signed().1
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: &Symbol) -> Poly {
    let mut cs: Vec<Poly> = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| c.num_terms());
    let mut g = Poly::zero();
    for c in cs {
        g = poly_gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

pub fn primitive_in(p: &Poly, v: &Symbol) -> Poly {
    let c = content_in(p, v);
    normalize(&p.div_exact(&c).expect("content divides"))
}

/// Pseudo-remainder of `a` by `b` in `v`.
pub fn prem(a: &Poly, b: &Poly, v: &Symbol) -> Poly {
    let n = b.degree_in(v);
    let lc = b.lead_coeff_in(v);
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let m = r.degree_in(v);
        if m < n {
            return r;
        }
        let lr = r.lead_coeff_in(v);
        let shift = Poly::term(num_traits::One::one(), super::poly::Monomial::var(v.clone(), m - n));
        r = &(&lc * &r) - &(&(&lr * &shift) * b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        crate::exactalg::expr::parse_poly(s).unwrap()
    }

    #[test]
    fn common_factor() {
        let a = p("(x+y)*(x-2*z)");
        let b = p("(x+y)*(y+z+1)");
        assert_eq!(poly_gcd(&a, &b), p("x+y"));
    }

    #[test]
    fn coprime() {
        assert!(poly_gcd(&p("x^2+y^2+1"), &p("x+y")).is_one());
    }

    #[test]
    fn with_content() {
        let a = p("6*s*(m1sq - m2sq)^2");
        let b = p("4*s^2*(m1sq-m2sq)");
        assert_eq!(poly_gcd(&a, &b), p("s*m1sq - s*m2sq"));
    }
}
