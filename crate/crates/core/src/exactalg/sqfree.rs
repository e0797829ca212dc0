//! Square-free splitting used to canonicalize radicands.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::{content_in, normalize, poly_gcd};
use super::poly::Poly;

/// Write `p = outer^2 * radicand`, with `radicand` square-free, its integer
/// content square-free and its sign kept. A perfect square gives radicand 1.
pub fn sqrt_split(p: &Poly) -> (Poly, Poly) {
    assert!(!p.is_zero(), "sqrt_split of zero");
    let (c, prim) = p.primitive_signed();
    let (sq, odd) = square_parts(&prim);
    // c = a/b = (a*b)/b^2
    let n = c.numer() * c.denom();
    let (k, m) = split_integer(&n);
    let outer = sq.scale(&BigRational::new(k, c.denom().clone()));
    let radicand = odd.scale(&BigRational::from_integer(m));
    debug_assert_eq!(&(&outer * &outer) * &radicand, *p);
    (outer, radicand)
}

/// `p = sq^2 * odd` for an integer-primitive p with positive leading coefficient.
fn square_parts(p: &Poly) -> (Poly, Poly) {
    if p.is_constant() {
        return (Poly::one(), p.clone());
    }
    let v = p.vars().into_iter().next().unwrap();
    let cont = content_in(p, &v);
    let pp = normalize(&p.div_exact(&cont).unwrap());
    let (csq, codd) = square_parts(&cont);
    let factors = yun(&pp, &v);
    let mut sq = csq;
    let mut odd = codd;
    for (i, f) in factors.iter().enumerate() {
        let mult = i as u32 + 1;
        if mult / 2 > 0 {
            sq = &sq * &f.pow(mult / 2);
        }
        if mult % 2 == 1 {
            odd = &odd * f;
        }
    }
    // fix the rational unit left over by normalizations
    let recon = &(&sq * &sq) * &odd;
    let unit = p.div_exact(&recon).and_then(|u| u.as_constant()).expect("square-free reconstruction");
    (sq, odd.scale(&unit))
}

/// Yun's square-free factorization of a polynomial primitive in `v`;
/// entry i has multiplicity i+1.
fn yun(p: &Poly, v: &super::poly::Symbol) -> Vec<Poly> {
    let dp = p.diff(v);
    let a0 = poly_gcd(p, &dp);
    if a0.is_constant() {
        return vec![p.clone()];
    }
    let mut b = p.div_exact(&a0).unwrap();
    let mut c = dp.div_exact(&a0).unwrap();
    let mut d = &c - &b.diff(v);
    let mut out = Vec::new();
    loop {
        if b.is_constant() {
            break;
        }
        let a = poly_gcd(&b, &d);
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = &c - &b.diff(v);
        out.push(a);
    }
    out
}

/// n = k^2 * m with m square-free (sign kept on m); trial division with a
/// bounded search, any large leftover cofactor stays in m unless it is a square.
pub fn split_integer(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut r = n.abs();
    let mut k = BigInt::one();
    let mut m = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while &p * &p <= r && p < limit {
        let mut e = 0u32;
        while (&r % &p).is_zero() {
            r /= &p;
            e += 1;
        }
        if e > 0 {
            k *= num_traits::pow(p.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                m *= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    let s = r.sqrt();
    if &s * &s == r {
        k *= s;
    } else {
        m *= r;
    }
    (k, sign * m)
}
