//! Rational functions in canonical form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::poly::{Poly, Symbol};

/// `num/den` with gcd(num, den) a unit and den's grlex-leading coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn from_rational(c: BigRational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::from_poly(Poly::from_int(n))
    }

    pub fn symbol(name: &str) -> Self {
        RatFunc::from_poly(Poly::symbol(name))
    }

    /// Canonical `num/den`; None when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.as_constant() {
            let inv = c.recip();
            return RatFunc { num: num.scale(&inv), den: Poly::one() };
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Self::normalized(num, den)
    }

    /// Already coprime; only fix the leading coefficient.
    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let lc = den.leading_coeff();
        if lc.is_one() {
            return RatFunc { num, den };
        }
        let inv = lc.recip();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Some(RatFunc::normalized(base.num.pow(e), base.den.pow(e)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn contains_var(&self, v: &Symbol) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Symbol> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn subst(&self, v: &Symbol, val: &RatFunc) -> Option<RatFunc> {
        if !self.contains_var(v) {
            return Some(self.clone());
        }
        let n = subst_poly(&self.num, v, val);
        let d = subst_poly(&self.den, v, val);
        d.inv().map(|di| &n * &di)
    }

    pub fn subst_many(&self, map: &BTreeMap<Symbol, Poly>) -> Option<RatFunc> {
        RatFunc::new(self.num.subst_many(map), self.den.subst_many(map))
    }

    pub fn eval_rational(&self, vals: &BTreeMap<Symbol, BigRational>) -> Option<BigRational> {
        let d = self.den.eval_rational(vals)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(vals)? / d)
    }

    pub fn eval_complex(&self, vals: &HashMap<Symbol, Complex64>) -> Option<Complex64> {
        let d = self.den.eval_complex(vals)?;
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.num.eval_complex(vals)? / d)
    }

    pub fn diff(&self, v: &Symbol) -> RatFunc {
        let n = &(&self.num.diff(v) * &self.den) - &(&self.num * &self.den.diff(v));
        RatFunc::canonical(n, &self.den * &self.den)
    }
}

fn subst_poly(p: &Poly, v: &Symbol, val: &RatFunc) -> RatFunc {
    let cs = p.coeffs_in(v);
    let mut acc = RatFunc::zero();
    for c in cs.iter().rev() {
        acc = &(&acc * val) + &RatFunc::from_poly(c.clone());
    }
    acc
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &'a RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &o.num);
            }
            return RatFunc::canonical(&self.num + &o.num, self.den.clone());
        }
        if o.den.is_one() {
            return RatFunc::normalized(&self.num + &(&o.num * &self.den), self.den.clone());
        }
        if self.den.is_one() {
            return RatFunc::normalized(&o.num + &(&self.num * &o.den), o.den.clone());
        }
        let g = poly_gcd(&self.den, &o.den);
        let d1 = self.den.div_exact(&g).unwrap();
        let d2 = o.den.div_exact(&g).unwrap();
        let num = &(&self.num * &d2) + &(&o.num * &d1);
        let den = &self.den * &d2;
        if g.is_constant() {
            RatFunc::normalized(num, den)
        } else {
            RatFunc::canonical(num, den)
        }
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &'a RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &'a RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        let g1 = poly_gcd(&self.num, &o.den);
        let g2 = poly_gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        RatFunc::normalized(&n1 * &n2, &d1 * &d2)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &'a RatFunc) -> RatFunc {
        self * &o.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &'a RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::expr::parse_ratfunc;

    #[test]
    fn cancels() {
        let a = parse_ratfunc("(x^2-y^2)/(x+y)").unwrap();
        assert_eq!(a, parse_ratfunc("x-y").unwrap());
    }

    #[test]
    fn den_normalized() {
        let a = parse_ratfunc("1/(2*s)").unwrap();
        assert!(a.den().leading_coeff().is_one());
        assert_eq!(a.to_string(), "1/2/(s)");
    }

    #[test]
    fn sum_of_fractions() {
        let a = parse_ratfunc("1/(x+1) - 1/(x-1)").unwrap();
        assert_eq!(a, parse_ratfunc("-2/(x^2-1)").unwrap());
    }
}
