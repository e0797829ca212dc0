//! a + b*sqrt(radicand) over the rational-function field.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use super::alg::Alg;
use super::poly::{Poly, Symbol};
use super::ratfunc::RatFunc;
use super::ExactError;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadExt {
    pub a: RatFunc,
    pub b: RatFunc,
    pub radicand: Poly,
}

impl QuadExt {
    pub fn new(a: RatFunc, b: RatFunc, radicand: Poly) -> Self {
        QuadExt { a, b, radicand }
    }

    pub fn rational(a: RatFunc) -> Self {
        QuadExt { a, b: RatFunc::zero(), radicand: Poly::one() }
    }

    fn common(&self, o: &QuadExt) -> Result<Poly, ExactError> {
        if self.b.is_zero() {
            return Ok(o.radicand.clone());
        }
        if o.b.is_zero() || self.radicand == o.radicand {
            return Ok(self.radicand.clone());
        }
        Err(ExactError::RadicandMismatch(self.radicand.to_string(), o.radicand.to_string()))
    }

    pub fn add(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let r = self.common(o)?;
        Ok(QuadExt::new(&self.a + &o.a, &self.b + &o.b, r))
    }

    pub fn sub(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let r = self.common(o)?;
        Ok(QuadExt::new(&self.a - &o.a, &self.b - &o.b, r))
    }

    pub fn mul(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let r = self.common(o)?;
        let delta = RatFunc::from_poly(r.clone());
        let a = &(&self.a * &o.a) + &(&(&self.b * &o.b) * &delta);
        let b = &(&self.a * &o.b) + &(&o.a * &self.b);
        Ok(QuadExt::new(a, b, r))
    }

    pub fn conj(&self) -> QuadExt {
        QuadExt::new(self.a.clone(), -&self.b, self.radicand.clone())
    }

    /// a^2 - b^2 * radicand.
    pub fn norm(&self) -> RatFunc {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &RatFunc::from_poly(self.radicand.clone()))
    }

    pub fn inv(&self) -> Option<QuadExt> {
        let n = self.norm().inv()?;
        let c = self.conj();
        Some(QuadExt::new(&c.a * &n, &c.b * &n, c.radicand))
    }

    pub fn to_alg(&self) -> Alg {
        let root = Alg::sqrt_poly(&self.radicand);
        &Alg::from_ratfunc(self.a.clone()) + &(&root * &Alg::from_ratfunc(self.b.clone()))
    }

    /// Inverse of `to_alg` for elements with at most one square root.
    pub fn from_alg(x: &Alg) -> Option<QuadExt> {
        match x.radicands().len() {
            0 => Some(QuadExt::rational(x.comps()[0].clone())),
            1 => Some(QuadExt::new(x.comps()[0].clone(), x.comps()[1].clone(), x.radicands()[0].clone())),
            _ => None,
        }
    }

    pub fn eval_complex(&self, vals: &HashMap<Symbol, Complex64>) -> Option<Complex64> {
        let a = self.a.eval_complex(vals)?;
        if self.b.is_zero() {
            return Some(a);
        }
        let b = self.b.eval_complex(vals)?;
        let r = self.radicand.eval_complex(vals)?;
        Some(a + b * r.sqrt())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_alg())
    }
}
