//! Multi-quadratic extension Q(vars)(sqrt(r_1), ..., sqrt(r_n)).
//!
//! An element is a sum over subsets S of c_S * prod_{i in S} sqrt(r_i), with
//! c_S rational functions, stored in a vector indexed by bitmask. Radicands
//! are canonical square-free polynomials kept sorted, so equal radicands
//! merge. Products of several radicands that happen to be squares are not
//! detected.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use super::poly::{Poly, Symbol};
use super::ratfunc::RatFunc;
use super::sqfree::sqrt_split;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alg {
    radicands: Arc<Vec<Poly>>,
    comps: Vec<RatFunc>,
}

impl Alg {
    pub fn zero() -> Self {
        Alg::from_ratfunc(RatFunc::zero())
    }

    pub fn one() -> Self {
        Alg::from_ratfunc(RatFunc::one())
    }

    pub fn from_ratfunc(r: RatFunc) -> Self {
        Alg { radicands: Arc::new(Vec::new()), comps: vec![r] }
    }

    pub fn from_poly(p: Poly) -> Self {
        Alg::from_ratfunc(RatFunc::from_poly(p))
    }

    pub fn from_int(n: i64) -> Self {
        Alg::from_ratfunc(RatFunc::from_int(n))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Alg::from_ratfunc(RatFunc::from_rational(c))
    }

    /// The square root of `p`, with the square part pulled out.
    pub fn sqrt_poly(p: &Poly) -> Self {
        if p.is_zero() {
            return Alg::zero();
        }
        let (outer, rad) = sqrt_split(p);
        if rad.is_one() {
            return Alg::from_poly(outer);
        }
        Alg {
            radicands: Arc::new(vec![rad]),
            comps: vec![RatFunc::zero(), RatFunc::from_poly(outer)],
        }
    }

    pub fn sqrt_ratfunc(r: &RatFunc) -> Self {
        let root = Alg::sqrt_poly(&(r.num() * r.den()));
        root.scale_ratfunc(&RatFunc::from_poly(r.den().clone()).inv().unwrap())
    }

    /// sqrt of an element without square-root parts; None otherwise.
    pub fn sqrt(&self) -> Option<Self> {
        self.as_ratfunc().map(|r| Alg::sqrt_ratfunc(&r))
    }

    pub fn radicands(&self) -> &[Poly] {
        &self.radicands
    }

    pub fn comps(&self) -> &[RatFunc] {
        &self.comps
    }

    /// Build from explicit parts; radicands need not be canonical.
    pub fn from_parts(radicands: &[Poly], comps: &[RatFunc]) -> Self {
        assert_eq!(comps.len(), 1 << radicands.len());
        let roots: Vec<Alg> = radicands.iter().map(Alg::sqrt_poly).collect();
        let mut acc = Alg::zero();
        for (mask, c) in comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = Alg::from_ratfunc(c.clone());
            for (i, r) in roots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t = &t * r;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.radicands.is_empty()
    }

    pub fn as_ratfunc(&self) -> Option<RatFunc> {
        if self.radicands.is_empty() {
            Some(self.comps[0].clone())
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> &RatFunc {
        &self.comps[0]
    }

    pub fn scale_ratfunc(&self, r: &RatFunc) -> Self {
        let comps = self.comps.iter().map(|c| c * r).collect();
        Alg { radicands: self.radicands.clone(), comps }.pruned()
    }

    /// Flip the sign of sqrt(radicand i).
    pub fn conj(&self, i: usize) -> Self {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(m, c)| if m >> i & 1 == 1 { -c } else { c.clone() })
            .collect();
        Alg { radicands: self.radicands.clone(), comps }
    }

    /// Flip the sign of the square root of the given radicand, if present.
    pub fn conj_radicand(&self, rad: &Poly) -> Self {
        match self.radicands.iter().position(|r| r == rad) {
            Some(i) => self.conj(i),
            None => self.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut acc = Alg::one();
        let mut y = self.clone();
        loop {
            if y.radicands.is_empty() {
                let r = y.comps[0].inv()?;
                return Some(acc.scale_ratfunc(&r));
            }
            let i = y.radicands.len() - 1;
            let c = y.conj(i);
            acc = &acc * &c;
            y = &y * &c;
        }
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Alg::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    fn pruned(mut self) -> Self {
        let mut i = 0;
        while i < self.radicands.len() {
            let used = self
                .comps
                .iter()
                .enumerate()
                .any(|(m, c)| m >> i & 1 == 1 && !c.is_zero());
            if used {
                i += 1;
                continue;
            }
            let n = self.radicands.len();
            let mut comps = Vec::with_capacity(1 << (n - 1));
            for m in 0..(1usize << n) {
                if m >> i & 1 == 0 {
                    comps.push(std::mem::replace(&mut self.comps[m], RatFunc::zero()));
                }
            }
            let mut rads = (*self.radicands).clone();
            rads.remove(i);
            self.radicands = Arc::new(rads);
            self.comps = comps;
        }
        self
    }

    fn align(a: &Alg, b: &Alg) -> (Arc<Vec<Poly>>, Vec<RatFunc>, Vec<RatFunc>) {
        if Arc::ptr_eq(&a.radicands, &b.radicands) || a.radicands == b.radicands {
            return (a.radicands.clone(), a.comps.clone(), b.comps.clone());
        }
        let mut all: Vec<Poly> = a.radicands.iter().chain(b.radicands.iter()).cloned().collect();
        all.sort();
        all.dedup();
        let n = all.len();
        let remap = |src: &Alg| -> Vec<RatFunc> {
            let idx: Vec<usize> = src
                .radicands
                .iter()
                .map(|r| all.binary_search(r).unwrap())
                .collect();
            let mut out = vec![RatFunc::zero(); 1 << n];
            for (m, c) in src.comps.iter().enumerate() {
                let mut nm = 0usize;
                for (i, j) in idx.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        nm |= 1 << j;
                    }
                }
                out[nm] = c.clone();
            }
            out
        };
        let ca = remap(a);
        let cb = remap(b);
        (Arc::new(all), ca, cb)
    }

    pub fn eval_complex(&self, vals: &HashMap<Symbol, Complex64>) -> Option<Complex64> {
        let roots: Vec<Complex64> = self
            .radicands
            .iter()
            .map(|r| r.eval_complex(vals).map(|z| z.sqrt()))
            .collect::<Option<_>>()?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = c.eval_complex(vals)?;
            for (i, z) in roots.iter().enumerate() {
                if m >> i & 1 == 1 {
                    t *= z;
                }
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn subst_many(&self, map: &BTreeMap<Symbol, Poly>) -> Option<Alg> {
        let rads: Vec<Poly> = self.radicands.iter().map(|r| r.subst_many(map)).collect();
        let comps: Vec<RatFunc> = self
            .comps
            .iter()
            .map(|c| c.subst_many(map))
            .collect::<Option<_>>()?;
        Some(Alg::from_parts(&rads, &comps))
    }

    pub fn contains_var(&self, v: &Symbol) -> bool {
        self.radicands.iter().any(|r| r.contains_var(v)) || self.comps.iter().any(|c| c.contains_var(v))
    }

    /// Product over all sign choices of the square roots; a rational function.
    pub fn norm(&self) -> RatFunc {
        let mut y = self.clone();
        while !y.radicands.is_empty() {
            let i = y.radicands.len() - 1;
            y = &y * &y.conj(i);
        }
        y.comps[0].clone()
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if m == 0 {
                if c.num().num_terms() > 1 && !c.is_poly() {
                    write!(f, "({})", c)?;
                } else {
                    write!(f, "{}", c)?;
                }
                continue;
            }
            write!(f, "({})", c)?;
            for (i, r) in self.radicands.iter().enumerate() {
                if m >> i & 1 == 1 {
                    write!(f, "*sqrt({})", r)?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alg({})", self)
    }
}

impl<'a> Add<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn add(self, o: &'a Alg) -> Alg {
        let (r, a, b) = Alg::align(self, o);
        let comps = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
        Alg { radicands: r, comps }.pruned()
    }
}

impl<'a> Sub<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn sub(self, o: &'a Alg) -> Alg {
        let (r, a, b) = Alg::align(self, o);
        let comps = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
        Alg { radicands: r, comps }.pruned()
    }
}

impl<'a> Mul<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn mul(self, o: &'a Alg) -> Alg {
        if self.radicands.is_empty() {
            return o.scale_ratfunc(&self.comps[0]);
        }
        if o.radicands.is_empty() {
            return self.scale_ratfunc(&o.comps[0]);
        }
        let (r, a, b) = Alg::align(self, o);
        let n = r.len();
        let mut out = vec![RatFunc::zero(); 1 << n];
        let mut prods: HashMap<usize, RatFunc> = HashMap::new();
        for (s, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (t, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let both = s & t;
                let mut c = x * y;
                if both != 0 {
                    let p = prods.entry(both).or_insert_with(|| {
                        let mut acc = Poly::one();
                        for (i, ri) in r.iter().enumerate() {
                            if both >> i & 1 == 1 {
                                acc = &acc * ri;
                            }
                        }
                        RatFunc::from_poly(acc)
                    });
                    c = &c * &*p;
                }
                out[s ^ t] = &out[s ^ t] + &c;
            }
        }
        Alg { radicands: r, comps: out }.pruned()
    }
}

impl<'a> Div<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn div(self, o: &'a Alg) -> Alg {
        self * &o.inv().expect("division by zero algebraic element")
    }
}

impl Neg for &Alg {
    type Output = Alg;
    fn neg(self) -> Alg {
        Alg { radicands: self.radicands.clone(), comps: self.comps.iter().map(|c| -c).collect() }
    }
}

impl Neg for Alg {
    type Output = Alg;
    fn neg(self) -> Alg {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Alg> for Alg {
            type Output = Alg;
            fn $m(self, o: Alg) -> Alg {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Alg> for Alg {
            type Output = Alg;
            fn $m(self, o: &'a Alg) -> Alg {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Alg> for &'a Alg {
            type Output = Alg;
            fn $m(self, o: Alg) -> Alg {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<RatFunc> for Alg {
    fn from(r: RatFunc) -> Self {
        Alg::from_ratfunc(r)
    }
}

impl From<Poly> for Alg {
    fn from(p: Poly) -> Self {
        Alg::from_poly(p)
    }
}
