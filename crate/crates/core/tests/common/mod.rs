#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use pinchlab::exactalg::{Poly, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonzero rational n/den with n in [lo, hi].
pub fn rand_rat(r: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> BigRational {
    loop {
        let n = r.gen_range(lo..=hi);
        if n != 0 {
            return BigRational::new(BigInt::from(n), BigInt::from(den));
        }
    }
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn subst_map(vals: &[(&str, BigRational)]) -> BTreeMap<Symbol, Poly> {
    vals.iter().map(|(k, v)| (Symbol::new(k), Poly::constant(v.clone()))).collect()
}

pub fn rat_map(vals: &[(&str, BigRational)]) -> BTreeMap<Symbol, BigRational> {
    vals.iter().map(|(k, v)| (Symbol::new(k), v.clone())).collect()
}
