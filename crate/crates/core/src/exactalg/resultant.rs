//! Sylvester resultants.

use num_traits::Signed;

use super::linalg::det_poly;
use super::poly::{Poly, Symbol};
use super::ExactError;

/// Resultant of `f` and `g` with respect to `var`, sign-normalized so the
/// grlex-leading coefficient is positive.
pub fn resultant(f: &Poly, g: &Poly, var: &Symbol) -> Result<Poly, ExactError> {
    if f.is_zero() || g.is_zero() {
        return Err(ExactError::DegenerateInput("resultant of the zero polynomial".into()));
    }
    let m = f.degree_in(var) as usize;
    let n = g.degree_in(var) as usize;
    let r = if m == 0 {
        f.pow(n as u32)
    } else if n == 0 {
        g.pow(m as u32)
    } else {
        let fc = f.coeffs_in(var);
        let gc = g.coeffs_in(var);
        let size = m + n;
        let mut s = vec![vec![Poly::zero(); size]; size];
        for i in 0..n {
            for (k, c) in fc.iter().rev().enumerate() {
                s[i][i + k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in gc.iter().rev().enumerate() {
                s[n + i][i + k] = c.clone();
            }
        }
        det_poly(&s)
    };
    if r.leading_coeff().is_negative() {
        Ok(-r)
    } else {
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::expr::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn linear_pair() {
        let x = Symbol::new("x");
        assert_eq!(resultant(&p("x-a"), &p("x-b"), &x).unwrap(), p("a-b"));
        assert_eq!(resultant(&p("x^2-t"), &p("x-u"), &x).unwrap(), p("u^2-t"));
    }

    #[test]
    fn zero_input() {
        let x = Symbol::new("x");
        assert!(resultant(&Poly::zero(), &p("x"), &x).is_err());
    }
}
