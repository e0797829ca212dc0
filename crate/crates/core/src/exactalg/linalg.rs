//! Exact determinants and linear solves over a `Field`.

use std::collections::HashMap;

use super::alg::Alg;
use super::field::Field;
use super::gcd::poly_gcd;
use super::poly::Poly;
use super::quadext::QuadExt;
use super::ratfunc::RatFunc;
use super::ExactError;

pub type Matrix<F> = Vec<Vec<F>>;

/// Determinant. Division-free minor expansion up to 6x6, Gaussian
/// elimination above.
pub fn det<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "det of a non-square matrix");
    if n == 0 {
        return F::one();
    }
    if n <= 6 {
        det_minors(m)
    } else {
        det_gauss(m)
    }
}

/// Determinant over `Alg` with the denominators of each row cleared first,
/// so the expansion multiplies polynomial components only; the row factors
/// are divided out once at the end.
pub fn det_alg(m: &[Vec<Alg>]) -> Alg {
    let mut scale = Poly::one();
    let rows: Vec<Vec<Alg>> = m
        .iter()
        .map(|row| {
            let mut l = Poly::one();
            for x in row {
                for c in x.comps() {
                    if !c.den().is_one() {
                        let g = poly_gcd(&l, c.den());
                        l = &l * &c.den().div_exact(&g).expect("gcd divides");
                    }
                }
            }
            let la = Alg::from_poly(l.clone());
            scale = &scale * &l;
            row.iter().map(|x| x * &la).collect()
        })
        .collect();
    let d = det(&rows);
    if scale.is_one() {
        return d;
    }
    d.scale_ratfunc(&RatFunc::new(Poly::one(), scale).expect("nonzero row factors"))
}

/// Laplace expansion along rows with memoized minors keyed by column set.
fn det_minors<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    // minors[cols] = det of rows (n-|cols|..n) restricted to cols
    let mut memo: HashMap<u32, F> = HashMap::new();
    for c in 0..n {
        memo.insert(1 << c, m[n - 1][c].clone());
    }
    for size in 2..=n {
        let row = n - size;
        let mut next: HashMap<u32, F> = HashMap::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let mut acc = F::zero();
            let mut sign_pos = true;
            for c in 0..n {
                if mask >> c & 1 == 0 {
                    continue;
                }
                let e = &m[row][c];
                if !e.is_zero() {
                    let minor = &memo[&(mask & !(1 << c))];
                    if !minor.is_zero() {
                        let t = e.mul(minor);
                        acc = if sign_pos { acc.add(&t) } else { acc.sub(&t) };
                    }
                }
                sign_pos = !sign_pos;
            }
            next.insert(mask, acc);
        }
        memo = next;
    }
    memo.remove(&((1u32 << n) - 1)).unwrap()
}

fn det_gauss<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut d = F::one();
    for k in 0..n {
        let piv = match (k..n).find(|&r| !a[r][k].is_zero()) {
            Some(p) => p,
            None => return F::zero(),
        };
        if piv != k {
            a.swap(piv, k);
            d = d.neg();
        }
        let inv = a[k][k].inv().unwrap();
        d = d.mul(&a[k][k]);
        for r in (k + 1)..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].mul(&inv);
            for c in k..n {
                let t = f.mul(&a[k][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
    }
    d
}

/// Fraction-free Bareiss elimination on a polynomial matrix.
pub fn det_poly(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match ((k + 1)..n).find(|&r| !a[r][k].is_zero()) {
                Some(p) => {
                    a.swap(p, k);
                    sign = !sign;
                }
                None => return Poly::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Determinant of a QuadExt matrix; all nonzero square-root parts must
/// share one radicand.
pub fn det_quadext(m: &[Vec<QuadExt>]) -> Result<QuadExt, ExactError> {
    let am: Vec<Vec<Alg>> = m.iter().map(|r| r.iter().map(|x| x.to_alg()).collect()).collect();
    let d = det(&am);
    QuadExt::from_alg(&d).ok_or_else(|| ExactError::RadicandMismatch("matrix".into(), "several radicands".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<F> {
    pub solution: Vec<F>,
    pub rank: usize,
    pub nullspace_dim: usize,
    /// Basis of the homogeneous solution space.
    pub nullspace: Vec<Vec<F>>,
}

/// Gauss-Jordan elimination. Free variables are set to zero in `solution`.
pub fn solve_linear<F: Field>(a: &[Vec<F>], b: &[F]) -> Result<LinearSolution<F>, ExactError> {
    let rows = a.len();
    if b.len() != rows {
        return Err(ExactError::Shape(format!("{} rows but {} right-hand sides", rows, b.len())));
    }
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if a.iter().any(|r| r.len() != cols) {
        return Err(ExactError::Shape("ragged matrix".into()));
    }
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b.iter())
        .map(|(r, x)| {
            let mut row = r.clone();
            row.push(x.clone());
            row
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = match (r..rows).find(|&i| !m[i][c].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(p, r);
        let inv = m[r][c].inv().unwrap();
        for j in c..=cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=cols {
                let t = f.mul(&m[r][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    if m[rank..].iter().any(|row| !row[cols].is_zero()) {
        return Err(ExactError::InconsistentSystem);
    }
    let mut solution = vec![F::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        solution[c] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = m[i][f].neg();
            }
            v
        })
        .collect();
    Ok(LinearSolution { solution, rank, nullspace_dim: free.len(), nullspace })
}
