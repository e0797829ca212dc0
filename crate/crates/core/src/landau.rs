//! Landau polynomials of finite pinches.
//!
//! Every polynomial carries a normalization string; different constructions
//! agree up to nonzero factors and are compared through quotients.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::exactalg::{det, det_alg, Alg, ExactError, Poly, RatFunc};
use crate::pinch::{propagator_at, propagator_momentum_at, PinchError, PinchSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandauError {
    #[error("pinch is not finite: {0}")]
    NotFinite(String),
    #[error("not a one-loop subset: {0}")]
    NotOneLoopSubset(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Pinch(#[from] PinchError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LandauPolynomial {
    pub subset: Vec<usize>,
    /// A polynomial, or for branch-specific results a polynomial with
    /// square-root coefficients.
    pub poly: Alg,
    pub normalization: String,
    pub branch: Option<Vec<i8>>,
    pub notes: Vec<String>,
}

impl LandauPolynomial {
    pub fn as_poly(&self) -> Option<Poly> {
        self.poly.as_ratfunc().and_then(|r| r.as_poly().cloned())
    }
}

impl Serialize for LandauPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LandauPolynomial", 5)?;
        st.serialize_field("subset", &self.subset)?;
        st.serialize_field("poly", &self.poly.to_string())?;
        st.serialize_field("normalization", &self.normalization)?;
        st.serialize_field("branch", &self.branch)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

fn require_finite(sol: &PinchSolution) -> Result<(), LandauError> {
    if sol.is_finite() {
        Ok(())
    } else {
        Err(LandauError::NotFinite(format!("subset {:?} is {:?}", sol.subset, sol.classification)))
    }
}

/// Integer-primitive numerator with positive leading coefficient, and the
/// factor f with r = f * numerator.
pub fn primitive_numerator(r: &RatFunc) -> (Poly, RatFunc) {
    let (c, prim) = r.num().primitive_signed();
    let factor = RatFunc::new(Poly::constant(c), r.den().clone()).expect("nonzero denominator");
    (prim, factor)
}

/// x / y when y is nonzero.
pub fn quotient(x: &Alg, y: &Alg) -> Option<Alg> {
    y.inv().map(|yi| x * &yi)
}

/// Product of the residual condition over all sign branches, reduced to an
/// integer-primitive polynomial.
pub fn landau_from_pinch(sol: &PinchSolution) -> Result<LandauPolynomial, LandauError> {
    require_finite(sol)?;
    let mut prod = Alg::one();
    for b in &sol.branches {
        prod = &prod * &b.conditions[0];
    }
    let r = match prod.as_ratfunc() {
        Some(r) => r,
        None => prod.norm(),
    };
    if r.is_zero() {
        return Err(LandauError::NotFinite(format!(
            "the residual condition of subset {:?} vanishes identically",
            sol.subset
        )));
    }
    let (poly, factor) = primitive_numerator(&r);
    let mut notes = Vec::new();
    if sol.branches.len() > 1 {
        notes.push(format!("product over {} sign branches", sol.branches.len()));
    }
    notes.push(format!("cleared factor: {}", factor));
    Ok(LandauPolynomial {
        subset: sol.subset.clone(),
        poly: Alg::from_poly(poly),
        normalization: "numerator of the residual propagator at the pinch (product over branches), \
                        integer-primitive with positive leading coefficient"
            .into(),
        branch: None,
        notes,
    })
}

struct OneLoop {
    w: Vec<Vec<Alg>>,
    b: Vec<RatFunc>,
    mu0: RatFunc,
    gram: Vec<Vec<RatFunc>>,
}

fn one_loop_data(d: &Diagram, subset: &[usize], base: usize) -> Result<OneLoop, LandauError> {
    let loops: Vec<Vec<usize>> = subset.iter().map(|&i| d.propagators[i].loops_touched()).collect();
    if loops.iter().any(|l| l.len() != 1 || l[0] != loops[0][0]) {
        return Err(LandauError::NotOneLoopSubset(format!("propagators {:?} do not share a single loop", subset)));
    }
    if !subset.contains(&base) {
        return Err(LandauError::NotOneLoopSubset(format!("base propagator {} is not in {:?}", base, subset)));
    }
    let a = loops[0][0];
    let norm = |i: usize| -> (Vec<Alg>, RatFunc) {
        let p = &d.propagators[i];
        let c = BigRational::from_integer(p.routing[a].into());
        let u = p.shift.iter().map(|x| Alg::from_rational(x / &c)).collect();
        (u, p.mass_sq.scale(&(&c * &c).recip()))
    };
    let (u0, mu0) = norm(base);
    let mut w = Vec::new();
    let mut mus = Vec::new();
    for &i in subset.iter().filter(|&&i| i != base) {
        let (u, mu) = norm(i);
        w.push(u.iter().zip(u0.iter()).map(|(x, y)| x - y).collect::<Vec<_>>());
        mus.push(mu);
    }
    let k = w.len();
    let mut gram = vec![vec![RatFunc::zero(); k]; k];
    for j in 0..k {
        for l in 0..k {
            gram[j][l] = d.ext_dot(&w[j], &w[l])?.as_ratfunc().expect("rational Gram entries");
        }
    }
    let half = BigRational::new((-1).into(), 2.into());
    let b = (0..k).map(|j| (&(&gram[j][j] + &mus[j]) - &mu0).scale(&half)).collect();
    Ok(OneLoop { w, b, mu0, gram })
}

fn bordered(data: &OneLoop) -> RatFunc {
    let k = data.w.len();
    let mut m = vec![vec![RatFunc::zero(); k + 1]; k + 1];
    for j in 0..k {
        for l in 0..k {
            m[j][l] = data.gram[j][l].clone();
        }
        m[j][k] = data.b[j].clone();
        m[k][j] = data.b[j].clone();
    }
    m[k][k] = -&data.mu0;
    det(&m)
}

/// The (k+1)x(k+1) bordered Gram determinant of a one-loop subset, with the
/// first propagator as base. Equals -det(G) * D_base(Q).
pub fn bordered_gram_det(d: &Diagram, subset: &[usize]) -> Result<Poly, LandauError> {
    let base = *subset.first().ok_or_else(|| LandauError::NotOneLoopSubset("empty subset".into()))?;
    bordered_gram_det_based(d, subset, base)
}

pub fn bordered_gram_det_based(d: &Diagram, subset: &[usize], base: usize) -> Result<Poly, LandauError> {
    let data = one_loop_data(d, subset, base)?;
    let r = bordered(&data);
    // entries are polynomial for polynomial masses; otherwise keep the numerator
    Ok(r.as_poly().cloned().unwrap_or_else(|| r.num().clone()))
}

/// The Gram determinant of the shift differences of a one-loop subset.
pub fn one_loop_gram_det(d: &Diagram, subset: &[usize]) -> Result<RatFunc, LandauError> {
    let base = *subset.first().ok_or_else(|| LandauError::NotOneLoopSubset("empty subset".into()))?;
    let data = one_loop_data(d, subset, base)?;
    Ok(det(&data.gram))
}

/// Parallel directions of the involved loops, as (loop, frame vector) pairs.
fn parallel_directions(sol: &PinchSolution) -> Vec<(usize, Vec<Alg>)> {
    let mut out = Vec::new();
    for &a in &sol.involved_loops {
        for f in &sol.frames[a] {
            out.push((a, f.iter().map(|c| Alg::from_rational(c.clone())).collect()));
        }
    }
    out
}

/// Product over involved loops of sqrt(det Gram(frame)).
pub fn frame_volume(d: &Diagram, sol: &PinchSolution) -> Result<Alg, LandauError> {
    let mut vol = Alg::one();
    for &a in &sol.involved_loops {
        let f: Vec<Vec<Alg>> = sol.frames[a].iter().map(|v| v.iter().map(|c| Alg::from_rational(c.clone())).collect()).collect();
        if f.is_empty() {
            continue;
        }
        let mut g = vec![vec![RatFunc::zero(); f.len()]; f.len()];
        for j in 0..f.len() {
            for l in 0..f.len() {
                g[j][l] = d.ext_dot(&f[j], &f[l])?.as_ratfunc().expect("rational Gram entries");
            }
        }
        vol = &vol * &Alg::sqrt_ratfunc(&det(&g));
    }
    Ok(vol)
}

/// Rows (P_i(Q), grad_parallel P_i(Q)) for every propagator of the subset,
/// gradients taken along the frame vectors (covariant components).
fn value_gradient_rows(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<Vec<Vec<Alg>>, LandauError> {
    let alpha = sol.alpha(branch);
    let dirs = parallel_directions(sol);
    if dirs.len() + 1 != sol.subset.len() {
        return Err(LandauError::ShapeMismatch(format!(
            "{} propagators against {} parallel directions: the determinant is not square",
            sol.subset.len(),
            dirs.len()
        )));
    }
    let mut rows = Vec::new();
    for &i in &sol.subset {
        let k = propagator_momentum_at(d, i, alpha);
        let mut row = vec![propagator_at(d, i, alpha)?];
        for (a, f) in &dirs {
            let r = d.propagators[i].routing[*a];
            let g = if r == 0 { Alg::zero() } else { &d.ext_dot(&k, f)? * &Alg::from_int(2 * r) };
            row.push(g);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// det[P_i(Q) | d_parallel P_i(Q)] with orthonormal parallel components, one
/// result per sign branch.
pub fn normalized_landau(d: &Diagram, sol: &PinchSolution) -> Result<Vec<LandauPolynomial>, LandauError> {
    require_finite(sol)?;
    let vol = frame_volume(d, sol)?;
    let vol_inv = vol
        .inv()
        .ok_or_else(|| LandauError::ShapeMismatch("degenerate parallel frame".into()))?;
    let reference = landau_from_pinch(sol)?;
    let mut out = Vec::new();
    for (bi, b) in sol.branches.iter().enumerate() {
        let rows = value_gradient_rows(d, sol, bi)?;
        let value = &det_alg(&rows) * &vol_inv;
        let mut notes = Vec::new();
        if sol.branches.len() == 1 {
            if let Some(q) = quotient(&value, &reference.poly) {
                notes.push(format!("quotient against the polynomial form: {}", q));
            }
        }
        out.push(LandauPolynomial {
            subset: sol.subset.clone(),
            poly: value,
            normalization: "determinant of values and orthonormal parallel derivatives at the pinch".into(),
            branch: if sol.branch_loops.is_empty() { None } else { Some(b.signs.clone()) },
            notes,
        });
    }
    Ok(out)
}

/// Pinch-point parameters of the five-propagator two-loop pinch:
/// Q1 = alpha1 p1 + beta1 p2, Q2 = alpha2 p1 + beta2 p2,
/// Q2 = sigma1 p1 + rho1 Q1, Q1 + p1 - p2 = sigma2 p2 + rho2 Q2.
#[derive(Clone, Debug, PartialEq)]
pub struct FivePinchParams {
    pub alpha1: Alg,
    pub beta1: Alg,
    pub alpha2: Alg,
    pub beta2: Alg,
    pub sigma1: Alg,
    pub rho1: Alg,
    pub sigma2: Alg,
    pub rho2: Alg,
    /// (p1.p2)^2 - p1^2 p2^2
    pub delta2: Alg,
}

struct FiveShape {
    /// loop of the first pair, loop of the second pair
    loops: [usize; 2],
    /// subset propagators ordered: pair on loop 1, pair on loop 2, link
    order: [usize; 5],
    ext: [usize; 2],
}

fn five_shape(d: &Diagram, sol: &PinchSolution) -> Result<FiveShape, LandauError> {
    let bad = |why: &str| LandauError::ShapeMismatch(format!("subset {:?}: {}", sol.subset, why));
    if sol.subset.len() != 5 || sol.involved_loops.len() != 2 {
        return Err(bad("need five propagators on two loops"));
    }
    let (l1, l2) = (sol.involved_loops[0], sol.involved_loops[1]);
    let on = |l: usize| -> Vec<usize> {
        sol.subset.iter().copied().filter(|&i| d.propagators[i].loops_touched() == vec![l]).collect()
    };
    let (p1, p2) = (on(l1), on(l2));
    let link: Vec<usize> = sol.subset.iter().copied().filter(|&i| d.propagators[i].loops_touched().len() == 2).collect();
    if p1.len() != 2 || p2.len() != 2 || link.len() != 1 {
        return Err(bad("need two propagators per loop and one linking propagator"));
    }
    if sol.frames[l1].len() != 2 || sol.frames[l2].len() != 2 {
        return Err(bad("need a two-dimensional parallel frame per loop"));
    }
    let mut ext = Vec::new();
    for f in &sol.frames[l1] {
        let nz: Vec<usize> = (0..f.len()).filter(|&e| !f[e].is_zero()).collect();
        if nz.len() != 1 || !f[nz[0]].is_one() {
            return Err(bad("the frame is not made of external momenta"));
        }
        ext.push(nz[0]);
    }
    Ok(FiveShape { loops: [l1, l2], order: [p1[0], p1[1], p2[0], p2[1], link[0]], ext: [ext[0], ext[1]] })
}

pub fn five_pinch_params(d: &Diagram, sol: &PinchSolution, branch: usize) -> Result<FivePinchParams, LandauError> {
    require_finite(sol)?;
    let sh = five_shape(d, sol)?;
    let alpha = sol.alpha(branch);
    let [e1, e2] = sh.ext;
    let (a1, b1) = (alpha[sh.loops[0]][e1].clone(), alpha[sh.loops[0]][e2].clone());
    let (a2, b2) = (alpha[sh.loops[1]][e1].clone(), alpha[sh.loops[1]][e2].clone());
    let inv = |x: &Alg, what: &str| {
        x.inv()
            .ok_or_else(|| LandauError::ShapeMismatch(format!("{} vanishes at the pinch", what)))
    };
    let rho1 = &b2 * &inv(&b1, "beta1")?;
    let sigma1 = &a2 - &(&rho1 * &a1);
    let rho2 = &(&a1 + &Alg::one()) * &inv(&a2, "alpha2")?;
    let sigma2 = &(&b1 - &Alg::one()) - &(&rho2 * &b2);
    let g = |x: usize, y: usize| -> Result<Alg, LandauError> { Ok(Alg::from_ratfunc(d.gram_entry(x, y)?.clone())) };
    let p12 = g(e1, e2)?;
    let delta2 = &(&p12 * &p12) - &(&g(e1, e1)? * &g(e2, e2)?);
    Ok(FivePinchParams { alpha1: a1, beta1: b1, alpha2: a2, beta2: b2, sigma1, rho1, sigma2, rho2, delta2 })
}

/// The five-row block determinant with last column `a` (ordered: pair on the
/// first loop, pair on the second loop, linking propagator). Rows carry the
/// components of the propagator momenta in the frame of external momenta;
/// the result is scaled by the Gram determinant p1^2 p2^2 - (p1.p2)^2.
pub fn five_pinch_block_det(d: &Diagram, sol: &PinchSolution, branch: usize, a: &[Alg]) -> Result<Alg, LandauError> {
    let sh = five_shape(d, sol)?;
    if a.len() != 5 {
        return Err(LandauError::ShapeMismatch(format!("last column needs 5 entries, got {}", a.len())));
    }
    let alpha = sol.alpha(branch);
    let mut m = Vec::new();
    for (row, &i) in sh.order.iter().enumerate() {
        let k = propagator_momentum_at(d, i, alpha);
        let mut r = Vec::new();
        for &l in &sh.loops {
            let c = d.propagators[i].routing[l];
            for &e in &sh.ext {
                r.push(if c == 0 { Alg::zero() } else { &k[e] * &Alg::from_int(c) });
            }
        }
        r.push(a[row].clone());
        m.push(r);
    }
    let p = five_pinch_params(d, sol, branch)?;
    Ok(&det_alg(&m) * &(-&p.delta2))
}

/// The right-hand side beta1 alpha2 Delta^2 (a5 - a2 - a4 - sigma1 (a2 - a1)
/// - rho1 a1 - sigma2 (a4 - a3) - rho2 a3).
pub fn five_pinch_expansion(p: &FivePinchParams, a: &[Alg]) -> Alg {
    let inner = &(&(&(&a[4] - &a[1]) - &a[3]) - &(&p.sigma1 * &(&a[1] - &a[0])))
        - &(&(&(&p.rho1 * &a[0]) + &(&p.sigma2 * &(&a[3] - &a[2]))) + &(&p.rho2 * &a[2]));
    &(&(&p.beta1 * &p.alpha2) * &p.delta2) * &inner
}

/// The five-pinch Landau polynomial per sign branch: the block determinant
/// with the propagator values at the pinch as last column.
pub fn five_pinch_det(d: &Diagram, sol: &PinchSolution) -> Result<Vec<LandauPolynomial>, LandauError> {
    require_finite(sol)?;
    let sh = five_shape(d, sol)?;
    let mut out = Vec::new();
    for (bi, b) in sol.branches.iter().enumerate() {
        let a: Vec<Alg> = sh.order.iter().map(|&i| propagator_at(d, i, sol.alpha(bi))).collect::<Result<_, _>>()?;
        let value = five_pinch_block_det(d, sol, bi, &a)?;
        out.push(LandauPolynomial {
            subset: sol.subset.clone(),
            poly: value,
            normalization: "five-row block determinant times the Gram determinant of p1, p2, no overall rational factor".into(),
            branch: if sol.branch_loops.is_empty() { None } else { Some(b.signs.clone()) },
            notes: Vec::new(),
        });
    }
    Ok(out)
}
