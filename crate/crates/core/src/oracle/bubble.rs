//! One-loop bubble near its normal threshold.
//!
//! Euclidean propagators q^2 + m0^2 and (q+p)^2 + m1^2 with p^2 = s. Split
//! q = (x along p, q_perp) with |q_perp| = t. Two numeric paths:
//!
//! * reduced: the x integral is done by residues, leaving the transverse
//!   integral ∫ d^{d-1}q_perp of π(a+b)/(ab((a+b)^2+s)), a = sqrt(t^2+m0^2),
//!   b = sqrt(t^2+m1^2), by adaptive quadrature in t;
//! * direct: both x and t by nested adaptive quadrature, the x contour being
//!   a straight line through the pinch region tilted so that it separates
//!   the upper and lower pole pairs (the analytic continuation in s), or,
//!   where no straight line does, a polyline through the pair midpoints.
//!
//! At d = 5 the integral is UV divergent; both paths subtract the
//! s-independent integrand 1/(q^2+M^2)^2 with M^2 = (m0^2+m1^2)/2 + 1.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::fit::{fit_log, fit_slope, LogFit, SlopeFit};
use super::quad::{integrate, integrate_real_line, integrate_semi_infinite, QuadOptions};
use super::OracleError;
use crate::asympt::{sphere_volume, Exponent};
use crate::diagram::{parse_diagram, Dimension};
use crate::exactalg::Symbol;
use crate::landau::landau_from_pinch;
use crate::pinch::{eval_alg, eval_pinch, solve_pinch, PinchError, PinchSolution};

const BUBBLE_SPEC: &str = include_str!("../../../../fixtures/bubble.json");

fn bubble_pinch() -> Result<&'static PinchSolution, OracleError> {
    static SOL: OnceLock<Result<PinchSolution, PinchError>> = OnceLock::new();
    SOL.get_or_init(|| {
        let d = parse_diagram(BUBBLE_SPEC)?;
        solve_pinch(&d, &[0, 1])
    })
    .as_ref()
    .map_err(|e| OracleError::Pinch(e.clone()))
}

fn kinematics(s: Complex64, m0_sq: f64, m1_sq: f64) -> HashMap<Symbol, Complex64> {
    [("s", s), ("m0sq", m0_sq.into()), ("m1sq", m1_sq.into())]
        .into_iter()
        .map(|(k, v)| (Symbol::new(k), v))
        .collect()
}

/// Parallel pinch coordinate alpha (Q = alpha p) at the given kinematics.
pub fn bubble_alpha(s: Complex64, m0_sq: f64, m1_sq: f64) -> Result<Complex64, OracleError> {
    let sol = bubble_pinch()?;
    let nb = eval_pinch(sol, &kinematics(s, m0_sq, m1_sq))?;
    Ok(nb[0].alpha[0][0])
}

/// Value of the bubble Landau polynomial at the given kinematics.
pub fn bubble_landau(s: Complex64, m0_sq: f64, m1_sq: f64) -> Result<Complex64, OracleError> {
    let l = landau_from_pinch(bubble_pinch()?).map_err(|e| OracleError::Symbolic(e.to_string()))?;
    Ok(eval_alg(&l.poly, &kinematics(s, m0_sq, m1_sq))?)
}

/// Normal threshold s* = -(m0 + m1)^2.
pub fn bubble_threshold(m0_sq: f64, m1_sq: f64) -> f64 {
    -(m0_sq.sqrt() + m1_sq.sqrt()).powi(2)
}

fn check_input(m0_sq: f64, m1_sq: f64, d: u32) -> Result<(), OracleError> {
    if d != 3 && d != 5 {
        return Err(OracleError::NonConvergent(format!(
            "bubble quadrature supports d = 3 or 5 (d = {} is {})",
            d,
            if d % 2 == 0 { "not handled by the odd-d transverse reduction" } else { "beyond the single UV subtraction" }
        )));
    }
    if !(m0_sq > 0.0 && m1_sq > 0.0 && m0_sq.is_finite() && m1_sq.is_finite()) {
        return Err(OracleError::InvalidInput("masses squared must be positive".into()));
    }
    Ok(())
}

fn sub_mass_sq(m0_sq: f64, m1_sq: f64) -> f64 {
    0.5 * (m0_sq + m1_sq) + 1.0
}

fn opts(rel: f64) -> QuadOptions {
    QuadOptions { abs_tol: 1e-15, rel_tol: rel, max_intervals: 6000 }
}

/// t^3 (I_t - I_t^sub) for t >= 1, in y = 1/t with a = t(1 + da) etc. so
/// the O(1) parts cancel symbolically.
fn subtracted_tail(t: f64, s: Complex64, m0: f64, m1: f64, msub_sq: f64) -> Complex64 {
    let y2 = 1.0 / (t * t);
    let shift = |m2: f64| {
        let p = m2 * y2;
        p / ((1.0 + p).sqrt() + 1.0)
    };
    let (da, db, dg) = (shift(m0 * m0), shift(m1 * m1), shift(msub_sq));
    let sig = da + db;
    let pr = da * db;
    let sy2 = s * y2;
    let q = Complex64::new(4.0 + 4.0 * sig + sig * sig, 0.0) + sy2;
    // 2 (1+dg)^3 (2+sig) - (1+da)(1+db)((2+sig)^2 + s y^2), constant terms removed
    let num = -6.0 * sig + 12.0 * dg + 6.0 * sig * dg + (4.0 + 2.0 * sig) * (3.0 * dg * dg + dg * dg * dg)
        - 5.0 * sig * sig
        - sig * sig * sig
        - sy2 * (1.0 + sig)
        - pr * q;
    let g3 = (1.0 + dg).powi(3);
    PI * num / (2.0 * g3 * (1.0 + da) * (1.0 + db) * q)
}

/// Reduced transverse integrand t^{d-2} (I_t - I_t^sub).
fn reduced_integrand(t: f64, ds: Complex64, m0: f64, m1: f64, msub_sq: f64, d: u32) -> Complex64 {
    if d == 5 && t >= 1.0 {
        let s = ds + bubble_threshold(m0 * m0, m1 * m1);
        return subtracted_tail(t, s, m0, m1, msub_sq);
    }
    let t2 = t * t;
    let a = (t2 + m0 * m0).sqrt();
    let b = (t2 + m1 * m1).sqrt();
    // (a+b)^2 + s written around the threshold to avoid cancellation
    let den = (t2 / (a + m0) + t2 / (b + m1)) * (a + b + m0 + m1) + ds;
    let mut v = Complex64::new(PI * (a + b) / (a * b), 0.0) / den;
    if d == 5 {
        let c = (t2 + msub_sq).sqrt();
        v -= PI / (2.0 * c * c * c);
    }
    v * t.powi(d as i32 - 2)
}

/// Reduced path: residue in the parallel coordinate, quadrature in |q_perp|.
pub fn bubble_numeric(s: Complex64, m0_sq: f64, m1_sq: f64, d: u32) -> Result<Complex64, OracleError> {
    check_input(m0_sq, m1_sq, d)?;
    bubble_alpha(s, m0_sq, m1_sq)?;
    let (m0, m1) = (m0_sq.sqrt(), m1_sq.sqrt());
    let ds = s - bubble_threshold(m0_sq, m1_sq);
    if ds.norm() == 0.0 && d == 3 {
        return Err(OracleError::NonConvergent("d = 3 bubble diverges logarithmically at threshold".into()));
    }
    let msub = sub_mass_sq(m0_sq, m1_sq);
    let f = |t: f64| reduced_integrand(t, ds, m0, m1, msub, d);
    let knee = ds.norm().sqrt().clamp(1e-8, 1.0);
    let o = opts(1e-13);
    let v = integrate(f, 0.0, knee, o)? + integrate(f, knee, 1.0, o)? + integrate_semi_infinite(f, 1.0, o)?;
    Ok(v * sphere_volume(d as i64 - 1))
}

/// Straight line x = dir (u + i h0) with `upper` on its left and `lower` on
/// its right, maximising the smallest distance. None if no tilt separates.
fn separating_line(upper: &[Complex64], lower: &[Complex64]) -> Option<(Complex64, f64)> {
    let mut best: Option<(f64, Complex64, f64)> = None;
    for k in -24..=24 {
        let psi = 0.05 * k as f64;
        let rot = Complex64::from_polar(1.0, -psi);
        let hu = upper.iter().map(|z| (z * rot).im).fold(f64::INFINITY, f64::min);
        let hd = lower.iter().map(|z| (z * rot).im).fold(f64::NEG_INFINITY, f64::max);
        let gap = hu - hd;
        if gap > 0.0 && best.map_or(true, |(g, _, _)| gap > g) {
            best = Some((gap, rot.conj(), 0.5 * (hu + hd)));
        }
    }
    best.map(|(_, dir, h0)| (dir, h0))
}

/// Direct path: nested quadrature in (x, t) on the deformed slice.
pub fn bubble_direct(s: Complex64, m0_sq: f64, m1_sq: f64, d: u32) -> Result<Complex64, OracleError> {
    check_input(m0_sq, m1_sq, d)?;
    let alpha = bubble_alpha(s, m0_sq, m1_sq)?;
    let p = s.sqrt();
    let c0 = alpha * p;
    let c1 = (alpha + 1.0) * p;
    let msub = sub_mass_sq(m0_sq, m1_sq);
    let inner_opts = opts(1e-9);
    let inner = |t: f64| -> Result<Complex64, OracleError> {
        let (aa, bb) = (t * t + m0_sq, t * t + m1_sq);
        let (a, b) = (aa.sqrt(), bb.sqrt());
        let i = Complex64::i();
        let upper = [-c0 + i * a, -c1 + i * b];
        let lower = [-c0 - i * a, -c1 - i * b];
        let h = |x: Complex64| 1.0 / (((x + c0) * (x + c0) + aa) * ((x + c1) * (x + c1) + bb));
        let mut v = if let Some((dir, h0)) = separating_line(&upper, &lower) {
            integrate_real_line(|u| dir * h(dir * Complex64::new(u, h0)), inner_opts)?
        } else {
            // the pole pairs straddle -c0 and -c1 vertically, so a polyline
            // through the two midpoints separates them unless Re p = 0
            let (ml, mr) = if (-c0).re <= (-c1).re { (-c0, -c1) } else { (-c1, -c0) };
            if (mr - ml).re <= 1e-12 * (1.0 + p.norm()) {
                return Err(OracleError::NonConvergent(format!(
                    "x contour pinched at t = {} (s on the threshold cut)",
                    t
                )));
            }
            let seg = mr - ml;
            integrate_semi_infinite(|u| h(ml - u), 0.0, inner_opts)?
                + integrate(|tau| seg * h(ml + seg * tau), 0.0, 1.0, inner_opts)?
                + integrate_semi_infinite(|u| h(mr + u), 0.0, inner_opts)?
        };
        if d == 5 {
            let cc = t * t + msub;
            v -= integrate_real_line(|x| Complex64::new(1.0 / ((x * x + cc) * (x * x + cc)), 0.0), inner_opts)?;
        }
        Ok(v * t.powi(d as i32 - 2))
    };
    // the adaptive rule takes a plain closure, so errors are parked and rethrown
    let failure = std::cell::RefCell::new(None);
    let f = |t: f64| match inner(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let o = opts(1e-7);
    let v = integrate(&f, 0.0, 1.0, o)? + integrate_semi_infinite(&f, 1.0, o)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v * sphere_volume(d as i64 - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct BubbleScan {
    pub d: u32,
    pub m0_sq: f64,
    pub m1_sq: f64,
    /// Approach angle: s = s* + eps e^{i theta}.
    pub theta: f64,
    pub threshold: f64,
    /// |Landau polynomial| at the threshold.
    pub landau_residual: f64,
    pub exponent: String,
    pub logarithmic_candidate: bool,
    /// (eps, F(s)) on the approach ray.
    pub values: Vec<(f64, Complex64)>,
    /// (eps, Im(e^{-i theta}(F(s) - F(s*)))), the power-law observable.
    pub observable: Vec<(f64, Complex64)>,
    pub slope_fit: Option<SlopeFit>,
    pub log_fit: Option<LogFit>,
}

impl BubbleScan {
    /// Slope within `tol` of the predicted exponent and r^2 at least `r2`,
    /// or for the logarithmic case an accepted log fit.
    pub fn accepted(&self, tol: f64, r2: f64) -> bool {
        if self.logarithmic_candidate {
            self.log_fit.as_ref().is_some_and(|l| l.b.abs() > 1e-12 && l.r_squared >= 0.99)
        } else {
            let nu = Exponent::new(1, 1, Dimension::Int(self.d as i64)).at(self.d as i64).to_f64().unwrap_or(f64::NAN);
            self.slope_fit.as_ref().is_some_and(|f| (f.slope - nu).abs() <= tol && f.r_squared >= r2)
        }
    }
}

/// Approach the normal threshold along s = s* + eps e^{i theta} and fit the
/// singular behaviour.
pub fn bubble_scan(m0_sq: f64, m1_sq: f64, d: u32, theta: f64, eps: &[f64]) -> Result<BubbleScan, OracleError> {
    check_input(m0_sq, m1_sq, d)?;
    if !(theta.is_finite() && theta.sin().abs() > 1e-6 && theta.abs() < PI) {
        return Err(OracleError::InvalidInput("theta must lie in (-pi, pi) away from 0".into()));
    }
    let sstar = bubble_threshold(m0_sq, m1_sq);
    let landau_residual = bubble_landau(sstar.into(), m0_sq, m1_sq)?.norm();
    let exponent = Exponent::new(1, 1, Dimension::Int(d as i64));
    let logarithmic_candidate = exponent.is_logarithmic();
    let dir = Complex64::from_polar(1.0, theta);
    let values = eps
        .iter()
        .map(|&e| Ok((e, bubble_numeric(sstar + dir * e, m0_sq, m1_sq, d)?)))
        .collect::<Result<Vec<_>, OracleError>>()?;
    let (observable, slope_fit, log_fit) = if logarithmic_candidate {
        (values.clone(), None, Some(fit_log(&values)?))
    } else {
        let f0 = bubble_numeric(sstar.into(), m0_sq, m1_sq, d)?;
        let obs: Vec<(f64, Complex64)> =
            values.iter().map(|&(e, f)| (e, Complex64::new((dir.conj() * (f - f0)).im, 0.0))).collect();
        let fit = fit_slope(&obs)?;
        (obs, Some(fit), None)
    };
    Ok(BubbleScan {
        d,
        m0_sq,
        m1_sq,
        theta,
        threshold: sstar,
        landau_residual,
        exponent: exponent.to_string(),
        logarithmic_candidate,
        values,
        observable,
        slope_fit,
        log_fit,
    })
}
