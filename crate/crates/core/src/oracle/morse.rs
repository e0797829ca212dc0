//! Scaling of K(eps) = ∫ d^n y / (eps + Q(y)) over a ball.
//!
//! After diagonalising Q and whitening (u = Λ^{1/2} Oᵀ y) the integral over
//! the ball |u| < cutoff is V_{n-1}(1)/sqrt(det Q) times a radial integral,
//! which is evaluated by adaptive quadrature. The regular part is the
//! analytic-in-eps piece of the radial integral (closed form); the rest is
//! the singular part whose power of eps is measured.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::gamma;

use super::fit::{fit_log, fit_slope, LogFit, SlopeFit};
use super::quad::{integrate_real, QuadOptions};
use super::OracleError;
use crate::asympt::sphere_volume;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseSample {
    pub eps: f64,
    pub value: f64,
    pub regular: f64,
    pub singular: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorseCheck {
    pub n: usize,
    pub det_q: f64,
    /// -1 + n/2
    pub predicted_exponent: f64,
    pub samples: Vec<MorseSample>,
    /// Power fit of the singular part (divided by ln eps for even n >= 4).
    pub slope_fit: SlopeFit,
    /// Logarithmic fit, for n = 2.
    pub log_fit: Option<LogFit>,
    /// |coefficient| read off the fit.
    pub coefficient_measured: f64,
    /// V_{n-1}(1)/sqrt(det Q).
    pub coefficient_predicted: f64,
    /// |pi^{n/2} Gamma(1-n/2)|/sqrt(det Q) for odd n, V_{n-1}(1)/(2 sqrt(det Q)) for even n.
    pub coefficient_exact: f64,
}

/// Determinant of a symmetric positive-definite matrix via its eigenvalues.
pub fn spd_det(q: &DMatrix<f64>) -> Result<f64, OracleError> {
    let n = q.nrows();
    if n == 0 || q.ncols() != n {
        return Err(OracleError::InvalidInput("Q must be square and nonempty".into()));
    }
    let scale = q.amax().max(1e-300);
    if (q - q.transpose()).amax() > 1e-12 * scale {
        return Err(OracleError::InvalidInput("Q must be symmetric".into()));
    }
    let eig = SymmetricEigen::new(q.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 1e-14 * scale)) {
        return Err(OracleError::NotPositiveDefinite);
    }
    Ok(eig.eigenvalues.iter().product())
}

fn radial(n: usize, eps: f64, cutoff: f64) -> Result<f64, OracleError> {
    let k = n as i32 - 1;
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_intervals: 4000 };
    // split at the peak scale so the adaptive rule sees it immediately
    let knee = eps.sqrt().min(cutoff);
    let f = |u: f64| u.powi(k) / (eps + u * u);
    Ok(integrate_real(f, 0.0, knee, opts)? + integrate_real(f, knee, cutoff, opts)?)
}

/// Analytic part of ∫_0^R u^{n-1}/(eps+u^2) du.
fn radial_regular(n: usize, eps: f64, r: f64) -> f64 {
    if n % 2 == 1 {
        // u^{2m}/(u^2+eps) = sum_j (-eps)^j u^{2m-2-2j} + (-eps)^m/(u^2+eps)
        let m = (n - 1) / 2;
        let mut s = 0.0;
        for j in 0..m {
            let p = 2 * (m - j) - 1;
            s += (-eps).powi(j as i32) * r.powi(p as i32) / p as f64;
        }
        // arctan(R/sqrt(eps))/sqrt(eps) = pi/(2 sqrt(eps)) - arctan(sqrt(eps)/R)/sqrt(eps)
        let se = eps.sqrt();
        s - (-eps).powi(m as i32) * (se / r).atan() / se
    } else {
        // u^{2m-1}/(u^2+eps) = sum_j (-eps)^j u^{2m-3-2j} + (-eps)^{m-1} u/(u^2+eps)
        let m = n / 2;
        let mut s = 0.0;
        for j in 0..m - 1 {
            let p = 2 * (m - 1 - j);
            s += (-eps).powi(j as i32) * r.powi(p as i32) / p as f64;
        }
        s + (-eps).powi(m as i32 - 1) * 0.5 * (r * r + eps).ln()
    }
}

/// K(eps) over the whitened ball of radius `cutoff`.
pub fn morse_integral(q: &DMatrix<f64>, eps: f64, cutoff: f64) -> Result<f64, OracleError> {
    Ok(morse_sample(q, eps, cutoff)?.value)
}

pub fn morse_sample(q: &DMatrix<f64>, eps: f64, cutoff: f64) -> Result<MorseSample, OracleError> {
    let n = q.nrows();
    if !(1..=5).contains(&n) {
        return Err(OracleError::InvalidInput(format!("dimension {} outside 1..=5", n)));
    }
    if !(eps > 0.0 && cutoff > 0.0) {
        return Err(OracleError::InvalidInput("eps and cutoff must be positive".into()));
    }
    let det = spd_det(q)?;
    let pref = sphere_volume(n as i64) / det.sqrt();
    let value = pref * radial(n, eps, cutoff)?;
    let regular = pref * radial_regular(n, eps, cutoff);
    Ok(MorseSample { eps, value, regular, singular: value - regular })
}

/// Singular-part scaling over a list of strictly decreasing eps values.
pub fn morse_check(q: &DMatrix<f64>, eps: &[f64], cutoff: f64) -> Result<MorseCheck, OracleError> {
    let n = q.nrows();
    let samples = eps.iter().map(|&e| morse_sample(q, e, cutoff)).collect::<Result<Vec<_>, _>>()?;
    let det_q = spd_det(q)?;
    let observable: Vec<(f64, Complex64)> = samples
        .iter()
        .map(|s| {
            let v = if n % 2 == 0 && n >= 4 { s.singular / s.eps.ln() } else { s.singular };
            (s.eps, Complex64::new(v, 0.0))
        })
        .collect();
    let slope_fit = fit_slope(&observable)?;
    let log_fit = if n == 2 { Some(fit_log(&observable)?) } else { None };
    let coefficient_measured = match &log_fit {
        Some(l) => l.b.abs(),
        None => slope_fit.intercept.exp(),
    };
    let v = sphere_volume(n as i64);
    let coefficient_exact = if n % 2 == 1 {
        (PI.powf(n as f64 / 2.0) * gamma(1.0 - n as f64 / 2.0)).abs() / det_q.sqrt()
    } else {
        v / (2.0 * det_q.sqrt())
    };
    Ok(MorseCheck {
        n,
        det_q,
        predicted_exponent: -1.0 + n as f64 / 2.0,
        samples,
        slope_fit,
        log_fit,
        coefficient_measured,
        coefficient_predicted: v / det_q.sqrt(),
        coefficient_exact,
    })
}
