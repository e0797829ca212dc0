//! Least-squares fits of near-singular samples: log|value| against log eps,
//! and value against a + b log eps for the logarithmic case.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::OracleError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub samples: Vec<(f64, Complex64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit of Re(value) = a + b ln(eps).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub samples: Vec<(f64, Complex64)>,
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

fn check_eps(samples: &[(f64, Complex64)]) -> Result<(), OracleError> {
    if samples.len() < 5 {
        return Err(OracleError::DegenerateSamples(format!("{} samples, need at least 5", samples.len())));
    }
    if samples.iter().any(|(e, _)| !(e.is_finite() && *e > 0.0)) {
        return Err(OracleError::DegenerateSamples("eps must be finite and positive".into()));
    }
    if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(OracleError::DegenerateSamples("eps must be strictly decreasing".into()));
    }
    let span = samples[0].0 / samples[samples.len() - 1].0;
    if span < 100.0 * (1.0 - 1e-9) {
        return Err(OracleError::DegenerateSamples(format!("eps spans {:.3} decades, need 2", span.log10())));
    }
    Ok(())
}

/// Returns (slope, intercept, r_squared).
fn line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    // constant data: a perfect (flat) fit
    let r2 = if ss_tot <= f64::EPSILON * f64::EPSILON * (my * my).max(1.0) * n {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

pub fn fit_slope(samples: &[(f64, Complex64)]) -> Result<SlopeFit, OracleError> {
    check_eps(samples)?;
    if samples.iter().any(|(_, v)| !(v.norm().is_finite() && v.norm() > 0.0)) {
        return Err(OracleError::DegenerateSamples("values must be finite and nonzero".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.norm().ln()).collect();
    let (slope, intercept, r_squared) = line(&xs, &ys);
    Ok(SlopeFit { samples: samples.to_vec(), slope, intercept, r_squared })
}

pub fn fit_log(samples: &[(f64, Complex64)]) -> Result<LogFit, OracleError> {
    check_eps(samples)?;
    if samples.iter().any(|(_, v)| !v.re.is_finite()) {
        return Err(OracleError::DegenerateSamples("values must be finite".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.re).collect();
    let (b, a, r_squared) = line(&xs, &ys);
    Ok(LogFit { samples: samples.to_vec(), a, b, r_squared })
}

/// `n` points geometrically spaced from `hi` down to `lo`.
pub fn geometric_eps(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let r = (lo / hi).ln() / (n.max(2) - 1) as f64;
    (0..n).map(|i| if i + 1 == n { lo } else { hi * (r * i as f64).exp() }).collect()
}
