//! Monte Carlo estimate of the reduced two-loop QED vertex integral near
//! the coincident double pinch, at d = 3 (two transverse dimensions per loop):
//!
//!   J(e) = ∫_{|s1|,|s2| < cutoff} d^2 s1 d^2 s2
//!            1/((s1-s2)^2 + kappa e) · 1/(e + s1^2) · 1/(e + s2^2)
//!
//! The constant factors 1/q^2 1/(p1+p2)^2 are dropped. The photon line keeps
//! a longitudinal scale kappa·e: with kappa = 0 the s1 = s2 region is
//! logarithmically divergent in two transverse dimensions.
//!
//! Sampling: s_i = sqrt(e) u_i with u_i drawn from the normalised density
//! (1/pi)/(1+|u|^2)^2 (antithetic pairs in the underlying uniforms). Work is
//! split into seed-indexed blocks, each with its own ChaCha stream; block
//! sums are combined in block order so the result does not depend on the
//! thread schedule.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fit::{fit_slope, geometric_eps, SlopeFit};
use super::OracleError;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    /// Samples per estimate (antithetic pairs count as two).
    pub samples: u64,
    pub block_size: u64,
    pub kappa: f64,
    pub cutoff: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 0, samples: 400_000, block_size: 1 << 14, kappa: 1.0, cutoff: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub e_l: f64,
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Default)]
struct Block {
    sum: f64,
    sum_sq: f64,
    n: u64,
}

fn draw(v1: f64, v2: f64) -> (f64, f64) {
    // radial CDF r^2/(1+r^2)
    let r = (v1 / (1.0 - v1)).sqrt();
    let (sn, cs) = (2.0 * PI * v2).sin_cos();
    (r * cs, r * sn)
}

/// Weight f/p in the scaled variables, times e (the exact e^{-1} scaling is
/// restored by the caller).
fn weight(u: [f64; 4], kappa: f64, rmax_sq: f64) -> f64 {
    let n1 = u[0] * u[0] + u[1] * u[1];
    let n2 = u[2] * u[2] + u[3] * u[3];
    if n1 >= rmax_sq || n2 >= rmax_sq {
        return 0.0;
    }
    let dx = u[0] - u[2];
    let dy = u[1] - u[3];
    PI * PI * (1.0 + n1) * (1.0 + n2) / (dx * dx + dy * dy + kappa)
}

fn run_block(cfg: &McConfig, e_index: u64, block: u64, n: u64, rmax_sq: f64) -> Block {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(e_index);
    rng.set_word_pos(block as u128 * cfg.block_size as u128 * 8);
    let mut b = Block::default();
    let mut k = 0;
    while k < n {
        let v: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        for anti in [false, true] {
            if k >= n {
                break;
            }
            let w: [f64; 4] = if anti { v.map(|x| 1.0 - x) } else { v };
            let (a, bb) = draw(w[0], w[1]);
            let (c, d) = draw(w[2], w[3]);
            let f = weight([a, bb, c, d], cfg.kappa, rmax_sq);
            b.sum += f;
            b.sum_sq += f * f;
            b.n += 1;
            k += 1;
        }
    }
    b
}

fn run_blocks(cfg: &McConfig, e_index: u64, rmax_sq: f64) -> Vec<Block> {
    let nblocks = cfg.samples.div_ceil(cfg.block_size);
    let sizes: Vec<(u64, u64)> =
        (0..nblocks).map(|i| (i, cfg.block_size.min(cfg.samples - i * cfg.block_size))).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        sizes.par_iter().map(|&(i, n)| run_block(cfg, e_index, i, n, rmax_sq)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sizes.iter().map(|&(i, n)| run_block(cfg, e_index, i, n, rmax_sq)).collect()
    }
}

fn estimate(e_l: f64, d: u32, cfg: &McConfig, e_index: u64) -> Result<McEstimate, OracleError> {
    if d != 3 {
        return Err(OracleError::InvalidInput(format!("the QED check is set up for d = 3, got {}", d)));
    }
    if !(e_l > 0.0 && e_l.is_finite()) {
        return Err(OracleError::InvalidInput("e_l must be positive".into()));
    }
    if !(cfg.kappa > 0.0 && cfg.cutoff > 0.0) {
        return Err(OracleError::InvalidInput("kappa and cutoff must be positive".into()));
    }
    if cfg.samples < 2 || cfg.block_size == 0 {
        return Err(OracleError::InvalidInput("need at least 2 samples and a nonzero block size".into()));
    }
    let rmax_sq = cfg.cutoff * cfg.cutoff / e_l;
    let blocks = run_blocks(cfg, e_index, rmax_sq);
    let tot = blocks.iter().fold(Block::default(), |acc, b| Block {
        sum: acc.sum + b.sum,
        sum_sq: acc.sum_sq + b.sum_sq,
        n: acc.n + b.n,
    });
    let n = tot.n as f64;
    let mean = tot.sum / n;
    let var = ((tot.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let std_err = (var / n).sqrt();
    // d^4 s = e^2 d^4 u and three denominators each carry a factor e
    let scale = 1.0 / e_l;
    let est = McEstimate { e_l, mean: mean * scale, std_err: std_err * scale, samples: tot.n };
    if !(est.std_err <= 0.1 * est.mean.abs()) {
        return Err(OracleError::InsufficientSamples { mean: est.mean, std_err: est.std_err });
    }
    Ok(est)
}

/// One Monte Carlo estimate at a single e_l.
pub fn qed_reduced_numeric(e_l: f64, d: u32, cfg: &McConfig) -> Result<McEstimate, OracleError> {
    estimate(e_l, d, cfg, 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct QedCheck {
    pub d: u32,
    pub config: McConfig,
    pub estimates: Vec<McEstimate>,
    /// Predicted exponent d - 4.
    pub predicted_exponent: f64,
    pub fit: SlopeFit,
}

/// Estimates over `n_points` values of e_l from 1e-1 down to 1e-3 and a
/// log-log fit. Every point uses its own stream of the same seed.
pub fn qed_scan(d: u32, cfg: &McConfig, n_points: usize) -> Result<QedCheck, OracleError> {
    let es = geometric_eps(1e-1, 1e-3, n_points);
    let estimates = es
        .iter()
        .enumerate()
        .map(|(i, &e)| estimate(e, d, cfg, i as u64))
        .collect::<Result<Vec<_>, _>>()?;
    let samples: Vec<(f64, Complex64)> = estimates.iter().map(|x| (x.e_l, Complex64::new(x.mean, 0.0))).collect();
    let fit = fit_slope(&samples)?;
    Ok(QedCheck { d, config: *cfg, estimates, predicted_exponent: d as f64 - 4.0, fit })
}
