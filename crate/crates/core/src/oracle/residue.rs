//! Contour check of the two-pole kernel K(xi, eta) = ∮ dz / ((z + xi)(z + eta)).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::OracleError;

/// Trapezoidal rule on the circle |z + xi| = radius, which encloses -xi
/// and leaves -eta outside. The circle is traversed clockwise, as when the
/// real line is closed on the side of -xi, so the value is 2 pi i/(xi - eta).
pub fn residue_kernel(xi: Complex64, eta: Complex64, radius: f64, n_points: usize) -> Result<Complex64, OracleError> {
    let sep = (xi - eta).norm();
    if sep < 1e-12 * (xi.norm() + eta.norm()) || sep == 0.0 {
        return Err(OracleError::ContourAmbiguous(format!("poles -{} and -{} coincide", xi, eta)));
    }
    if !(radius > 0.0 && radius < sep) {
        return Err(OracleError::ContourAmbiguous(format!(
            "radius {} must lie in (0, {}) to separate the poles",
            radius, sep
        )));
    }
    if n_points < 3 {
        return Err(OracleError::InvalidInput("need at least 3 contour points".into()));
    }
    let h = 2.0 * PI / n_points as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n_points {
        let w = Complex64::from_polar(radius, h * j as f64);
        let z = -xi + w;
        // clockwise: dz = -i w dtheta
        acc -= Complex64::i() * w / ((z + xi) * (z + eta));
    }
    Ok(acc * h)
}

/// The residue value 2 pi i / (xi - eta).
pub fn residue_kernel_exact(xi: Complex64, eta: Complex64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI) / (xi - eta)
}
