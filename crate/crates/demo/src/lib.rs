//! Browser demo over the pinchlab core. Every operation returns a JSON
//! string; the `*_json` functions are plain Rust so they can be tested
//! natively, and the exported wrappers turn errors into JS exceptions.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use pinchlab::diagram::{parse_diagram, Diagram};
use pinchlab::exactalg::{parse_poly, Symbol};
use pinchlab::landau::landau_from_pinch;
use pinchlab::oracle::{bubble_scan, geometric_eps, morse_check};
use pinchlab::pinch::solve_pinch;
use serde_json::{json, Value};
use thiserror::Error;
use wasm_bindgen::prelude::*;

const PROPAGATOR_PAIR: &str = include_str!("../../../fixtures/two_loop_propagator.json");

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Core(String),
}

fn core<E: std::fmt::Display>(e: E) -> DemoError {
    DemoError::Core(e.to_string())
}

/// Numeric bubble near its normal threshold at d = 3 or 5.
pub fn bubble_curve_json(m0_sq: f64, m1_sq: f64, d: u32, points: usize) -> Result<Value, DemoError> {
    if !(5..=40).contains(&points) {
        return Err(DemoError::Input("points must lie in 5..=40".into()));
    }
    let eps = geometric_eps(1e-2, 1e-4, points);
    let scan = bubble_scan(m0_sq, m1_sq, d, std::f64::consts::FRAC_PI_2, &eps).map_err(core)?;
    let values: Vec<Value> = scan.values.iter().map(|(e, v)| json!([e, v.re, v.im])).collect();
    let observable: Vec<Value> = scan.observable.iter().map(|(e, v)| json!([e, v.norm()])).collect();
    Ok(json!({
        "threshold": scan.threshold,
        "exponent": scan.exponent,
        "logarithmic": scan.logarithmic_candidate,
        "values": values,
        "observable": observable,
        "slope": scan.slope_fit.as_ref().map(|f| json!({"slope": f.slope, "r_squared": f.r_squared})),
        "log_fit": scan.log_fit.as_ref().map(|f| json!({"a": f.a, "b": f.b, "r_squared": f.r_squared})),
        "accepted": scan.accepted(0.05, 0.999),
    }))
}

/// Morse integral with a diagonal form Q = diag(eigenvalues).
pub fn morse_scaling_json(eigenvalues: &[f64]) -> Result<Value, DemoError> {
    let n = eigenvalues.len();
    if !(1..=5).contains(&n) {
        return Err(DemoError::Input("give between 1 and 5 eigenvalues".into()));
    }
    let q = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues));
    let chk = morse_check(&q, &geometric_eps(1e-1, 1e-4, 7), 1.0).map_err(core)?;
    let samples: Vec<Value> = chk.samples.iter().map(|s| json!([s.eps, s.singular])).collect();
    Ok(json!({
        "n": n,
        "det_q": chk.det_q,
        "predicted_exponent": chk.predicted_exponent,
        "slope": chk.slope_fit.slope,
        "r_squared": chk.slope_fit.r_squared,
        "coefficient_measured": chk.coefficient_measured,
        "coefficient_sphere_volume": chk.coefficient_predicted,
        "coefficient_gamma": chk.coefficient_exact,
        "samples": samples,
    }))
}

fn propagator_pair(m1_sq: &str, m2_sq: &str) -> Result<Diagram, DemoError> {
    let base = parse_diagram(PROPAGATOR_PAIR).map_err(core)?;
    let mut map = BTreeMap::new();
    for (name, text) in [("m1sq", m1_sq), ("m2sq", m2_sq)] {
        let p = parse_poly(text).map_err(|e| DemoError::Input(format!("{}: {}", name, e)))?;
        if p.vars().iter().any(|v| v.name() != name) {
            return Err(DemoError::Input(format!("{} may only be a number or {}", name, name)));
        }
        map.insert(Symbol::new(name), p);
    }
    base.substitute(&map).map_err(core)
}

/// Pinch of the two equal-routing propagators of the two-loop propagator
/// diagram: alpha, the Landau polynomial in s, its roots, and both
/// evaluated at `s`.
pub fn propagator_pair_json(m1_sq: &str, m2_sq: &str, s: f64) -> Result<Value, DemoError> {
    let d = propagator_pair(m1_sq, m2_sq)?;
    let sol = solve_pinch(&d, &[0, 1]).map_err(core)?;
    let alpha = &sol.alpha(0)[0][0];
    let landau = landau_from_pinch(&sol).map_err(core)?;
    let poly = landau.as_poly().ok_or_else(|| DemoError::Core("Landau polynomial is not rational".into()))?;
    let s_sym = Symbol::new("s");
    let numeric = poly.vars().iter().all(|v| *v == s_sym);
    let roots = if numeric {
        let c: Vec<f64> = poly.coeffs_in(&s_sym).iter().map(|p| p.eval_f64(&HashMap::new()).unwrap_or(f64::NAN)).collect();
        quadratic_roots(&c)
    } else {
        Vec::new()
    };
    let at_s = if numeric {
        let vals: HashMap<Symbol, f64> = [(s_sym.clone(), s)].into_iter().collect();
        let alpha_at = alpha.as_ratfunc().and_then(|r| {
            let num = r.num().eval_f64(&vals)?;
            let den = r.den().eval_f64(&vals)?;
            Some(num / den)
        });
        Some(json!({"s": s, "alpha": alpha_at, "landau": poly.eval_f64(&vals)}))
    } else {
        None
    };
    Ok(json!({
        "alpha": alpha.to_string(),
        "landau": poly.to_string(),
        "roots": roots,
        "at_s": at_s,
    }))
}

/// Real roots of c[0] + c[1] x + c[2] x^2, ascending.
fn quadratic_roots(c: &[f64]) -> Vec<f64> {
    let get = |i: usize| c.get(i).copied().unwrap_or(0.0);
    let (c0, c1, c2) = (get(0), get(1), get(2));
    if c2 == 0.0 {
        return if c1 != 0.0 { vec![-c0 / c1] } else { Vec::new() };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // avoid cancellation in the smaller root
    let t = -0.5 * (c1 + c1.signum() * sq);
    let mut r = if t == 0.0 { vec![0.0, 0.0] } else { vec![t / c2, c0 / t] };
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

fn js(r: Result<Value, DemoError>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn bubble_curve(m0_sq: f64, m1_sq: f64, d: u32, points: usize) -> Result<String, JsError> {
    js(bubble_curve_json(m0_sq, m1_sq, d, points))
}

#[wasm_bindgen]
pub fn morse_scaling(eigenvalues: Vec<f64>) -> Result<String, JsError> {
    js(morse_scaling_json(&eigenvalues))
}

#[wasm_bindgen]
pub fn propagator_pair_explorer(m1_sq: &str, m2_sq: &str, s: f64) -> Result<String, JsError> {
    js(propagator_pair_json(m1_sq, m2_sq, s))
}
