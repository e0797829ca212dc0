//! Exact arithmetic: polynomials and rational functions over Q in named
//! symbols, square-root extensions, linear algebra and resultants.

pub mod alg;
pub mod expr;
pub mod field;
pub mod gcd;
pub mod linalg;
pub mod poly;
pub mod quadext;
pub mod ratfunc;
pub mod resultant;
pub mod sqfree;

use thiserror::Error;

pub use alg::Alg;
pub use expr::{parse_alg, parse_poly, parse_ratfunc};
pub use field::Field;
pub use gcd::poly_gcd;
pub use linalg::{det, det_alg, det_poly, det_quadext, solve_linear, LinearSolution};
pub use poly::{rat, rat_int, Monomial, Poly, Symbol};
pub use quadext::QuadExt;
pub use ratfunc::RatFunc;
pub use resultant::resultant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("inconsistent linear system")]
    InconsistentSystem,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("radicands differ: {0} vs {1}")]
    RadicandMismatch(String, String),
    #[error("shape error: {0}")]
    Shape(String),
}
