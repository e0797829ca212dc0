//! Pinch points, Landau polynomials and leading asymptotics of Feynman loop
//! integrals, with independent numeric checks.

pub mod exactalg;
pub mod diagram;
pub mod pinch;
pub mod landau;
pub mod asympt;
pub mod oracle;
pub mod cli;
