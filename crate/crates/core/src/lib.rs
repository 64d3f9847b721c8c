//! Random-matrix laboratory.
//!
//! A desk-scale toolkit for symmetric random matrix ensembles and their
//! spectral statistics: deterministic splittable sampling streams, exact
//! Curie-Weiss machinery, a combinatorial trace-moment oracle, a dense
//! symmetric eigensolver, closed-form limit laws, and a Monte Carlo
//! experiment harness with JSON/CSV/SVG reports.

pub mod curie_weiss;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod laws;
pub mod moments;
pub mod quad;
pub mod sampling;
pub mod spectra;

pub use error::{Error, Result};
