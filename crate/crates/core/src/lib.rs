//! Discretized harmonic analysis on one- and two-dimensional boxes:
//! maximal operators, Muckenhoupt and reverse Hölder weight constants,
//! variable-exponent Lebesgue norms, singular and fractional integrals,
//! Hardy-space atoms, the Rubio de Francia iteration, and a harness that
//! checks quantitative inequalities for stability under grid refinement.

pub mod atoms;
pub mod error;
pub mod grid;
pub mod harness;
pub mod operators;
pub mod quad;
pub mod rubio;
pub mod varlebesgue;
pub mod weights;

pub use error::{Error, Result};
