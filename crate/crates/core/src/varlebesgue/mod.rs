//! Variable Lebesgue spaces: exponents, the modular and the Luxemburg norm.

mod exponent;
mod norm;

pub use exponent::{ExponentFunction, ExponentSpec, LhConstants, P_INF_CANDIDATES};
pub use norm::{holder_pairing, luxemburg_norm, modular, HOLDER_CONSTANT, LUXEMBURG_RTOL};

#[cfg(test)]
mod tests;
