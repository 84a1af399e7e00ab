//! Maximal operators, fractional and singular integrals, smoothed kernels
//! and the radial maximal operator.

mod integral;
mod kernel;
mod maximal;
mod params;
mod radial;
mod smoothed;
mod tail;

pub use integral::{
    apply_kernel, nonconv_integral, riesz_potential, singular_integral, PV_CELLS,
};
pub use kernel::{KernelFn, KernelSpec, NonConvKernel};
pub use maximal::{frac_maximal, hl_maximal, maximal_sides, EXHAUSTIVE_SIDES};
pub use params::OperatorParams;
pub use radial::radial_maximal;
pub use smoothed::SmoothedKernel;
pub use tail::{
    apply_to_atom, moment_defects, moments_vanish, tail_ratio, TailReport, NONCONV_MOMENT_TOL,
};
