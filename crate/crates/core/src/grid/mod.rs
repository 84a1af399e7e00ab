//! Uniform grids, sampled functions, cubes, block sums and mollifiers.

mod cube;
mod function;
pub mod io;
mod mollifier;
mod spec;
mod sums;

pub use cube::{cube_average, CellRange, Cube};
pub use function::{lr_combine, GridFunction};
pub use mollifier::{mollify, MollifierSpec, Stencil};
pub use spec::{GridSpec, DEFAULT_SAMPLE_BUDGET};
pub use sums::{covering_extreme_2d, covering_max, covering_min, window_extreme, BoxSums};
