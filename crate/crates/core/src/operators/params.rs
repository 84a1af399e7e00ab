use crate::error::{Error, Result};

use super::integral::PV_CELLS;

/// Parameters of the far-field estimate for a kernel of order `alpha`
/// applied to atoms with vanishing moments up to `order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub dim: usize,
    pub alpha: f64,
    pub order: i32,
    /// `(n + N + 1) / n`
    pub tau: f64,
    /// `alpha / tau`
    pub alpha_tau: f64,
    /// Principal value excision radius in cells.
    pub pv_cells: f64,
}

impl OperatorParams {
    pub fn new(dim: usize, alpha: f64, order: i32) -> Result<Self> {
        let n = dim as f64;
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidParameter(format!("dimension {dim}")));
        }
        if !(0.0..n).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside [0, {n})")));
        }
        if order < -1 {
            return Err(Error::InvalidParameter(format!("moment order {order}")));
        }
        let tau = (n + order as f64 + 1.0) / n;
        Ok(Self {
            dim,
            alpha,
            order,
            tau,
            alpha_tau: alpha / tau,
            pv_cells: PV_CELLS,
        })
    }
}
