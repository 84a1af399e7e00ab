use crate::error::Result;
use crate::grid::{GridFunction, MollifierSpec};
use crate::operators::radial_maximal;
use crate::varlebesgue::{luxemburg_norm, ExponentFunction};
use crate::weights::{weighted_lp_norm, Weight};

/// Target space of a norm: weighted `L^p(w)` or variable `L^{p(·)}`.
#[derive(Clone, Debug)]
pub enum Space {
    Weighted { p: f64, w: Weight },
    Variable(ExponentFunction),
}

impl Space {
    pub fn unweighted(spec: &crate::grid::GridSpec, p: f64) -> Self {
        Space::Weighted {
            p,
            w: Weight::unit(spec),
        }
    }

    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        match self {
            Space::Weighted { p, w } => weighted_lp_norm(f, *p, w),
            Space::Variable(e) => luxemburg_norm(f, e),
        }
    }

    /// Exponent `s` for which `‖·‖^s` is subadditive: `min(p, 1)` or
    /// `min(p_-, 1)`.
    pub fn subadditive_power(&self) -> f64 {
        match self {
            Space::Weighted { p, .. } => p.min(1.0),
            Space::Variable(e) => e.p_minus().min(1.0),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Space::Weighted { p, .. } => format!("L^{p}(w)"),
            Space::Variable(e) => format!("L^p(.) with p in [{}, {}]", e.p_minus(), e.p_plus()),
        }
    }
}

/// `‖M_φ g‖_X`.
pub fn hardy_quasinorm(g: &GridFunction, phi: &MollifierSpec, space: &Space) -> Result<f64> {
    space.norm(&radial_maximal(g, phi)?)
}
