use crate::error::{Error, Result};
use crate::grid::{GridFunction, MollifierSpec};

/// `M_φ g(x) = max_t |φ_t * g(x)|` over the dyadic scales of `phi`.
pub fn radial_maximal(g: &GridFunction, phi: &MollifierSpec) -> Result<GridFunction> {
    if phi.dim() != g.spec().dim() {
        return Err(Error::SpecMismatch);
    }
    let mut out = vec![0.0f64; g.spec().len()];
    if g.is_zero() {
        return GridFunction::new(g.spec().clone(), out);
    }
    for t in phi.scales() {
        let m = phi.stencil(g.spec(), t)?.apply(g);
        for (o, v) in out.iter_mut().zip(m.samples()) {
            *o = o.max(v.abs());
        }
    }
    GridFunction::new(g.spec().clone(), out)
}
