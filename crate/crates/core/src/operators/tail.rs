use super::{apply_kernel, frac_maximal, hl_maximal, radial_maximal, KernelSpec, OperatorParams};
use crate::atoms::{multi_indices, Atom};
use crate::error::{Error, Result};
use crate::grid::{Cube, GridFunction, MollifierSpec};

/// Relative size of `∫ (x - c_Q)^β Ta` against `∫ |x - c_Q|^{|β|} |Ta|`
/// below which a non-convolution operator is taken to annihilate the
/// moment. The box truncates the tail of `Ta`, so exact zero is never seen.
pub const NONCONV_MOMENT_TOL: f64 = 0.02;

/// `Ta`, or the zero function for the zero atom.
pub fn apply_to_atom(a: &Atom, kernel: &KernelSpec) -> Result<GridFunction> {
    if kernel.dim() != a.spec().dim() {
        return Err(Error::SpecMismatch);
    }
    if a.samples().is_zero() {
        return Ok(GridFunction::zeros(a.spec()));
    }
    apply_kernel(a.samples(), kernel)
}

/// Far-field comparison of `M_φ(Ta)` with its predicted envelope.
#[derive(Clone, Debug)]
pub struct TailReport {
    pub ta: GridFunction,
    /// `M_φ(Ta)`.
    pub mphi: GridFunction,
    /// `M_{α_τ}(χ_Q)^τ`, or `M(χ_Q)^{(n+L+1)/n}` for non-convolution
    /// kernels.
    pub envelope: GridFunction,
    /// `M_φ(Ta) / envelope` outside `excluded`, zero inside.
    pub ratio: GridFunction,
    /// `Q*` for convolution kernels, `Q**` otherwise.
    pub excluded: Cube,
    pub tau: f64,
    pub max_ratio: f64,
    /// `max |Ta(x)| |x - c_Q|^{n-α+N+1} / ℓ(Q)^{n+N+1}` outside `excluded`.
    pub decay_constant: f64,
}

impl TailReport {
    /// Largest ratio over far-field points satisfying `keep`.
    pub fn max_ratio_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        let spec = self.ratio.spec();
        let dim = spec.dim();
        (0..spec.len())
            .filter(|&k| keep(&spec.point(k)[..dim]))
            .map(|k| self.ratio.samples()[k])
            .fold(0.0, f64::max)
    }
}

/// Computes `Ta` and the tail ratio of the far-field estimate.
///
/// Convolution kernels of order `α` use `τ = (n+N+1)/n` and
/// `M_{α/τ}(χ_Q)^τ` outside `Q*`; non-convolution kernels use
/// `M(χ_Q)^{(n+N)/n}` outside `Q**`, where the atom has `N = L + 1`
/// vanishing moments.
pub fn tail_ratio(a: &Atom, kernel: &KernelSpec, phi: &MollifierSpec) -> Result<TailReport> {
    let spec = a.spec();
    let dim = spec.dim();
    let n = dim as f64;
    let order = a.order();
    let q = *a.cube();
    let ta = apply_to_atom(a, kernel)?;
    let mphi = radial_maximal(&ta, phi)?;
    let chi = GridFunction::indicator(spec, &q);
    let nonconv = matches!(kernel, KernelSpec::NonConv(_));
    let alpha = kernel.alpha();
    let (tau, envelope, excluded) = if nonconv {
        let tau = (n + order.max(0) as f64) / n;
        let m = hl_maximal(&chi);
        (tau, m.map(|v| v.powf(tau))?, q.double_star())
    } else {
        let params = OperatorParams::new(dim, alpha, order.max(0))?;
        let m = frac_maximal(&chi, params.alpha_tau)?;
        (params.tau, m.map(|v| v.powf(params.tau))?, q.star())
    };
    let decay_pow = n - alpha + order.max(0) as f64 + if nonconv { 0.0 } else { 1.0 };
    let size_pow = n + order.max(0) as f64 + if nonconv { 0.0 } else { 1.0 };
    let ell = q.side();
    let mut ratio = vec![0.0; spec.len()];
    let mut max_ratio = 0.0f64;
    let mut decay_constant = 0.0f64;
    for (k, r) in ratio.iter_mut().enumerate() {
        let x = spec.point(k);
        if excluded.contains(&x[..dim]) {
            continue;
        }
        let e = envelope.samples()[k];
        let v = mphi.samples()[k];
        *r = if v == 0.0 { 0.0 } else if e > 0.0 { v / e } else { f64::INFINITY };
        max_ratio = max_ratio.max(*r);
        let d = q.dist_to_center(&x[..dim]);
        decay_constant = decay_constant.max(ta.samples()[k].abs() * d.powf(decay_pow) / ell.powf(size_pow));
    }
    Ok(TailReport {
        ta,
        mphi,
        envelope,
        ratio: GridFunction::new(spec.clone(), ratio)?,
        excluded,
        tau,
        max_ratio,
        decay_constant,
    })
}

/// Relative moment defects `|∫(x-c)^β Ta| / ∫|x-c|^{|β|}|Ta|` for
/// `|β| <= order`, the numerical form of the vanishing-moment hypothesis
/// on `T`.
pub fn moment_defects(a: &Atom, ta: &GridFunction, order: i32) -> Vec<f64> {
    let spec = ta.spec();
    let dim = spec.dim();
    let c = a.cube().center();
    multi_indices(dim, order)
        .into_iter()
        .map(|beta| {
            let (mut s, mut m) = (0.0, 0.0);
            for (k, &v) in ta.samples().iter().enumerate() {
                let x = spec.point(k);
                let mut mono = 1.0;
                let mut r2 = 0.0;
                for ax in 0..dim {
                    let d = x[ax] - c[ax];
                    mono *= d.powi(beta[ax] as i32);
                    r2 += d * d;
                }
                s += mono * v;
                m += r2.sqrt().powi((beta[0] + beta[1]) as i32) * v.abs();
            }
            if m == 0.0 {
                0.0
            } else {
                (s / m).abs()
            }
        })
        .collect()
}

/// Whether `T` annihilates the moments of `Ta` up to `order` within
/// [`NONCONV_MOMENT_TOL`]; order `-1` holds trivially.
pub fn moments_vanish(a: &Atom, ta: &GridFunction, order: i32) -> bool {
    moment_defects(a, ta, order).iter().all(|&d| d <= NONCONV_MOMENT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::Profile;
    use crate::grid::GridSpec;
    use crate::operators::NonConvKernel;

    fn step_atom(g: &GridSpec, order: i32) -> Atom {
        let q = Cube::interval(0.0, 1.0).unwrap();
        let profile = if order <= 0 {
            Profile::Steps { m: 2, values: vec![1.0, -1.0] }
        } else {
            Profile::Steps { m: 4, values: vec![1.0, -0.3, 0.7, -1.0] }
        };
        Atom::new(&profile.realize(g, &q).unwrap(), q, order).unwrap()
    }

    #[test]
    fn hilbert_tail_ratio_is_refinement_stable() {
        let maxes: Vec<f64> = [64.0, 128.0]
            .iter()
            .map(|&c| {
                let g = GridSpec::line(-8.0, 8.0, 1.0 / c).unwrap();
                let phi = MollifierSpec::for_grid(&g);
                let r = tail_ratio(&step_atom(&g, 0), &KernelSpec::Hilbert, &phi).unwrap();
                assert_eq!(r.tau, 2.0);
                r.max_ratio_where(|x| (2.0..=8.0).contains(&x[0]))
            })
            .collect();
        assert!(maxes[0].is_finite() && maxes[0] > 0.0);
        assert!((maxes[1] / maxes[0] - 1.0).abs() < 0.1, "{maxes:?}");
    }

    #[test]
    fn power_kernel_far_field_decay() {
        let g = GridSpec::line(-16.0, 16.0, 1.0 / 128.0).unwrap();
        let a = step_atom(&g, 0);
        let ta = apply_to_atom(&a, &KernelSpec::power(1, 0.5).unwrap()).unwrap();
        // |Ta(x)| <= C ℓ^{n+N+1} / |x - c|^{n-α+N+1} with n=1, N=0, α=1/2
        let c: Vec<f64> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&x| ta.eval(&[x]).abs() * (x - 0.5f64).powf(1.5))
            .collect();
        let (lo, hi) = (c.iter().cloned().fold(f64::INFINITY, f64::min), c.iter().cloned().fold(0.0, f64::max));
        assert!(lo > 0.0 && hi <= 2.0 * lo, "{c:?}");
    }

    #[test]
    fn zero_atom_maps_to_zero() {
        let g = GridSpec::line(-8.0, 8.0, 1.0 / 32.0).unwrap();
        let z = Atom::zero(&g, Cube::interval(0.0, 1.0).unwrap(), 0).unwrap();
        for k in [KernelSpec::Hilbert, KernelSpec::power(1, 0.5).unwrap()] {
            assert!(apply_to_atom(&z, &k).unwrap().is_zero());
        }
        let phi = MollifierSpec::for_grid(&g);
        let r = tail_ratio(&z, &KernelSpec::Hilbert, &phi).unwrap();
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn nonconvolution_moments() {
        let g = GridSpec::line(-8.0, 8.0, 1.0 / 64.0).unwrap();
        let a = step_atom(&g, 1);
        let lifted = KernelSpec::NonConv(NonConvKernel::from_convolution(&KernelSpec::Hilbert).unwrap());
        let ta = apply_to_atom(&a, &lifted).unwrap();
        let d = moment_defects(&a, &ta, 0);
        assert!(moments_vanish(&a, &ta, 0), "{d:?}");
        // the modulation breaks ∫Ta = 0 once the atom sees a period of sin
        let wide = Cube::interval(0.0, 4.0).unwrap();
        let b = Atom::new(
            &Profile::Steps { m: 4, values: vec![1.0, -0.3, 0.7, -1.0] }.realize(&g, &wide).unwrap(),
            wide,
            1,
        )
        .unwrap();
        let modulated = KernelSpec::NonConv(NonConvKernel::modulated_hilbert());
        let tm = apply_to_atom(&b, &modulated).unwrap();
        let dm = moment_defects(&b, &tm, 0);
        assert!(!moments_vanish(&b, &tm, 0), "{dm:?}");
        assert!(moments_vanish(&b, &tm, -1));

        let phi = MollifierSpec::for_grid(&g);
        let r = tail_ratio(&a, &lifted, &phi).unwrap();
        assert_eq!(r.tau, 2.0);
        assert!(r.max_ratio.is_finite() && r.max_ratio > 0.0);
        assert_eq!(r.excluded.side(), 4.0);
    }
}
