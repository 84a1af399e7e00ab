use crate::error::{Error, Result};

/// Which moment requirement to compute. `ratio` is `r_w / p` for weighted
/// spaces and `1 / p_-` for variable ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentRule {
    /// Atoms of `H^p(w)` or `H^{p(·)}`: `N > ⌊n(ratio - 1)⌋₊`.
    Atomic { n: usize, ratio: f64 },
    /// Convolution singular integrals: `N > ⌊n(ratio - 1)⌋`.
    Singular { n: usize, ratio: f64 },
    /// Non-convolution operators: `L = max(⌊n(ratio - 1)⌋, -1)`.
    NonConvolution { n: usize, ratio: f64 },
    /// `I_α : H^p(w^p) -> H^q(w^q)`: atoms of `H^p(w^p)` and
    /// `((n - α + N + 1)/n) q > r_{w^q}`.
    FractionalWeighted {
        n: usize,
        alpha: f64,
        p: f64,
        q: f64,
        r_wp: f64,
        r_wq: f64,
    },
    /// `I_α : H^{p(·)} -> H^{q(·)}`: atoms of `H^{p(·)}` and
    /// `p_- (n + N + 1)/n > 1`.
    FractionalVariable { n: usize, p_minus: f64 },
}

impl MomentRule {
    pub fn singular_weighted(n: usize, r_w: f64, p: f64) -> Self {
        MomentRule::Singular { n, ratio: r_w / p }
    }

    pub fn singular_variable(n: usize, p_minus: f64) -> Self {
        MomentRule::Singular { n, ratio: 1.0 / p_minus }
    }

    pub fn nonconv_weighted(n: usize, r_w: f64, p: f64) -> Self {
        MomentRule::NonConvolution { n, ratio: r_w / p }
    }

    pub fn nonconv_variable(n: usize, p_minus: f64) -> Self {
        MomentRule::NonConvolution { n, ratio: 1.0 / p_minus }
    }
}

// floor with a guard against values like 0.9999999999999999 that are 1
fn floor(x: f64) -> i64 {
    (x + 1e-12).floor() as i64
}

fn check(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v}")))
    }
}

/// Smallest admissible moment order `N`, or the order `L` for
/// non-convolution operators (where `-1` means no moment condition).
pub fn moment_order_required(rule: &MomentRule) -> Result<i32> {
    let atomic = |n: usize, ratio: f64| floor(n as f64 * (ratio - 1.0)).max(0) + 1;
    let v = match *rule {
        MomentRule::Atomic { n, ratio } => {
            check("ratio", ratio)?;
            atomic(n, ratio)
        }
        MomentRule::Singular { n, ratio } => {
            check("ratio", ratio)?;
            (floor(n as f64 * (ratio - 1.0)) + 1).max(0)
        }
        MomentRule::NonConvolution { n, ratio } => {
            check("ratio", ratio)?;
            floor(n as f64 * (ratio - 1.0)).max(-1)
        }
        MomentRule::FractionalWeighted {
            n,
            alpha,
            p,
            q,
            r_wp,
            r_wq,
        } => {
            for (k, v) in [("alpha", alpha), ("p", p), ("q", q), ("r_wp", r_wp), ("r_wq", r_wq)] {
                check(k, v)?;
            }
            let nf = n as f64;
            // smallest N >= 0 with ((n - α + N + 1)/n) q > r_{w^q}
            let need = (r_wq * nf / q - nf + alpha - 1.0).max(-1.0);
            let mut tail = floor(need) + 1;
            while ((nf - alpha + tail as f64 + 1.0) / nf) * q <= r_wq {
                tail += 1;
            }
            atomic(n, r_wp / p).max(tail.max(0))
        }
        MomentRule::FractionalVariable { n, p_minus } => {
            check("p_minus", p_minus)?;
            let nf = n as f64;
            let mut tail = 0i64;
            while p_minus * (nf + tail as f64 + 1.0) / nf <= 1.0 {
                tail += 1;
            }
            atomic(n, 1.0 / p_minus).max(tail)
        }
    };
    i32::try_from(v).map_err(|_| Error::InvalidParameter(format!("moment order {v} overflows")))
}
