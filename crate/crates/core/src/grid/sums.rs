//! Prefix sums over cell blocks and sliding-window extrema, the two
//! primitives behind every cube-family computation.

use super::{CellRange, GridFunction, GridSpec};

/// Summed-area table: O(1) sums over any block of cells.
///
/// Entries are kept in double-double precision so that a block sum has
/// relative error near machine epsilon even when the block is tiny compared
/// with the running total.
#[derive(Clone, Debug)]
pub struct BoxSums {
    shape: [usize; 2],
    table: Vec<Dd>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Dd(f64, f64);

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        let hi = s.0 + lo;
        Dd(hi, lo - (hi - s.0))
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

impl BoxSums {
    pub fn new(f: &GridFunction) -> Self {
        Self::from_samples(f.spec(), f.samples())
    }

    pub fn from_samples(spec: &GridSpec, samples: &[f64]) -> Self {
        let [n0, n1] = spec.shape();
        let stride = n1 + 1;
        let mut table = vec![Dd::default(); (n0 + 1) * stride];
        for i in 0..n0 {
            let mut row = Dd::default();
            for j in 0..n1 {
                row = row.add(Dd(samples[i * n1 + j], 0.0));
                table[(i + 1) * stride + j + 1] = table[i * stride + j + 1].add(row);
            }
        }
        Self {
            shape: [n0, n1],
            table,
        }
    }

    /// Sum over cells `[s0, e0) x [s1, e1)`.
    #[inline]
    pub fn block(&self, s0: usize, e0: usize, s1: usize, e1: usize) -> f64 {
        let stride = self.shape[1] + 1;
        let t = &self.table;
        let a = t[e0 * stride + e1].add(t[s0 * stride + e1].neg());
        let b = t[s0 * stride + s1].add(t[e0 * stride + s1].neg());
        let r = a.add(b);
        r.0 + r.1
    }

    #[inline]
    pub fn range(&self, r: &CellRange) -> f64 {
        self.block(r.start[0], r.end[0], r.start[1], r.end[1])
    }

    /// Sums over every `w x w` block (or length-`w` window in 1D), indexed by
    /// the block's first cell. Output shape is `(n0-w+1) x (n1-w+1)` (the
    /// second axis stays 1 in 1D).
    pub fn windows(&self, dim: usize, w: usize) -> (Vec<f64>, [usize; 2]) {
        let [n0, n1] = self.shape;
        let m0 = n0 + 1 - w;
        let (m1, w1) = if dim == 2 { (n1 + 1 - w, w) } else { (1, 1) };
        let mut out = Vec::with_capacity(m0 * m1);
        for i in 0..m0 {
            for j in 0..m1 {
                out.push(self.block(i, i + w, j, j + w1));
            }
        }
        (out, [m0, m1])
    }
}

/// For `out[i] = max(values[j] : i+1-w <= j <= i)` with `j` restricted to
/// valid indices; output length is `values.len() + w - 1`. This is the
/// "all windows of length `w` covering position `i`" maximum.
pub fn covering_max(values: &[f64], w: usize) -> Vec<f64> {
    covering_extreme(values, w, f64::NEG_INFINITY, f64::max)
}

/// Minimum counterpart of [`covering_max`].
pub fn covering_min(values: &[f64], w: usize) -> Vec<f64> {
    covering_extreme(values, w, f64::INFINITY, f64::min)
}

// van Herk / Gil–Werman: block prefix and suffix extrema of the padded
// sequence give every window extreme in constant time.
fn covering_extreme(values: &[f64], w: usize, pad: f64, op: fn(f64, f64) -> f64) -> Vec<f64> {
    assert!(w >= 1);
    let n_out = values.len() + w - 1;
    if w == 1 {
        return values.to_vec();
    }
    let padded_len = values.len() + 2 * (w - 1);
    let get = |k: usize| -> f64 {
        if k < w - 1 || k >= w - 1 + values.len() {
            pad
        } else {
            values[k - (w - 1)]
        }
    };
    let mut prefix = vec![pad; padded_len];
    let mut suffix = vec![pad; padded_len];
    for k in 0..padded_len {
        prefix[k] = if k % w == 0 {
            get(k)
        } else {
            op(prefix[k - 1], get(k))
        };
    }
    for k in (0..padded_len).rev() {
        suffix[k] = if k % w == w - 1 || k == padded_len - 1 {
            get(k)
        } else {
            op(suffix[k + 1], get(k))
        };
    }
    (0..n_out)
        .map(|i| {
            let a = i;
            let b = i + w - 1;
            if a % w == 0 {
                prefix[b]
            } else {
                op(suffix[a], prefix[b])
            }
        })
        .collect()
}

/// Separable 2D covering extreme: the output at `(i, j)` is the extreme
/// over all `w x w` windows (indexed by first cell) that cover `(i, j)`.
pub fn covering_extreme_2d(
    values: &[f64],
    shape: [usize; 2],
    w: usize,
    take_max: bool,
) -> (Vec<f64>, [usize; 2]) {
    let f = if take_max { covering_max } else { covering_min };
    let [m0, m1] = shape;
    let o0 = m0 + w - 1;
    let o1 = m1 + w - 1;
    // along axis 1
    let mut stage = vec![0.0; m0 * o1];
    for i in 0..m0 {
        let row = f(&values[i * m1..(i + 1) * m1], w);
        stage[i * o1..(i + 1) * o1].copy_from_slice(&row);
    }
    // along axis 0
    let mut out = vec![0.0; o0 * o1];
    let mut col = vec![0.0; m0];
    for j in 0..o1 {
        for i in 0..m0 {
            col[i] = stage[i * o1 + j];
        }
        let c = f(&col, w);
        for i in 0..o0 {
            out[i * o1 + j] = c[i];
        }
    }
    (out, [o0, o1])
}

/// Extreme over every `w`-sided window (block in 2D), indexed by the
/// window's first cell; the output has the same shape as
/// [`BoxSums::windows`].
pub fn window_extreme(values: &[f64], shape: [usize; 2], dim: usize, w: usize, take_max: bool) -> (Vec<f64>, [usize; 2]) {
    let [n0, n1] = shape;
    if dim == 1 {
        let cov = if take_max { covering_max(values, w) } else { covering_min(values, w) };
        let m0 = n0 + 1 - w;
        (cov[w - 1..w - 1 + m0].to_vec(), [m0, 1])
    } else {
        let (cov, [_, o1]) = covering_extreme_2d(values, shape, w, take_max);
        let m0 = n0 + 1 - w;
        let m1 = n1 + 1 - w;
        let mut out = Vec::with_capacity(m0 * m1);
        for i in 0..m0 {
            let row = (i + w - 1) * o1;
            out.extend_from_slice(&cov[row + w - 1..row + w - 1 + m1]);
        }
        (out, [m0, m1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(values: &[f64], w: usize) -> Vec<f64> {
        (0..values.len() + w - 1)
            .map(|i| {
                let lo = (i + 1).saturating_sub(w);
                let hi = i.min(values.len() - 1);
                values[lo..=hi].iter().copied().fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn covering_max_matches_brute_force(v in prop::collection::vec(-10.0f64..10.0, 1..60), w in 1usize..20) {
            prop_assert_eq!(covering_max(&v, w), brute(&v, w));
        }
    }

    #[test]
    fn window_extreme_2d_matches_brute_force() {
        let shape = [5, 6];
        let v: Vec<f64> = (0..30).map(|k| ((k * 7919) % 31) as f64).collect();
        let (out, [m0, m1]) = window_extreme(&v, shape, 2, 3, false);
        assert_eq!([m0, m1], [3, 4]);
        for i in 0..m0 {
            for j in 0..m1 {
                let mut m = f64::INFINITY;
                for a in i..i + 3 {
                    for b in j..j + 3 {
                        m = m.min(v[a * 6 + b]);
                    }
                }
                assert_eq!(out[i * m1 + j], m);
            }
        }
    }

    #[test]
    fn block_sums_2d() {
        let g = GridSpec::square(0.0, 1.0, 0.25).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0] * 10.0 + x[1]).unwrap();
        let s = BoxSums::new(&f);
        let mut direct = 0.0;
        for i in 1..3 {
            for j in 0..4 {
                direct += f.samples()[g.flat(i, j)];
            }
        }
        assert!((s.block(1, 3, 0, 4) - direct).abs() < 1e-12);
        let (win, shape) = s.windows(2, 2);
        assert_eq!(shape, [3, 3]);
        assert!((win[0] - s.block(0, 2, 0, 2)).abs() < 1e-15);
    }
}
