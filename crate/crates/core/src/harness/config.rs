use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::KernelSpec;
use crate::varlebesgue::{ExponentFunction, ExponentSpec};
use crate::weights::WeightSpec;

/// Tolerance on the exponent identity `1/p - 1/q = α/n`.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Inequalities the harness knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    L4_1,
    L4_2,
    L4_3,
    L4_4,
    R4_5,
    L4_6,
    L4_7,
    L4_8,
    L4_9,
    L4_10,
    L5_1,
    L5_2,
    L7_1,
    T1_1,
    T1_2,
    T1_3,
    T1_4,
    T1_5,
    T1_6,
}

impl Target {
    pub const ALL: [Target; 19] = [
        Target::L4_1,
        Target::L4_2,
        Target::L4_3,
        Target::L4_4,
        Target::R4_5,
        Target::L4_6,
        Target::L4_7,
        Target::L4_8,
        Target::L4_9,
        Target::L4_10,
        Target::L5_1,
        Target::L5_2,
        Target::L7_1,
        Target::T1_1,
        Target::T1_2,
        Target::T1_3,
        Target::T1_4,
        Target::T1_5,
        Target::T1_6,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Target::L4_1 => "L4.1",
            Target::L4_2 => "L4.2",
            Target::L4_3 => "L4.3",
            Target::L4_4 => "L4.4",
            Target::R4_5 => "R4.5",
            Target::L4_6 => "L4.6",
            Target::L4_7 => "L4.7",
            Target::L4_8 => "L4.8",
            Target::L4_9 => "L4.9",
            Target::L4_10 => "L4.10",
            Target::L5_1 => "L5.1",
            Target::L5_2 => "L5.2",
            Target::L7_1 => "L7.1",
            Target::T1_1 => "T1.1",
            Target::T1_2 => "T1.2",
            Target::T1_3 => "T1.3",
            Target::T1_4 => "T1.4",
            Target::T1_5 => "T1.5",
            Target::T1_6 => "T1.6",
        }
    }

    /// The target works on a variable exponent rather than a weight.
    pub fn is_variable(&self) -> bool {
        matches!(
            self,
            Target::L4_2 | Target::L4_4 | Target::L4_8 | Target::L4_10 | Target::T1_2 | Target::T1_4 | Target::T1_6
        )
    }

    pub fn is_fractional(&self) -> bool {
        matches!(
            self,
            Target::L4_3 | Target::L4_4 | Target::L4_9 | Target::L4_10 | Target::T1_3 | Target::T1_4
        )
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .iter()
            .find(|t| t.id() == s.trim())
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown target `{s}`")))
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instances {
    pub count: usize,
    pub seed: u64,
}

impl Default for Instances {
    fn default() -> Self {
        Self {
            count: 200,
            seed: 0,
        }
    }
}

/// Every knob a checker may read; each target uses a subset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    /// Moment order `N`, or `L` for non-convolution kernels.
    #[serde(rename = "N")]
    pub order: Option<i32>,
    /// Dilation factor for R4.5.
    pub tau: Option<f64>,
    pub weight: Option<String>,
    pub exponent: Option<String>,
    pub kernel: Option<String>,
    /// `r_w` when the weight has no closed-form value.
    pub rw: Option<f64>,
    /// `variable` or `variable-q` for L4.8.
    pub variant: Option<String>,
    pub dim: Option<usize>,
    pub h: Option<f64>,
    /// Half-width of the box `[-box, box]^n`.
    #[serde(rename = "box")]
    pub half_width: Option<f64>,
    /// Functions or cubes per instance; random in `1..=8` when absent.
    pub cubes: Option<usize>,
    pub nested: Option<bool>,
    /// Atoms per atomic sum.
    pub atoms: Option<usize>,
    /// Coarsest mollifier scale for L5.1.
    pub t: Option<f64>,
}

/// One `[[check]]` entry, field names as they appear in the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub target: Target,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub instances: Instances,
    #[serde(rename = "refinementLevels", default = "default_levels")]
    pub refinement_levels: u32,
}

fn default_levels() -> u32 {
    2
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub check: Vec<CheckSpec>,
}

impl Config {
    /// Parses and validates every entry.
    pub fn parse(text: &str) -> Result<Vec<Check>> {
        let cfg: Config = toml::from_str(text)?;
        cfg.check.into_iter().map(Check::new).collect()
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Vec<Check>> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// A validated [`CheckSpec`] with defaults filled in.
#[derive(Clone, Debug)]
pub struct Check {
    pub spec: CheckSpec,
    pub base: GridSpec,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    pub weight: WeightSpec,
    pub exponent: Option<ExponentSpec>,
    pub kernel: Option<KernelSpec>,
}

fn hyp(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Hypothesis(msg()))
    }
}

impl Check {
    pub fn new(spec: CheckSpec) -> Result<Self> {
        let t = spec.target;
        let pr = &spec.parameters;
        if spec.refinement_levels < 2 {
            return Err(Error::InvalidParameter(format!(
                "{t}: refinementLevels must be at least 2, got {}",
                spec.refinement_levels
            )));
        }
        if spec.instances.count == 0 {
            return Err(Error::InvalidParameter(format!("{t}: instance count must be positive")));
        }
        let dim = pr.dim.unwrap_or(1);
        let (h0, b0) = if dim == 2 { (1.0 / 64.0, 4.0) } else { (1.0 / 256.0, 8.0) };
        let hw = pr.half_width.unwrap_or(b0);
        let base = if dim == 2 {
            GridSpec::square(-hw, hw, pr.h.unwrap_or(h0))?
        } else if dim == 1 {
            GridSpec::line(-hw, hw, pr.h.unwrap_or(h0))?
        } else {
            return Err(Error::InvalidParameter(format!("{t}: dimension {dim}")));
        };
        let n = dim as f64;
        let weight = WeightSpec::parse(pr.weight.as_deref().unwrap_or("one"))?;
        let exponent = pr.exponent.as_deref().map(ExponentSpec::parse).transpose()?;
        let kernel = pr.kernel.as_deref().map(KernelSpec::parse).transpose()?;
        if let Some(k) = &kernel {
            if k.dim() != dim {
                return Err(Error::InvalidParameter(format!("{t}: kernel {} is not {dim}-dimensional", k.name())));
            }
        }
        let alpha = pr.alpha.unwrap_or(0.0);
        let p = pr.p.unwrap_or(match t {
            Target::L4_1 | Target::L4_3 => 2.0,
            _ => 1.0,
        });
        let r = pr.r.unwrap_or(2.0);
        hyp(p > 0.0 && p.is_finite(), || format!("0 < p < inf, got p = {p}"))?;

        let pexp = if t.is_variable() {
            let e = exponent
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter(format!("{t}: needs an `exponent`")))?;
            Some(e.sample(&base)?)
        } else {
            None
        };
        let (pm, pp) = pexp.as_ref().map(|e| (e.p_minus(), e.p_plus())).unwrap_or((p, p));

        // q: explicit, implied by the fractional identity, or defaulted
        let q = if t.is_fractional() && !t.is_variable() {
            hyp(alpha > 0.0 || (t == Target::L4_3 && alpha == 0.0), || {
                format!("0 < alpha < n, got alpha = {alpha}")
            })?;
            hyp(alpha < n, || format!("0 < alpha < n, got alpha = {alpha}"))?;
            hyp(1.0 / p > alpha / n, || format!("p < n/alpha, got p = {p}, n/alpha = {}", n / alpha))?;
            match pr.q {
                Some(q) => {
                    let lhs = 1.0 / p - 1.0 / q;
                    hyp((lhs - alpha / n).abs() <= IDENTITY_TOL, || {
                        format!("1/p - 1/q = alpha/n fails: 1/p - 1/q = {lhs}, alpha/n = {}", alpha / n)
                    })?;
                    q
                }
                None => 1.0 / (1.0 / p - alpha / n),
            }
        } else {
            pr.q.unwrap_or(2.0)
        };

        match t {
            Target::L4_1 => {
                hyp(p > 1.0 && r > 1.0 && r.is_finite(), || format!("1 < p, r < inf, got p = {p}, r = {r}"))?;
            }
            Target::L4_2 => {
                hyp(pm > 1.0 && r > 1.0 && r.is_finite(), || format!("1 < p_- and 1 < r < inf, got p_- = {pm}, r = {r}"))?;
            }
            Target::L4_3 => {
                hyp(p > 1.0 && r > 1.0 && r.is_finite(), || format!("1 < p < n/alpha and 1 < r < inf, got p = {p}, r = {r}"))?;
            }
            Target::L4_4 => {
                hyp(alpha > 0.0 && alpha < n, || format!("0 < alpha < n, got alpha = {alpha}"))?;
                hyp(pm > 1.0 && pp < n / alpha, || format!("1 < p_- <= p_+ < n/alpha, got [{pm}, {pp}]"))?;
                hyp(r > 1.0 && r.is_finite(), || format!("1 < r < inf, got r = {r}"))?;
            }
            Target::R4_5 => {
                let tau = pr.tau.unwrap_or(2.0);
                hyp(tau > 1.0, || format!("tau > 1, got tau = {tau}"))?;
            }
            Target::L4_6 => {
                hyp(p <= 1.0, || format!("0 < p <= 1, got p = {p}"))?;
            }
            Target::L4_7 => {
                hyp(q > 1.0 && p < q, || format!("q > 1 and 0 < p < q, got p = {p}, q = {q}"))?;
            }
            Target::L4_8 => match pr.variant.as_deref().unwrap_or("variable") {
                "variable" => hyp(pm > 0.0 && pp < 1.0, || format!("0 < p_- <= p_+ < 1, got [{pm}, {pp}]"))?,
                "variable-q" => hyp(q > pp && q.is_finite(), || format!("p_+ < q < inf, got p_+ = {pp}, q = {q}"))?,
                v => return Err(Error::InvalidParameter(format!("{t}: unknown variant `{v}`"))),
            },
            Target::L4_9 | Target::T1_3 => {}
            Target::L4_10 | Target::T1_4 => {
                hyp(alpha > 0.0 && alpha < n, || format!("0 < alpha < n, got alpha = {alpha}"))?;
                hyp(pp < n / alpha, || format!("p_+ < n/alpha, got p_+ = {pp}, n/alpha = {}", n / alpha))?;
            }
            Target::L5_1 | Target::L5_2 => {
                let k = kernel
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter(format!("{t}: needs a `kernel`")))?;
                hyp(k.is_convolution(), || format!("{t} needs a convolution kernel"))?;
                k.verify(pr.order.unwrap_or(0).max(0) as usize + 1)?;
            }
            Target::L7_1 | Target::T1_5 | Target::T1_6 => {
                if let Some(k) = &kernel {
                    hyp(!k.is_convolution(), || format!("{t} needs a non-convolution kernel"))?;
                }
            }
            Target::T1_1 | Target::T1_2 => {
                if let Some(k) = &kernel {
                    hyp(k.is_convolution(), || format!("{t} needs a convolution kernel"))?;
                }
            }
        }
        if t.is_variable() {
            hyp(pm > 0.0 && pp.is_finite(), || format!("0 < p_- <= p_+ < inf, got [{pm}, {pp}]"))?;
        }
        Ok(Self {
            base,
            p,
            q,
            r,
            alpha,
            weight,
            exponent,
            kernel,
            spec,
        })
    }

    pub fn target(&self) -> Target {
        self.spec.target
    }

    pub fn params(&self) -> &Parameters {
        &self.spec.parameters
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn levels(&self) -> u32 {
        self.spec.refinement_levels
    }

    pub fn count(&self) -> usize {
        self.spec.instances.count
    }

    pub fn seed(&self) -> u64 {
        self.spec.instances.seed
    }

    pub fn exponent_on(&self, grid: &GridSpec) -> Result<ExponentFunction> {
        self.exponent
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter(format!("{}: needs an `exponent`", self.target())))?
            .sample(grid)
    }

    /// `r_w`: from the parameters, else the closed form.
    pub fn rw(&self) -> Result<f64> {
        self.params()
            .rw
            .or_else(|| self.weight.known_rw(self.dim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("{}: weight has no closed-form r_w; set `rw`", self.target()))
            })
    }
}
