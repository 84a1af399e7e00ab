//! Muckenhoupt, reverse Hölder and Muckenhoupt–Wheeden constants over
//! finite cube families, and the refinement protocol that turns them into
//! membership decisions.

mod family;
mod trend;
mod weight;

pub use family::{CubeFamily, SideGroup, DEFAULT_FAMILY_SEED, DEFAULT_RANDOM_PER_LEVEL};
pub use trend::{
    classify_growth, constant_trend, doubles_per_level, rw_estimate, Growth, RwEstimate,
    TrendPoint, WeightSpec, INCREMENT_RATIO, RW_LEVELS,
};
pub use weight::{
    a1_constant, ap_constant, apq_constant, rh_constant, rh_inf_constant, weighted_lp_norm,
    Weight, WeightClass, WEIGHT_FLOOR,
};
