//! `(N, ∞)` atoms, finite atomic sums and the norms attached to them.

mod atom;
mod moments;
mod space;
mod sum;

pub use atom::{multi_indices, Atom, MOMENT_TOL, SUP_TOL, ZERO_ATOM_TOL};
pub use moments::{moment_order_required, MomentRule};
pub use space::{hardy_quasinorm, Space};
pub use sum::{
    coefficient_norm, random_atomic_sum, AtomicSum, AtomicSumPlan, PlannedTerm, Profile,
    ScalePolicy,
};

#[cfg(test)]
mod tests;
