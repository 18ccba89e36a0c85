//! Continued fractions, Diophantine quantities, the Möbius sieve and
//! Dirichlet simultaneous approximation.

mod approx;
mod dirichlet;
mod frac;
mod index_sets;
mod mobius;
mod rotation;
mod surd;

pub use approx::{
    check_best_approx, small_denominator_sums, truncated_sum, truncated_sum_constant, BestApproxMethod,
    BestApproxReport, SmallDenominatorSums, SCAN_CAP,
};
pub use dirichlet::{dirichlet_search, DirichletChoice, Target};
pub use frac::{dist_int, frac01, nearest_frac, signed_frac};
pub use index_sets::{classify_index_sets, IndexSets, QbEntry};
pub use mobius::{mobius_sieve, MobiusTable};
pub use rotation::{big_ln, AlphaSpec, QuotientFn, RotationNumber};
pub use surd::Surd;

/// Expands `spec` to depth `k_max`.
pub fn expand_cf(spec: &AlphaSpec, k_max: usize) -> crate::error::Result<RotationNumber> {
    RotationNumber::expand(spec, k_max)
}
