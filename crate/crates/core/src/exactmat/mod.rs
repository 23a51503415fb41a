//! Exact rational kernel: scalars, dense matrices, polynomials, spectral
//! invariants and support-digraph tests.

mod charpoly;
mod digraph;
mod matrix;
mod poly;
mod rat;
mod smith;

pub use charpoly::{charpoly, nonzero_charpoly};
pub use digraph::{is_irreducible, is_primitive};
pub use matrix::RatMatrix;
pub use poly::RatPoly;
pub use rat::{ParseRatError, Rat};
pub use smith::{invariant_factors, similar_over_rationals};

/// `rank(A)`; see [`RatMatrix::rank`].
pub fn rank(a: &RatMatrix) -> usize {
    a.rank()
}
