//! Exact combinatorics for Bernoulli last passage.
//!
//! The `Y` process is a sign-changed last passage percolation on `n` lines
//! of Bernoulli(p) weights; `Z` is `n` Bernoulli walks conditioned to stay
//! ordered forever. The law of the bottom line `Y_n` is a signed finite
//! combination of laws of `Z_n` from deterministic starts. Everything here
//! is verified by complete enumeration, in exact rational arithmetic when
//! the enumeration is small and in `f64` otherwise.
//!
//! Orientation: states live in `ℤ^{↓n}` (`y_1 ≥ … ≥ y_n`), and the
//! hat-shift is `ẑ_i = z_i - i` (1-based), which turns weakly decreasing
//! vectors into strictly decreasing ones.

mod fd;
mod mixture;
mod pmf;
mod scalar;
mod y;
mod z;

pub use fd::{binomial_difference, difference, finite_difference_identities, uniform_mass, FdReport};
pub use mixture::{
    dw_constant, dw_identity_check, dw_identity_discrepancy, dw_weights, minimal_admissible_y,
    MixtureEntry, SignedMixture, RATIONAL_BUDGET,
};
pub use pmf::SignedPmf;
pub use scalar::{rational, Rational, Scalar};
pub use y::{lp_bottom, y_law_exact, y_step, YState, Y_ENUMERATION_BUDGET};
pub use z::{harmonicity_defect, hat, vandermonde, z_law_exact, z_law_full, Z_ENUMERATION_BUDGET};
