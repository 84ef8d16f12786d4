//! Upper-semicontinuous functions on uniform grids and the two composition
//! semirings: max-plus (`f·g = sup f+g`) and its softened version
//! `supn f = (1/n) log ∫ e^{n f}`.
//!
//! A value of `-∞` marks a grid point outside the support. Point masses
//! (narrow wedges and delta initial conditions) are carried as explicit
//! [`Atom`]s so that they keep exact semantics in both semirings.

mod compose;
mod grid;
mod kernel;
mod lse;
mod thickness;

pub use compose::{compose_max, compose_supn, kernel_product_max, line_metric, supn_integrate};
pub use grid::{Atom, Grid, GridFunction};
pub use kernel::KernelSample;
pub use lse::LogSumExp;
pub use thickness::{thickness, thickness_ladder, THICKNESS_LADDER_DEPTH};
