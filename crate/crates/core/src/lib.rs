//! Simulation and verification toolkit for last-passage percolation,
//! nonintersecting walks, edge processes, the O'Connell–Yor polymer and the
//! stochastic heat equation, all phrased through two kernel compositions:
//! the max-plus product `sup(f+g)` and its softened form
//! `supn f = (1/n) log ∫ e^{n f}`.
//!
//! * [`uc`] — grid functions, kernels and the two compositions.
//! * [`discrete`] — exact enumeration for Bernoulli last passage and
//!   conditioned walks.
//! * [`brownian`] — Brownian last passage, edge processes, time inversion.
//! * [`polymer`] — O'Connell–Yor free energy and the stochastic heat
//!   equation, with their scaled kernels.
//! * [`stats`] — empirical samples, KS distances, the Tracy–Widom reference
//!   and the catalog of identity tests.
//! * [`config`] — flat key=value experiment configuration.

pub mod config;
pub mod error;
pub mod par;
pub mod rng;
pub mod uc;
pub mod discrete;
pub mod brownian;
pub mod polymer;
pub mod stats;

pub use error::{Error, Result};
