//! Polymer models: the O'Connell–Yor polymer and the stochastic heat
//! equation, each with its 1-2-3 scaled kernel.

mod oy;
mod she;
mod special;

pub use oy::{oy_free_energy, oy_kernel, oy_scaled_kernel_sample, polymer_free_energy, OYParams, OY_VARIANCE};
pub use she::{kpz_scaled_kernel_sample, she_kernel, she_solve, KpzParams, SheField, SheParams};
pub use special::polygamma;
