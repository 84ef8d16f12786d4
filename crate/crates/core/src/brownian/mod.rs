//! Continuum samplers. Brownian motions have variance 2 unless stated
//! otherwise (the Hermitian process used for the wedge bound is standard).

mod blp;
mod conditioned;
mod gue;
mod invert;
mod path;
mod spec;
mod wedge;

pub use blp::{blp_kernel, blp_run, blp_sample, BlpScheme, BlpSource};
pub use conditioned::{ep_sample_conditioned, ConditionedConfig};
pub use gue::{
    ep_sample_gue, hermitian_bm_top_path, hermitian_gaussian, parallel_ep_sample_gue, pointed_ep_sample_gue,
    top_eigenvalue,
};
pub use invert::{classical_invert, time_invert};
pub use path::{sample_bm, sample_bm_with_variance, PathSample};
pub use spec::DriftedEnsembleSpec;
pub use wedge::{
    density_approx, wedge_containment, wedge_curve, wedge_curves, wedge_lower_bound, wedge_upper_bound,
    DensityApprox, WedgeContainment,
};
