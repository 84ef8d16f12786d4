//! Empirical distributions, distances, reference samples and the catalog
//! of identity tests.

mod bootstrap;
mod empirical;
mod ks;
mod tw;

pub use bootstrap::{bootstrap_se, mean};
pub use empirical::EmpiricalSample;
pub use ks::{ks_one_sample, ks_two_sample, normal_cdf};
pub use tw::{read_cache, scaled_top_eigenvalue, tridiagonal_top_eigenvalue, tw_reference, tw_reference_cached, write_cache, CACHE_ENV};

mod catalog;
mod report;

pub use catalog::{run_identity_test, run_sample_experiment, SampleRow, MAX_CELL_UPDATES, MODEL_IDS, TEST_IDS};
pub use report::TestReport;
