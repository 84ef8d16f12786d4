use rand::Rng;

use crate::error::Result;
use crate::rng::{rng_from_seed, std_normal};
use crate::uc::Grid;

/// Brownian path sampled on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub drift: f64,
    pub seed: u64,
}

impl PathSample {
    /// Linear interpolation between grid nodes.
    pub fn at(&self, t: f64) -> f64 {
        let r = ((t - self.grid.lo()) / self.grid.step()).clamp(0.0, (self.grid.len() - 1) as f64);
        let i = (r.floor() as usize).min(self.grid.len().saturating_sub(2));
        if self.grid.len() == 1 {
            return self.values[0];
        }
        let w = r - i as f64;
        if w == 0.0 {
            self.values[i]
        } else {
            (1.0 - w) * self.values[i] + w * self.values[i + 1]
        }
    }
}

/// Fills `out` with a path started at `start`: each increment is
/// `ν·δ + √(variance·δ)·N(0,1)`.
pub fn fill_bm<R: Rng + ?Sized>(rng: &mut R, start: f64, nu: f64, variance: f64, step: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let sd = (variance * step).sqrt();
    out[0] = start;
    for k in 1..out.len() {
        out[k] = out[k - 1] + nu * step + sd * std_normal(rng);
    }
}

/// Brownian motion with drift `nu` and variance `variance` per unit time,
/// zero at the first grid point.
pub fn sample_bm_with_variance(nu: f64, variance: f64, grid: Grid, seed: u64) -> Result<PathSample> {
    let mut rng = rng_from_seed(seed);
    let mut values = vec![0.0; grid.len()];
    fill_bm(&mut rng, 0.0, nu, variance, grid.step(), &mut values);
    Ok(PathSample { grid, values, drift: nu, seed })
}

/// Variance-2 Brownian motion with drift `nu`.
pub fn sample_bm(nu: f64, grid: Grid, seed: u64) -> Result<PathSample> {
    sample_bm_with_variance(nu, 2.0, grid, seed)
}
