use crate::error::{Error, Result};

use super::Grid;

/// One realization of a two-variable kernel `K(x, y)` on a product grid.
/// `-∞` marks pairs where the kernel is undefined (e.g. `y < x` for a line
/// metric). Stored row-major in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSample {
    x_grid: Grid,
    y_grid: Grid,
    values: Vec<f64>,
}

impl KernelSample {
    pub fn new(x_grid: Grid, y_grid: Grid, values: Vec<f64>) -> Result<KernelSample> {
        if values.len() != x_grid.len() * y_grid.len() {
            return Err(Error::InvalidFunction(format!(
                "kernel has {} values for a {}x{} grid",
                values.len(),
                x_grid.len(),
                y_grid.len()
            )));
        }
        Ok(KernelSample { x_grid, y_grid, values })
    }

    pub fn from_fn(x_grid: Grid, y_grid: Grid, f: impl Fn(f64, f64) -> f64) -> KernelSample {
        let mut values = Vec::with_capacity(x_grid.len() * y_grid.len());
        for x in x_grid.points() {
            for y in y_grid.points() {
                values.push(f(x, y));
            }
        }
        KernelSample { x_grid, y_grid, values }
    }

    pub fn x_grid(&self) -> &Grid {
        &self.x_grid
    }

    pub fn y_grid(&self) -> &Grid {
        &self.y_grid
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y_grid.len() + iy]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row `K(x_ix, ·)`.
    pub fn row(&self, ix: usize) -> &[f64] {
        let ny = self.y_grid.len();
        &self.values[ix * ny..(ix + 1) * ny]
    }
}
