//! Brownian last passage by dynamic programming on a time grid.
//!
//! `G_ℓ(k)` is the best value of a path that is on line `ℓ` at node `k`.
//! The plain [`BlpScheme::Grid`] recursion only lets paths switch lines at
//! grid nodes, which biases the maximum down by `O(√δ)`. The default
//! [`BlpScheme::Bridge`] also lets a path switch from line `ℓ-1` to `ℓ`
//! inside a cell: given the endpoint increments, the best switching gain
//! `max_s D(s) - D(t_k)` for `D = B_{ℓ-1} - B_ℓ` (variance rate 4) is the
//! maximum of a Brownian bridge, sampled exactly as
//! `M = (Δ + √(Δ² - 8δ log U))/2`. With two lines this makes the scheme
//! exact in law at the grid nodes; with more lines only paths making
//! two or more switches inside a single cell are missed.
//!
//! The environment is streamed cell by cell and shared by every source, so
//! kernels from several start points see the same Brownian lines. The
//! update graph is planar, so sampled kernels satisfy the quadrangle
//! inequality on every environment. To make that hold bit-for-bit rather
//! than up to rounding, increments and initial values are snapped to
//! multiples of `2^-36`: every path value is then an exact `f64` sum as
//! long as magnitudes stay below `2^16`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{open_unit, rng_from_seed, std_normal};
use crate::uc::{Grid, GridFunction, KernelSample};

use super::DriftedEnsembleSpec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlpScheme {
    /// Line switches at grid nodes only.
    Grid,
    /// Adds the exact in-cell switching gain for adjacent lines.
    #[default]
    Bridge,
}

const QUANTUM_SCALE: f64 = (1u64 << 36) as f64;

#[inline]
fn snap(x: f64) -> f64 {
    (x * QUANTUM_SCALE).round() / QUANTUM_SCALE
}

/// A start for the last passage problem: initial values `h` per line
/// (`-∞` allowed) placed at time node `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlpSource {
    pub start: usize,
    pub h: Vec<f64>,
}

/// Runs the recursion for `cells` cells of length `step` on lines with the
/// given drifts (variance 2), calling `record(source, node, top)` at every
/// node from each source's start on.
pub fn blp_run<R: Rng + ?Sized>(
    nu: &[f64],
    step: f64,
    cells: usize,
    sources: &[BlpSource],
    scheme: BlpScheme,
    rng: &mut R,
    mut record: impl FnMut(usize, usize, f64),
) {
    let n = nu.len();
    let sd = (2.0 * step).sqrt();
    let mut g = vec![f64::NEG_INFINITY; n * sources.len()];
    let mut db = vec![0.0; n];
    let mut gain = vec![0.0; n];

    let init = |g: &mut [f64], s: &BlpSource| {
        let mut prev = f64::NEG_INFINITY;
        for (l, v) in g.iter_mut().enumerate() {
            prev = prev.max(snap(s.h[l]));
            *v = prev;
        }
    };
    for (j, s) in sources.iter().enumerate() {
        if s.start == 0 {
            init(&mut g[j * n..(j + 1) * n], s);
            record(j, 0, g[j * n + n - 1]);
        }
    }

    for k in 0..cells {
        for (l, d) in db.iter_mut().enumerate() {
            *d = snap(nu[l] * step + sd * std_normal(rng));
        }
        if scheme == BlpScheme::Bridge {
            for l in 1..n {
                let delta = db[l - 1] - db[l];
                gain[l] = snap(0.5 * (delta + (delta * delta - 8.0 * step * open_unit(rng).ln()).sqrt()));
            }
        }
        for (j, s) in sources.iter().enumerate() {
            if s.start > k {
                continue;
            }
            let gs = &mut g[j * n..(j + 1) * n];
            let mut old_prev = gs[0];
            gs[0] += db[0];
            for l in 1..n {
                let old = gs[l];
                let mut v = (old + db[l]).max(gs[l - 1]);
                if scheme == BlpScheme::Bridge {
                    v = v.max(old_prev + db[l] + gain[l]);
                }
                old_prev = old;
                gs[l] = v;
            }
            record(j, k + 1, gs[n - 1]);
        }
        for (j, s) in sources.iter().enumerate() {
            if s.start == k + 1 {
                init(&mut g[j * n..(j + 1) * n], s);
                record(j, k + 1, g[j * n + n - 1]);
            }
        }
    }
}

/// Index of `t` on the lattice `t0 + k·step`, if it is a lattice point.
fn lattice_index(t0: f64, step: f64, t: f64) -> Result<i64> {
    let r = (t - t0) / step;
    let k = r.round();
    if (r - k).abs() > 1e-6 {
        return Err(Error::GridMismatch(format!("{t} is not on the lattice {t0} + k·{step}")));
    }
    Ok(k as i64)
}

/// One sample of the last passage curve `L` on `y_grid` (`-∞` left of `a`),
/// simulated with time step `y_grid.step()`.
pub fn blp_sample(spec: &DriftedEnsembleSpec, y_grid: Grid, seed: u64, scheme: BlpScheme) -> Result<GridFunction> {
    let step = y_grid.step();
    let offset = lattice_index(spec.a, step, y_grid.lo())?;
    let last = offset + y_grid.len() as i64 - 1;
    let mut values = vec![f64::NEG_INFINITY; y_grid.len()];
    if last >= 0 {
        let mut rng = rng_from_seed(seed);
        let source = BlpSource { start: 0, h: spec.h.clone() };
        blp_run(&spec.nu, step, last as usize, &[source], scheme, &mut rng, |_, k, v| {
            let i = k as i64 - offset;
            if i >= 0 {
                values[i as usize] = v;
            }
        });
    }
    GridFunction::new(y_grid, values)
}

/// Last passage kernel `K(x, y)` from `(x, line 1)` to `(y, line n)` on one
/// environment, simulated on the lattice `x_grid.lo() + k·step`. Every node
/// of both grids must lie on that lattice.
pub fn blp_kernel(
    nu: &[f64],
    x_grid: Grid,
    y_grid: Grid,
    step: f64,
    seed: u64,
    scheme: BlpScheme,
) -> Result<KernelSample> {
    if nu.is_empty() {
        return Err(Error::InvalidParameter("need at least one line".into()));
    }
    let t0 = x_grid.lo();
    let n = nu.len();
    let xs: Vec<usize> = x_grid
        .points()
        .map(|x| lattice_index(t0, step, x).map(|k| k as usize))
        .collect::<Result<_>>()?;
    let ys: Vec<i64> = y_grid.points().map(|y| lattice_index(t0, step, y)).collect::<Result<_>>()?;
    let cells = ys.iter().copied().max().unwrap_or(0).max(0) as usize;
    let mut h = vec![f64::NEG_INFINITY; n];
    h[0] = 0.0;
    let sources: Vec<BlpSource> = xs.iter().map(|&start| BlpSource { start, h: h.clone() }).collect();

    let (nx, ny) = (xs.len(), ys.len());
    let mut values = vec![f64::NEG_INFINITY; nx * ny];
    // node -> list of y indices reading it
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); cells + 1];
    for (iy, &k) in ys.iter().enumerate() {
        if k >= 0 {
            readers[k as usize].push(iy);
        }
    }
    let mut rng = rng_from_seed(seed);
    blp_run(nu, step, cells, &sources, scheme, &mut rng, |j, k, v| {
        for &iy in &readers[k] {
            values[j * ny + iy] = v;
        }
    });
    KernelSample::new(x_grid, y_grid, values)
}
