use crate::error::{Error, Result};
use crate::uc::Grid;

use super::PathSample;

fn pull_back(path: &PathSample, s: f64) -> Result<f64> {
    let g = &path.grid;
    if !g.contains(s) {
        return Err(Error::InvalidParameter(format!(
            "pullback time {s} outside the path domain [{}, {}]",
            g.lo(),
            g.hi()
        )));
    }
    Ok(path.at(s))
}

fn value_at_zero(path: &PathSample) -> f64 {
    if path.grid.contains(0.0) {
        path.at(0.0)
    } else {
        f64::NAN
    }
}

/// `I_a g(t) = ((t+a)/a)·g(-at/(t+a))` on `out_grid`, with linear
/// interpolation of `g` off its grid. Maps the line `d + νt` to
/// `d + (d/a - ν)t`; the output `drift` records that slope when `g(0)` is
/// available.
pub fn time_invert(path: &PathSample, a: f64, out_grid: Grid) -> Result<PathSample> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("a = {a}")));
    }
    let values = out_grid
        .points()
        .map(|t| {
            if (t + a).abs() < 1e-12 {
                return Err(Error::InvalidParameter(format!("t = -a = {t} is in the domain")));
            }
            Ok((t + a) / a * pull_back(path, -a * t / (t + a))?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathSample { grid: out_grid, values, drift: value_at_zero(path) / a - path.drift, seed: path.seed })
}

/// Classical inversion `g ↦ t·g(1/t)` on `out_grid` (all points `> 0`).
/// Swaps start and drift: Brownian motion from `μ` with drift `ν` becomes
/// Brownian motion from `ν` with drift `μ`.
pub fn classical_invert(path: &PathSample, out_grid: Grid) -> Result<PathSample> {
    let values = out_grid
        .points()
        .map(|t| {
            if t <= 0.0 {
                return Err(Error::InvalidParameter(format!("classical inversion needs t > 0, got {t}")));
            }
            Ok(t * pull_back(path, 1.0 / t)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathSample { grid: out_grid, values, drift: value_at_zero(path), seed: path.seed })
}
