//! Narrow-wedge constructions: the typical last passage curves through the
//! top `n - m` lines, the bounding curves for the top line of
//! nonintersecting Brownian motions, and the last passage approximation of
//! a Lipschitz function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::map_replicas;
use crate::rng::rng_from_seed;
use crate::uc::{Grid, GridFunction};

use super::{blp_run, hermitian_bm_top_path, BlpScheme, BlpSource};

/// `λ_{n,m}(x) = √(8(n-m)(x+a)) - x√(2n/a)` for `x ≥ -a`, `-∞` before.
pub fn wedge_curve(n: usize, m: usize, a: f64, x: f64) -> f64 {
    if x < -a {
        return f64::NEG_INFINITY;
    }
    (8.0 * (n - m) as f64 * (x + a)).sqrt() - x * (2.0 * n as f64 / a).sqrt()
}

pub fn wedge_curves(n: usize, m: usize, a: f64, x_grid: Grid) -> Result<GridFunction> {
    if m >= n || !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("need m < n and a > 0, got n={n}, m={m}, a={a}")));
    }
    Ok(GridFunction::from_fn(x_grid, |x| wedge_curve(n, m, a, x)))
}

/// Upper bounding curve `n^α + h² - (2/3)|t-1|·h·n^{1/4}` for
/// `W'(t) - √n(t+1)`, where `W'` is the top of `n` standard
/// nonintersecting Brownian motions from 0.
pub fn wedge_upper_bound(n: usize, alpha: f64, h: f64, t: f64) -> f64 {
    let n = n as f64;
    n.powf(alpha) + h * h - 2.0 / 3.0 * (t - 1.0).abs() * h * n.powf(0.25)
}

/// Lower bounding curve `-√n(t-1)² - n^α`, stated for `t ∈ [1/2, 3/2]`.
pub fn wedge_lower_bound(n: usize, alpha: f64, t: f64) -> f64 {
    let n = n as f64;
    -n.sqrt() * (t - 1.0).powi(2) - n.powf(alpha)
}

/// Fractions of simulated top lines that stay inside the bounding curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedgeContainment {
    pub replicas: usize,
    /// Per entry of `hs`: fraction of paths below the upper curve at all times.
    pub upper: Vec<f64>,
    /// Fraction below the upper curve for every `h` simultaneously.
    pub upper_all: f64,
    /// Fraction above the lower curve at all times in `[1/2, 3/2]`.
    pub lower: f64,
}

pub fn wedge_containment(
    n: usize,
    alpha: f64,
    hs: &[f64],
    times: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<WedgeContainment> {
    let sq = (n as f64).sqrt();
    let per = map_replicas(seed, replicas, |_, rng| -> Result<(Vec<bool>, bool)> {
        let w = hermitian_bm_top_path(n, times, rng)?;
        let lam: Vec<f64> = w.iter().zip(times).map(|(w, t)| w - sq * (t + 1.0)).collect();
        let upper = hs
            .iter()
            .map(|&h| lam.iter().zip(times).all(|(l, &t)| *l <= wedge_upper_bound(n, alpha, h, t)))
            .collect();
        let lower = lam
            .iter()
            .zip(times)
            .filter(|(_, t)| (0.5..=1.5).contains(*t))
            .all(|(l, &t)| *l >= wedge_lower_bound(n, alpha, t));
        Ok((upper, lower))
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    let frac = |c: usize| c as f64 / replicas as f64;
    Ok(WedgeContainment {
        replicas,
        upper: (0..hs.len()).map(|i| frac(per.iter().filter(|(u, _)| u[i]).count())).collect(),
        upper_all: frac(per.iter().filter(|(u, _)| u.iter().all(|&b| b)).count()),
        lower: frac(per.iter().filter(|(_, l)| *l).count()),
    })
}

/// Output of [`density_approx`] with the constants that were used.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityApprox {
    /// `F(y) = H_n(α - y)` on `f`'s grid, where `A = [α, β]` is the
    /// support of `f`; `-∞` where `α - y < -a`.
    pub output: GridFunction,
    pub a: f64,
    pub lines_used: usize,
    pub lipschitz: f64,
}

/// Builds `H_n(x) = max_m f_{n,m} + Λ_{n,m}(x)` from one Brownian last
/// passage environment on `n` lines started at `-a`, `a = n^{1/4}` (rounded
/// to the simulation lattice), with common drift `-√(2n/a)` and offsets
/// `f_{n,m} = f(α + am/n) - √(8an) + m√(2a/n) + ε_n/ℓ`, `ε_n = a/n`,
/// `m = 1, …, ⌊bn/a⌋` placed on line `m + 1`, each raised by `a√(2n/a)`
/// to cancel the drift accrued before time 0. The slack term `d_n` is 0
/// and `ℓ` is the larger of 1 and the grid Lipschitz constant of `f`.
///
/// `f` must be finite on one interval `[α, β]` and `-∞` elsewhere, and the
/// interval must be shorter than `a`. `sim_step` is refined so that it
/// divides the grid step of `f`.
pub fn density_approx(f: &GridFunction, n: usize, seed: u64, sim_step: f64) -> Result<DensityApprox> {
    f.validate()?;
    let g = *f.grid();
    let finite: Vec<usize> = (0..g.len()).filter(|&i| f.value(i).is_finite()).collect();
    let (&i0, &i1) = match (finite.first(), finite.last()) {
        (Some(a), Some(b)) if b > a => (a, b),
        _ => return Err(Error::InvalidFunction("need a finite stretch of at least two points".into())),
    };
    if i1 - i0 + 1 != finite.len() {
        return Err(Error::InvalidFunction("support must be a single interval".into()));
    }
    let (alpha, b) = (g.point(i0), g.point(i1) - g.point(i0));
    let lipschitz = (i0..i1)
        .map(|i| (f.value(i + 1) - f.value(i)).abs() / g.step())
        .fold(1.0f64, f64::max);

    let q = (g.step() / sim_step).ceil().max(1.0);
    let step = g.step() / q;
    let a = ((n as f64).powf(0.25) / step).round() * step;
    let nf = n as f64;
    let m_max = (b * nf / a).floor() as usize;
    if m_max + 1 > n || m_max == 0 {
        return Err(Error::InvalidParameter(format!(
            "support length {b} needs 0 < ⌊bn/a⌋ < n (n = {n}, a = {a})"
        )));
    }
    let eps = a / nf;
    // The typical curve λ_{n,m} counts the drift from time 0; the lines
    // accrue `drift·a` on [-a, 0] as well, which the offsets cancel.
    let drift = -(2.0 * nf / a).sqrt();
    let mut h = vec![f64::NEG_INFINITY; n];
    for m in 1..=m_max {
        let fm = f.interpolate(alpha + a * m as f64 / nf);
        h[m] = fm - (8.0 * a * nf).sqrt() + m as f64 * (2.0 * a / nf).sqrt() + eps / lipschitz - drift * a;
    }
    let nu = vec![drift; n];

    // Lattice node k is time -a + k·step; x = α - y is node (a + α - y)/step.
    let a_cells = (a / step).round() as i64;
    let node_of = |i: usize| a_cells + ((i0 as i64 - i as i64) as f64 * q).round() as i64;
    let cells = (0..g.len()).map(node_of).max().unwrap_or(0).max(0) as usize;
    let mut top = vec![f64::NEG_INFINITY; cells + 1];
    let mut rng = rng_from_seed(seed);
    blp_run(&nu, step, cells, &[BlpSource { start: 0, h }], BlpScheme::Bridge, &mut rng, |_, k, v| top[k] = v);
    let values = (0..g.len())
        .map(|i| {
            let k = node_of(i);
            if k < 0 {
                f64::NEG_INFINITY
            } else {
                top[k as usize]
            }
        })
        .collect();
    Ok(DensityApprox { output: GridFunction::new(g, values)?, a, lines_used: m_max, lipschitz })
}
