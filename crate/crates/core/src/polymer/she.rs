//! Stochastic heat equation `Ż = ½Z″ + ZW` on a finite interval.
//!
//! The scheme is explicit. Each step applies the discrete heat update, then
//! multiplies every cell by `exp(ξ√(δ/ε) − δ/(2ε))`. That factor has mean
//! one, so `E Z` follows the discrete heat equation exactly and `Z` stays
//! positive. The boundaries are Dirichlet zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, std_normal};
use crate::uc::{Grid, GridFunction, KernelSample};

const BLOWUP: f64 = 1e30;

/// Discretisation of the solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SheParams {
    /// Space step ε.
    pub eps: f64,
    /// Time step δ; must satisfy δ ≤ ε²/2.
    pub delta: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    /// `false` switches the noise off (pure discrete heat flow).
    pub noise: bool,
}

impl SheParams {
    pub fn new(eps: f64, x_lo: f64, x_hi: f64) -> SheParams {
        SheParams { eps, delta: eps * eps / 2.0, x_lo, x_hi, noise: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !(self.delta > 0.0) {
            return Err(Error::InvalidParameter("ε and δ must be positive".into()));
        }
        if self.delta > self.eps * self.eps / 2.0 * (1.0 + 1e-12) {
            return Err(Error::Unstable(format!("δ = {} exceeds ε²/2 = {}", self.delta, self.eps * self.eps / 2.0)));
        }
        if !(self.x_hi - self.x_lo >= 2.0 * self.eps) {
            return Err(Error::InvalidGrid(format!("domain [{}, {}] too small", self.x_lo, self.x_hi)));
        }
        Ok(())
    }

    fn nodes(&self) -> usize {
        ((self.x_hi - self.x_lo) / self.eps).round() as usize + 1
    }
}

/// Solution at `time`: nodes `x_lo + i·ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SheField {
    pub eps: f64,
    pub delta: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub values: Vec<f64>,
    pub time: f64,
}

impl SheField {
    /// Index of the cell `[x_i − ε/2, x_i + ε/2)` containing `x`.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let r = ((x - self.x_lo) / self.eps + 0.5).floor();
        (r >= 0.0 && (r as usize) < self.values.len()).then_some(r as usize)
    }

    pub fn at(&self, x: f64) -> Option<f64> {
        self.cell_of(x).map(|i| self.values[i])
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.eps
    }
}

/// Solves up to `t_final` from `init`.
///
/// `init` values are a density: they must be nonnegative, and `−∞` reads
/// as 0. They are interpolated onto the nodes and are zero off `init`'s
/// grid. An atom of mass `exp(value + log_weight)` becomes mass/ε on the
/// node whose cell contains it. So a narrow wedge at `x` is the delta
/// initial condition `δ_x`.
pub fn she_solve(init: &GridFunction, t_final: f64, params: &SheParams, seed: u64) -> Result<SheField> {
    params.validate()?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final}")));
    }
    let eps = params.eps;
    let len = params.nodes();
    let mut field = SheField {
        eps,
        delta: params.delta,
        x_lo: params.x_lo,
        x_hi: params.x_lo + (len - 1) as f64 * eps,
        values: vec![0.0; len],
        time: 0.0,
    };
    let g = init.grid();
    for i in 1..len - 1 {
        let x = field.node(i);
        if g.lo() <= x && x <= g.hi() {
            let v = init.interpolate(x);
            if v == f64::NEG_INFINITY {
                continue;
            }
            if v < 0.0 {
                return Err(Error::InvalidFunction(format!("negative initial density {v} at {x}")));
            }
            if v.is_finite() {
                field.values[i] = v;
            }
        }
    }
    for atom in init.atoms() {
        let i = field
            .cell_of(atom.location)
            .filter(|&i| i > 0 && i < len - 1)
            .ok_or_else(|| Error::InvalidParameter(format!("atom at {} outside the interior", atom.location)))?;
        field.values[i] += (atom.value + atom.log_weight).exp() / eps;
    }

    let delta = evolve(std::slice::from_mut(&mut field.values), t_final, params, seed)?;
    field.delta = delta;
    field.time = t_final;
    Ok(field)
}

/// Runs every field in `fields` to `t_final` against one shared noise.
/// Returns the time step actually used: `params.delta`, shrunk so that it
/// divides `t_final`.
fn evolve(fields: &mut [Vec<f64>], t_final: f64, params: &SheParams, seed: u64) -> Result<f64> {
    let steps = (t_final / params.delta).ceil() as usize;
    if steps == 0 {
        return Ok(params.delta);
    }
    let eps = params.eps;
    let delta = t_final / steps as f64;
    let diff = 0.5 * delta / (eps * eps);
    let sd = (delta / eps).sqrt();
    let ito = -0.5 * delta / eps;
    let len = fields[0].len();
    let mut rng = rng_from_seed(seed);
    let mut next = vec![vec![0.0; len]; fields.len()];
    for step in 1..=steps {
        for i in 1..len - 1 {
            let factor = if params.noise { (sd * std_normal(&mut rng) + ito).exp() } else { 1.0 };
            for (z, nz) in fields.iter().zip(next.iter_mut()) {
                let heat = z[i] + diff * (z[i + 1] - 2.0 * z[i] + z[i - 1]);
                nz[i] = if params.noise { heat * factor } else { heat };
                if !(nz[i] <= BLOWUP) {
                    return Err(Error::Unstable(format!("|Z| > 1e30 at step {step}")));
                }
            }
        }
        for (z, nz) in fields.iter_mut().zip(next.iter_mut()) {
            std::mem::swap(z, nz);
        }
    }
    Ok(delta)
}

/// `log Z(x; y, t)` for every start `x` in `starts` and readout `y` in
/// `readouts`. Each start is a delta initial condition, and all of them
/// share one noise field, so the result is one sample of the log-SHE
/// kernel. Readouts use the cell containing `y`.
pub fn she_kernel(starts: Grid, readouts: Grid, t: f64, params: &SheParams, seed: u64) -> Result<KernelSample> {
    params.validate()?;
    let len = params.nodes();
    let proto = SheField {
        eps: params.eps,
        delta: params.delta,
        x_lo: params.x_lo,
        x_hi: params.x_lo + (len - 1) as f64 * params.eps,
        values: vec![0.0; len],
        time: t,
    };
    let interior = |x: f64| proto.cell_of(x).filter(|&i| i > 0 && i < len - 1);
    let mut fields = Vec::with_capacity(starts.len());
    for x in starts.points() {
        let i = interior(x).ok_or_else(|| Error::InvalidParameter(format!("start {x} outside the interior")))?;
        let mut z = vec![0.0; len];
        z[i] = 1.0 / params.eps;
        fields.push(z);
    }
    let cells: Vec<usize> = readouts
        .points()
        .map(|y| proto.cell_of(y).ok_or_else(|| Error::InvalidParameter(format!("readout {y} off the domain"))))
        .collect::<Result<_>>()?;
    evolve(&mut fields, t, params, seed)?;
    let values = fields.iter().flat_map(|z| cells.iter().map(move |&c| z[c].ln())).collect();
    KernelSample::new(starts, readouts, values)
}

/// Discretisation for [`kpz_scaled_kernel_sample`]. The domain is laid out
/// automatically around the start point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KpzParams {
    pub eps: f64,
    /// Time step as a fraction of ε²; at most 1/2.
    pub delta_ratio: f64,
}

impl Default for KpzParams {
    fn default() -> Self {
        KpzParams { eps: 0.1, delta_ratio: 0.5 }
    }
}

/// One sample of `(log Z(2n²x; 2n²y, 2n³) + n³/12)/n` from a delta
/// initial condition. If `Z` has underflowed to zero at the readout cell the
/// result is `−∞`.
pub fn kpz_scaled_kernel_sample(n: f64, x: f64, y: f64, params: &KpzParams, seed: u64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("scaling parameter n must be > 0, got {n}")));
    }
    let t = 2.0 * n.powi(3);
    let start = 2.0 * n * n * x;
    let offset = 2.0 * n * n * (y - x);
    let eps = params.eps;
    // Lay the nodes out from the start so that a common shift of x and y
    // leaves the discrete problem unchanged.
    let margin = (6.0 * t.sqrt() / eps).ceil() * eps;
    let lo_cells = ((margin + offset.min(0.0).abs()) / eps).ceil();
    let hi_cells = ((margin + offset.max(0.0)) / eps).ceil();
    let sp = SheParams {
        eps,
        delta: params.delta_ratio * eps * eps,
        x_lo: start - lo_cells * eps,
        x_hi: start + hi_cells * eps,
        noise: true,
    };
    let init = GridFunction::narrow_wedge(Grid::with_len(start, eps, 1)?, start)?;
    let field = she_solve(&init, t, &sp, seed)?;
    let readout = field.at(start + offset).ok_or_else(|| Error::InvalidGrid("readout off the domain".into()))?;
    Ok((readout.ln() + n.powi(3) / 12.0) / n)
}
