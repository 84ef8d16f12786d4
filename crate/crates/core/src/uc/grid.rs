use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NODE_TOL: f64 = 1e-9;

/// Uniform grid `lo, lo + step, …, lo + (len-1)·step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: f64,
    step: f64,
    len: usize,
}

impl Grid {
    /// Grid covering `[lo, hi]`; the point count is `⌊(hi-lo)/step⌋ + 1`.
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Grid> {
        if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::InvalidGrid(format!("lo={lo}, hi={hi}, step={step}")));
        }
        let len = ((hi - lo) / step + NODE_TOL).floor() as usize + 1;
        Ok(Grid { lo, step, len })
    }

    pub fn with_len(lo: f64, step: f64, len: usize) -> Result<Grid> {
        if !(step > 0.0) || !lo.is_finite() || len == 0 {
            return Err(Error::InvalidGrid(format!("lo={lo}, step={step}, len={len}")));
        }
        Ok(Grid { lo, step, len })
    }

    /// Grid from `lo` to `hi` with at most `max_step` spacing and both
    /// endpoints on the grid.
    pub fn spanning(lo: f64, hi: f64, max_step: f64) -> Result<Grid> {
        if !(max_step > 0.0) || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("lo={lo}, hi={hi}, step={max_step}")));
        }
        let cells = ((hi - lo) / max_step - NODE_TOL).ceil().max(1.0) as usize;
        Grid::with_len(lo, (hi - lo) / cells as f64, cells + 1)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - NODE_TOL * self.step && x <= self.hi() + NODE_TOL * self.step
    }

    /// Index of the node at `x`, if `x` is a node.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let r = (x - self.lo) / self.step;
        let i = r.round();
        ((r - i).abs() <= 1e-6).then_some(i as usize)
    }

    /// Index of the nearest node, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let r = ((x - self.lo) / self.step).round();
        r.clamp(0.0, (self.len - 1) as f64) as usize
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.len == other.len
            && (self.step - other.step).abs() <= 1e-12 * self.step.abs()
            && (self.lo - other.lo).abs() <= 1e-9 * self.step
    }
}

/// Point mass at `location` with value `value`; under `supn` it contributes
/// `exp(n·value + log_weight)` to the integral. A unit narrow wedge has
/// `value = 0`, `log_weight = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub value: f64,
    pub log_weight: f64,
}

impl Atom {
    pub fn wedge(location: f64) -> Atom {
        Atom { location, value: 0.0, log_weight: 0.0 }
    }
}

/// Extended-real function on a grid, plus atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    atoms: Vec<Atom>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(Error::InvalidFunction(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values, atoms: Vec::new() })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> GridFunction {
        let values = grid.points().map(f).collect();
        GridFunction { grid, values, atoms: Vec::new() }
    }

    pub fn constant(grid: Grid, c: f64) -> GridFunction {
        GridFunction { grid, values: vec![c; grid.len()], atoms: Vec::new() }
    }

    /// `𝟎_a`: zero at `a`, `-∞` elsewhere.
    pub fn narrow_wedge(grid: Grid, a: f64) -> Result<GridFunction> {
        GridFunction::constant(grid, f64::NEG_INFINITY).with_atoms(vec![Atom::wedge(a)])
    }

    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> Result<GridFunction> {
        for a in &atoms {
            if !self.grid.contains(a.location) {
                return Err(Error::InvalidFunction(format!(
                    "atom at {} outside [{}, {}]",
                    a.location,
                    self.grid.lo(),
                    self.grid.hi()
                )));
            }
        }
        self.atoms = atoms;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Fails on NaN anywhere in the values or atoms.
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| v.is_nan())
            || self.atoms.iter().any(|a| a.value.is_nan() || a.log_weight.is_nan())
        {
            return Err(Error::InvalidFunction("NaN value".into()));
        }
        Ok(())
    }

    /// Largest grid value or atom value.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .chain(self.atoms.iter().map(|a| a.value))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn shifted(&self, c: f64) -> GridFunction {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v += c);
        out.atoms.iter_mut().for_each(|a| a.value += c);
        out
    }

    /// Pointwise map of the grid values (atoms untouched).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            atoms: self.atoms.clone(),
        }
    }

    /// Value at the node nearest `x`.
    pub fn at(&self, x: f64) -> f64 {
        self.values[self.grid.nearest(x)]
    }

    /// Linear interpolation at `x` in `[lo, hi]`; `-∞` propagates.
    pub fn interpolate(&self, x: f64) -> f64 {
        let r = ((x - self.grid.lo()) / self.grid.step()).clamp(0.0, (self.grid.len() - 1) as f64);
        let i = (r.floor() as usize).min(self.grid.len().saturating_sub(2));
        if self.grid.len() == 1 {
            return self.values[0];
        }
        let w = r - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        if w == 0.0 {
            a
        } else if w == 1.0 {
            b
        } else {
            (1.0 - w) * a + w * b
        }
    }
}
