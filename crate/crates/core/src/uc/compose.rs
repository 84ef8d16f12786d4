use crate::error::{Error, Result};

use super::{GridFunction, KernelSample, LogSumExp};

/// Trapezoid weight of each node: `step/2` per adjacent cell whose two
/// endpoints are both finite. A `-∞` node ends the support, so isolated
/// finite nodes carry no mass (point masses are atoms).
fn trapezoid_log_weights(values: &[f64], step: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
    let half = (0.5 * step).ln();
    let ln2 = std::f64::consts::LN_2;
    let n = values.len();
    (0..n).filter_map(move |i| {
        if values[i] == f64::NEG_INFINITY {
            return None;
        }
        let left = i > 0 && values[i - 1] != f64::NEG_INFINITY;
        let right = i + 1 < n && values[i + 1] != f64::NEG_INFINITY;
        match (left, right) {
            (true, true) => Some((i, half + ln2)),
            (true, false) | (false, true) => Some((i, half)),
            (false, false) => None,
        }
    })
}

/// `supn f = (1/n) log ∫ e^{n f}` by the trapezoid rule in log space, plus
/// `exp(n·value + log_weight)` for every atom. Empty support gives `-∞`.
pub fn supn_integrate(f: &GridFunction, n: f64) -> Result<f64> {
    f.validate()?;
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("supn requires n > 0, got {n}")));
    }
    let values = f.values();
    let mut acc = LogSumExp::new();
    for (i, lw) in trapezoid_log_weights(values, f.grid().step()) {
        acc.push(lw + n * values[i]);
    }
    for a in f.atoms() {
        acc.push(n * a.value + a.log_weight);
    }
    Ok(acc.value() / n)
}

fn check_grids(f: &GridFunction, k: &KernelSample) -> Result<Vec<(usize, f64, f64)>> {
    if !f.grid().same_as(k.x_grid()) {
        return Err(Error::GridMismatch(format!(
            "function grid {:?} vs kernel x-grid {:?}",
            f.grid(),
            k.x_grid()
        )));
    }
    f.atoms()
        .iter()
        .map(|a| {
            k.x_grid()
                .index_of(a.location)
                .map(|ix| (ix, a.value, a.log_weight))
                .ok_or_else(|| Error::GridMismatch(format!("atom at {} is not a kernel node", a.location)))
        })
        .collect()
}

/// `(f ∘_n K)(y) = supn_x (f(x) + K(x, y))`, on `K`'s y-grid.
pub fn compose_supn(f: &GridFunction, k: &KernelSample, n: f64) -> Result<GridFunction> {
    f.validate()?;
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("supn requires n > 0, got {n}")));
    }
    let atoms = check_grids(f, k)?;
    let nx = f.grid().len();
    let step = f.grid().step();
    let mut column = vec![0.0; nx];
    let out = (0..k.y_grid().len())
        .map(|iy| {
            for (ix, c) in column.iter_mut().enumerate() {
                *c = f.value(ix) + k.get(ix, iy);
            }
            let mut acc = LogSumExp::new();
            for (ix, lw) in trapezoid_log_weights(&column, step) {
                acc.push(lw + n * column[ix]);
            }
            for &(ix, v, w) in &atoms {
                acc.push(n * (v + k.get(ix, iy)) + w);
            }
            acc.value() / n
        })
        .collect();
    GridFunction::new(*k.y_grid(), out)
}

/// `(f · K)(y) = max_x (f(x) + K(x, y))` over grid nodes and atoms. Exact.
pub fn compose_max(f: &GridFunction, k: &KernelSample) -> Result<GridFunction> {
    f.validate()?;
    let atoms = check_grids(f, k)?;
    let ny = k.y_grid().len();
    let mut out = vec![f64::NEG_INFINITY; ny];
    for (ix, &fx) in f.values().iter().enumerate() {
        if fx == f64::NEG_INFINITY {
            continue;
        }
        for (o, &kv) in out.iter_mut().zip(k.row(ix)) {
            let c = fx + kv;
            if c > *o {
                *o = c;
            }
        }
    }
    for &(ix, v, _) in &atoms {
        for (o, &kv) in out.iter_mut().zip(k.row(ix)) {
            let c = v + kv;
            if c > *o {
                *o = c;
            }
        }
    }
    GridFunction::new(*k.y_grid(), out)
}

/// Max-plus kernel product `(K₁∘K₂)(x, z) = max_y K₁(x, y) + K₂(y, z)`.
pub fn kernel_product_max(k1: &KernelSample, k2: &KernelSample) -> Result<KernelSample> {
    if !k1.y_grid().same_as(k2.x_grid()) {
        return Err(Error::GridMismatch("inner grids differ".into()));
    }
    let (nx, ny, nz) = (k1.x_grid().len(), k1.y_grid().len(), k2.y_grid().len());
    let mut values = vec![f64::NEG_INFINITY; nx * nz];
    for ix in 0..nx {
        let out = &mut values[ix * nz..(ix + 1) * nz];
        for iy in 0..ny {
            let a = k1.get(ix, iy);
            if a == f64::NEG_INFINITY {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(k2.row(iy)) {
                let c = a + b;
                if c > *o {
                    *o = c;
                }
            }
        }
    }
    KernelSample::new(*k1.x_grid(), *k2.y_grid(), values)
}

/// Line metric of `f`: `K(x, y) = f(y) - f(x)` for `x ≤ y`, `-∞` otherwise.
pub fn line_metric(f: &GridFunction) -> Result<KernelSample> {
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidFunction("line metric needs a finite function".into()));
    }
    let g = *f.grid();
    let v = f.values();
    let n = g.len();
    let mut values = Vec::with_capacity(n * n);
    for ix in 0..n {
        for iy in 0..n {
            values.push(if iy >= ix { v[iy] - v[ix] } else { f64::NEG_INFINITY });
        }
    }
    KernelSample::new(g, g, values)
}
