use crate::error::{Error, Result};

use super::{GridFunction, LogSumExp};

/// Number of dyadic refinements below `|A|` on the thickness ladder.
pub const THICKNESS_LADDER_DEPTH: u32 = 20;

/// Upward extensions tried when `f` is not even `|A|`-thick.
const LADDER_EXTENSIONS: u32 = 20;

/// The ladder `ε_k = 2^{-k}·len` for `k = 0..=THICKNESS_LADDER_DEPTH`,
/// finest last.
pub fn thickness_ladder(len: f64) -> Vec<f64> {
    (0..=THICKNESS_LADDER_DEPTH).map(|k| len * 0.5f64.powi(k as i32)).collect()
}

/// `supn` of `f` over the window `[c - eps, c + eps]`, clipped to the grid.
/// The window ends are interpolated so windows narrower than a cell still
/// carry mass.
fn window_supn(f: &GridFunction, c: f64, eps: f64, n: f64) -> f64 {
    let g = f.grid();
    let lo = (c - eps).max(g.lo());
    let hi = (c + eps).min(g.hi());
    let mut acc = LogSumExp::new();
    for a in f.atoms() {
        if a.location >= lo && a.location <= hi {
            acc.push(n * a.value + a.log_weight);
        }
    }
    if hi > lo {
        // Sample points: left end, interior nodes, right end.
        let first = ((lo - g.lo()) / g.step()).floor() as usize + 1;
        let last = (((hi - g.lo()) / g.step()).ceil() as usize).saturating_sub(1);
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(last.saturating_sub(first) + 3);
        pts.push((lo, f.interpolate(lo)));
        for i in first..=last.min(g.len() - 1) {
            let x = g.point(i);
            if x > lo && x < hi {
                pts.push((x, f.value(i)));
            }
        }
        pts.push((hi, f.interpolate(hi)));
        for w in pts.windows(2) {
            let ((x0, v0), (x1, v1)) = (w[0], w[1]);
            if v0 == f64::NEG_INFINITY || v1 == f64::NEG_INFINITY || x1 <= x0 {
                continue;
            }
            let lw = (0.5 * (x1 - x0)).ln();
            acc.push(lw + n * v0);
            acc.push(lw + n * v1);
        }
    }
    acc.value() / n
}

/// Value of `f` at node `i`, counting an atom sitting on that node.
fn node_value(f: &GridFunction, i: usize) -> f64 {
    let x = f.grid().point(i);
    f.atoms()
        .iter()
        .filter(|a| f.grid().index_of(a.location) == Some(i) || (a.location - x).abs() < 1e-12)
        .map(|a| a.value)
        .fold(f.value(i), f64::max)
}

fn all_thick(f: &GridFunction, n: f64, nodes: &[usize], eps: f64) -> bool {
    nodes.iter().all(|&i| {
        let v = node_value(f, i);
        v == f64::NEG_INFINITY || window_supn(f, f.grid().point(i), eps, n) >= v - eps
    })
}

/// Smallest `ε` on the dyadic ladder over `A = [a_lo, a_hi]` such that `f`
/// is `ε`-thick at every grid point of `A`, i.e.
/// `supn_{|y-x|≤ε} f(y) ≥ f(x) - ε`.
///
/// Thickness is monotone in `ε` (the window grows while the target drops),
/// so the ladder is bisected. If even `ε = |A|` fails the ladder is
/// extended by doublings; `+∞` if none of those succeed either.
pub fn thickness(f: &GridFunction, n: f64, a_lo: f64, a_hi: f64) -> Result<f64> {
    f.validate()?;
    let g = f.grid();
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("thickness requires n > 0, got {n}")));
    }
    if !(a_hi > a_lo) || !g.contains(a_lo) || !g.contains(a_hi) {
        return Err(Error::InvalidParameter(format!(
            "interval [{a_lo}, {a_hi}] not inside the grid [{}, {}]",
            g.lo(),
            g.hi()
        )));
    }
    let nodes: Vec<usize> = (0..g.len()).filter(|&i| (a_lo..=a_hi).contains(&g.point(i))).collect();
    let len = a_hi - a_lo;

    if !all_thick(f, n, &nodes, len) {
        let mut eps = len;
        for _ in 0..LADDER_EXTENSIONS {
            eps *= 2.0;
            if all_thick(f, n, &nodes, eps) {
                return Ok(eps);
            }
        }
        return Ok(f64::INFINITY);
    }

    let ladder = thickness_ladder(len);
    // Invariant: ladder[good] is thick; ladder[bad] (if in range) is not.
    let (mut good, mut bad) = (0usize, ladder.len());
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        if all_thick(f, n, &nodes, ladder[mid]) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(ladder[good])
}
