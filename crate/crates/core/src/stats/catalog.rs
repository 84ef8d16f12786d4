//! The runnable catalog of distributional identities.
//!
//! Every test takes its parameters from an [`ExperimentConfig`]. Missing
//! keys fall back to the defaults documented on each entry, and the key
//! `threshold` overrides the pass threshold of any test. Replica `i` uses
//! the seed `seed + i`. When it needs several independent streams it
//! splits that seed with [`sub_seed`]. A report is therefore a pure
//! function of `(test_id, config, seed)`, apart from its `runtime`.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::brownian::{
    blp_kernel, blp_sample, classical_invert, parallel_ep_sample_gue, pointed_ep_sample_gue, sample_bm,
    wedge_containment, BlpScheme, DriftedEnsembleSpec,
};
use crate::config::ExperimentConfig;
use crate::discrete::{
    dw_identity_check, dw_weights, minimal_admissible_y, rational, Rational, Scalar, Y_ENUMERATION_BUDGET,
};
use crate::error::{Error, Result};
use crate::par::map_replicas;
use crate::polymer::{
    kpz_scaled_kernel_sample, oy_kernel, oy_scaled_kernel_sample, polymer_free_energy, she_kernel, KpzParams,
    OYParams, SheParams,
};
use crate::rng::{rng_from_seed, sub_seed};
use crate::stats::{bootstrap_se, ks_one_sample, ks_two_sample, mean, normal_cdf, scaled_top_eigenvalue, tw_reference, EmpiricalSample, TestReport};
use crate::uc::{Grid, KernelSample};

/// Identifiers accepted by [`run_identity_test`].
pub const TEST_IDS: &[&str] = &[
    "DW-EXACT", "EP-BLP", "REORDER", "BURKE-OY", "STAT-OY", "TIMEINV", "MIX-MC", "QUAD-BLP", "QUAD-OY", "QUAD-KPZ",
    "WEDGE", "TREND-OY", "TREND-KPZ",
];

/// Identifiers accepted by [`run_sample_experiment`].
pub const MODEL_IDS: &[&str] = &["oy-kernel", "kpz-kernel", "blp-top", "ep-gue", "tw"];

/// Largest number of cell updates a single replica may request.
pub const MAX_CELL_UPDATES: f64 = 5e7;
pub const MAX_REPLICAS: usize = 10_000_000;

const KS_THRESHOLD: f64 = 0.02;
const EXACT_THRESHOLD: f64 = 1e-10;
const QUAD_SLACK: f64 = 1e-4;

pub fn run_identity_test(test_id: &str, cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let start = Instant::now();
    let report = match test_id {
        "DW-EXACT" => dw_exact(cfg),
        "EP-BLP" => ep_blp(cfg, seed),
        "REORDER" => reorder(cfg, seed),
        "BURKE-OY" => burke_oy(cfg, seed),
        "STAT-OY" => stat_oy(cfg, seed),
        "TIMEINV" => time_inversion(cfg, seed),
        "MIX-MC" => mix_mc(cfg, seed),
        "QUAD-BLP" => quad_blp(cfg, seed),
        "QUAD-OY" => quad_oy(cfg, seed),
        "QUAD-KPZ" => quad_kpz(cfg, seed),
        "WEDGE" => wedge(cfg, seed),
        "TREND-OY" => trend_oy(cfg, seed),
        "TREND-KPZ" => trend_kpz(cfg, seed),
        other => Err(Error::UnknownTest(other.to_string())),
    }?;
    let mut report = match cfg.param("threshold") {
        Some(t) => report.with_threshold(t),
        None => report,
    };
    report.runtime = start.elapsed().as_secs_f64();
    Ok(report)
}

// ---------------------------------------------------------------- helpers

fn replicas(cfg: &ExperimentConfig, default: usize) -> Result<usize> {
    let m = cfg.replicas_or(default);
    if m == 0 || m > MAX_REPLICAS {
        return Err(Error::Config(format!("replicas = {m} outside 1..={MAX_REPLICAS}")));
    }
    Ok(m)
}

fn positive(cfg: &ExperimentConfig, key: &str, default: f64) -> Result<f64> {
    let v = cfg.param_or(key, default);
    if !(v > 0.0) {
        return Err(Error::Config(format!("{key} = {v} must be positive")));
    }
    Ok(v)
}

fn int_in(cfg: &ExperimentConfig, key: &str, default: i64, lo: i64, hi: i64) -> Result<i64> {
    let v = cfg.int_param_or(key, default)?;
    if v < lo || v > hi {
        return Err(Error::Config(format!("{key} = {v} outside {lo}..={hi}")));
    }
    Ok(v)
}

fn cell_budget(updates: f64) -> Result<()> {
    if updates > MAX_CELL_UPDATES {
        return Err(Error::Config(format!(
            "one replica needs {updates:.3e} cell updates (cap {MAX_CELL_UPDATES:.0e}); coarsen the grid"
        )));
    }
    Ok(())
}

fn ks_between(a: Vec<f64>, b: Vec<f64>, seed: u64) -> Result<f64> {
    ks_two_sample(&EmpiricalSample::new(a, seed), &EmpiricalSample::new(b, seed))
}

fn unzip_results(pairs: Vec<Result<(f64, f64)>>) -> Result<(Vec<f64>, Vec<f64>)> {
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairs.into_iter().unzip())
}

/// `p` as an exact fraction with denominator at most 1000.
fn probability(v: f64) -> Result<Rational> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Config(format!("p = {v} must lie in (0, 1)")));
    }
    for d in 1..=1000i64 {
        let k = (v * d as f64).round();
        if (v - k / d as f64).abs() < 1e-12 {
            return Ok(rational(k as i64, d));
        }
    }
    Err(Error::Config(format!("p = {v} is not a fraction with denominator ≤ 1000")))
}

/// Counts quadrangle violations `K(x,y)+K(x′,y′) < K(x,y′)+K(x′,y) − slack`
/// over all `x < x′`, `y < y′`.
fn quadrangle_violations(k: &KernelSample, slack: f64) -> usize {
    let (nx, ny) = (k.x_grid().len(), k.y_grid().len());
    let mut bad = 0;
    for a in 0..nx {
        for b in a + 1..nx {
            for c in 0..ny {
                for d in c + 1..ny {
                    let rhs = k.get(a, d) + k.get(b, c);
                    if rhs == f64::NEG_INFINITY {
                        continue;
                    }
                    if !(k.get(a, c) + k.get(b, d) >= rhs - slack) {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

// ---------------------------------------------------------------- exact

/// Exact identity for conditioned Bernoulli walks. Keys `n`, `t`, `r`, `p`
/// select one case. Without `n` the full grid
/// `{1,2,3}×{1,2,3}×{1,2}×{1/2,1/3}` runs. Each case uses the minimal
/// admissible start and a widened one. The statistic is the largest of the
/// signed-law discrepancy and `|Σ weights − 1|`.
fn dw_exact(cfg: &ExperimentConfig) -> Result<TestReport> {
    let cases: Vec<(usize, usize, i64, Rational)> = if cfg.param("n").is_some() {
        vec![(
            int_in(cfg, "n", 2, 1, 8)? as usize,
            int_in(cfg, "t", 1, 1, 24)? as usize,
            int_in(cfg, "r", 1, 1, 8)?,
            probability(cfg.param_or("p", 0.5))?,
        )]
    } else {
        let mut v = Vec::new();
        for n in 1..=3 {
            for t in 1..=3 {
                for r in 1..=2 {
                    for p in [rational(1, 2), rational(1, 3)] {
                        v.push((n, t, r, p));
                    }
                }
            }
        }
        v
    };
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (n, t, r, p) in cases {
        if (n * t) as u64 > Y_ENUMERATION_BUDGET {
            return Err(Error::Config(format!("n·t = {} exceeds the enumeration budget {Y_ENUMERATION_BUDGET}", n * t)));
        }
        let base = minimal_admissible_y(n, r);
        let mut wide = base.clone();
        wide[0] += 1;
        for y in [base, wide] {
            worst = worst.max(dw_identity_check(&y, r, &p, t)?);
            let w = dw_weights::<Rational>(&y, r)?.weight_sum();
            worst = worst.max((w - rational(1, 1)).abs_f64());
            checked += 1;
        }
    }
    Ok(TestReport::new("DW-EXACT", worst, EXACT_THRESHOLD, checked))
}

// ---------------------------------------------------------------- edge processes

fn drift_ladder(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64).collect()
}

fn blp_top(spec: &DriftedEnsembleSpec, grid: Grid, seed: u64) -> Result<f64> {
    Ok(blp_sample(spec, grid, seed, BlpScheme::Bridge)?.value(grid.len() - 1))
}

/// Pointed edge process (GUE route) against Brownian last passage at
/// `t − a = t`. Keys: `n` (2), `t` (1), `step` (1e-3), replicas 5·10⁴.
/// Drifts `ν = (0, 1, …, n−1)`.
fn ep_blp(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let n = int_in(cfg, "n", 2, 1, 6)? as usize;
    let t = positive(cfg, "t", 1.0)?;
    let grid = Grid::spanning(0.0, t, positive(cfg, "step", 1e-3)?)?;
    cell_budget((n * grid.len()) as f64)?;
    let m = replicas(cfg, 50_000)?;
    let nu = drift_ladder(n);
    let spec = DriftedEnsembleSpec::pointed(n, 0.0, 0.0, nu.clone())?;
    let pairs = map_replicas(seed, m, |s, _| {
        Ok((pointed_ep_sample_gue(n, 0.0, 0.0, &nu, t, sub_seed(s, 0))?, blp_top(&spec, grid, sub_seed(s, 1))?))
    });
    let (ep, blp) = unzip_results(pairs)?;
    Ok(TestReport::new("EP-BLP", ks_between(ep, blp, seed)?, KS_THRESHOLD, m))
}

/// Last passage with drifts `(0, 1, …, n−1)` against last passage with a
/// seeded random non-identity permutation of them. Keys: `n` (3), `t` (1),
/// `step` (1e-3), replicas 5·10⁴.
fn reorder(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let n = int_in(cfg, "n", 3, 2, 6)? as usize;
    let t = positive(cfg, "t", 1.0)?;
    let grid = Grid::spanning(0.0, t, positive(cfg, "step", 1e-3)?)?;
    cell_budget((n * grid.len()) as f64)?;
    let m = replicas(cfg, 50_000)?;
    let sorted = drift_ladder(n);
    let mut permuted = sorted.clone();
    let mut rng = rng_from_seed(sub_seed(seed, 0xD1F7));
    while permuted == sorted {
        permuted.shuffle(&mut rng);
    }
    let a = DriftedEnsembleSpec::pointed(n, 0.0, 0.0, sorted)?;
    let b = DriftedEnsembleSpec::pointed(n, 0.0, 0.0, permuted)?;
    let pairs = map_replicas(seed, m, |s, _| Ok((blp_top(&a, grid, sub_seed(s, 0))?, blp_top(&b, grid, sub_seed(s, 1))?)));
    let (x, y) = unzip_results(pairs)?;
    Ok(TestReport::new("REORDER", ks_between(x, y, seed)?, KS_THRESHOLD, m))
}

// ---------------------------------------------------------------- polymer identities

/// `(ℬ_ν ∘₁ ℬ_μ)(0, y)` against `(ℬ_μ ∘₁ ℬ_ν)(0, y)` at `y ∈ {1, 2}` for
/// variance-2 line metrics. Keys: `nu` (0), `mu` (1), `step` (0.01),
/// replicas 5·10⁴. The statistic is the larger KS distance.
fn burke_oy(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let nu = cfg.param_or("nu", 0.0);
    let mu = cfg.param_or("mu", 1.0);
    let grid = Grid::spanning(0.0, 2.0, positive(cfg, "step", 0.01)?)?;
    cell_budget(2.0 * grid.len() as f64)?;
    let i1 = grid.nearest(1.0);
    let i2 = grid.len() - 1;
    let m = replicas(cfg, 50_000)?;
    let rows = map_replicas(seed, m, |s, _| -> Result<[f64; 4]> {
        let f = polymer_free_energy(2, 0.0, grid, &[nu, mu], 2.0, sub_seed(s, 0))?;
        let g = polymer_free_energy(2, 0.0, grid, &[mu, nu], 2.0, sub_seed(s, 1))?;
        Ok([f.value(i1), f.value(i2), g.value(i1), g.value(i2)])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let ks1 = ks_between(col(0), col(2), seed)?;
    let ks2 = ks_between(col(1), col(3), seed)?;
    Ok(TestReport::new("BURKE-OY", ks1.max(ks2), KS_THRESHOLD, m))
}

/// Increments over `[0, 1]` of `B_ν ∘₁ ℬ_μ` against Normal(ν, 2). The
/// two-sided path is truncated at `−L`; the neglected mass is of order
/// `e^{−(ν−μ)L}`. Keys: `nu` (1), `mu` (−1), `L` (30), `step` (0.01),
/// replicas 5·10⁴. Requires `ν > μ`.
fn stat_oy(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let nu = cfg.param_or("nu", 1.0);
    let mu = cfg.param_or("mu", -1.0);
    if !(nu > mu) {
        return Err(Error::Config(format!("stationarity needs ν > μ, got ν = {nu}, μ = {mu}")));
    }
    let l = positive(cfg, "L", 30.0)?;
    let step = positive(cfg, "step", 0.01)?;
    let cells = (l / step).round();
    if ((l / step) - cells).abs() > 1e-6 || ((1.0 / step) - (1.0 / step).round()).abs() > 1e-6 {
        return Err(Error::Config("step must divide both L and 1".into()));
    }
    let grid = Grid::with_len(-l, step, cells as usize + (1.0 / step).round() as usize + 1)?;
    cell_budget(2.0 * grid.len() as f64)?;
    let i0 = cells as usize;
    let i1 = grid.len() - 1;
    let m = replicas(cfg, 50_000)?;
    let inc = map_replicas(seed, m, |s, _| -> Result<f64> {
        let f = polymer_free_energy(2, -l, grid, &[nu, mu], 2.0, s)?;
        Ok(f.value(i1) - f.value(i0))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ks = ks_one_sample(&EmpiricalSample::new(inc, seed), |x| normal_cdf(x, nu, 2.0))?;
    Ok(TestReport::new("STAT-OY", ks, KS_THRESHOLD, m))
}

/// Classical inversion `t·g(1/t)` of Brownian motion from `μ` with drift
/// `ν`, against Brownian motion from `ν` with drift `μ`, at
/// `t ∈ {0.5, 1, 2}`. Keys: `mu` (0.5), `nu` (−0.3), replicas 5·10⁴.
fn time_inversion(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let mu = cfg.param_or("mu", 0.5);
    let nu = cfg.param_or("nu", -0.3);
    let m = replicas(cfg, 50_000)?;
    let path_grid = Grid::with_len(0.0, 0.5, 5)?;
    let out_grid = Grid::with_len(0.5, 0.5, 4)?;
    let times = [0.5, 1.0, 2.0];
    let idx = [0usize, 1, 3];
    let rows = map_replicas(seed, m, |s, _| -> Result<[f64; 6]> {
        let mut g = sample_bm(nu, path_grid, sub_seed(s, 0))?;
        g.values.iter_mut().for_each(|v| *v += mu);
        let inv = classical_invert(&g, out_grid)?;
        let mut direct = sample_bm(mu, path_grid, sub_seed(s, 1))?;
        direct.values.iter_mut().for_each(|v| *v += nu);
        let at = |t: f64| direct.at(t);
        Ok([inv.values[idx[0]], inv.values[idx[1]], inv.values[idx[2]], at(times[0]), at(times[1]), at(times[2])])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for j in 0..times.len() {
        let a = rows.iter().map(|r| r[j]).collect();
        let b = rows.iter().map(|r| r[j + 3]).collect();
        worst = worst.max(ks_between(a, b, seed)?);
    }
    Ok(TestReport::new("TIMEINV", worst, KS_THRESHOLD, m))
}

// ---------------------------------------------------------------- signed mixture

/// All vectors `s` with `0 ≤ s_i ≤ n − i` (1-based), paired with the
/// mixture weight `c·(−1)^{Σs}·Δ(h/r + s)·Π P(S_i = s_i)`.
fn continuum_mixture(h: &[f64], r: f64) -> Vec<(Vec<f64>, f64)> {
    let n = h.len();
    let c = crate::discrete::dw_constant(n).to_f64();
    let mut out = Vec::new();
    let mut s = vec![0usize; n];
    loop {
        let v: Vec<f64> = (0..n).map(|i| h[i] / r + s[i] as f64).collect();
        let mut delta = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                delta *= v[j] - v[i];
            }
        }
        let mut prob = 1.0;
        for (i, &si) in s.iter().enumerate() {
            let k = n - 1 - i;
            prob *= binomial(k, si) / 2f64.powi(k as i32);
        }
        let sign = if s.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 };
        let start: Vec<f64> = (0..n).map(|i| h[i] + r * s[i] as f64).collect();
        out.push((start, c * sign * delta * prob));
        // odometer over s_i ∈ 0..=n−1−i
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if s[i] < n - 1 - i {
                s[i] += 1;
                break;
            }
            s[i] = 0;
            i += 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monte Carlo check of the mixture identity for last passage from the
/// random start `h + rR`. Each side is reduced to the bounded functional
/// `e^{−(L(t)−q)₊}` at `q ∈ {−1, 0, 1}`. The right side enumerates the
/// binomial vector `S` exactly and samples one parallel edge process per
/// support point. The statistic is the largest `|LHS − RHS|` in units of
/// the combined bootstrap standard error, with threshold 3. Keys: `n` (2),
/// `r` (1), `h2` (1.5, the gap between consecutive entries of h), `nu`
/// (0), `t` (1), `step` (0.01), replicas 10⁵.
fn mix_mc(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let n = int_in(cfg, "n", 2, 1, 3)? as usize;
    let r = positive(cfg, "r", 1.0)?;
    let gap = cfg.param_or("h2", 1.5);
    let nu = cfg.param_or("nu", 0.0);
    let t = positive(cfg, "t", 1.0)?;
    let grid = Grid::spanning(0.0, t, positive(cfg, "step", 0.01)?)?;
    cell_budget((n * grid.len()) as f64)?;
    let m = replicas(cfg, 100_000)?;
    let h: Vec<f64> = (0..n).map(|i| gap * i as f64).collect();
    // h_i + rR_i must increase: R_i ≤ n − i, so the gap must exceed r·(n − i) − 0.
    for i in 0..n.saturating_sub(1) {
        if h[i] + r * (n - 1 - i) as f64 > h[i + 1] {
            return Err(Error::Config(format!("h2 = {gap} too small: h + rR is not increasing a.s.")));
        }
    }
    let mixture = continuum_mixture(&h, r);
    let qs = [-1.0, 0.0, 1.0];
    let phi = |l: f64, q: f64| (-(l - q).max(0.0)).exp();
    let rows = map_replicas(seed, m, |s, _| -> Result<Vec<f64>> {
        let mut rng = rng_from_seed(sub_seed(s, 0));
        let start: Vec<f64> = (0..n)
            .map(|i| h[i] + r * (0..n - 1 - i).map(|_| rng.random::<f64>()).sum::<f64>())
            .collect();
        let spec = DriftedEnsembleSpec::new(0.0, start, vec![nu; n])?;
        let l = blp_top(&spec, grid, sub_seed(s, 1))?;
        let eps = mixture
            .iter()
            .enumerate()
            .map(|(k, (h0, _))| parallel_ep_sample_gue(h0, nu, 0.0, t, sub_seed(s, 2 + k as u64)))
            .collect::<Result<Vec<_>>>()?;
        let mut row = Vec::with_capacity(2 * qs.len());
        for &q in &qs {
            row.push(phi(l, q));
            row.push(mixture.iter().zip(&eps).map(|((_, w), e)| w * phi(*e, q)).sum());
        }
        Ok(row)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (j, _) in qs.iter().enumerate() {
        let lhs: Vec<f64> = rows.iter().map(|r| r[2 * j]).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r[2 * j + 1]).collect();
        let se_l = bootstrap_se(&lhs, 200, sub_seed(seed, 100 + j as u64), mean)?;
        let se_r = bootstrap_se(&rhs, 200, sub_seed(seed, 200 + j as u64), mean)?;
        let z = (mean(&lhs) - mean(&rhs)).abs() / (se_l * se_l + se_r * se_r).sqrt();
        worst = worst.max(z);
    }
    Ok(TestReport::new("MIX-MC", worst, 3.0, m))
}

// ---------------------------------------------------------------- quadrangle

/// Violations of the quadrangle inequality for Brownian last passage on
/// `x ∈ {0, ¼, ½, ¾}`, `y ∈ {1, 1¼, 1½, 1¾}`. Keys: `lines` (3), `step`
/// (0.01), replicas 10³ environments. Slack 0: the sums are exact.
fn quad_blp(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let lines = int_in(cfg, "lines", 3, 1, 50)? as usize;
    let step = positive(cfg, "step", 0.01)?;
    let m = replicas(cfg, 1000)?;
    let xg = Grid::with_len(0.0, 0.25, 4)?;
    let yg = Grid::with_len(1.0, 0.25, 4)?;
    cell_budget(lines as f64 * 4.0 * 1.75 / step)?;
    let nu = vec![0.0; lines];
    let bad = map_replicas(seed, m, |s, _| -> Result<usize> {
        Ok(quadrangle_violations(&blp_kernel(&nu, xg, yg, step, s, BlpScheme::Bridge)?, 0.0))
    })
    .into_iter()
    .sum::<Result<usize>>()?;
    Ok(TestReport::new("QUAD-BLP", bad as f64, 0.0, m))
}

/// Quadrangle violations (slack 1e-4) of the O'Connell–Yor free energy on
/// `x ∈ {0, ½, 1, 1½}`, `y ∈ {2, 2½, 3, 3½}`. Keys: `lines` (4), `step`
/// (0.02), replicas 10³.
fn quad_oy(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let lines = int_in(cfg, "lines", 4, 1, 200)? as usize;
    let step = positive(cfg, "step", 0.02)?;
    let m = replicas(cfg, 1000)?;
    let xg = Grid::with_len(0.0, 0.5, 4)?;
    let yg = Grid::with_len(2.0, 0.5, 4)?;
    if ((0.5 / step) - (0.5 / step).round()).abs() > 1e-6 {
        return Err(Error::Config("step must divide 1/2".into()));
    }
    cell_budget(lines as f64 * 4.0 * 3.5 / step)?;
    let bad = map_replicas(seed, m, |s, _| -> Result<usize> {
        // Both grids on the quadrature lattice: refine the reading grid.
        let fine = Grid::with_len(0.0, step, (3.5 / step).round() as usize + 1)?;
        let k = oy_kernel(lines, xg, fine, s)?;
        let ys: Vec<usize> = yg.points().map(|y| fine.nearest(y)).collect();
        let values = (0..4).flat_map(|ix| ys.iter().map(move |&iy| (ix, iy))).map(|(ix, iy)| k.get(ix, iy)).collect();
        Ok(quadrangle_violations(&KernelSample::new(xg, yg, values)?, QUAD_SLACK))
    })
    .into_iter()
    .sum::<Result<usize>>()?;
    Ok(TestReport::new("QUAD-OY", bad as f64, 0.0, m))
}

/// Quadrangle violations (slack 1e-4) of `log Z(x; y, t)` for the
/// stochastic heat equation, starts and readouts `{−0.6, −0.2, 0.2, 0.6}`.
/// Keys: `t` (1), `eps` (0.1), replicas 10³.
fn quad_kpz(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let t = positive(cfg, "t", 1.0)?;
    let eps = positive(cfg, "eps", 0.1)?;
    let m = replicas(cfg, 1000)?;
    let pts = Grid::with_len(-0.6, 0.4, 4)?;
    let half = ((0.6 + 6.0 * t.sqrt()) / eps).ceil() * eps;
    let params = SheParams::new(eps, -half, half);
    cell_budget(4.0 * (2.0 * half / eps) * (t / params.delta))?;
    let bad = map_replicas(seed, m, |s, _| -> Result<usize> {
        Ok(quadrangle_violations(&she_kernel(pts, pts, t, &params, s)?, QUAD_SLACK))
    })
    .into_iter()
    .sum::<Result<usize>>()?;
    Ok(TestReport::new("QUAD-KPZ", bad as f64, 0.0, m))
}

// ---------------------------------------------------------------- wedge and trends

/// Share of top lines of `n` nonintersecting Brownian motions from 0 that
/// cross the upper bounding curve for some `h ∈ {0, 1}`. The curve is
/// checked on the times `0.25, 0.5, …, 3`. Keys: `n` (100), `alpha`
/// (0.1), `t_max` (3), `dt` (0.25), replicas 10³. Threshold 0.05.
fn wedge(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let n = int_in(cfg, "n", 100, 1, 400)? as usize;
    let alpha = cfg.param_or("alpha", 0.1);
    let t_max = positive(cfg, "t_max", 3.0)?;
    let dt = positive(cfg, "dt", 0.25)?;
    let m = replicas(cfg, 1000)?;
    let times: Vec<f64> = (1..).map(|k| k as f64 * dt).take_while(|&t| t <= t_max + 1e-9).collect();
    cell_budget((n * n * n) as f64 * times.len() as f64 / 10.0)?;
    let c = wedge_containment(n, alpha, &[0.0, 1.0], &times, m, seed)?;
    let worst = c.upper.iter().copied().fold(1.0, f64::min);
    Ok(TestReport::new("WEDGE", 1.0 - worst, 0.05, m))
}

fn reference(cfg: &ExperimentConfig, seed: u64) -> Result<EmpiricalSample> {
    let dim = int_in(cfg, "tw_dim", 400, 100, 100_000)? as usize;
    let count = int_in(cfg, "tw_m", 10_000, 1, MAX_REPLICAS as i64)? as usize;
    tw_reference(sub_seed(seed, 0x7357), dim, count)
}

fn trend(
    id: &str,
    cfg: &ExperimentConfig,
    seed: u64,
    (n0, n1): (f64, f64),
    sample: impl Fn(f64, u64) -> Result<f64> + Sync + Send,
    default_replicas: usize,
) -> Result<TestReport> {
    let m = replicas(cfg, default_replicas)?;
    let tw = reference(cfg, seed)?;
    let mut ks = [0.0; 2];
    for (slot, &n) in [n0, n1].iter().enumerate() {
        let v = map_replicas(sub_seed(seed, slot as u64), m, |s, _| sample(n, s))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        ks[slot] = ks_two_sample(&EmpiricalSample::new(v, seed), &tw)?;
    }
    Ok(TestReport::new(id, ks[1] - ks[0], 0.02, m))
}

/// KS distance of the scaled O'Connell–Yor kernel `K_n(0, 0)` to the GUE
/// edge reference, at `n1` minus at `n0`. Keys: `theta` (1), `n0` (2), `n1`
/// (4), `tw_dim` (400), `tw_m` (10⁴), replicas 2000. Threshold 0.02.
fn trend_oy(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let theta = positive(cfg, "theta", 1.0)?;
    let (n0, n1) = (positive(cfg, "n0", 2.0)?, positive(cfg, "n1", 4.0)?);
    for n in [n0, n1] {
        let p = OYParams::new(theta, n)?;
        let len = p.b * n.powi(3);
        cell_budget(p.line_count() as f64 * len / p.step_for(len))?;
    }
    trend("TREND-OY", cfg, seed, (n0, n1), |n, s| oy_scaled_kernel_sample(&OYParams::new(theta, n)?, 0.0, 0.0, s), 2000)
}

/// As [`trend_oy`] for the log-SHE kernel. Keys: `n0` (1), `n1` (1.6),
/// `eps` (0.1), replicas 4000.
fn trend_kpz(cfg: &ExperimentConfig, seed: u64) -> Result<TestReport> {
    let (n0, n1) = (positive(cfg, "n0", 1.0)?, positive(cfg, "n1", 1.6)?);
    let params = KpzParams { eps: positive(cfg, "eps", 0.1)?, ..KpzParams::default() };
    let t = 2.0 * n1.powi(3);
    cell_budget((12.0 * t.sqrt() / params.eps) * t / (params.delta_ratio * params.eps * params.eps))?;
    trend("TREND-KPZ", cfg, seed, (n0, n1), |n, s| kpz_scaled_kernel_sample(n, 0.0, 0.0, &params, s), 4000)
}

// ---------------------------------------------------------------- sampling experiments

/// One row of a sampling experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRow {
    pub replica: usize,
    pub seed: u64,
    pub value: f64,
}

/// Draws `replicas` samples of the model `model_id`.
///
/// * `oy-kernel`: `K_n(x, y)` with keys `theta` (1), `n` (2), `x` (0), `y` (0).
/// * `kpz-kernel`: `K_n(x, y)` with keys `n` (1), `x`, `y`, `eps` (0.1).
/// * `blp-top`: `L(t)` of pointed last passage with drifts `0, …, n−1`;
///   keys `n` (2), `t` (1), `step` (1e-3).
/// * `ep-gue`: the pointed edge process through the GUE; keys `n`, `t`.
/// * `tw`: scaled GUE top eigenvalue; key `dim` (400).
pub fn run_sample_experiment(model_id: &str, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<SampleRow>> {
    let m = replicas(cfg, 1000)?;
    let values: Vec<Result<f64>> = match model_id {
        "oy-kernel" => {
            let p = OYParams::new(positive(cfg, "theta", 1.0)?, positive(cfg, "n", 2.0)?)?;
            let (x, y) = (cfg.param_or("x", 0.0), cfg.param_or("y", 0.0));
            let len = p.b * p.n.powi(3) + 2.0 * (y - x) * p.n * p.n;
            cell_budget(p.line_count() as f64 * len.abs() / p.step_for(len.abs()))?;
            map_replicas(seed, m, |s, _| oy_scaled_kernel_sample(&p, x, y, s))
        }
        "kpz-kernel" => {
            let n = positive(cfg, "n", 1.0)?;
            let params = KpzParams { eps: positive(cfg, "eps", 0.1)?, ..KpzParams::default() };
            let (x, y) = (cfg.param_or("x", 0.0), cfg.param_or("y", 0.0));
            let t = 2.0 * n.powi(3);
            cell_budget((12.0 * t.sqrt() / params.eps) * t / (params.delta_ratio * params.eps * params.eps))?;
            map_replicas(seed, m, |s, _| kpz_scaled_kernel_sample(n, x, y, &params, s))
        }
        "blp-top" => {
            let n = int_in(cfg, "n", 2, 1, 50)? as usize;
            let t = positive(cfg, "t", 1.0)?;
            let grid = Grid::spanning(0.0, t, positive(cfg, "step", 1e-3)?)?;
            cell_budget((n * grid.len()) as f64)?;
            let spec = DriftedEnsembleSpec::pointed(n, 0.0, 0.0, drift_ladder(n))?;
            map_replicas(seed, m, |s, _| blp_top(&spec, grid, s))
        }
        "ep-gue" => {
            let n = int_in(cfg, "n", 2, 1, 400)? as usize;
            let t = positive(cfg, "t", 1.0)?;
            let nu = drift_ladder(n);
            map_replicas(seed, m, |s, _| pointed_ep_sample_gue(n, 0.0, 0.0, &nu, t, s))
        }
        "tw" => {
            let dim = int_in(cfg, "dim", 400, 100, 100_000)? as usize;
            map_replicas(seed, m, |_, rng| Ok(scaled_top_eigenvalue(dim, rng)))
        }
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| Ok(SampleRow { replica: i, seed: crate::rng::replica_seed(seed, i as u64), value: v? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dw_exact_single_case() {
        let mut cfg = ExperimentConfig::for_test("DW-EXACT");
        for (k, v) in [("n", "2"), ("r", "1"), ("p", "0.5"), ("t", "1")] {
            cfg.set(k, v).unwrap();
        }
        let r = run_identity_test("DW-EXACT", &cfg, 7).unwrap();
        assert!(r.pass && r.statistic <= 1e-10);
        assert_eq!(r.replica_count, 2);
    }

    #[test]
    fn budget_and_unknown_ids() {
        let mut cfg = ExperimentConfig::for_test("DW-EXACT");
        cfg.set("n", "5").unwrap();
        cfg.set("t", "5").unwrap();
        assert!(matches!(run_identity_test("DW-EXACT", &cfg, 1), Err(Error::Config(_))));
        assert!(matches!(run_identity_test("NOPE", &cfg, 1), Err(Error::UnknownTest(_))));
        assert!(matches!(run_sample_experiment("nope", &cfg, 1), Err(Error::UnknownModel(_))));
        let mut cfg = ExperimentConfig::for_test("STAT-OY");
        cfg.set("nu", "-1").unwrap();
        assert!(matches!(run_identity_test("STAT-OY", &cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn probabilities_are_read_as_fractions() {
        assert_eq!(probability(0.5).unwrap(), rational(1, 2));
        assert_eq!(probability(1.0 / 3.0).unwrap(), rational(1, 3));
        assert!(probability(1.0).is_err());
        assert!(probability(0.123456789).is_err());
    }

    #[test]
    fn two_line_mixture_weights() {
        let m = continuum_mixture(&[0.0, 1.5], 1.0);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].0, vec![0.0, 1.5]);
        assert!((m[0].1 - 1.5).abs() < 1e-15);
        assert_eq!(m[1].0, vec![1.0, 1.5]);
        assert!((m[1].1 + 0.5).abs() < 1e-15);
        // Three lines: weights still sum to one (the identity with φ ≡ 1).
        let m3 = continuum_mixture(&[0.0, 2.5, 5.0], 1.0);
        assert_eq!(m3.len(), 6);
        assert!((m3.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_runs_are_reproducible() {
        let mut cfg = ExperimentConfig::for_test("QUAD-BLP");
        cfg.replicas = Some(20);
        let a = run_identity_test("QUAD-BLP", &cfg, 3).unwrap();
        let b = run_identity_test("QUAD-BLP", &cfg, 3).unwrap();
        assert_eq!(a.statistic, 0.0);
        assert_eq!((a.statistic.to_bits(), a.pass), (b.statistic.to_bits(), b.pass));
        let mut cfg = ExperimentConfig::default();
        cfg.replicas = Some(5);
        let x = run_sample_experiment("blp-top", &cfg, 9).unwrap();
        let y = run_sample_experiment("blp-top", &cfg, 9).unwrap();
        assert_eq!(x, y);
        assert_eq!(x[4].seed, 13);
    }

    #[test]
    fn threshold_override() {
        let mut cfg = ExperimentConfig::for_test("QUAD-BLP");
        cfg.replicas = Some(3);
        cfg.set("threshold", "-1").unwrap();
        let r = run_identity_test("QUAD-BLP", &cfg, 3).unwrap();
        assert!(!r.pass);
        assert_eq!(r.threshold, -1.0);
    }
}
