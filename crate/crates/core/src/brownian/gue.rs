use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, std_normal};

use super::DriftedEnsembleSpec;

/// Hermitian Gaussian matrix with `E|H_ij|² = var` for every entry:
/// diagonal `N(0, var)`, off-diagonal real and imaginary parts
/// `N(0, var/2)` each.
pub fn hermitian_gaussian<R: Rng + ?Sized>(n: usize, var: f64, rng: &mut R) -> DMatrix<Complex64> {
    let sd = var.sqrt();
    let sd_off = (0.5 * var).sqrt();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(sd * std_normal(rng), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(sd_off * std_normal(rng), sd_off * std_normal(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvalue(m: DMatrix<Complex64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].re;
    }
    m.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn elapsed(a: f64, t: f64) -> Result<f64> {
    let s = t - a;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("need t > a, got t={t}, a={a}")));
    }
    Ok(s)
}

/// Pointed edge process at time `t`: the top eigenvalue of
/// `H + h·I + diag(ν)·(t-a)`, with `H` Hermitian Gaussian of entry
/// variance `2(t-a)` (the variance-2 Brownian convention: for `n = 1` the
/// law is `N(h + ν(t-a), 2(t-a))`). Reordering `ν` is a unitary
/// conjugation, so the law does not depend on the order.
pub fn pointed_ep_sample_gue(n: usize, a: f64, h: f64, nu: &[f64], t: f64, seed: u64) -> Result<f64> {
    if n < 1 || nu.len() != n {
        return Err(Error::InvalidParameter(format!("need n ≥ 1 drifts, got n={n}, |ν|={}", nu.len())));
    }
    let s = elapsed(a, t)?;
    let mut rng = rng_from_seed(seed);
    let mut m = hermitian_gaussian(n, 2.0 * s, &mut rng);
    for i in 0..n {
        m[(i, i)] += Complex64::new(h + nu[i] * s, 0.0);
    }
    Ok(top_eigenvalue(m))
}

/// Parallel edge process at time `t`: the top eigenvalue of Hermitian
/// Brownian motion started from `diag(h)` (its eigenvalues are Brownian
/// motions from `h` conditioned never to collide), plus the common drift.
pub fn parallel_ep_sample_gue(h: &[f64], nu: f64, a: f64, t: f64, seed: u64) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::InvalidParameter("need n ≥ 1".into()));
    }
    let s = elapsed(a, t)?;
    let mut rng = rng_from_seed(seed);
    let mut m = hermitian_gaussian(h.len(), 2.0 * s, &mut rng);
    for (i, &hi) in h.iter().enumerate() {
        m[(i, i)] += Complex64::new(hi + nu * s, 0.0);
    }
    Ok(top_eigenvalue(m))
}

/// Exact edge-process sample for pointed or parallel specs.
pub fn ep_sample_gue(spec: &DriftedEnsembleSpec, t: f64, seed: u64) -> Result<f64> {
    if spec.is_pointed() {
        pointed_ep_sample_gue(spec.n(), spec.a, spec.h[0], &spec.nu, t, seed)
    } else if spec.is_parallel() {
        spec.check_edge()?;
        parallel_ep_sample_gue(&spec.h, spec.nu[0], spec.a, t, seed)
    } else {
        Err(Error::InvalidParameter("exact GUE route needs a pointed or parallel spec".into()))
    }
}

/// Top line of `n` standard nonintersecting Brownian motions from 0,
/// i.e. the top eigenvalue of standard Hermitian Brownian motion
/// (`E|H_ij(t)|² = t`), at the given increasing `times` (all `> 0`).
pub fn hermitian_bm_top_path<R: Rng + ?Sized>(n: usize, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("times must be increasing and nonnegative".into()));
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t > prev {
            m += hermitian_gaussian(n, t - prev, rng);
        }
        prev = t;
        out.push(if t == 0.0 { 0.0 } else { top_eigenvalue(m.clone()) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::map_replicas;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64)
    }

    #[test]
    fn scalar_case_is_normal() {
        let xs = map_replicas(1, 100_000, |s, _| pointed_ep_sample_gue(1, 0.5, 1.0, &[2.0], 2.0, s).unwrap());
        let (m, v) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.02, "{m}");
        assert!((v - 3.0).abs() < 0.06, "{v}");
    }

    #[test]
    fn two_by_two_matches_direct_simulation() {
        // Oracle: the top eigenvalue of [[a, b], [b̄, d]] is
        // (a+d)/2 + √(((a-d)/2)² + |b|²); simulate the entries directly.
        let m = 200_000;
        let xs = map_replicas(2, m, |s, _| pointed_ep_sample_gue(2, 0.0, 0.0, &[0.0, 0.0], 1.0, s).unwrap());
        let direct = map_replicas(3, m, |_, rng| {
            let (a, d) = (2f64.sqrt() * std_normal(rng), 2f64.sqrt() * std_normal(rng));
            let (br, bi) = (std_normal(rng), std_normal(rng));
            0.5 * (a + d) + (0.25 * (a - d).powi(2) + br * br + bi * bi).sqrt()
        });
        let (m1, v1) = mean_var(&xs);
        let (m2, v2) = mean_var(&direct);
        assert!((m1 - m2).abs() < 0.015, "{m1} vs {m2}");
        assert!((v1 - v2).abs() < 0.03, "{v1} vs {v2}");
        // and the closed form E = √(8/π)
        assert!((m1 - (8.0 / std::f64::consts::PI).sqrt()).abs() < 0.015);
    }

    #[test]
    fn permuted_drifts_same_law_in_mean() {
        let m = 50_000;
        let a = map_replicas(4, m, |s, _| pointed_ep_sample_gue(3, 0.0, 0.0, &[0.0, 1.0, 2.0], 1.0, s).unwrap());
        let b = map_replicas(4, m, |s, _| pointed_ep_sample_gue(3, 0.0, 0.0, &[2.0, 0.0, 1.0], 1.0, s).unwrap());
        let (ma, _) = mean_var(&a);
        let (mb, _) = mean_var(&b);
        assert!((ma - mb).abs() < 0.03, "{ma} vs {mb}");
    }

    #[test]
    fn parallel_reduces_to_pointed_when_heights_agree() {
        let x = parallel_ep_sample_gue(&[1.0, 1.0], 0.5, 0.0, 1.0, 77).unwrap();
        let y = pointed_ep_sample_gue(2, 0.0, 1.0, &[0.5, 0.5], 1.0, 77).unwrap();
        assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn hermitian_bm_edge_location() {
        // Top eigenvalue of standard GUE of size n sits near 2√(n t).
        let mut rng = rng_from_seed(5);
        let path = hermitian_bm_top_path(50, &[0.0, 1.0, 4.0], &mut rng).unwrap();
        assert_eq!(path[0], 0.0);
        assert!((path[1] - 2.0 * 50f64.sqrt()).abs() < 1.5, "{path:?}");
        assert!((path[2] - 4.0 * 50f64.sqrt()).abs() < 3.0, "{path:?}");
    }

    #[test]
    fn errors() {
        assert!(pointed_ep_sample_gue(0, 0.0, 0.0, &[], 1.0, 0).is_err());
        assert!(pointed_ep_sample_gue(1, 1.0, 0.0, &[0.0], 1.0, 0).is_err());
        let mixed = DriftedEnsembleSpec::new(0.0, vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(ep_sample_gue(&mixed, 1.0, 0).is_err());
    }
}
