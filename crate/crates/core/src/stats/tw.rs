//! Sampling oracle for the GUE edge (Tracy–Widom β = 2).
//!
//! The top eigenvalue of an N×N GUE matrix (off-diagonal `E|H_ij|² = 1`) is
//! drawn from the Dumitriu–Edelman tridiagonal model. Its diagonal is
//! N(0, 1), and its squared off-diagonals are `Gamma(N−1−i, 1)`. The
//! eigenvalue is located by Sturm-sequence bisection, so each sample costs
//! O(N) per bisection step. Samples are returned as `(λ_max − 2√N)·N^{1/6}`.
//!
//! When `KPZLAB_CACHE_DIR` is set, reference samples are cached as flat
//! binaries. The header is `"KPZL"`, version u32, N u32, m u64 and seed u64,
//! followed by m little-endian f64 values.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::par::map_replicas;
use crate::rng::std_normal;
use crate::stats::EmpiricalSample;

pub const CACHE_ENV: &str = "KPZLAB_CACHE_DIR";
const MAGIC: &[u8; 4] = b"KPZL";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8;

/// Number of eigenvalues of the symmetric tridiagonal (diag, offdiag²)
/// strictly below `lambda`.
fn count_below(diag: &[f64], off_sq: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON } else { q };
        q = diag[i] - lambda - off_sq[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by bisection on the Sturm count, to about 1e-13.
pub fn tridiagonal_top_eigenvalue(diag: &[f64], off_sq: &[f64]) -> f64 {
    let n = diag.len();
    // Gershgorin bounds.
    let off = |i: usize| if i < off_sq.len() { off_sq[i].sqrt() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off_sq, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One scaled top-eigenvalue sample `(λ_max − 2√N)·N^{1/6}`.
pub fn scaled_top_eigenvalue(dim: usize, rng: &mut crate::rng::SimRng) -> f64 {
    let diag: Vec<f64> = (0..dim).map(|_| std_normal(rng)).collect();
    let off_sq: Vec<f64> = (0..dim - 1)
        .map(|i| Gamma::new((dim - 1 - i) as f64, 1.0).expect("positive shape").sample(rng))
        .collect();
    let lam = tridiagonal_top_eigenvalue(&diag, &off_sq);
    let n = dim as f64;
    (lam - 2.0 * n.sqrt()) * n.powf(1.0 / 6.0)
}

/// Reference sample of `m` scaled GUE top eigenvalues at dimension `dim`,
/// using the cache directory from `KPZLAB_CACHE_DIR` when set.
pub fn tw_reference(seed: u64, dim: usize, m: usize) -> Result<EmpiricalSample> {
    let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    tw_reference_cached(seed, dim, m, dir.as_deref())
}

/// As [`tw_reference`] with an explicit cache directory.
pub fn tw_reference_cached(seed: u64, dim: usize, m: usize, cache: Option<&Path>) -> Result<EmpiricalSample> {
    if dim < 100 {
        return Err(Error::InvalidParameter(format!("reference dimension {dim} < 100")));
    }
    if m == 0 {
        return Err(Error::EmptySample);
    }
    let path = cache.map(|d| d.join(format!("tw-N{dim}-m{m}-s{seed}.kpzl")));
    if let Some(p) = &path {
        if let Ok(values) = read_cache(p, dim, m, seed) {
            return Ok(EmpiricalSample::new(values, seed));
        }
    }
    let values = map_replicas(seed, m, |_, rng| scaled_top_eigenvalue(dim, rng));
    if let Some(p) = &path {
        // A cache that cannot be written is not fatal: the sample is valid.
        let _ = fs::create_dir_all(p.parent().unwrap_or(Path::new(".")))
            .and_then(|_| write_cache(p, dim, seed, &values));
    }
    Ok(EmpiricalSample::new(values, seed))
}

pub fn write_cache(path: &Path, dim: usize, seed: u64, values: &[f64]) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(dim as u32).to_le_bytes());
    buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
    buf.extend_from_slice(&seed.to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    // Write-then-rename so a concurrent reader never sees a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)
}

pub fn read_cache(path: &Path, dim: usize, m: usize, seed: u64) -> Result<Vec<f64>> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = |what: &str| Error::Io(format!("{}: {what}", path.display()));
    if buf.len() < HEADER_LEN || &buf[0..4] != MAGIC {
        return Err(bad("not a KPZL cache file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
    if u32_at(4) != VERSION {
        return Err(bad("unsupported version"));
    }
    if u32_at(8) as usize != dim || u64_at(12) as usize != m || u64_at(20) != seed {
        return Err(bad("key mismatch"));
    }
    if buf.len() != HEADER_LEN + 8 * m {
        return Err(bad("truncated"));
    }
    Ok(buf[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use nalgebra::DMatrix;

    #[test]
    fn bisection_matches_dense_eigensolver() {
        let mut rng = rng_from_seed(4);
        for dim in [2usize, 5, 40] {
            let diag: Vec<f64> = (0..dim).map(|_| std_normal(&mut rng)).collect();
            let off: Vec<f64> = (0..dim - 1).map(|_| std_normal(&mut rng)).collect();
            let m = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    diag[i]
                } else if i + 1 == j {
                    off[i]
                } else if j + 1 == i {
                    off[j]
                } else {
                    0.0
                }
            });
            let dense = m.symmetric_eigenvalues().max();
            let sq: Vec<f64> = off.iter().map(|b| b * b).collect();
            assert!((tridiagonal_top_eigenvalue(&diag, &sq) - dense).abs() < 1e-10);
        }
    }

    #[test]
    fn tridiagonal_law_matches_dense_gue() {
        // Dense oracle: top eigenvalue of an explicit 100×100 GUE matrix.
        use crate::brownian::{hermitian_gaussian, top_eigenvalue};
        let dim = 100;
        let m = 600;
        let dense: Vec<f64> = map_replicas(77, m, |_, rng| {
            let lam = top_eigenvalue(hermitian_gaussian(dim, 1.0, rng));
            (lam - 20.0) * (dim as f64).powf(1.0 / 6.0)
        });
        let tri = tw_reference_cached(78, dim, m, None).unwrap();
        let ks = crate::stats::ks_two_sample(&EmpiricalSample::new(dense, 77), &tri).unwrap();
        // two-sample KS critical value at α = 0.001 for 600/600 is ≈ 0.11
        assert!(ks < 0.11, "ks = {ks}");
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = tw_reference_cached(3, 100, 50, Some(dir.path())).unwrap();
        let file = dir.path().join("tw-N100-m50-s3.kpzl");
        let bytes = fs::read(&file).unwrap();
        assert_eq!(&bytes[0..4], b"KPZL");
        assert_eq!(bytes.len(), HEADER_LEN + 8 * 50);
        let b = tw_reference_cached(3, 100, 50, Some(dir.path())).unwrap();
        assert_eq!(a, b);
        assert!(read_cache(&file, 100, 51, 3).is_err());
        assert!(read_cache(&file, 100, 50, 4).is_err());
    }

    #[test]
    fn small_dimension_is_rejected() {
        assert!(tw_reference_cached(1, 99, 10, None).is_err());
    }
}
