use crate::error::{Error, Result};

use super::EmpiricalSample;

/// Two-sample Kolmogorov–Smirnov distance `sup_t |F_A(t) - F_B(t)|`,
/// by one merge sweep over the sorted samples; ties are consumed together
/// so the supremum is taken only at points where both ECDFs are settled.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (xa, xb) = (a.values(), b.values());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let t = if xa[i].total_cmp(&xb[j]).is_le() { xa[i] } else { xb[j] };
        while i < xa.len() && xa[i].total_cmp(&t).is_le() {
            i += 1;
        }
        while j < xb.len() && xb[j].total_cmp(&t).is_le() {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample distance to a continuous CDF.
pub fn ks_one_sample(a: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = a.len() as f64;
    Ok(a.values()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64, mean: f64, var: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * var).sqrt())
}

/// `erfc` with relative error below `1.2e-7` (Numerical Recipes' Chebyshev
/// fit), ample for distances compared against thresholds of `10⁻²`.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t * (-z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98 + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
        .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}
