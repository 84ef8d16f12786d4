use crate::error::{Error, Result};

use super::{Rational, Scalar, SignedPmf};

/// Largest `n·t` accepted by the `Z` enumerations.
pub const Z_ENUMERATION_BUDGET: u64 = 24;

/// Vandermonde product `Δ(v) = Π_{i<j} (v_j - v_i)`.
pub fn vandermonde<S: Scalar>(v: &[S]) -> S {
    let mut acc = S::one();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            acc = acc * (v[j].clone() - v[i].clone());
        }
    }
    acc
}

/// Hat shift `ẑ_i = z_i - i` with 1-based `i`.
pub fn hat(z: &[i64]) -> Vec<i64> {
    z.iter().enumerate().map(|(i, &v)| v - (i as i64 + 1)).collect()
}

fn vandermonde_int<S: Scalar>(v: &[i64]) -> S {
    vandermonde(&v.iter().map(|&x| S::from_i64(x)).collect::<Vec<_>>())
}

fn strictly_decreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] > w[1])
}

/// Determinant by Gaussian elimination; pivots on the entry of largest
/// magnitude (exact for rationals, stable enough for the tiny float cases).
fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs_f64().total_cmp(&m[b][col].abs_f64()))
            .unwrap();
        if m[pivot][col] == S::zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det = det * pv.clone();
        for row in col + 1..n {
            if m[row][col] == S::zero() {
                continue;
            }
            let f = m[row][col].clone() / pv.clone();
            for k in col..n {
                let d = f.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - d;
            }
        }
    }
    det
}

fn binomial(t: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (t - i) as i64 / (i + 1) as i64)
}

/// `t`-step free Bernoulli(p) kernel `q_t(a, b) = C(t, b-a) p^{b-a} (1-p)^{t-(b-a)}`.
fn free_kernel<S: Scalar>(t: u32, p: &S, a: i64, b: i64) -> S {
    let k = b - a;
    if k < 0 || k > t as i64 {
        return S::zero();
    }
    let k = k as u32;
    S::from_i64(binomial(t, k)) * p.powu(k) * (S::one() - p.clone()).powu(t - k)
}

fn check_start(z0: &[i64], t: usize) -> Result<()> {
    if z0.is_empty() {
        return Err(Error::InvalidParameter("empty start".into()));
    }
    let size = (z0.len() * t) as u64;
    if size > Z_ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { size, limit: Z_ENUMERATION_BUDGET });
    }
    if !strictly_decreasing(&hat(z0)) {
        return Err(Error::Degenerate(format!("Δ(ẑ0) = 0 for z0 = {z0:?}")));
    }
    Ok(())
}

/// Full `t`-step law of `Z` from `z0`: Bernoulli(p) walks conditioned to
/// stay in `ℤ^{↓n}` forever. Karlin–McGregor on the hat-shifted
/// coordinates (where the walks cannot cross without meeting) followed by
/// the Doob transform with `Δ(ẑ)`:
/// `P(z0 → z) = Δ(ẑ)/Δ(ẑ0) · det[q_t(ẑ0_i, ẑ_j)]`.
pub fn z_law_full<S: Scalar>(z0: &[i64], p: &Rational, t: usize) -> Result<Vec<(Vec<i64>, S)>> {
    check_start(z0, t)?;
    let n = z0.len();
    let p = S::from_rational(p);
    let h0 = hat(z0);
    let d0: S = vandermonde_int(&h0);
    let mut out = Vec::new();
    let mut inc = vec![0usize; n];
    loop {
        let z: Vec<i64> = z0.iter().zip(&inc).map(|(&a, &b)| a + b as i64).collect();
        let h = hat(&z);
        if strictly_decreasing(&h) {
            let m = (0..n)
                .map(|i| (0..n).map(|j| free_kernel(t as u32, &p, h0[i], h[j])).collect())
                .collect();
            let km = determinant(m);
            if km != S::zero() {
                let d: S = vandermonde_int(&h);
                out.push((z, d / d0.clone() * km));
            }
        }
        // odometer over {0..t}^n
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            inc[i] += 1;
            if inc[i] <= t {
                break;
            }
            inc[i] = 0;
            i += 1;
        }
    }
}

/// Law of the bottom coordinate `Z_n(t)`. Errors if any transition
/// probability comes out negative or the total is not one (within `1e-12`
/// for floats, exactly for rationals).
pub fn z_law_exact<S: Scalar>(z0: &[i64], p: &Rational, t: usize) -> Result<SignedPmf<S>> {
    let mut law = SignedPmf::new();
    for (z, w) in z_law_full::<S>(z0, p, t)? {
        if w.to_f64() < -1e-12 {
            return Err(Error::RouteMismatch(format!("negative transition probability to {z:?}")));
        }
        law.add(*z.last().unwrap(), w);
    }
    let total = law.total().to_f64();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::RouteMismatch(format!("transition law sums to {total}")));
    }
    Ok(law)
}

/// One-step harmonicity defect of `Δ(ẑ)` for the free walks killed on
/// leaving the ordered region: `Σ_ξ P(ξ) Δ(ẑ+ξ) 1{ordered} - Δ(ẑ)`.
pub fn harmonicity_defect<S: Scalar>(z: &[i64], p: &Rational) -> S {
    let n = z.len();
    let p = S::from_rational(p);
    let q = S::one() - p.clone();
    let mut acc = S::zero();
    for mask in 0u32..1 << n {
        let next: Vec<i64> = z.iter().enumerate().map(|(i, &v)| v + ((mask >> i) & 1) as i64).collect();
        let h = hat(&next);
        if strictly_decreasing(&h) {
            let k = mask.count_ones();
            acc = acc + p.powu(k) * q.powu(n as u32 - k) * vandermonde_int::<S>(&h);
        }
    }
    acc - vandermonde_int::<S>(&hat(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::rational;
    use proptest::prelude::*;

    fn ordered(gaps: &[i64]) -> Vec<i64> {
        let mut z = vec![0i64];
        for g in gaps {
            let last = *z.last().unwrap();
            z.push(last - g);
        }
        z
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(vandermonde(&[0.0, 2.0, 5.0]), 30.0);
        assert_eq!(vandermonde(&[1.0, 4.0, 1.0]), 0.0);
        assert_eq!(vandermonde::<f64>(&[]), 1.0);
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = vec![vec![2.0, -1.0, 0.5], vec![1.0, 3.0, 2.0], vec![0.0, 1.0, 4.0]];
        let cof = 2.0 * (3.0 * 4.0 - 2.0 * 1.0) - (-1.0) * (1.0 * 4.0 - 2.0 * 0.0) + 0.5 * (1.0 * 1.0 - 3.0 * 0.0);
        assert!((determinant(m) - cof).abs() < 1e-12);
    }

    #[test]
    fn single_walk_is_binomial() {
        let p = rational(1, 3);
        let law: SignedPmf<Rational> = z_law_exact(&[4], &p, 5).unwrap();
        for k in 0..=5i64 {
            let expect = Rational::from_integer(binomial(5, k as u32) as i128)
                * p.powu(k as u32)
                * (Rational::from_integer(1) - p).powu(5 - k as u32);
            assert_eq!(law.get(4 + k), expect);
        }
    }

    #[test]
    fn degenerate_start_is_an_error() {
        // ẑ0 = (−1, −1) for z0 = (0, 1): not ordered at all.
        assert!(matches!(z_law_exact::<f64>(&[0, 1], &rational(1, 2), 1), Err(Error::Degenerate(_))));
    }

    /// Long-horizon oracle for two walks: probability of moving to `z1`
    /// and then surviving `horizon` more steps, divided by the survival
    /// probability from `z0`. Only the gap `ẑ_1 - ẑ_2` matters; it moves
    /// ±1 with probability p(1-p) each and is killed at 0.
    fn conditioned_by_horizon(z0: [i64; 2], z1: [i64; 2], p: f64, horizon: usize) -> f64 {
        let survival = |gap: i64, steps: usize| -> f64 {
            let size = gap as usize + steps + 2;
            let mut dist = vec![0.0; size];
            dist[gap as usize] = 1.0;
            let m = p * (1.0 - p);
            for _ in 0..steps {
                let mut next = vec![0.0; size];
                for g in 1..size - 1 {
                    let w = dist[g];
                    if w == 0.0 {
                        continue;
                    }
                    next[g] += w * (1.0 - 2.0 * m);
                    next[g + 1] += w * m;
                    next[g - 1] += w * m;
                }
                next[0] = 0.0;
                dist = next;
            }
            dist.iter().sum()
        };
        let (h0, h1) = (hat(&z0), hat(&z1));
        let d0 = h0[0] - h0[1];
        let d1 = h1[0] - h1[1];
        let step: f64 = (0..2)
            .map(|i| match z1[i] - z0[i] {
                0 => 1.0 - p,
                1 => p,
                _ => 0.0,
            })
            .product();
        if d1 <= 0 {
            return 0.0;
        }
        step * survival(d1, horizon) / survival(d0, horizon + 1)
    }

    #[test]
    fn one_step_law_matches_long_horizon_conditioning() {
        let p = 0.4;
        for z0 in [[0i64, 0], [1, 0], [3, 0]] {
            let law = z_law_full::<f64>(&z0, &rational(2, 5), 1).unwrap();
            for (z, w) in &law {
                let oracle = conditioned_by_horizon(z0, [z[0], z[1]], p, 4_000);
                assert!((w - oracle).abs() < 1e-2, "{z0:?}->{z:?}: {w} vs {oracle}");
            }
        }
    }

    #[test]
    fn laws_are_probabilities() {
        for (z0, t) in [(vec![0i64, 0, 0], 3usize), (vec![2, 0, 0], 4), (vec![1, 1, 0, 0], 3)] {
            for p in [rational(1, 2), rational(1, 3), rational(2, 3)] {
                let full = z_law_full::<Rational>(&z0, &p, t).unwrap();
                let total = full.iter().fold(Rational::from_integer(0), |a, (_, w)| a + w);
                assert_eq!(total, Rational::from_integer(1));
                assert!(full.iter().all(|(_, w)| *w >= Rational::from_integer(0)));
            }
        }
    }

    proptest! {
        #[test]
        fn vandermonde_is_harmonic(gaps in prop::collection::vec(0i64..5, 0..4), pn in 1i64..9) {
            let z = ordered(&gaps);
            let p = rational(pn, 10);
            prop_assert_eq!(harmonicity_defect::<Rational>(&z, &p), Rational::from_integer(0));
            prop_assert!(harmonicity_defect::<f64>(&z, &p).abs() < 1e-12 * vandermonde_int::<f64>(&hat(&z)).abs().max(1.0));
        }

        #[test]
        fn float_laws_sum_to_one(gaps in prop::collection::vec(0i64..4, 0..3), t in 1usize..5, pn in 1i64..9) {
            let z = ordered(&gaps);
            let law = z_law_exact::<f64>(&z, &rational(pn, 10), t).unwrap();
            prop_assert!((law.total() - 1.0).abs() < 1e-12);
            prop_assert!(law.min_value() >= 0.0);
        }

        #[test]
        fn vandermonde_antisymmetric(v in prop::collection::vec(-20i64..20, 2..5), i in 0usize..4, j in 0usize..4) {
            let n = v.len();
            let (i, j) = (i % n, j % n);
            prop_assume!(i != j);
            let mut w = v.clone();
            w.swap(i, j);
            prop_assert_eq!(vandermonde_int::<f64>(&v), -vandermonde_int::<f64>(&w));
        }
    }
}
