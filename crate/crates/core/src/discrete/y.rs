use crate::error::{Error, Result};
use crate::par::map_chunks;

use super::{Rational, Scalar, SignedPmf};

/// Largest `n·t` that [`y_law_exact`] will enumerate (`2^{n·t}` arrays).
pub const Y_ENUMERATION_BUDGET: u64 = 24;

/// State of the `Y` process: a weakly decreasing integer vector together
/// with the Bernoulli parameter of its driving weights.
#[derive(Clone, Debug, PartialEq)]
pub struct YState {
    pub y: Vec<i64>,
    pub p: Rational,
}

impl YState {
    pub fn new(y: Vec<i64>, p: Rational) -> Result<YState> {
        let s = YState { y, p };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.is_empty() {
            return Err(Error::InvalidParameter("empty state".into()));
        }
        if self.y.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotAdmissible(format!("{:?} is not weakly decreasing", self.y)));
        }
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        if !(self.p > zero && self.p < one) {
            return Err(Error::InvalidParameter(format!("p = {} not in (0,1)", self.p)));
        }
        Ok(())
    }
}

/// In-place recursion `Y_1 += ξ_1`, `Y_k = min(Y_k + ξ_k, Y_{k-1})`.
#[inline]
fn step_in_place(y: &mut [i64], xi: impl Fn(usize) -> i64) {
    y[0] += xi(0);
    for k in 1..y.len() {
        y[k] = (y[k] + xi(k)).min(y[k - 1]);
    }
}

/// One step of the `Y` process driven by the binary vector `xi`.
pub fn y_step(state: &YState, xi: &[u8]) -> Result<YState> {
    state.validate()?;
    if xi.len() != state.n() {
        return Err(Error::InvalidParameter(format!("ξ has length {}, state has {}", xi.len(), state.n())));
    }
    if xi.iter().any(|&b| b > 1) {
        return Err(Error::InvalidParameter(format!("ξ = {xi:?} is not binary")));
    }
    let mut y = state.y.clone();
    step_in_place(&mut y, |k| xi[k] as i64);
    Ok(YState { y, p: state.p })
}

/// `-L(t)` for the last passage problem of the recursion: initial heights
/// `h = -y0`, lines `B_k(s) = -Σ_{i≤s} ξ(k, i)` (linear between integers),
/// maximized over nondecreasing jump times `0 = t_{ℓ-1} ≤ t_ℓ ≤ … ≤ t_n = t`.
///
/// Because each `B_k` is linear between integers the maximum is attained at
/// integer jump times; `xi(k, s)` is the weight of line `k` at step `s`
/// (both 0-based). `scratch` must hold `2·(t+1)` values.
pub fn lp_bottom(y0: &[i64], t: usize, xi: impl Fn(usize, usize) -> i64, scratch: &mut Vec<i64>) -> i64 {
    let n = y0.len();
    scratch.clear();
    scratch.resize(2 * (t + 1), 0);
    let (prev, cur) = scratch.split_at_mut(t + 1);
    // Line 1: V_1(s) = h_1 + B_1(s).
    let mut b = 0i64;
    prev[0] = -y0[0];
    for s in 1..=t {
        b -= xi(0, s - 1);
        prev[s] = -y0[0] + b;
    }
    for l in 1..n {
        // V_l(s) = B_l(s) + max(h_l, max_{s'≤s} V_{l-1}(s') - B_l(s')).
        let mut b = 0i64;
        let mut best = (-y0[l]).max(prev[0]);
        cur[0] = best;
        for s in 1..=t {
            b -= xi(l, s - 1);
            best = best.max(prev[s] - b);
            cur[s] = best + b;
        }
        prev.copy_from_slice(cur);
    }
    -prev[t]
}

/// Exact law of the bottom line `Y_n(t)` started from `y0`.
///
/// Enumerates all `2^{n·t}` binary arrays; for each one the bottom line is
/// computed both by iterating the recursion and by the last passage formula,
/// and a disagreement is reported as [`Error::RouteMismatch`]. The arrays
/// are tallied by `(Y_n(t), Σξ)`, so the probabilities are exact integer
/// counts times `p^k (1-p)^{nt-k}`.
pub fn y_law_exact<S: Scalar>(y0: &YState, t: usize) -> Result<SignedPmf<S>> {
    y0.validate()?;
    let n = y0.n();
    let bits = (n * t) as u64;
    if bits > Y_ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { size: bits, limit: Y_ENUMERATION_BUDGET });
    }
    let total: u64 = 1 << bits;
    let chunks = total.min(64) as usize;
    let per_chunk = total / chunks as u64;
    let base = y0.y[n - 1];
    let width = t + 1;

    // counts[(bottom - base) * (nt+1) + popcount]
    let tallies = map_chunks(chunks, |c| -> std::result::Result<Vec<u64>, (u64, i64, i64)> {
        let mut counts = vec![0u64; width * (n * t + 1)];
        let mut y = vec![0i64; n];
        let mut scratch = Vec::new();
        for mask in c as u64 * per_chunk..(c as u64 + 1) * per_chunk {
            let xi = |k: usize, s: usize| ((mask >> (s * n + k)) & 1) as i64;
            y.copy_from_slice(&y0.y);
            for s in 0..t {
                step_in_place(&mut y, |k| xi(k, s));
            }
            let lp = lp_bottom(&y0.y, t, xi, &mut scratch);
            if lp != y[n - 1] {
                return Err((mask, y[n - 1], lp));
            }
            counts[(y[n - 1] - base) as usize * (n * t + 1) + mask.count_ones() as usize] += 1;
        }
        Ok(counts)
    });

    let mut counts = vec![0u64; width * (n * t + 1)];
    for tally in tallies {
        let tally = tally.map_err(|(mask, rec, lp)| {
            Error::RouteMismatch(format!("array {mask:#b}: recursion gives {rec}, last passage gives {lp}"))
        })?;
        counts.iter_mut().zip(tally).for_each(|(a, b)| *a += b);
    }

    let p = S::from_rational(&y0.p);
    let q = S::one() - p.clone();
    let mut law = SignedPmf::new();
    for off in 0..width {
        for k in 0..=n * t {
            let cnt = counts[off * (n * t + 1) + k];
            if cnt > 0 {
                let w = S::from_i64(cnt as i64) * p.powu(k as u32) * q.powu((n * t - k) as u32);
                law.add(base + off as i64, w);
            }
        }
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::rational;
    use proptest::prelude::*;

    fn st(y: &[i64]) -> YState {
        YState::new(y.to_vec(), rational(1, 2)).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(y_step(&st(&[0, 0]), &[1, 1]).unwrap().y, vec![1, 1]);
        assert_eq!(y_step(&st(&[0, 0]), &[0, 1]).unwrap().y, vec![0, 0]);
        assert_eq!(y_step(&st(&[2, 1, 0]), &[0, 1, 1]).unwrap().y, vec![2, 2, 1]);
    }

    #[test]
    fn step_rejects_bad_input() {
        assert!(y_step(&st(&[0, 0]), &[2, 0]).is_err());
        assert!(y_step(&st(&[0, 0]), &[1]).is_err());
        assert!(YState::new(vec![0, 1], rational(1, 2)).is_err());
        assert!(YState::new(vec![0], rational(1, 1)).is_err());
    }

    #[test]
    fn law_examples() {
        let p = rational(1, 3);
        let law: SignedPmf<Rational> = y_law_exact(&YState::new(vec![0], p).unwrap(), 1).unwrap();
        assert_eq!(law.get(1), p);
        assert_eq!(law.get(0), rational(2, 3));

        let law: SignedPmf<Rational> = y_law_exact(&YState::new(vec![0, 0], p).unwrap(), 1).unwrap();
        assert_eq!(law.get(1), p * p);
        assert_eq!(law.get(0), Rational::from_integer(1) - p * p);
    }

    #[test]
    fn budget_is_enforced() {
        let s = YState::new(vec![0; 5], rational(1, 2)).unwrap();
        assert!(matches!(y_law_exact::<f64>(&s, 5), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn rational_and_float_agree() {
        let s = YState::new(vec![3, 1, 1], rational(1, 3)).unwrap();
        let a: SignedPmf<Rational> = y_law_exact(&s, 3).unwrap();
        let b: SignedPmf<f64> = y_law_exact(&s, 3).unwrap();
        assert_eq!(a.total(), Rational::from_integer(1));
        for (k, v) in a.iter() {
            assert!((v.to_f64() - b.get(k)).abs() < 1e-15);
        }
    }

    /// Direct maximization over every nondecreasing integer jump-time
    /// tuple, straight from the last passage formula.
    fn lp_brute(y0: &[i64], t: usize, xi: &dyn Fn(usize, usize) -> i64) -> i64 {
        let n = y0.len();
        let b = |k: usize, s: usize| -> i64 { -(0..s).map(|i| xi(k, i)).sum::<i64>() };
        fn rec(l: usize, prev: usize, n: usize, t: usize, b: &dyn Fn(usize, usize) -> i64) -> i64 {
            if l == n - 1 {
                return b(l, t) - b(l, prev);
            }
            (prev..=t).map(|s| b(l, s) - b(l, prev) + rec(l + 1, s, n, t, b)).max().unwrap()
        }
        let best = (0..n).map(|l| -y0[l] + rec(l, 0, n, t, &b)).max().unwrap();
        -best
    }

    #[test]
    fn lp_matches_brute_force_jump_times() {
        for mask in 0u64..1 << 12 {
            for y0 in [[0i64, 0, 0], [3, 1, 0], [2, 2, -1]] {
                let xi = |k: usize, s: usize| ((mask >> (s * 3 + k)) & 1) as i64;
                let mut scratch = Vec::new();
                assert_eq!(lp_bottom(&y0, 4, xi, &mut scratch), lp_brute(&y0, 4, &xi));
            }
        }
    }

    proptest! {
        #[test]
        fn recursion_stays_ordered(
            gaps in prop::collection::vec(0i64..4, 1..5),
            steps in prop::collection::vec(prop::collection::vec(0u8..2, 5), 1..6),
        ) {
            let mut y: Vec<i64> = vec![0];
            for g in &gaps { let last = *y.last().unwrap(); y.push(last - g); }
            let mut s = st(&y);
            for xi in &steps {
                let next = y_step(&s, &xi[..s.n()]).unwrap();
                prop_assert!(next.validate().is_ok());
                for (a, b) in next.y.iter().zip(&s.y) { prop_assert!(a >= b && *a <= b + 1); }
                s = next;
            }
        }

        #[test]
        fn routes_agree_per_array(
            gaps in prop::collection::vec(0i64..3, 0..3),
            t in 1usize..5,
            mask in any::<u64>(),
        ) {
            let mut y: Vec<i64> = vec![5];
            for g in &gaps { let last = *y.last().unwrap(); y.push(last - g); }
            let n = y.len();
            let xi = |k: usize, s: usize| ((mask >> (s * n + k)) & 1) as i64;
            let mut cur = y.clone();
            for s in 0..t { step_in_place(&mut cur, |k| xi(k, s)); }
            let mut scratch = Vec::new();
            prop_assert_eq!(lp_bottom(&y, t, xi, &mut scratch), cur[n - 1]);
        }
    }
}
