use crate::error::{Error, Result};

use super::{rational, vandermonde, y_law_exact, z_law_exact, Rational, Scalar, SignedPmf, YState};

/// Below this `n·t`, [`dw_identity_check`] runs in exact rational
/// arithmetic; above it, in `f64`.
pub const RATIONAL_BUDGET: usize = 12;

/// One term of the signed mixture: a weight and a deterministic start.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureEntry<S> {
    pub weight: S,
    pub start: Vec<i64>,
}

/// `{(c (-1)^{Σs} Δ((y + r s - ι)/r) Π P(S_i = s_i), y + r s)}` over the
/// support of `S`, with `ι = (1, …, n)`. Zero-weight terms are kept so the
/// entry list always covers the whole support.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMixture<S> {
    pub entries: Vec<MixtureEntry<S>>,
    pub n: usize,
    pub r: i64,
}

impl<S: Scalar> SignedMixture<S> {
    pub fn weight_sum(&self) -> S {
        self.entries.iter().fold(S::zero(), |a, e| a + e.weight.clone())
    }
}

/// `c = 2^{C(n,2)} / (1! 2! ⋯ (n-1)!)`.
pub fn dw_constant(n: usize) -> Rational {
    let mut c = Rational::from_integer(1i128 << (n * n.saturating_sub(1) / 2));
    let mut fact = 1i128;
    for k in 1..n {
        fact *= k as i128;
        c /= Rational::from_integer(fact);
    }
    c
}

/// Smallest-spread admissible `y` (with `y_n = 0`): every start `y + r s`
/// is weakly decreasing when `y_i - y_{i+1} ≥ r (n - i - 1)`.
pub fn minimal_admissible_y(n: usize, r: i64) -> Vec<i64> {
    let mut y = vec![0i64; n];
    for i in (0..n.saturating_sub(1)).rev() {
        // 0-based i: the gap to the next coordinate is r·(n - (i+1) - 1).
        y[i] = y[i + 1] + r * (n - i - 2) as i64;
    }
    y
}

fn binomial(m: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (m - i) as i128 / (i + 1) as i128)
}

fn support_of_s(n: usize) -> Vec<Vec<usize>> {
    // s_i ∈ {0, …, n - i} for 1-based i.
    let mut out = vec![Vec::new()];
    for i in 1..=n {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..=n - i).map(move |v| {
                    let mut s = s.clone();
                    s.push(v);
                    s
                })
            })
            .collect();
    }
    out
}

/// The signed mixture of deterministic `Z` starts realizing the law of the
/// bottom line of `Y` from the random start `y + R`.
///
/// The Vandermonde factor is evaluated at the hat-shifted, rescaled start
/// `(z0 - ι)/r`; with that convention and overall sign `+1` the identity
/// holds exactly (see the tests and the acceptance suite).
pub fn dw_weights<S: Scalar>(y: &[i64], r: i64) -> Result<SignedMixture<S>> {
    let n = y.len();
    if n == 0 || r < 1 {
        return Err(Error::InvalidParameter(format!("need n ≥ 1 and r ≥ 1, got n={n}, r={r}")));
    }
    let c = S::from_rational(&dw_constant(n));
    let mut entries = Vec::new();
    for s in support_of_s(n) {
        let start: Vec<i64> = y.iter().zip(&s).map(|(&yi, &si)| yi + r * si as i64).collect();
        if start.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotAdmissible(format!("start {start:?} (s = {s:?}) is not weakly decreasing")));
        }
        let arg: Vec<S> = start
            .iter()
            .enumerate()
            .map(|(i, &z)| S::from_rational(&rational(z - (i as i64 + 1), r)))
            .collect();
        let mut w = c.clone() * vandermonde(&arg);
        for (i, &si) in s.iter().enumerate() {
            let m = n - i - 1;
            w = w * S::from_rational(&Rational::new(binomial(m, si), 1i128 << m));
        }
        if s.iter().sum::<usize>() % 2 == 1 {
            w = -w;
        }
        entries.push(MixtureEntry { weight: w, start });
    }
    Ok(SignedMixture { entries, n, r })
}

/// Law of `R_i`: sum of `m` independent uniforms on `{1, …, r}`.
fn uniform_sum_law(m: usize, r: i64) -> SignedPmf<Rational> {
    let mut u = SignedPmf::new();
    for k in 1..=r {
        u.add(k, rational(1, r));
    }
    u.convolution_power(m)
}

/// Both sides of the identity as laws of the bottom line at time `t`:
/// left, `Y_n(t)` from `Y(0) = y + R`; right, the signed mixture of `Z_n(t)`
/// laws. Returns `max_k |LHS(k) - RHS(k)|`.
pub fn dw_identity_discrepancy<S: Scalar + PartialOrd>(y: &[i64], r: i64, p: &Rational, t: usize) -> Result<S> {
    let n = y.len();
    if n == 0 || r < 1 || t < 1 {
        return Err(Error::InvalidParameter(format!("need n, r, t ≥ 1, got n={n}, r={r}, t={t}")));
    }
    // LHS: average Y laws over the independent coordinates of R.
    let r_laws: Vec<Vec<(i64, S)>> = (1..=n)
        .map(|i| uniform_sum_law(n - i, r).iter().map(|(k, v)| (k, S::from_rational(v))).collect())
        .collect();
    let mut lhs = SignedPmf::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        let mut w = S::one();
        let mut y0 = Vec::with_capacity(n);
        for i in 0..n {
            let (v, pw) = &r_laws[i][idx[i]];
            w = w * pw.clone();
            y0.push(y[i] + v);
        }
        if y0.windows(2).any(|q| q[0] < q[1]) {
            return Err(Error::NotAdmissible(format!("Y(0) = {y0:?} is not weakly decreasing")));
        }
        lhs.add_scaled(&y_law_exact::<S>(&YState::new(y0, *p)?, t)?, &w);
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < r_laws[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }

    let mut rhs = SignedPmf::new();
    for e in dw_weights::<S>(y, r)?.entries {
        if e.weight != S::zero() {
            rhs.add_scaled(&z_law_exact::<S>(&e.start, p, t)?, &e.weight);
        }
    }
    Ok(lhs.max_abs_diff(&rhs))
}

/// Maximum discrepancy of the signed-mixture identity, exact rationals for
/// `n·t ≤ RATIONAL_BUDGET` and floats beyond.
pub fn dw_identity_check(y: &[i64], r: i64, p: &Rational, t: usize) -> Result<f64> {
    if y.len() * t <= RATIONAL_BUDGET {
        Ok(dw_identity_discrepancy::<Rational>(y, r, p, t)?.to_f64())
    } else {
        dw_identity_discrepancy::<f64>(y, r, p, t)
    }
}
