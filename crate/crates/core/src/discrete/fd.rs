use std::collections::BTreeMap;

use rand::Rng;

use crate::rng::rng_from_seed;

use super::{rational, Rational, SignedPmf};

/// Forward difference `(Dg)(j) = g(j+1) - g(j)` of a finitely supported
/// function.
pub fn difference(g: &SignedPmf<Rational>) -> SignedPmf<Rational> {
    let mut out = SignedPmf::new();
    for (k, v) in g.iter() {
        out.add(k - 1, *v);
        out.add(k, -*v);
    }
    out
}

/// `Σ_ℓ C(n,ℓ) (-1)^ℓ g(j+ℓ)`.
pub fn binomial_difference(g: &SignedPmf<Rational>, n: usize, j: i64) -> Rational {
    let mut acc = Rational::from_integer(0);
    let mut c = 1i128;
    for l in 0..=n {
        let term = Rational::from_integer(c) * g.get(j + l as i64);
        acc += if l % 2 == 0 { term } else { -term };
        c = c * (n - l) as i128 / (l + 1) as i128;
    }
    acc
}

/// Mass function of the uniform law on `{1, …, r}`.
pub fn uniform_mass(r: i64) -> SignedPmf<Rational> {
    let mut u = SignedPmf::new();
    for k in 1..=r {
        u.add(k, rational(1, r));
    }
    u
}

/// Outcome of [`finite_difference_identities`], one flag per identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FdReport {
    pub binomial: bool,
    pub convolution: bool,
    pub product: bool,
}

impl FdReport {
    pub fn all_pass(&self) -> bool {
        self.binomial && self.convolution && self.product
    }
}

fn is_zero(f: &SignedPmf<Rational>) -> bool {
    f.iter().all(|(_, v)| *v == Rational::from_integer(0))
}

fn minus(a: &SignedPmf<Rational>, b: &SignedPmf<Rational>) -> SignedPmf<Rational> {
    let mut out = a.clone();
    out.add_scaled(b, &Rational::from_integer(-1));
    out
}

/// Checks, in exact arithmetic, the three finite-difference facts behind
/// the signed mixture identity, for random integer test functions `g`:
///
/// 1. `Σ_ℓ C(n,ℓ)(-1)^ℓ g(j+ℓ) = (-D)^n g(j)`;
/// 2. `D(u * g) = (Du) * g`;
/// 3. `D_1^{n-1} ⋯ D_{n-1}^1 Π_i u^{*(n-i)}(z_i) = Π_i (Du)^{*(n-i)}(z_i)`.
pub fn finite_difference_identities(u: &SignedPmf<Rational>, n: usize, seed: u64) -> FdReport {
    let mut rng = rng_from_seed(seed);
    let mut g = SignedPmf::new();
    for k in -6..=6i64 {
        g.add(k, Rational::from_integer(rng.random_range(-10..=10)));
    }

    let mut neg_d = g.clone();
    for _ in 0..n {
        neg_d = minus(&SignedPmf::new(), &difference(&neg_d));
    }
    let binomial = (-12..=12).all(|j| binomial_difference(&g, n, j) == neg_d.get(j));

    let convolution = is_zero(&minus(&difference(&u.convolve(&g)), &difference(u).convolve(&g)));

    FdReport { binomial, convolution, product: product_identity(u, n) }
}

/// Identity 3 on the full box where either side can be nonzero.
fn product_identity(u: &SignedPmf<Rational>, n: usize) -> bool {
    if n <= 1 {
        return true;
    }
    let powers: Vec<SignedPmf<Rational>> = (1..=n).map(|i| u.convolution_power(n - i)).collect();
    let du = difference(u);
    let dpowers: Vec<SignedPmf<Rational>> = (1..=n).map(|i| du.convolution_power(n - i)).collect();
    let range = |f: &SignedPmf<Rational>| {
        let keys: Vec<i64> = f.iter().map(|(k, _)| k).collect();
        (*keys.first().unwrap_or(&0), *keys.last().unwrap_or(&0))
    };
    // Box: the support of h, extended left by the number of differences.
    let bounds: Vec<(i64, i64)> = powers
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (lo, hi) = range(p);
            (lo - (n - 1 - i) as i64, hi)
        })
        .collect();

    let mut f: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for z in box_points(&bounds) {
        let v = z.iter().zip(&powers).fold(Rational::from_integer(1), |a, (&zi, p)| a * p.get(zi));
        f.insert(z, v);
    }
    let at = |f: &BTreeMap<Vec<i64>, Rational>, z: &[i64]| f.get(z).copied().unwrap_or_default();
    for i in 0..n - 1 {
        for _ in 0..n - 1 - i {
            let mut next = BTreeMap::new();
            for z in f.keys() {
                let mut up = z.clone();
                up[i] += 1;
                next.insert(z.clone(), at(&f, &up) - at(&f, z));
            }
            f = next;
        }
    }
    box_points(&bounds).into_iter().all(|z| {
        let rhs = z.iter().zip(&dpowers).fold(Rational::from_integer(1), |a, (&zi, p)| a * p.get(zi));
        at(&f, &z) == rhs
    })
}

fn box_points(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    bounds.iter().fold(vec![Vec::new()], |acc, &(lo, hi)| {
        acc.into_iter()
            .flat_map(|z| {
                (lo..=hi).map(move |v| {
                    let mut z = z.clone();
                    z.push(v);
                    z
                })
            })
            .collect()
    })
}
