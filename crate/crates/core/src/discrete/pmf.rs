use std::collections::BTreeMap;

use super::Scalar;

/// Finitely supported signed mass function on the integers.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedPmf<S> {
    support: BTreeMap<i64, S>,
}

impl<S: Scalar> Default for SignedPmf<S> {
    fn default() -> Self {
        SignedPmf { support: BTreeMap::new() }
    }
}

impl<S: Scalar> SignedPmf<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(k: i64) -> Self {
        let mut p = Self::new();
        p.add(k, S::one());
        p
    }

    pub fn add(&mut self, k: i64, w: S) {
        let e = self.support.entry(k).or_insert_with(S::zero);
        *e = e.clone() + w;
    }

    /// `self += w · other`.
    pub fn add_scaled(&mut self, other: &SignedPmf<S>, w: &S) {
        for (&k, v) in &other.support {
            self.add(k, w.clone() * v.clone());
        }
    }

    pub fn get(&self, k: i64) -> S {
        self.support.get(&k).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &S)> {
        self.support.iter().map(|(&k, v)| (k, v))
    }

    pub fn total(&self) -> S {
        self.support.values().fold(S::zero(), |a, v| a + v.clone())
    }

    pub fn min_value(&self) -> f64 {
        self.support.values().map(|v| v.to_f64()).fold(f64::INFINITY, f64::min)
    }

    pub fn convolve(&self, other: &SignedPmf<S>) -> SignedPmf<S> {
        let mut out = SignedPmf::new();
        for (&a, va) in &self.support {
            for (&b, vb) in &other.support {
                out.add(a + b, va.clone() * vb.clone());
            }
        }
        out
    }

    /// `k`-fold convolution power; the zeroth power is the unit mass at 0.
    pub fn convolution_power(&self, k: usize) -> SignedPmf<S> {
        (0..k).fold(SignedPmf::point(0), |acc, _| acc.convolve(self))
    }

    /// Largest `|self(k) - other(k)|` over the union of supports.
    pub fn max_abs_diff(&self, other: &SignedPmf<S>) -> S
    where
        S: PartialOrd,
    {
        let mut worst = S::zero();
        for k in self.support.keys().chain(other.support.keys()) {
            let d = self.get(*k) - other.get(*k);
            let d = if d < S::zero() { -d } else { d };
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    pub fn to_f64(&self) -> SignedPmf<f64> {
        SignedPmf { support: self.support.iter().map(|(&k, v)| (k, v.to_f64())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{rational, Rational};

    #[test]
    fn convolution_of_bernoullis_is_binomial() {
        let mut b = SignedPmf::<Rational>::new();
        b.add(0, rational(2, 3));
        b.add(1, rational(1, 3));
        let b3 = b.convolution_power(3);
        assert_eq!(b3.get(0), rational(8, 27));
        assert_eq!(b3.get(1), rational(12, 27));
        assert_eq!(b3.get(3), rational(1, 27));
        assert_eq!(b3.total(), rational(1, 1));
    }

    #[test]
    fn max_abs_diff_over_union() {
        let a = SignedPmf::<f64>::point(0);
        let b = SignedPmf::<f64>::point(1);
        assert_eq!(a.max_abs_diff(&b), 1.0);
        assert_eq!(a.max_abs_diff(&a), 0.0);
    }
}
