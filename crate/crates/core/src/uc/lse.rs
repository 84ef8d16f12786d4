/// Streaming log-sum-exp accumulator.
///
/// Keeps the running maximum and the sum of `exp(term - max)`; pushing a
/// larger term rescales the sum. `-∞` terms are ignored.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub const fn new() -> Self {
        LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    #[inline]
    pub fn push(&mut self, term: f64) {
        if term == f64::NEG_INFINITY {
            return;
        }
        if term <= self.max {
            self.sum += (term - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - term).exp() + 1.0;
            self.max = term;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }

    /// `log Σ exp(term)`, or `-∞` when nothing finite was pushed.
    pub fn value(&self) -> f64 {
        if self.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for t in iter {
            acc.push(t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum() {
        let terms = [0.3, -1.2, 2.5, 0.0, -7.0];
        let naive = terms.iter().map(|t: &f64| t.exp()).sum::<f64>().ln();
        let acc: LogSumExp = terms.iter().copied().collect();
        assert!((acc.value() - naive).abs() < 1e-14);
    }

    #[test]
    fn no_overflow() {
        let acc: LogSumExp = [800.0, 800.0].into_iter().collect();
        assert!((acc.value() - (800.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(LogSumExp::new().value(), f64::NEG_INFINITY);
    }
}
