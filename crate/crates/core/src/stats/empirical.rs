use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted i.i.d. sample together with the seed it was drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    pub seed_base: u64,
    pub replica_count: usize,
}

impl EmpiricalSample {
    /// Sorts `values` ascending (`total_cmp`, so `±∞` are fine).
    pub fn new(mut values: Vec<f64>, seed_base: u64) -> EmpiricalSample {
        values.sort_by(|a, b| a.total_cmp(b));
        let replica_count = values.len();
        EmpiricalSample { values, seed_base, replica_count }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `#{x ≤ t}/len`.
    pub fn ecdf(&self, t: f64) -> f64 {
        self.values.partition_point(|&x| x <= t) as f64 / self.values.len() as f64
    }

    pub fn mean(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(self.values.iter().sum::<f64>() / self.len() as f64)
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        if self.len() < 2 {
            return Ok(0.0);
        }
        Ok(self.values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (self.len() - 1) as f64)
    }

    /// Empirical quantile by the nearest-rank rule.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptySample);
        }
        let k = ((q.clamp(0.0, 1.0) * self.len() as f64).ceil() as usize).clamp(1, self.len());
        Ok(self.values[k - 1])
    }
}
