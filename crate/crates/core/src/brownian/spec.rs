use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Start time `a`, starting heights `h` and drifts `ν` of an ensemble of
/// `n` Brownian lines (line `n` is the top one).
///
/// `h` must be nondecreasing. `ν` is required to be nondecreasing only by
/// the edge-process samplers; last passage accepts any drift order, which
/// is what the drift-reorder invariance is about.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftedEnsembleSpec {
    pub a: f64,
    pub h: Vec<f64>,
    pub nu: Vec<f64>,
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

impl DriftedEnsembleSpec {
    /// Validates `n ≥ 1`, equal lengths, finite entries and nondecreasing `h`.
    pub fn new(a: f64, h: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if h.is_empty() || h.len() != nu.len() {
            return Err(Error::InvalidParameter(format!("h has {} entries, ν has {}", h.len(), nu.len())));
        }
        if !a.is_finite() || h.iter().chain(&nu).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite ensemble parameter".into()));
        }
        if !nondecreasing(&h) {
            return Err(Error::InvalidParameter(format!("h = {h:?} is not nondecreasing")));
        }
        Ok(DriftedEnsembleSpec { a, h, nu })
    }

    pub fn pointed(n: usize, a: f64, h: f64, nu: Vec<f64>) -> Result<Self> {
        if nu.len() != n {
            return Err(Error::InvalidParameter(format!("ν has {} entries, n = {n}", nu.len())));
        }
        DriftedEnsembleSpec::new(a, vec![h; n], nu)
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.h.iter().all(|&v| v == self.h[0])
    }

    pub fn is_parallel(&self) -> bool {
        self.nu.iter().all(|&v| v == self.nu[0])
    }

    /// Edge processes need both vectors nondecreasing.
    pub fn check_edge(&self) -> Result<()> {
        if !nondecreasing(&self.nu) {
            return Err(Error::InvalidParameter(format!("ν = {:?} is not nondecreasing", self.nu)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DriftedEnsembleSpec::new(0.0, vec![0.0, 1.0], vec![1.0, 0.0]).is_ok());
        assert!(DriftedEnsembleSpec::new(0.0, vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(DriftedEnsembleSpec::new(0.0, vec![], vec![]).is_err());
        assert!(DriftedEnsembleSpec::new(0.0, vec![0.0], vec![0.0, 1.0]).is_err());
        let s = DriftedEnsembleSpec::new(0.0, vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(s.check_edge().is_err());
    }

    #[test]
    fn kinds() {
        let p = DriftedEnsembleSpec::pointed(3, 0.0, 2.0, vec![0.0, 1.0, 2.0]).unwrap();
        assert!(p.is_pointed() && !p.is_parallel());
        let q = DriftedEnsembleSpec::new(0.0, vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(q.is_parallel() && !q.is_pointed());
    }
}
