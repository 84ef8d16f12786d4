//! Finite-horizon rejection sampler for edge processes with arbitrary
//! nondecreasing `(h, ν)`.
//!
//! Lines are simulated on a time grid up to the horizon; an attempt is
//! rejected as soon as two adjacent lines cross at a node, or — given both
//! endpoints of a cell — their difference (a Brownian bridge of variance
//! rate 4) would have touched zero inside it, which happens with
//! probability `exp(-d₀d₁/(2δ))`. Lines tied at the start are only
//! required to be ordered at the end of the first cell. "Never intersect"
//! is replaced by "do not intersect before the horizon"; the bias decays
//! with the horizon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{open_unit, rng_from_seed, std_normal};

use super::DriftedEnsembleSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionedConfig {
    /// Absolute end time `T` of the conditioning window.
    pub horizon: f64,
    /// Time step; `None` means `10⁻³·(T - a)`.
    pub step: Option<f64>,
    /// Attempts per sample before giving up with [`Error::LowAcceptance`].
    pub max_attempts: u64,
}

impl ConditionedConfig {
    pub fn new(horizon: f64) -> Self {
        ConditionedConfig { horizon, step: None, max_attempts: 2_000_000 }
    }
}

/// Top line at the `eval` times (which must be grid nodes in `[a, T]`) of
/// one accepted ensemble.
pub fn ep_sample_conditioned(
    spec: &DriftedEnsembleSpec,
    config: &ConditionedConfig,
    eval: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    spec.check_edge()?;
    let n = spec.n();
    let span = config.horizon - spec.a;
    if !(span > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon {} not after a = {}", config.horizon, spec.a)));
    }
    let step = config.step.unwrap_or(1e-3 * span);
    let cells = (span / step).round() as usize;
    let mut eval_at = Vec::with_capacity(eval.len());
    for &t in eval {
        let r = (t - spec.a) / step;
        if (r - r.round()).abs() > 1e-6 || r.round() < 0.0 || r.round() as usize > cells {
            return Err(Error::GridMismatch(format!("eval time {t} is not a node of the sampling grid")));
        }
        eval_at.push(r.round() as usize);
    }

    let mut rng = rng_from_seed(seed);
    let sd = (2.0 * step).sqrt();
    let mut x = vec![0.0; n];
    let mut out = vec![0.0; eval.len()];
    for attempt in 1..=config.max_attempts {
        x.copy_from_slice(&spec.h);
        for (o, &k) in out.iter_mut().zip(&eval_at) {
            if k == 0 {
                *o = x[n - 1];
            }
        }
        let mut alive = true;
        for k in 1..=cells {
            let mut survive = 1.0;
            let mut prev_old = x[0];
            x[0] += spec.nu[0] * step + sd * std_normal(&mut rng);
            for i in 1..n {
                let old = x[i];
                x[i] += spec.nu[i] * step + sd * std_normal(&mut rng);
                let (d0, d1) = (old - prev_old, x[i] - x[i - 1]);
                if d1 <= 0.0 {
                    alive = false;
                    break;
                }
                if d0 > 0.0 {
                    survive *= -(-d0 * d1 / (2.0 * step)).exp_m1();
                }
                prev_old = old;
            }
            if !alive || (n > 1 && open_unit(&mut rng) > survive) {
                alive = false;
                break;
            }
            for (o, &e) in out.iter_mut().zip(&eval_at) {
                if e == k {
                    *o = x[n - 1];
                }
            }
        }
        if alive {
            // One success in more than 10⁶ attempts: rate below 10⁻⁶.
            if attempt > 1_000_000 {
                return Err(Error::LowAcceptance { rate: 1.0 / attempt as f64 });
            }
            return Ok(out);
        }
    }
    Err(Error::LowAcceptance { rate: 1.0 / config.max_attempts as f64 })
}
