//! Digamma and its first two derivatives.
//!
//! The argument is pushed above [`ASYMPTOTIC_FROM`] with the recurrences
//! `ψ(x) = ψ(x+1) − 1/x`, `ψ′(x) = ψ′(x+1) + 1/x²`, `ψ″(x) = ψ″(x+1) − 2/x³`.
//! The Bernoulli asymptotic series is then truncated once its terms fall
//! below 1e-16.

use crate::error::{Error, Result};

const ASYMPTOTIC_FROM: f64 = 20.0;

/// `ψ^{(order)}(θ)` for `order ∈ {0, 1, 2}`, where ψ = (log Γ)′.
pub fn polygamma(theta: f64, order: u32) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("polygamma needs θ > 0, got {theta}")));
    }
    if order > 2 {
        return Err(Error::InvalidParameter(format!("polygamma order {order} not supported")));
    }
    let mut x = theta;
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc += match order {
            0 => -1.0 / x,
            1 => 1.0 / (x * x),
            _ => -2.0 / (x * x * x),
        };
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let tail = match order {
        0 => {
            x.ln() - 0.5 * r
                - r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 * (1.0 / 240.0 - r2 / 132.0))))
        }
        1 => {
            r + 0.5 * r2
                + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 * (1.0 / 30.0 - r2 * 5.0 / 66.0))))
        }
        _ => {
            -r2 - r * r2
                - r2 * r2 * (0.5 - r2 * (1.0 / 6.0 - r2 * (1.0 / 6.0 - r2 * (3.0 / 10.0 - r2 * 5.0 / 6.0))))
        }
    };
    Ok(acc + tail)
}
