use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use rand::Rng;

/// Bootstrap standard error of `stat` over `resamples` resamples drawn with
/// replacement. The resampling stream is seeded by `seed`.
pub fn bootstrap_se(values: &[f64], resamples: usize, seed: u64, stat: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if resamples < 2 {
        return Err(Error::InvalidParameter("need at least two bootstrap resamples".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut buf = vec![0.0; values.len()];
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..values.len())];
            }
            stat(&buf)
        })
        .collect();
    let mean = stats.iter().sum::<f64>() / resamples as f64;
    let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(var.sqrt())
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::std_normal;

    #[test]
    fn mean_se_matches_the_textbook_formula() {
        let mut rng = rng_from_seed(1);
        let xs: Vec<f64> = (0..2000).map(|_| std_normal(&mut rng)).collect();
        let se = bootstrap_se(&xs, 400, 2, mean).unwrap();
        let m = mean(&xs);
        let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 1999.0).sqrt();
        let textbook = sd / (2000f64).sqrt();
        assert!((se / textbook - 1.0).abs() < 0.15, "{se} vs {textbook}");
    }

    #[test]
    fn radius_shrinks_when_sample_quadruples() {
        let mut rng = rng_from_seed(5);
        let xs: Vec<f64> = (0..8000).map(|_| std_normal(&mut rng).exp()).collect();
        let small = bootstrap_se(&xs[..2000], 300, 9, mean).unwrap();
        let large = bootstrap_se(&xs, 300, 9, mean).unwrap();
        assert!(large / small <= 0.6);
    }

    #[test]
    fn deterministic_and_errors() {
        let xs = [1.0, 2.0, 4.0];
        assert_eq!(bootstrap_se(&xs, 50, 3, mean).unwrap(), bootstrap_se(&xs, 50, 3, mean).unwrap());
        assert!(bootstrap_se(&[], 50, 3, mean).is_err());
        assert!(bootstrap_se(&xs, 1, 3, mean).is_err());
    }
}
