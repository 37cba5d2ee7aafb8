//! Monte-Carlo estimates with normal-approximation intervals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// `1.96 * std_error`, floored at `1 / trials`.
    pub ci_half_width: f64,
    pub trials: usize,
}

impl Estimate {
    /// Summarize per-trial values. Summation is sequential so the result
    /// does not depend on thread scheduling.
    pub fn from_values(v: &[f64]) -> Self {
        let n = v.len();
        if n == 0 {
            return Self { mean: 0.0, std_error: 0.0, ci_half_width: 1.0, trials: 0 };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let std_error = (var / n as f64).sqrt();
        Self { mean, std_error, ci_half_width: (1.96 * std_error).max(1.0 / n as f64), trials: n }
    }

    /// A known value (zero spread).
    pub fn exact(value: f64) -> Self {
        Self { mean: value, std_error: 0.0, ci_half_width: 0.0, trials: 0 }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci_half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci_half_width
    }
}

/// Standard error of a difference of independent estimates.
pub fn combined_se(a: &Estimate, b: &Estimate) -> f64 {
    (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

/// Run `trials` independent trials, trial `i` on stream `rng.fork(i)`.
/// Values are collected in trial order, so the estimate is reproducible
/// regardless of the worker count.
pub fn monte_carlo<F>(trials: usize, rng: &RandomSource, f: F) -> Result<Estimate>
where
    F: Fn(&mut RandomSource) -> Result<f64> + Sync,
{
    let v = (0..trials)
        .into_par_iter()
        .map(|i| f(&mut rng.fork(i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_values(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values_have_floor_width() {
        let e = Estimate::from_values(&[1.0; 40]);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.ci_half_width, 1.0 / 40.0);
    }

    #[test]
    fn bernoulli_se() {
        let v: Vec<f64> = (0..100).map(|i| f64::from(i % 2 == 0)).collect();
        let e = Estimate::from_values(&v);
        assert!((e.mean - 0.5).abs() < 1e-15);
        let expect = (0.25 * 100.0 / 99.0 / 100.0f64).sqrt();
        assert!((e.std_error - expect).abs() < 1e-12);
    }
}
