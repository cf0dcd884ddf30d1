use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of innate opinions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpinionDistribution {
    /// Normal with the given mean and variance, clamped to `[0, 1]`.
    ClippedNormal { mean: f64, variance: f64 },
    Uniform { low: f64, high: f64 },
    Exponential { rate: f64 },
}

impl Default for OpinionDistribution {
    fn default() -> Self {
        OpinionDistribution::ClippedNormal {
            mean: 0.5,
            variance: 0.5,
        }
    }
}

/// I.i.d. innate opinions, deterministic in `seed`.
pub fn sample_opinions(n: usize, dist: &OpinionDistribution, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(format!("{dist:?}: {e}"));
    let values = match *dist {
        OpinionDistribution::ClippedNormal { mean, variance } => {
            if !(variance >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative variance {variance}")));
            }
            let normal = Normal::new(mean, variance.sqrt()).map_err(|e| bad(&e))?;
            (0..n).map(|_| normal.sample(&mut rng).clamp(0.0, 1.0)).collect()
        }
        OpinionDistribution::Uniform { low, high } => {
            let uniform = Uniform::new_inclusive(low, high).map_err(|e| bad(&e))?;
            (0..n).map(|_| uniform.sample(&mut rng)).collect()
        }
        OpinionDistribution::Exponential { rate } => {
            let exp = Exp::new(rate).map_err(|e| bad(&e))?;
            (0..n).map(|_| exp.sample(&mut rng)).collect()
        }
    };
    Ok(values)
}
