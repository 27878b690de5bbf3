use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replica_rng, AsymptoticEstimate, AtomSampler, EstimateRow, Method};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::measure::FinMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Number of steps T.
    pub horizon: usize,
    /// Number of independent replicas N.
    pub replicas: usize,
    pub seed: u64,
    /// Checkpoint stride for the convergence table; 0 keeps only the horizon.
    pub stride: usize,
}

impl WalkConfig {
    fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.replicas == 0 {
            return Err(Error::Config("horizon and replicas must be positive".into()));
        }
        Ok(())
    }

    fn checkpoints(&self) -> Vec<usize> {
        let mut cps: Vec<usize> = if self.stride == 0 {
            Vec::new()
        } else {
            (1..)
                .map(|k| k * self.stride)
                .take_while(|&n| n < self.horizon)
                .collect()
        };
        cps.push(self.horizon);
        cps
    }
}

/// Drift ℓ̂ = mean of |X_T|/T over replicas, X_T = g_1⋯g_T with g_i ~ μ.
pub fn estimate_drift(measure: &FinMeasure, cfg: &WalkConfig) -> Result<AsymptoticEstimate> {
    let sampler = AtomSampler::new(measure);
    simulate_drift(measure.group(), cfg, |rng, x| {
        measure.group().mul_assign(x, sampler.sample(rng))
    })
}

/// Drift of a walk whose increments are produced by `step`, which right-multiplies
/// the current position in place. Replica `r` uses [`replica_rng`]`(seed, r)`.
pub fn simulate_drift<F>(group: &GroupSpec, cfg: &WalkConfig, step: F) -> Result<AsymptoticEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut Element) + Sync,
{
    cfg.validate()?;
    let cps = cfg.checkpoints();
    let lengths: Vec<Vec<u64>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(cfg.seed, r);
            let mut x = group.identity();
            let mut out = Vec::with_capacity(cps.len());
            let mut t = 0;
            for &cp in &cps {
                while t < cp {
                    step(&mut rng, &mut x);
                    t += 1;
                }
                out.push(group.word_length(&x) as u64);
            }
            out
        })
        .collect();

    let n = cfg.replicas as f64;
    let table: Vec<EstimateRow> = cps
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let vals = lengths.iter().map(|l| l[k] as f64 / t as f64);
            let mean = vals.clone().sum::<f64>() / n;
            let var = if cfg.replicas > 1 {
                vals.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            EstimateRow {
                n: t,
                value: mean,
                std_error: (var / n).sqrt(),
            }
        })
        .collect();
    let last = *table.last().expect("at least the horizon checkpoint");
    Ok(AsymptoticEstimate {
        value: last.value,
        std_error: last.std_error,
        method: Method::MonteCarlo,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::simple_random_walk;

    fn cfg(horizon: usize, replicas: usize) -> WalkConfig {
        WalkConfig {
            horizon,
            replicas,
            seed: 7,
            stride: horizon / 4,
        }
    }

    #[test]
    fn deterministic_walk_on_z() {
        let z = GroupSpec::free(1).unwrap();
        let m = FinMeasure::point(&z, z.parse_word("a").unwrap()).unwrap();
        let est = estimate_drift(&m, &cfg(100, 10)).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.table.len(), 4);
    }

    #[test]
    fn biased_z_walk() {
        let z = GroupSpec::free(1).unwrap();
        let m = FinMeasure::new(
            z.clone(),
            vec![(z.parse_word("a").unwrap(), 0.8), (z.parse_word("a^-1").unwrap(), 0.2)],
        )
        .unwrap();
        let est = estimate_drift(&m, &cfg(2000, 500)).unwrap();
        assert!((est.value - 0.6).abs() < 0.01, "{est:?}");
    }

    #[test]
    fn free_group_srw_and_reproducibility() {
        let g = GroupSpec::free(2).unwrap();
        let m = simple_random_walk(&g);
        let a = estimate_drift(&m, &cfg(1000, 400)).unwrap();
        let b = estimate_drift(&m, &cfg(1000, 400)).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 0.5).abs() < 4.0 * a.std_error + 1e-3, "{a:?}");
    }
}
