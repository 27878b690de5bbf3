use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::Decomposition;
use crate::error::{Error, Result};
use crate::group::Element;
use crate::measure::FinMeasure;
use crate::walk::{
    convolution_series, estimate_drift, replica_rng, simulate_drift, tree_harmonic, AsymptoticEstimate, AtomSampler,
    Budgets, EntropyMethod, WalkConfig, TREE_TOLERANCE,
};

/// Mass deficit allowed at the truncation of the explicit λ_ε.
pub const LAMBDA_DEFICIT: f64 = 1e-6;

/// Block-jump measure λ_ε = Σ_n (1−ε)ⁿ ε α^{*n} * β of a decomposition:
/// the law of the position of the walk at the first β-step.
#[derive(Debug, Clone)]
pub struct LambdaFamily {
    pub decomposition: Decomposition,
    alpha: AtomSampler,
    beta: AtomSampler,
    geometric: Option<Geometric>,
}

/// λ_ε truncated at block length `truncation`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLambda {
    pub atoms: Vec<(Element, f64)>,
    /// 1 − total mass.
    pub deficit: f64,
    pub truncation: usize,
}

impl LambdaFamily {
    pub fn new(decomposition: Decomposition) -> Result<Self> {
        let eps = decomposition.eps;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Config(format!("ε = {eps} outside (0, 1]")));
        }
        let geometric = if eps < 1.0 {
            Some(Geometric::new(eps).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            alpha: AtomSampler::new(&decomposition.alpha),
            beta: AtomSampler::new(&decomposition.beta),
            decomposition,
            geometric,
        })
    }

    pub fn eps(&self) -> f64 {
        self.decomposition.eps
    }

    /// Draws one λ_ε increment and right-multiplies it into `x`. Returns the
    /// number of μ-steps in the block (geometric with mean 1/ε).
    pub fn sample_block<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut Element) -> u64 {
        let group = self.decomposition.alpha.group();
        let n = self.geometric.map_or(0, |g| g.sample(rng));
        for _ in 0..n {
            group.mul_assign(x, self.alpha.sample(rng));
        }
        group.mul_assign(x, self.beta.sample(rng));
        n + 1
    }

    /// Mean and standard error of the block length over `blocks` draws.
    pub fn block_length_stats(&self, blocks: usize, seed: u64) -> (f64, f64) {
        let mut rng = replica_rng(seed, 0);
        let mut x = self.decomposition.alpha.group().identity();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..blocks {
            let k = self.sample_block(&mut rng, &mut x) as f64;
            x = self.decomposition.alpha.group().identity();
            s += k;
            s2 += k * k;
        }
        let n = blocks as f64;
        let mean = s / n;
        let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }

    /// Smallest block length K with ε·Σ_{n≤K}(1−ε)ⁿ ≥ 1 − 10⁻⁶, and at least ⌈10/ε⌉.
    pub fn truncation(&self) -> usize {
        let eps = self.eps();
        if eps >= 1.0 {
            return 0;
        }
        let k = (LAMBDA_DEFICIT.ln() / (1.0 - eps).ln()).ceil() as usize;
        k.max((10.0 / eps).ceil() as usize)
    }

    /// Explicit λ_ε up to the truncation; fails if an intermediate power exceeds `cap`.
    pub fn truncated(&self, cap: usize) -> Result<TruncatedLambda> {
        let eps = self.eps();
        let d = &self.decomposition;
        let k_max = self.truncation();
        let mut acc: FxHashMap<Element, f64> = FxHashMap::default();
        let mut power = FinMeasure::point(d.alpha.group(), d.alpha.group().identity())?;
        let mut weight = eps;
        for k in 0..=k_max {
            for (x, m) in power.convolve(&d.beta, cap)?.atoms() {
                *acc.entry(x.clone()).or_default() += weight * m;
            }
            if k < k_max {
                power = power.convolve(&d.alpha, cap)?;
                weight *= 1.0 - eps;
            }
        }
        let mut atoms: Vec<(Element, f64)> = acc.into_iter().collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let total: f64 = atoms.iter().map(|(_, m)| m).sum();
        Ok(TruncatedLambda {
            atoms,
            deficit: (1.0 - total).max(0.0),
            truncation: k_max,
        })
    }
}

impl TruncatedLambda {
    /// The truncated measure rescaled to total mass 1.
    pub fn normalized(&self, group: &crate::group::GroupSpec) -> Result<FinMeasure> {
        let total = 1.0 - self.deficit;
        FinMeasure::new(group.clone(), self.atoms.iter().map(|(x, m)| (x.clone(), m / total)).collect())
    }
}

/// Both sides of ℓ(μ_ε) = ε ℓ(λ_ε) and h(μ_ε) = ε h(λ_ε).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaStats {
    pub eps: f64,
    pub drift_mu: AsymptoticEstimate,
    pub drift_lambda: AsymptoticEstimate,
    /// ℓ̂(μ_ε) − ε ℓ̂(λ_ε).
    pub drift_gap: f64,
    /// Standard error of the gap.
    pub drift_gap_se: f64,
    pub entropy_mu: Option<AsymptoticEstimate>,
    pub entropy_lambda: Option<AsymptoticEstimate>,
    pub mean_block: f64,
    pub mean_block_se: f64,
    pub truncation: Option<usize>,
    pub deficit: Option<f64>,
    pub notes: Vec<String>,
}

/// Explicit λ_ε is only built (and convolved) below this support size.
const EXPLICIT_LIMIT: usize = 50_000;

/// Blocks drawn for the block-length check.
const BLOCK_SAMPLES: usize = 100_000;

fn entropy_estimate(m: &FinMeasure, budgets: &Budgets, notes: &mut Vec<String>, what: &str) -> Option<AsymptoticEstimate> {
    if budgets.entropy_method != EntropyMethod::Convolution {
        if let Ok(t) = tree_harmonic(m, TREE_TOLERANCE) {
            return Some(AsymptoticEstimate::exact(t.entropy));
        }
    }
    // Work per step is support × atoms, so wide measures get a smaller support cap.
    let cap = (budgets.cap / m.len()).max(m.len());
    let series = convolution_series(m, budgets.n_max, cap);
    if let Some(why) = &series.stopped {
        notes.push(format!("{what}: convolution stopped at n = {}: {why}", series.feasible_n()));
    }
    let rows = &series.rows;
    let last = rows.last()?;
    let se = if rows.len() > 1 {
        (last.entropy_increment - rows[rows.len() - 2].entropy_increment).abs()
    } else {
        f64::NAN
    };
    Some(AsymptoticEstimate {
        value: last.entropy_increment,
        std_error: se,
        method: crate::walk::Method::ConvolutionIncrement,
        table: Vec::new(),
    })
}

/// Monte Carlo drifts of μ_ε (horizon T) and of λ_ε (horizon ⌈εT⌉ blocks,
/// the same expected number of μ-steps), entropies where computable, and
/// the block-length statistics.
pub fn lambda_stats(mu: &FinMeasure, fam: &LambdaFamily, budgets: &Budgets) -> Result<LambdaStats> {
    let eps = fam.eps();
    let mut notes = Vec::new();
    let cfg = budgets.walk_config();
    let drift_mu = estimate_drift(mu, &cfg)?;
    let lambda_cfg = WalkConfig {
        horizon: ((cfg.horizon as f64 * eps).ceil() as usize).max(1),
        stride: 0,
        ..cfg
    };
    let drift_lambda = simulate_drift(mu.group(), &lambda_cfg, |rng, x| {
        fam.sample_block(rng, x);
    })?;
    let drift_gap = drift_mu.value - eps * drift_lambda.value;
    let drift_gap_se = drift_mu.std_error.hypot(eps * drift_lambda.std_error);

    let entropy_mu = entropy_estimate(mu, budgets, &mut notes, "μ_ε");
    let (entropy_lambda, truncation, deficit) = match fam.truncated(EXPLICIT_LIMIT.min(budgets.cap)) {
        Ok(t) if t.atoms.len() <= EXPLICIT_LIMIT => {
            let lambda = t.normalized(mu.group())?;
            let h = entropy_estimate(&lambda, budgets, &mut notes, "λ_ε");
            (h, Some(t.truncation), Some(t.deficit))
        }
        Ok(t) => {
            notes.push(format!("explicit λ_ε has {} atoms; entropy not estimated", t.atoms.len()));
            (None, Some(t.truncation), Some(t.deficit))
        }
        Err(e) => {
            notes.push(format!("explicit λ_ε not built: {e}"));
            (None, None, None)
        }
    };
    let (mean_block, mean_block_se) = fam.block_length_stats(BLOCK_SAMPLES, budgets.seed);
    Ok(LambdaStats {
        eps,
        drift_mu,
        drift_lambda,
        drift_gap,
        drift_gap_se,
        entropy_mu,
        entropy_lambda,
        mean_block,
        mean_block_se,
        truncation,
        deficit,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degenerate::{decompose, SplitRule};
    use crate::group::GroupSpec;
    use crate::measure::interpolation;

    fn axis(eps: f64) -> FinMeasure {
        let g = GroupSpec::free(2).unwrap();
        let p = |w: &str| g.parse_word(w).unwrap();
        let a = crate::measure::uniform_on_set(&g, vec![p("a"), p("a^-1")]).unwrap();
        let b = crate::measure::uniform_on_set(&g, vec![p("b"), p("b^-1")]).unwrap();
        interpolation(&a, &b, eps).unwrap()
    }

    fn family(eps: f64) -> (FinMeasure, LambdaFamily) {
        let mu = axis(eps);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        (mu, LambdaFamily::new(d).unwrap())
    }

    #[test]
    fn truncation_and_deficit() {
        let (_, fam) = family(0.1);
        assert_eq!(fam.truncation(), 132);
        let t = fam.truncated(1_000_000).unwrap();
        assert!(t.deficit < LAMBDA_DEFICIT);
        assert!(t.deficit > 0.0);
    }

    #[test]
    fn block_lengths_are_geometric() {
        let (_, fam) = family(0.1);
        let (mean, se) = fam.block_length_stats(100_000, 5);
        assert!((mean - 10.0).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn sampler_matches_truncated_measure() {
        let (mu, fam) = family(0.25);
        let t = fam.truncated(1_000_000).unwrap();
        let mut heavy = t.atoms.clone();
        heavy.sort_by(|a, b| b.1.total_cmp(&a.1));
        heavy.truncate(20);
        let draws = 200_000;
        let mut counts: FxHashMap<Element, usize> = FxHashMap::default();
        let mut rng = replica_rng(11, 0);
        for _ in 0..draws {
            let mut x = mu.group().identity();
            fam.sample_block(&mut rng, &mut x);
            *counts.entry(x).or_default() += 1;
        }
        for (x, p) in heavy {
            let f = counts.get(&x).copied().unwrap_or(0) as f64 / draws as f64;
            let sd = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() < 3.0 * sd + 1e-6, "{x:?}: {f} vs {p}");
        }
    }

    #[test]
    fn eps_one_is_beta() {
        let mu = axis(0.1);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        let beta = d.beta.clone();
        let fam = LambdaFamily::new(Decomposition { eps: 1.0, ..d }).unwrap();
        let t = fam.truncated(1000).unwrap();
        assert_eq!(t.atoms, beta.atoms().to_vec());
        assert_eq!(t.deficit, 0.0);
        let budgets = Budgets {
            horizon: 200,
            replicas: 200,
            ..Budgets::default()
        };
        let stats = lambda_stats(&beta, &fam, &budgets).unwrap();
        let plain = estimate_drift(&beta, &budgets.walk_config()).unwrap();
        assert_eq!(stats.drift_lambda.value, plain.value);
        assert_eq!(stats.mean_block, 1.0);
    }

    #[test]
    fn drift_identity() {
        let (mu, fam) = family(0.1);
        let budgets = Budgets {
            horizon: 4000,
            replicas: 1000,
            seed: 9,
            ..Budgets::default()
        };
        let s = lambda_stats(&mu, &fam, &budgets).unwrap();
        assert!(s.drift_gap.abs() < 3.0 * s.drift_gap_se, "{} ± {}", s.drift_gap, s.drift_gap_se);
        let (h_mu, h_lambda) = (s.entropy_mu.unwrap().value, s.entropy_lambda.unwrap().value);
        assert!(h_mu > 0.0 && h_lambda > 0.0);
    }

    #[test]
    fn virtually_cyclic_scaling() {
        let budgets = Budgets {
            horizon: 400,
            replicas: 400,
            seed: 2,
            ..Budgets::default()
        };
        let scaled: Vec<f64> = [0.1, 0.01]
            .iter()
            .map(|&eps| {
                let (mu, fam) = family(eps);
                let cfg = WalkConfig {
                    horizon: budgets.horizon,
                    stride: 0,
                    ..budgets.walk_config()
                };
                let d = simulate_drift(mu.group(), &cfg, |rng, x| {
                    fam.sample_block(rng, x);
                })
                .unwrap();
                d.value * eps.sqrt()
            })
            .collect();
        let r = scaled[0] / scaled[1];
        assert!((0.5..=2.0).contains(&r), "{scaled:?}");
    }
}
