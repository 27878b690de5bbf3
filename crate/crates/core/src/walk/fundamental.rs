use serde::{Deserialize, Serialize};

use super::entropy::entropy_from_series;
use super::{convolution_series, estimate_drift, tree_harmonic, AsymptoticEstimate, WalkConfig, TREE_TOLERANCE};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::measure::{uniform_ball, FinMeasure, DEFAULT_CAP};
use crate::series::group_series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    /// Exact tree data for nearest-neighbor walks on tree-like groups,
    /// convolution increments otherwise.
    #[default]
    Auto,
    Convolution,
    ExactTree,
}

/// Computational budgets shared by the walk reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    /// Largest convolution power.
    pub n_max: usize,
    /// Support cap for convolutions.
    pub cap: usize,
    pub horizon: usize,
    pub replicas: usize,
    pub seed: u64,
    pub stride: usize,
    pub entropy_method: EntropyMethod,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            n_max: 12,
            cap: DEFAULT_CAP,
            horizon: 2000,
            replicas: 2000,
            seed: 1,
            stride: 500,
            entropy_method: EntropyMethod::Auto,
        }
    }
}

impl Budgets {
    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            horizon: self.horizon,
            replicas: self.replicas,
            seed: self.seed,
            stride: self.stride,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithEquality,
    Strict,
    /// Zero drift (or zero growth): the ratio is undefined.
    Undefined,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::ConsistentWithEquality => "consistent with equality",
            Verdict::Strict => "strict",
            Verdict::Undefined => "undefined",
        }
    }
}

/// ĥ, ℓ̂ and v with the ratio ĥ/(ℓ̂v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalReport {
    pub entropy: AsymptoticEstimate,
    pub drift: AsymptoticEstimate,
    pub v: f64,
    pub ratio: Option<f64>,
    /// Three standard errors of the ratio, propagated from the relative errors of ĥ and ℓ̂.
    pub ratio_uncertainty: Option<f64>,
    pub verdict: Verdict,
    /// Convergence notes (truncated convolutions, degenerate tree walks, growth flags).
    pub notes: Vec<String>,
}

/// Ratios within this distance of 1 count as equal when both estimates are exact.
const EXACT_SLACK: f64 = 1e-9;

pub fn fundamental_report(measure: &FinMeasure, budgets: &Budgets) -> Result<FundamentalReport> {
    let mut notes = Vec::new();
    let rate = group_series(measure.group()).growth_rate()?;
    if let Some(flag) = &rate.flag {
        notes.push(flag.clone());
    }

    let tree = match budgets.entropy_method {
        EntropyMethod::Convolution => None,
        EntropyMethod::ExactTree => Some(tree_harmonic(measure, TREE_TOLERANCE)?),
        EntropyMethod::Auto => match tree_harmonic(measure, TREE_TOLERANCE) {
            Ok(t) => Some(t),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        },
    };

    let (entropy, drift) = match &tree {
        Some(t) => {
            if t.degenerate {
                notes.push("recurrent walk: harmonic measure undefined, drift and entropy are 0".into());
            }
            (AsymptoticEstimate::exact(t.entropy), AsymptoticEstimate::exact(t.drift))
        }
        None => {
            let series = convolution_series(measure, budgets.n_max, budgets.cap);
            if let Some(why) = &series.stopped {
                if series.rows.is_empty() {
                    return Err(Error::PartialBudget {
                        what: why.clone(),
                        feasible: 0,
                    });
                }
                notes.push(format!("convolution stopped at n = {}: {why}", series.feasible_n()));
            }
            let entropy = entropy_from_series(&series).increment;
            (entropy, estimate_drift(measure, &budgets.walk_config())?)
        }
    };

    let (ratio, ratio_uncertainty, verdict) = if drift.value.abs() < 1e-12 || rate.v == 0.0 {
        (None, None, Verdict::Undefined)
    } else {
        let ratio = entropy.value / (drift.value * rate.v);
        let rel_h = if entropy.value != 0.0 {
            entropy.std_error / entropy.value.abs()
        } else {
            0.0
        };
        let rel_l = drift.std_error / drift.value.abs();
        let unc = 3.0 * ratio.abs() * rel_h.hypot(rel_l);
        let verdict = if (ratio - 1.0).abs() <= unc + EXACT_SLACK {
            Verdict::ConsistentWithEquality
        } else {
            Verdict::Strict
        };
        (Some(ratio), Some(unc), verdict)
    };

    Ok(FundamentalReport {
        entropy,
        drift,
        v: rate.v,
        ratio,
        ratio_uncertainty,
        verdict,
        notes,
    })
}

/// One radius of the uniform-ball experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub i: usize,
    pub ball_size: usize,
    /// Monte Carlo drift of ρ_i.
    pub drift: AsymptoticEstimate,
    /// Exact drift of the radial walk, on free groups.
    pub drift_exact: Option<f64>,
    /// ΔH_n at the largest feasible n.
    pub entropy: AsymptoticEstimate,
    pub n_used: usize,
    /// ĥ/ℓ̂ divided by v.
    pub ratio_over_v: Option<f64>,
    pub partial: bool,
}

/// Exact drift of a radial measure on a free group of rank r, given the mass
/// of each sphere. Far from the identity a uniform element of S_k cancels
/// j ≥ 1 letters with probability (1/2r)(1/(2r-1))^{j-1}, so |X_n| gains
/// k - 2E[cancellations] per step.
pub fn radial_drift_free(rank: usize, sphere_masses: &[f64]) -> f64 {
    let (p0, q) = (1.0 / (2 * rank) as f64, 1.0 / (2 * rank - 1) as f64);
    sphere_masses
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let cancel: f64 = (0..k).map(|j| p0 * q.powi(j as i32)).sum();
            m * (k as f64 - 2.0 * cancel)
        })
        .sum()
}

/// ℓ̂ and ĥ of the uniform measures ρ_i on balls of radius i. Every row uses
/// the same estimators: Monte Carlo drift and the convolution increment at the
/// largest n within the support cap.
pub fn balls_to_v_experiment(group: &GroupSpec, radii: &[usize], budgets: &Budgets) -> Result<Vec<BallRow>> {
    let v = group_series(group).growth_rate()?.v;
    let mut rows = Vec::with_capacity(radii.len());
    for &i in radii {
        let rho = uniform_ball(group, i, budgets.cap)?;
        let drift_exact = match group {
            GroupSpec::Free { rank } => Some(radial_drift_free(*rank, &rho.radial_profile().masses)),
            _ => None,
        };
        if i == 0 {
            let zero = AsymptoticEstimate::exact(0.0);
            rows.push(BallRow {
                i,
                ball_size: 1,
                drift: zero.clone(),
                drift_exact,
                entropy: zero,
                n_used: 0,
                ratio_over_v: None,
                partial: false,
            });
            continue;
        }
        let series = convolution_series(&rho, budgets.n_max, budgets.cap);
        let n_used = series.feasible_n();
        let entropy = entropy_from_series(&series).increment;
        let drift = estimate_drift(&rho, &budgets.walk_config())?;
        let ratio_over_v = (drift.value > 0.0 && v > 0.0).then(|| entropy.value / drift.value / v);
        rows.push(BallRow {
            i,
            ball_size: rho.len(),
            drift,
            drift_exact,
            entropy,
            n_used,
            ratio_over_v,
            partial: series.stopped.is_some(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{critical_product, simple_random_walk};
    use crate::walk::Method;

    fn quick() -> Budgets {
        Budgets {
            n_max: 8,
            cap: 1_000_000,
            horizon: 1000,
            replicas: 1000,
            ..Budgets::default()
        }
    }

    #[test]
    fn free_group_srw_is_equality() {
        let g = GroupSpec::free(2).unwrap();
        let r = fundamental_report(&simple_random_walk(&g), &quick()).unwrap();
        let ratio = r.ratio.unwrap();
        assert!((0.97..=1.03).contains(&ratio), "{ratio}");
        assert_eq!(r.verdict, Verdict::ConsistentWithEquality);
        assert_eq!(r.entropy.method, Method::ExactTree);
    }

    #[test]
    fn critical_product_is_equality() {
        let g = GroupSpec::free_product(vec![
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::cyclic(4).unwrap(),
        ])
        .unwrap();
        let m = critical_product(&g).unwrap();
        let r = fundamental_report(&m, &quick()).unwrap();
        let ratio = r.ratio.unwrap();
        assert!((0.98..=1.02).contains(&ratio), "{r:?}");
    }

    #[test]
    fn unbalanced_free_group_walk_is_strict() {
        let g = GroupSpec::free(2).unwrap();
        let atoms = [("a", 0.45), ("a^-1", 0.45), ("b", 0.05), ("b^-1", 0.05)];
        let m = FinMeasure::new(
            g.clone(),
            atoms.iter().map(|(w, p)| (g.parse_word(w).unwrap(), *p)).collect(),
        )
        .unwrap();
        let r = fundamental_report(&m, &quick()).unwrap();
        assert!(r.ratio.unwrap() + r.ratio_uncertainty.unwrap() < 1.0, "{r:?}");
        assert_eq!(r.verdict, Verdict::Strict);
    }

    #[test]
    fn zero_drift_is_undefined() {
        let z = GroupSpec::free(1).unwrap();
        let r = fundamental_report(&simple_random_walk(&z), &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Undefined);
        assert!(r.ratio.is_none());
    }

    #[test]
    fn radial_drift_values() {
        let g = GroupSpec::free(2).unwrap();
        let want = [0.0, 0.4, 18.0 / 17.0, 100.0 / 53.0];
        for (i, w) in want.iter().enumerate() {
            let rho = uniform_ball(&g, i, 1000).unwrap();
            let l = radial_drift_free(2, &rho.radial_profile().masses);
            assert!((l - w).abs() < 1e-12, "i={i}: {l}");
        }
        // Agrees with the exact tree drift where both apply.
        let t = tree_harmonic(&uniform_ball(&g, 1, 10).unwrap(), TREE_TOLERANCE).unwrap();
        assert!((t.drift - 0.4).abs() < 1e-12);
    }

    #[test]
    fn balls_rows() {
        let g = GroupSpec::free(2).unwrap();
        let b = Budgets {
            n_max: 6,
            cap: 200_000,
            horizon: 400,
            replicas: 400,
            ..Budgets::default()
        };
        let rows = balls_to_v_experiment(&g, &[0, 1, 2], &b).unwrap();
        assert_eq!(rows[0].drift.value, 0.0);
        assert!(rows[0].ratio_over_v.is_none());
        assert_eq!(rows[1].ball_size, 5);
        assert_eq!(rows[2].ball_size, 17);
        // ℓ(ρ₂) = 18/17.
        let d = &rows[2].drift;
        assert!((d.value - 18.0 / 17.0).abs() < 4.0 * d.std_error + 0.01, "{d:?}");
        assert!(rows[2].partial && rows[2].n_used >= 3);
    }
}
