use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decompose, LambdaFamily, SplitRule};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::measure::{uniform_on_set, FinMeasure};
use crate::walk::{fundamental_report, AsymptoticEstimate, Budgets};

/// Named one-parameter families ε ↦ μ_ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// F₂: (1−ε)·uniform{a,a⁻¹} + ε·uniform{b,b⁻¹}.
    FreeAxis,
    /// Z/2 * Z/4 with Σ = {a, b, b⁻¹}: (1−ε)δ_a + ε·uniform{b,b⁻¹}.
    FreeProductSigma,
    /// Z/2 × F₂: μ(0,e) = μ(1,e) = 1/2−ε−ε², μ(0,a^±) = ε, μ(0,b^±) = ε².
    DirectProduct,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FreeAxis => "free_axis",
            Family::FreeProductSigma => "free_product_sigma",
            Family::DirectProduct => "direct_product",
        }
    }

    pub fn group(self) -> GroupSpec {
        let f2 = || GroupSpec::free(2).expect("rank 2");
        let z = |n| GroupSpec::cyclic(n).expect("cyclic");
        match self {
            Family::FreeAxis => f2(),
            Family::FreeProductSigma => GroupSpec::free_product(vec![z(2), z(4)]).expect("two factors"),
            Family::DirectProduct => GroupSpec::direct_with_finite(z(2), f2()).expect("finite first factor"),
        }
    }

    pub fn measure(self, eps: f64) -> Result<FinMeasure> {
        let g = self.group();
        let p = |w: &str| g.parse_word(w);
        let range = match self {
            Family::DirectProduct => eps > 0.0 && eps + eps * eps < 0.5,
            _ => eps > 0.0 && eps < 1.0,
        };
        if !range {
            return Err(Error::Config(format!("ε = {eps} outside the range of {}", self.name())));
        }
        match self {
            Family::FreeAxis => FinMeasure::new(
                g.clone(),
                vec![(p("a")?, (1.0 - eps) / 2.0), (p("a^-1")?, (1.0 - eps) / 2.0), (p("b")?, eps / 2.0), (p("b^-1")?, eps / 2.0)],
            ),
            Family::FreeProductSigma => {
                FinMeasure::new(g.clone(), vec![(p("a")?, 1.0 - eps), (p("b")?, eps / 2.0), (p("b^-1")?, eps / 2.0)])
            }
            Family::DirectProduct => {
                let flip = g.generators().last().expect("finite generator").element.clone();
                let heavy = 0.5 - eps - eps * eps;
                FinMeasure::new(
                    g.clone(),
                    vec![
                        (g.identity(), heavy),
                        (flip, heavy),
                        (p("a")?, eps),
                        (p("a^-1")?, eps),
                        (p("b")?, eps * eps),
                        (p("b^-1")?, eps * eps),
                    ],
                )
            }
        }
    }
}

/// Family plus ε grid, as loaded from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub family: Family,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub eps: f64,
    pub entropy: Option<AsymptoticEstimate>,
    pub drift: Option<AsymptoticEstimate>,
    /// ĥ/ℓ̂.
    pub ratio: Option<f64>,
    /// ĥ/(ℓ̂v).
    pub ratio_over_v: Option<f64>,
    /// Three propagated standard errors of ĥ/ℓ̂.
    pub uncertainty: Option<f64>,
    pub error: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub family: String,
    pub v: Option<f64>,
    pub points: Vec<ScanPoint>,
    /// Each ratio lies below the previous one by more than both
    /// uncertainties; None when a point failed.
    pub strictly_decreasing: Option<bool>,
}

fn scan_point(mu: Result<FinMeasure>, eps: f64, budgets: &Budgets) -> (ScanPoint, Option<f64>) {
    let failed = |e: Error| ScanPoint {
        eps,
        entropy: None,
        drift: None,
        ratio: None,
        ratio_over_v: None,
        uncertainty: None,
        error: Some(e.to_string()),
        notes: Vec::new(),
    };
    let report = match mu.and_then(|m| fundamental_report(&m, budgets)) {
        Ok(r) => r,
        Err(e) => return (failed(e), None),
    };
    let ratio = report.ratio.map(|r| r * report.v);
    let point = ScanPoint {
        eps,
        ratio,
        ratio_over_v: report.ratio,
        uncertainty: report.ratio_uncertainty.map(|u| u * report.v),
        entropy: Some(report.entropy),
        drift: Some(report.drift),
        error: None,
        notes: report.notes,
    };
    (point, Some(report.v))
}

/// h/ℓ along a family, one fundamental report per grid point (in parallel,
/// each with the same seed). Failures are recorded per point.
pub fn ratio_scan<F>(name: &str, build: F, grid: &[f64], budgets: &Budgets) -> RatioScan
where
    F: Fn(f64) -> Result<FinMeasure> + Sync,
{
    let results: Vec<(ScanPoint, Option<f64>)> =
        grid.par_iter().map(|&eps| scan_point(build(eps), eps, budgets)).collect();
    let v = results.iter().find_map(|r| r.1);
    let points: Vec<ScanPoint> = results.into_iter().map(|r| r.0).collect();
    let strictly_decreasing = points
        .iter()
        .map(|p| Some((p.ratio?, p.uncertainty.unwrap_or(0.0))))
        .collect::<Option<Vec<_>>>()
        .map(|rs| rs.windows(2).all(|w| w[1].0 + w[1].1 < w[0].0 - w[0].1));
    RatioScan {
        family: name.to_string(),
        v,
        points,
        strictly_decreasing,
    }
}

/// The family's scan over `grid`.
pub fn family_scan(family: Family, grid: &[f64], budgets: &Budgets) -> RatioScan {
    ratio_scan(family.name(), |eps| family.measure(eps), grid, budgets)
}

/// μ_ε against the limit measure λ of the finite heavy-side case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub eps: f64,
    /// h/ℓ of μ_ε from its own report (exact on tree-like models).
    pub ratio_mu: f64,
    pub ratio_mu_uncertainty: f64,
    /// h/ℓ of μ_ε computed as h(λ_ε)/ℓ(λ_ε) with the estimator used for λ.
    pub ratio_via_lambda_eps: f64,
    pub ratio_via_lambda_eps_uncertainty: f64,
    /// h/ℓ of the limit λ, estimated directly.
    pub ratio_lambda: f64,
    pub ratio_lambda_uncertainty: f64,
    /// |ratio_mu − ratio_lambda| / ratio_lambda.
    pub relative_gap: f64,
    /// |ratio_via_lambda_eps − ratio_lambda| / ratio_lambda.
    pub relative_gap_same_estimator: f64,
    pub notes: Vec<String>,
}

fn ratio_of(m: &FinMeasure, budgets: &Budgets, notes: &mut Vec<String>, what: &str) -> Result<(f64, f64)> {
    let r = fundamental_report(m, budgets)?;
    notes.extend(r.notes.iter().map(|n| format!("{what}: {n}")));
    match (r.ratio, r.ratio_uncertainty) {
        (Some(x), Some(u)) => Ok((x * r.v, u * r.v)),
        _ => Err(Error::Degenerate(format!("{what}: zero drift"))),
    }
}

/// The Z/2 * Z/4 example: as ε → 0, h/ℓ of μ_ε = (1−ε)δ_a + ε·uniform{b,b⁻¹}
/// tends to h/ℓ of λ = uniform{b, b⁻¹, ab, ab⁻¹}.
///
/// λ_ε = Σ (1−ε)ⁿ ε aⁿβ is explicit, and h(μ_ε)/ℓ(μ_ε) = h(λ_ε)/ℓ(λ_ε),
/// so the ratio of μ_ε is also reported through λ_ε with the same
/// convolution and Monte Carlo estimator as λ.
pub fn free_product_sigma_limit(eps: f64, budgets: &Budgets) -> Result<LimitComparison> {
    let family = Family::FreeProductSigma;
    let g = family.group();
    let mu = family.measure(eps)?;
    let mut notes = Vec::new();
    let (ratio_mu, ratio_mu_uncertainty) = ratio_of(&mu, budgets, &mut notes, "μ_ε")?;

    let fam = LambdaFamily::new(decompose(&mu, &SplitRule::default())?)?;
    let t = fam.truncated(budgets.cap)?;
    let lambda_eps = t.normalized(&g)?;
    notes.push(format!("λ_ε truncated at block length {} (deficit {:.3e})", t.truncation, t.deficit));
    let (ratio_via_lambda_eps, ratio_via_lambda_eps_uncertainty) =
        ratio_of(&lambda_eps, budgets, &mut notes, "λ_ε")?;

    let p = |w: &str| g.parse_word(w);
    let lambda = uniform_on_set(&g, vec![p("b")?, p("b^-1")?, p("a b")?, p("a b^-1")?])?;
    let (ratio_lambda, ratio_lambda_uncertainty) = ratio_of(&lambda, budgets, &mut notes, "λ")?;
    Ok(LimitComparison {
        eps,
        ratio_mu,
        ratio_mu_uncertainty,
        ratio_via_lambda_eps,
        ratio_via_lambda_eps_uncertainty,
        ratio_lambda,
        ratio_lambda_uncertainty,
        relative_gap: (ratio_mu - ratio_lambda).abs() / ratio_lambda,
        relative_gap_same_estimator: (ratio_via_lambda_eps - ratio_lambda).abs() / ratio_lambda,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_probability_measures() {
        for f in [Family::FreeAxis, Family::FreeProductSigma, Family::DirectProduct] {
            for eps in [0.2, 0.05] {
                assert!((f.measure(eps).unwrap().total_mass() - 1.0).abs() < 1e-12);
            }
            assert!(f.measure(0.0).is_err());
        }
        assert!(Family::DirectProduct.measure(0.45).is_err());
    }

    #[test]
    fn free_axis_scan_uses_exact_ratios() {
        let s = family_scan(Family::FreeAxis, &[0.4, 0.1, 0.025], &Budgets::default());
        let r: Vec<f64> = s.points.iter().map(|p| p.ratio.unwrap()).collect();
        for (x, want) in r.iter().zip([1.0921, 0.9200, 0.6744]) {
            assert!((x - want).abs() < 5e-4, "{r:?}");
        }
        assert_eq!(s.strictly_decreasing, Some(true));
        assert!((s.v.unwrap() - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn direct_product_scan_decreases() {
        let s = family_scan(Family::DirectProduct, &[0.2, 0.05], &Budgets::default());
        assert_eq!(s.strictly_decreasing, Some(true), "{:?}", s.points);
    }

    #[test]
    fn failed_points_are_recorded() {
        let s = family_scan(Family::DirectProduct, &[0.2, 0.49], &Budgets::default());
        assert!(s.points[1].error.is_some());
        assert_eq!(s.strictly_decreasing, None);
    }

    #[test]
    fn config_round_trip() {
        let c = FamilyConfig {
            family: Family::FreeProductSigma,
            grid: vec![0.2, 0.05],
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("free_product_sigma"));
        assert_eq!(serde_json::from_str::<FamilyConfig>(&text).unwrap(), c);
    }
}
