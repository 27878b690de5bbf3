use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::census::StallingsGraph;
use crate::error::{Error, Result};
use crate::group::{Element, Factor, GroupSpec, Part, Word};
use crate::measure::FinMeasure;

/// Default mass-ratio factor below which an automatic split is flagged as weak.
pub const DEFAULT_GAP: f64 = 20.0;

/// Atoms of α lighter than this after the lazy recipe are dropped.
const ALPHA_FLOOR: f64 = 1e-15;

/// Type of the subgroup generated by a finite set of elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupKind {
    Finite,
    VirtuallyCyclic,
    NonElementary,
}

impl SubgroupKind {
    pub fn is_elementary(self) -> bool {
        self != SubgroupKind::NonElementary
    }
}

/// Classifies ⟨elements⟩ by normal-form inspection.
///
/// Free groups: rank of the Stallings graph (0, 1 or more). Free products:
/// subgroups of a single factor, pairs of involutions (infinite dihedral)
/// and cyclic subgroups ⟨g⟩ are recognized; anything else is reported as
/// non-elementary. Direct products with a finite group are classified by
/// their projection to the base.
pub fn classify_generated(group: &GroupSpec, elements: &[Element]) -> SubgroupKind {
    let gens: Vec<&Element> = elements.iter().filter(|x| !group.is_identity(x)).collect();
    if gens.is_empty() {
        return SubgroupKind::Finite;
    }
    match group {
        GroupSpec::Finite(_) => SubgroupKind::Finite,
        GroupSpec::DirectWithFinite { base, .. } => {
            let projected: Vec<Element> = gens
                .iter()
                .map(|x| match x {
                    Element::Direct(_, b) => (**b).clone(),
                    _ => unreachable!("validated direct-product element"),
                })
                .collect();
            classify_generated(base, &projected)
        }
        GroupSpec::Free { rank } => free_kind(
            *rank,
            gens.iter()
                .map(|x| match x {
                    Element::Free(w) => w.clone(),
                    _ => unreachable!("validated free-group element"),
                })
                .collect(),
        ),
        GroupSpec::FreeProduct(factors) => product_kind(group, factors, &gens),
    }
}

fn free_kind(rank: usize, words: Vec<Word>) -> SubgroupKind {
    match StallingsGraph::fold(rank, &words).basis().len() {
        0 => SubgroupKind::Finite,
        1 => SubgroupKind::VirtuallyCyclic,
        _ => SubgroupKind::NonElementary,
    }
}

fn product_kind(group: &GroupSpec, factors: &[Factor], gens: &[&Element]) -> SubgroupKind {
    let single: Option<Vec<(u16, &Part)>> = gens
        .iter()
        .map(|x| match x {
            Element::Product(s) if s.len() == 1 => Some((s[0].factor, &s[0].part)),
            _ => None,
        })
        .collect();
    if let Some(parts) = &single {
        let f = parts[0].0;
        if parts.iter().all(|(g, _)| *g == f) {
            return match &factors[f as usize] {
                Factor::Finite(_) => SubgroupKind::Finite,
                Factor::Free { rank } => free_kind(
                    *rank,
                    parts
                        .iter()
                        .map(|(_, p)| match p {
                            Part::Free(w) => w.clone(),
                            Part::Finite(_) => unreachable!("free factor"),
                        })
                        .collect(),
                ),
            };
        }
        let distinct: BTreeSet<&Element> = gens.iter().copied().collect();
        if distinct.len() == 2 && gens.iter().all(|x| group.is_identity(&group.mul_unchecked(x, x))) {
            return SubgroupKind::VirtuallyCyclic;
        }
    }
    let g = gens[0];
    let g_inv = group.inv_unchecked(g);
    if gens.iter().all(|x| *x == g || **x == g_inv) {
        // Torsion elements are conjugate into a finite factor, so their order divides its order.
        let max_order = factors
            .iter()
            .map(|f| match f {
                Factor::Finite(h) => h.order(),
                Factor::Free { .. } => 1,
            })
            .max()
            .unwrap_or(1);
        let torsion = (1..=max_order as i64).any(|k| group.is_identity(&group.power(g, k)));
        return if torsion {
            SubgroupKind::Finite
        } else {
            SubgroupKind::VirtuallyCyclic
        };
    }
    SubgroupKind::NonElementary
}

/// How to separate the support into a heavy (elementary) side and a rare side.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitRule {
    /// The listed atoms form the heavy side.
    Explicit { heavy: Vec<Element> },
    /// Largest mass-ratio gap whose heavy side generates an elementary subgroup.
    Automatic { gap: f64 },
}

impl Default for SplitRule {
    fn default() -> Self {
        SplitRule::Automatic { gap: DEFAULT_GAP }
    }
}

/// μ = (1−ε)α + εβ with α supported on an elementary subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub eps: f64,
    pub alpha: FinMeasure,
    pub beta: FinMeasure,
    /// Subgroup generated by the heavy side.
    pub heavy: SubgroupKind,
    /// True when β = (δ_e + β⁰)/2 was used (finite heavy side with enough mass at e).
    pub lazy_recipe: bool,
    /// Mass ratio across the automatic split.
    pub gap: Option<f64>,
    /// The automatic split's ratio is below the configured factor.
    pub weak_gap: bool,
}

impl Decomposition {
    /// (1−ε)α + εβ atom by atom.
    pub fn reconstruct(&self) -> Vec<(Element, f64)> {
        let mut atoms: Vec<(Element, f64)> = self
            .alpha
            .atoms()
            .iter()
            .map(|(x, m)| (x.clone(), (1.0 - self.eps) * m))
            .chain(self.beta.atoms().iter().map(|(x, m)| (x.clone(), self.eps * m)))
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Element, f64)> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            match out.last_mut() {
                Some((y, w)) if *y == x => *w += m,
                _ => out.push((x, m)),
            }
        }
        out
    }

    /// Largest atomwise difference between μ and the reconstruction.
    pub fn reconstruction_error(&self, mu: &FinMeasure) -> f64 {
        let rec = self.reconstruct();
        let mut err = rec.iter().map(|(x, m)| (m - mu.mass(x)).abs()).fold(0.0, f64::max);
        for (x, m) in mu.atoms() {
            if rec.binary_search_by(|(y, _)| y.cmp(x)).is_err() {
                err = err.max(*m);
            }
        }
        err
    }
}

/// Splits μ into a near-elementary part and a rare part.
///
/// Fails with `Error::Degenerate` when the rare side is empty (ε undefined,
/// e.g. a point mass) or when no heavy side generates an elementary
/// subgroup (the measure is not near-degenerate).
pub fn decompose(mu: &FinMeasure, rule: &SplitRule) -> Result<Decomposition> {
    let group = mu.group();
    let mut atoms: Vec<(Element, f64)> = mu.atoms().to_vec();
    atoms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let (k, heavy, gap, weak_gap) = match rule {
        SplitRule::Explicit { heavy } => {
            for x in heavy {
                if mu.mass(x) == 0.0 {
                    return Err(Error::Config(format!(
                        "{} is not an atom of the measure",
                        group.format_element(x)
                    )));
                }
            }
            let set: BTreeSet<&Element> = heavy.iter().collect();
            atoms.sort_by_key(|(x, _)| !set.contains(x));
            let kind = classify_generated(group, heavy);
            if !kind.is_elementary() {
                return Err(Error::Degenerate("the heavy side generates a non-elementary subgroup".into()));
            }
            (set.len(), kind, None, false)
        }
        SplitRule::Automatic { gap } => {
            let mut best: Option<(f64, usize, SubgroupKind)> = None;
            for k in 1..atoms.len() {
                let ratio = atoms[k - 1].1 / atoms[k].1;
                if ratio <= 1.0 + 1e-12 || best.is_some_and(|(r, _, _)| r >= ratio) {
                    continue;
                }
                let side: Vec<Element> = atoms[..k].iter().map(|(x, _)| x.clone()).collect();
                let kind = classify_generated(group, &side);
                if kind.is_elementary() {
                    best = Some((ratio, k, kind));
                }
            }
            let Some((ratio, k, kind)) = best else {
                return Err(Error::Degenerate(if atoms.len() == 1 {
                    "point mass: no rare part, ε undefined".into()
                } else {
                    "no mass gap with an elementary heavy side; the measure is not near-degenerate".into()
                }));
            };
            (k, kind, Some(ratio), ratio < *gap)
        }
    };
    if k == atoms.len() {
        return Err(Error::Degenerate("no rare part, ε undefined".into()));
    }

    let eps0: f64 = atoms[k..].iter().map(|(_, m)| m).sum();
    let heavy_atoms: Vec<(Element, f64)> = atoms[..k].iter().map(|(x, m)| (x.clone(), m / (1.0 - eps0))).collect();
    let beta0: Vec<(Element, f64)> = atoms[k..].iter().map(|(x, m)| (x.clone(), m / eps0)).collect();
    let e = group.identity();
    let mass_e = mu.mass(&e);
    let in_heavy = atoms[..k].iter().any(|(x, _)| *x == e);

    let recipe = heavy == SubgroupKind::Finite && in_heavy && mass_e >= eps0 && 2.0 * eps0 < 1.0;
    let d = if recipe {
        // μ = (1−2ε₀)α + 2ε₀(δ_e + β⁰)/2, where α takes the mass ε₀ away from e.
        let eps = 2.0 * eps0;
        let alpha: Vec<(Element, f64)> = atoms[..k]
            .iter()
            .map(|(x, m)| (x.clone(), (m - if *x == e { eps0 } else { 0.0 }) / (1.0 - eps)))
            .filter(|(_, m)| *m > ALPHA_FLOOR)
            .collect();
        let beta: Vec<(Element, f64)> = std::iter::once((e, 0.5))
            .chain(beta0.into_iter().map(|(x, m)| (x, m / 2.0)))
            .collect();
        Decomposition {
            eps,
            alpha: FinMeasure::new(group.clone(), alpha)?,
            beta: FinMeasure::new(group.clone(), beta)?,
            heavy,
            lazy_recipe: true,
            gap,
            weak_gap,
        }
    } else {
        Decomposition {
            eps: eps0,
            alpha: FinMeasure::new(group.clone(), heavy_atoms)?,
            beta: FinMeasure::new(group.clone(), beta0)?,
            heavy,
            lazy_recipe: false,
            gap,
            weak_gap,
        }
    };
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measure(g: &GroupSpec, atoms: &[(&str, f64)]) -> FinMeasure {
        FinMeasure::new(g.clone(), atoms.iter().map(|(w, m)| (g.parse_word(w).unwrap(), *m)).collect()).unwrap()
    }

    fn z2_star_z4() -> GroupSpec {
        GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()]).unwrap()
    }

    #[test]
    fn free_axis_is_virtually_cyclic() {
        let g = GroupSpec::free(2).unwrap();
        let mu = measure(&g, &[("a", 0.45), ("a^-1", 0.45), ("b", 0.05), ("b^-1", 0.05)]);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        assert_eq!(d.heavy, SubgroupKind::VirtuallyCyclic);
        assert!((d.eps - 0.1).abs() < 1e-12);
        assert!((d.alpha.mass(&g.parse_word("a").unwrap()) - 0.5).abs() < 1e-12);
        assert!(!d.lazy_recipe);
        assert!(d.reconstruction_error(&mu) < 1e-12);
    }

    #[test]
    fn point_mass_has_no_rare_part() {
        let g = z2_star_z4();
        let mu = FinMeasure::point(&g, g.parse_word("a").unwrap()).unwrap();
        assert!(matches!(decompose(&mu, &SplitRule::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn finite_heavy_side_without_mass_at_e() {
        let g = z2_star_z4();
        let mu = measure(&g, &[("a", 0.9), ("b", 0.05), ("b^-1", 0.05)]);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        assert_eq!(d.heavy, SubgroupKind::Finite);
        assert!(!d.lazy_recipe);
        assert!((d.eps - 0.1).abs() < 1e-12);
        assert_eq!(d.alpha.len(), 1);
        assert!(d.reconstruction_error(&mu) < 1e-12);
    }

    #[test]
    fn lazy_recipe_with_mass_at_e() {
        let g = z2_star_z4();
        let mu = measure(&g, &[("", 0.3), ("a", 0.6), ("b", 0.05), ("b^-1", 0.05)]);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        assert!(d.lazy_recipe);
        assert!((d.eps - 0.2).abs() < 1e-12);
        assert!(d.beta.mass(&g.identity()) >= 0.5);
        assert!(d.reconstruction_error(&mu) < 1e-12);
    }

    #[test]
    fn uniform_measure_is_not_near_degenerate() {
        let g = GroupSpec::free(2).unwrap();
        let mu = crate::measure::simple_random_walk(&g);
        assert!(matches!(decompose(&mu, &SplitRule::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn explicit_split() {
        let g = GroupSpec::free(2).unwrap();
        let mu = measure(&g, &[("a", 0.3), ("a^-1", 0.3), ("b", 0.2), ("b^-1", 0.2)]);
        let heavy = vec![g.parse_word("b").unwrap(), g.parse_word("b^-1").unwrap()];
        let d = decompose(&mu, &SplitRule::Explicit { heavy }).unwrap();
        assert!((d.eps - 0.6).abs() < 1e-12);
        assert!(d.reconstruction_error(&mu) < 1e-12);
        let bad = vec![g.parse_word("a").unwrap(), g.parse_word("b").unwrap()];
        assert!(decompose(&mu, &SplitRule::Explicit { heavy: bad }).is_err());
    }

    #[test]
    fn weak_gaps_are_flagged() {
        let g = GroupSpec::free(2).unwrap();
        let mu = measure(&g, &[("a", 0.45), ("a^-1", 0.45), ("b", 0.05), ("b^-1", 0.05)]);
        let d = decompose(&mu, &SplitRule::default()).unwrap();
        assert!((d.gap.unwrap() - 9.0).abs() < 1e-9);
        assert!(d.weak_gap);
        let d = decompose(&mu, &SplitRule::Automatic { gap: 5.0 }).unwrap();
        assert!(!d.weak_gap);
    }

    #[test]
    fn classification() {
        let f2 = GroupSpec::free(2).unwrap();
        let w = |g: &GroupSpec, s: &[&str]| s.iter().map(|x| g.parse_word(x).unwrap()).collect::<Vec<_>>();
        assert_eq!(classify_generated(&f2, &w(&f2, &["a^2", "a^-3"])), SubgroupKind::VirtuallyCyclic);
        assert_eq!(classify_generated(&f2, &w(&f2, &["a", "b a b^-1"])), SubgroupKind::NonElementary);
        assert_eq!(classify_generated(&f2, &w(&f2, &[""])), SubgroupKind::Finite);
        let p = z2_star_z4();
        assert_eq!(classify_generated(&p, &w(&p, &["b", "b^2"])), SubgroupKind::Finite);
        assert_eq!(classify_generated(&p, &w(&p, &["a", "b^2"])), SubgroupKind::VirtuallyCyclic);
        assert_eq!(classify_generated(&p, &w(&p, &["a b", "b^-1 a"])), SubgroupKind::VirtuallyCyclic);
        assert_eq!(classify_generated(&p, &w(&p, &["b a b^-1"])), SubgroupKind::Finite);
        assert_eq!(classify_generated(&p, &w(&p, &["a", "b"])), SubgroupKind::NonElementary);
        let d = GroupSpec::direct_with_finite(GroupSpec::cyclic(2).unwrap(), f2.clone()).unwrap();
        let gens = d.generators();
        let pick = |name: &str| gens.iter().find(|x| x.name == name).unwrap().element.clone();
        let c = pick(&gens.last().unwrap().name);
        assert_eq!(classify_generated(&d, std::slice::from_ref(&c)), SubgroupKind::Finite);
        assert_eq!(classify_generated(&d, &[c, pick("a")]), SubgroupKind::VirtuallyCyclic);
    }
}
