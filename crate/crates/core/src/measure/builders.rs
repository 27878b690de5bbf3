use super::FinMeasure;
use crate::error::{Error, Result};
use crate::group::{Element, Factor, GroupSpec, Part, Syllable};
use crate::series::group_series;

/// Uniform measure on the generating set.
pub fn simple_random_walk(group: &GroupSpec) -> FinMeasure {
    let gens = group.generators();
    let m = 1.0 / gens.len() as f64;
    FinMeasure::from_unsorted(group.clone(), gens.into_iter().map(|g| (g.element, m)).collect())
}

/// Uniform measure on a finite set (repeats are ignored).
pub fn uniform_on_set(group: &GroupSpec, elements: Vec<Element>) -> Result<FinMeasure> {
    let mut elements = elements;
    elements.sort();
    elements.dedup();
    if elements.is_empty() {
        return Err(Error::InvalidMeasure("empty support".into()));
    }
    let m = 1.0 / elements.len() as f64;
    FinMeasure::new(group.clone(), elements.into_iter().map(|x| (x, m)).collect())
}

pub fn uniform_ball(group: &GroupSpec, radius: usize, cap: usize) -> Result<FinMeasure> {
    uniform_on_set(group, group.enumerate_ball(radius, cap)?)
}

pub fn uniform_sphere(group: &GroupSpec, radius: usize, cap: usize) -> Result<FinMeasure> {
    uniform_on_set(group, group.enumerate_sphere(radius, cap)?)
}

/// e^{-s|g|}/Z on the ball of radius `radius`.
pub fn gibbs(group: &GroupSpec, s: f64, radius: usize, cap: usize) -> Result<FinMeasure> {
    if !s.is_finite() {
        return Err(Error::InvalidMeasure(format!("bad Gibbs parameter {s}")));
    }
    let ball = group.enumerate_ball(radius, cap)?;
    let weights: Vec<f64> = ball
        .iter()
        .map(|x| (-s * group.word_length(x) as f64).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    FinMeasure::new(
        group.clone(),
        ball.into_iter().zip(weights).map(|(x, w)| (x, w / z)).collect(),
    )
}

/// Elements of S^p in a free product whose first syllable lies in factor 0
/// and whose last syllable lies in factor 1.
pub fn slice_elements(group: &GroupSpec, p: usize, cap: usize) -> Result<Vec<Element>> {
    if !matches!(group, GroupSpec::FreeProduct(_)) {
        return Err(Error::Unsupported("slices need a free product".into()));
    }
    Ok(group
        .enumerate_sphere(p, cap)?
        .into_iter()
        .filter(|x| match x {
            Element::Product(s) => {
                s.first().is_some_and(|s| s.factor == 0) && s.last().is_some_and(|s| s.factor == 1)
            }
            _ => false,
        })
        .collect())
}

/// Uniform measure on the slice S^p_{1,2}.
pub fn slice_uniform(group: &GroupSpec, p: usize, cap: usize) -> Result<FinMeasure> {
    uniform_on_set(group, slice_elements(group, p, cap)?)
}

/// On Γ₁ * Γ₂ with both factors finite: mass e^{-v(|g₁|+|g₂|)} on each
/// g₁g₂ with g₁ ∈ Γ₁ \ {e}, g₂ ∈ Γ₂ \ {e}. The masses sum to
/// (F₁(z*) - 1)(F₂(z*) - 1) = 1, so no normalization is applied; the build
/// fails if the sum is off by more than 10^-10.
pub fn critical_product(group: &GroupSpec) -> Result<FinMeasure> {
    let GroupSpec::FreeProduct(factors) = group else {
        return Err(Error::Unsupported("critical product needs a free product".into()));
    };
    let [Factor::Finite(g1), Factor::Finite(g2)] = factors.as_slice() else {
        return Err(Error::Unsupported(
            "critical product needs exactly two finite factors".into(),
        ));
    };
    let z = group_series(group).growth_rate()?.z_star;
    let mut atoms = Vec::new();
    for x in g1.nontrivial() {
        for y in g2.nontrivial() {
            let len = g1.length(x) + g2.length(y);
            let el = Element::Product(vec![
                Syllable { factor: 0, part: Part::Finite(x) },
                Syllable { factor: 1, part: Part::Finite(y) },
            ]);
            atoms.push((el, z.powi(len as i32)));
        }
    }
    let m = FinMeasure::from_unsorted(group.clone(), atoms);
    let total = m.total_mass();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Degenerate(format!("critical product mass {total} is not 1")));
    }
    Ok(m)
}

/// θδ_e + (1-θ)μ.
pub fn lazy_mix(m: &FinMeasure, theta: f64) -> Result<FinMeasure> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidMeasure(format!("laziness {theta} outside [0, 1]")));
    }
    let e = FinMeasure::point(m.group(), m.group().identity())?;
    interpolation(m, &e, theta)
}

/// (1-ε)μ₀ + εμ₁.
pub fn interpolation(m0: &FinMeasure, m1: &FinMeasure, eps: f64) -> Result<FinMeasure> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidMeasure(format!("weight {eps} outside [0, 1]")));
    }
    if m0.group() != m1.group() {
        return Err(Error::GroupMismatch("mixture of measures on different groups".into()));
    }
    let mut atoms = m0.scaled(1.0 - eps);
    atoms.extend(m1.scaled(eps));
    atoms.retain(|(_, w)| *w > 0.0);
    FinMeasure::new(m0.group().clone(), atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_star_z4() -> GroupSpec {
        GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()])
            .unwrap()
    }

    #[test]
    fn critical_product_atoms() {
        let g = z2_star_z4();
        let m = critical_product(&g).unwrap();
        let z = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(m.len(), 3);
        for (w, want) in [("a b", z * z), ("a b^-1", z * z), ("a b^2", z * z * z)] {
            assert!((m.mass(&g.parse_word(w).unwrap()) - want).abs() < 1e-12, "{w}");
        }
        assert!((m.mass(&g.parse_word("a b").unwrap()) - 0.381966).abs() < 1e-6);
        assert!((m.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn critical_product_needs_finite_factors() {
        let g = GroupSpec::free_product(vec![
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::free(1).unwrap(),
        ])
        .unwrap();
        assert!(critical_product(&g).is_err());
        assert!(critical_product(&GroupSpec::free(2).unwrap()).is_err());
    }

    #[test]
    fn slice_two() {
        let g = z2_star_z4();
        let m = slice_uniform(&g, 2, 100).unwrap();
        let want = uniform_on_set(
            &g,
            vec![g.parse_word("a b").unwrap(), g.parse_word("a b^-1").unwrap()],
        )
        .unwrap();
        assert_eq!(m, want);
    }

    #[test]
    fn ball_and_mixtures() {
        let g = GroupSpec::free(2).unwrap();
        let b = uniform_ball(&g, 1, 10).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.atoms().iter().all(|(_, m)| (m - 0.2).abs() < 1e-15));
        let lazy = lazy_mix(&simple_random_walk(&g), 0.5).unwrap();
        assert!((lazy.mass(&g.identity()) - 0.5).abs() < 1e-15);
        assert!(uniform_on_set(&g, vec![]).is_err());
        let gb = gibbs(&g, 1.0, 2, 100).unwrap();
        let ratio = gb.mass(&g.parse_word("a").unwrap()) / gb.mass(&g.parse_word("a b").unwrap());
        assert!((ratio - 1f64.exp()).abs() < 1e-12);
    }
}
