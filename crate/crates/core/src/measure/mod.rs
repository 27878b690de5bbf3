//! Finitely supported probability measures and their exact functionals.

mod bound;
mod builders;
mod config;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

pub use bound::{check_entropy_lower_bound, EntropyBound};
pub use builders::*;
pub use config::{AtomConfig, BuilderConfig, MeasureConfig};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

/// Tolerance on the total mass of user-supplied measures.
pub const LOAD_TOLERANCE: f64 = 1e-9;
/// Masses below this are dropped from convolution outputs.
pub const UNDERFLOW: f64 = 1e-300;
/// Default cap on convolution supports.
pub const DEFAULT_CAP: usize = 5_000_000;

/// Number of fixed work chunks for parallel convolution; results do not
/// depend on the thread count because chunk boundaries and merge order do not.
const CHUNKS: usize = 64;

/// A finitely supported probability measure on a group. Atoms are kept
/// sorted by the canonical element order and have strictly positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct FinMeasure {
    group: GroupSpec,
    atoms: Vec<(Element, f64)>,
    symmetric: bool,
}

/// Per-radius decomposition of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// μ(S^k) for k = 0..=max radius.
    pub masses: Vec<f64>,
    /// Entropy of μ conditioned on S^k (0 where μ(S^k) = 0).
    pub conditional_entropies: Vec<f64>,
    /// h_i = H(μ) - H(radial marginal) = Σ_k μ(S^k) H(μ | S^k).
    pub defect: f64,
}

/// H, L and support size of one convolution power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerStats {
    pub n: usize,
    pub support: usize,
    pub entropy: f64,
    pub moment: f64,
}

fn entropy_of<'a>(masses: impl Iterator<Item = &'a f64>) -> f64 {
    masses.map(|&m| if m > 0.0 { -m * m.ln() } else { 0.0 }).sum()
}

impl FinMeasure {
    /// Validates elements and masses, merges repeated atoms and rescales the
    /// total (which must be within 10^-9 of 1) to exactly 1 up to rounding.
    pub fn new(group: GroupSpec, atoms: Vec<(Element, f64)>) -> Result<Self> {
        for (x, m) in &atoms {
            group.validate(x)?;
            if !(m.is_finite() && *m > 0.0) {
                return Err(Error::InvalidMeasure(format!("mass {m} is not positive")));
            }
        }
        let mut m = Self::from_unsorted(group, atoms);
        if m.atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let total = m.total_mass();
        if (total - 1.0).abs() > LOAD_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        for (_, w) in &mut m.atoms {
            *w /= total;
        }
        Ok(m)
    }

    /// Point mass at `x`.
    pub fn point(group: &GroupSpec, x: Element) -> Result<Self> {
        Self::new(group.clone(), vec![(x, 1.0)])
    }

    /// Atoms already known to be valid; merges duplicates and sorts. Masses are kept as given.
    pub(crate) fn from_unsorted(group: GroupSpec, atoms: Vec<(Element, f64)>) -> Self {
        let mut map: FxHashMap<Element, f64> = FxHashMap::default();
        let mut order = Vec::new();
        for (x, m) in atoms {
            match map.get_mut(&x) {
                Some(w) => *w += m,
                None => {
                    order.push(x.clone());
                    map.insert(x, m);
                }
            }
        }
        let mut atoms: Vec<(Element, f64)> = order
            .into_iter()
            .map(|x| {
                let m = map[&x];
                (x, m)
            })
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        Self {
            group,
            atoms,
            symmetric: false,
        }
    }

    /// Sets the symmetric flag after checking μ(g) = μ(g⁻¹) for every atom.
    pub fn with_symmetric_flag(mut self) -> Result<Self> {
        if !self.is_symmetric(1e-12) {
            return Err(Error::InvalidMeasure("measure declared symmetric is not".into()));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn atoms(&self) -> &[(Element, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    pub fn mass(&self, x: &Element) -> f64 {
        self.atoms
            .binary_search_by(|(y, _)| y.cmp(x))
            .map_or(0.0, |i| self.atoms[i].1)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.atoms
            .iter()
            .all(|(x, m)| (self.mass(&self.group.inv_unchecked(x)) - m).abs() <= tol)
    }

    /// Largest word length in the support.
    pub fn radius(&self) -> usize {
        self.atoms
            .iter()
            .map(|(x, _)| self.group.word_length(x))
            .max()
            .unwrap_or(0)
    }

    /// H(μ) = Σ μ(g)(-log μ(g)), natural logarithm.
    pub fn entropy(&self) -> f64 {
        entropy_of(self.atoms.iter().map(|(_, m)| m))
    }

    /// L(μ) = Σ μ(g)|g|.
    pub fn moment(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(x, m)| m * self.group.word_length(x) as f64)
            .sum()
    }

    pub fn radial_profile(&self) -> RadialProfile {
        let r = self.radius();
        let mut masses = vec![0.0; r + 1];
        let mut by_radius: Vec<Vec<f64>> = vec![Vec::new(); r + 1];
        for (x, m) in &self.atoms {
            let k = self.group.word_length(x);
            masses[k] += m;
            by_radius[k].push(*m);
        }
        let conditional_entropies: Vec<f64> = by_radius
            .iter()
            .zip(&masses)
            .map(|(ms, &total)| {
                if total > 0.0 {
                    entropy_of(ms.iter().map(|m| m / total).collect::<Vec<_>>().iter())
                } else {
                    0.0
                }
            })
            .collect();
        let defect = masses
            .iter()
            .zip(&conditional_entropies)
            .map(|(m, h)| m * h)
            .sum();
        RadialProfile {
            masses,
            conditional_entropies,
            defect,
        }
    }

    /// Exact convolution μ₁ * μ₂, (μ₁ * μ₂)(g) = Σ_{xy=g} μ₁(x)μ₂(y).
    ///
    /// Fails if the output support exceeds `cap`. Output atoms are summed in
    /// a fixed order, so the result is identical for any thread count.
    pub fn convolve(&self, other: &FinMeasure, cap: usize) -> Result<FinMeasure> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("convolution of measures on different groups".into()));
        }
        let g = &self.group;
        let chunk = self.atoms.len().div_ceil(CHUNKS).max(1);
        let partials: Vec<FxHashMap<Element, f64>> = self
            .atoms
            .par_chunks(chunk)
            .map(|xs| {
                let mut map: FxHashMap<Element, f64> = FxHashMap::default();
                for (x, mx) in xs {
                    for (y, my) in &other.atoms {
                        let mut z = x.clone();
                        g.mul_assign(&mut z, y);
                        *map.entry(z).or_insert(0.0) += mx * my;
                    }
                }
                map
            })
            .collect();
        let mut iter = partials.into_iter();
        let mut total = iter.next().unwrap_or_default();
        for part in iter {
            for (z, m) in part {
                *total.entry(z).or_insert(0.0) += m;
            }
            if total.len() > cap {
                return Err(Error::CapExceeded {
                    what: "convolution support",
                    cap,
                    required: total.len(),
                    lower_bound: true,
                });
            }
        }
        if total.len() > cap {
            return Err(Error::CapExceeded {
                what: "convolution support",
                cap,
                required: total.len(),
                lower_bound: false,
            });
        }
        let before = total.len();
        let mut atoms: Vec<(Element, f64)> = total.into_iter().filter(|(_, m)| *m >= UNDERFLOW).collect();
        if atoms.len() < before {
            log::warn!("dropped {} atoms below {UNDERFLOW:e}", before - atoms.len());
        }
        atoms.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(FinMeasure {
            group: g.clone(),
            atoms,
            symmetric: false,
        })
    }

    /// μ^{*n}; μ^{*0} = δ_e.
    pub fn power(&self, n: usize, cap: usize) -> Result<FinMeasure> {
        let mut out = FinMeasure::point(&self.group, self.group.identity())?;
        for _ in 0..n {
            out = out.convolve(self, cap)?;
        }
        Ok(out)
    }

    /// H and L of μ^{*n} for n = 1..=n_max, by iterated convolution.
    ///
    /// On a cap failure the stats computed so far are returned together with the error.
    pub fn power_stats(&self, n_max: usize, cap: usize) -> (Vec<PowerStats>, Option<Error>) {
        let mut stats = Vec::with_capacity(n_max);
        let mut cur = self.clone();
        for n in 1..=n_max {
            if n > 1 {
                match cur.convolve(self, cap) {
                    Ok(next) => cur = next,
                    Err(e) => return (stats, Some(e)),
                }
            } else if cur.len() > cap {
                return (
                    stats,
                    Some(Error::CapExceeded {
                        what: "convolution support",
                        cap,
                        required: cur.len(),
                        lower_bound: false,
                    }),
                );
            }
            stats.push(PowerStats {
                n,
                support: cur.len(),
                entropy: cur.entropy(),
                moment: cur.moment(),
            });
        }
        (stats, None)
    }

    /// Pushforward of the measure by a map into the same or another group.
    pub fn map(&self, target: &GroupSpec, f: impl Fn(&Element) -> Element) -> FinMeasure {
        FinMeasure::from_unsorted(
            target.clone(),
            self.atoms.iter().map(|(x, m)| (f(x), *m)).collect(),
        )
    }

    /// Atoms with masses rescaled by `factor`; used for mixtures.
    pub(crate) fn scaled(&self, factor: f64) -> Vec<(Element, f64)> {
        self.atoms.iter().map(|(x, m)| (x.clone(), m * factor)).collect()
    }

    /// Atom list as generator-name words, for config echoes.
    pub fn to_config(&self) -> MeasureConfig {
        MeasureConfig::Atoms {
            atoms: self
                .atoms
                .iter()
                .map(|(x, m)| AtomConfig {
                    word: self.group.format_element(x),
                    mass: *m,
                })
                .collect(),
            symmetric: self.symmetric,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let g = f2();
        assert!((simple_random_walk(&g).entropy() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(FinMeasure::point(&g, g.identity()).unwrap().entropy(), 0.0);
        let b1 = uniform_ball(&g, 1, 100).unwrap();
        assert!((b1.entropy() - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        let g = f2();
        assert!((simple_random_walk(&g).moment() - 1.0).abs() < 1e-15);
        assert_eq!(FinMeasure::point(&g, g.identity()).unwrap().moment(), 0.0);
        assert!((uniform_ball(&g, 1, 100).unwrap().moment() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn convolution_examples() {
        let z = GroupSpec::free(1).unwrap();
        let m = simple_random_walk(&z);
        let m2 = m.convolve(&m, 100).unwrap();
        assert_eq!(m2.len(), 3);
        assert!((m2.mass(&z.parse_word("a^2").unwrap()) - 0.25).abs() < 1e-15);
        assert!((m2.mass(&z.identity()) - 0.5).abs() < 1e-15);

        let g = f2();
        let x = g.parse_word("a b").unwrap();
        let y = g.parse_word("b a^-1").unwrap();
        let d = FinMeasure::point(&g, x.clone())
            .unwrap()
            .convolve(&FinMeasure::point(&g, y.clone()).unwrap(), 10)
            .unwrap();
        assert_eq!(d.atoms(), &[(g.mul(&x, &y).unwrap(), 1.0)]);
    }

    #[test]
    fn srw_cube_return_mass() {
        // Oracle: enumerate all 4^3 generator strings.
        let g = f2();
        let mut returns = 0;
        let mut support = std::collections::BTreeSet::new();
        for w in 0..64usize {
            let word = [w % 4, (w / 4) % 4, w / 16];
            let x = g.word_to_element(&word);
            if g.is_identity(&x) {
                returns += 1;
            }
            support.insert(x);
        }
        let m3 = simple_random_walk(&g).power(3, 1000).unwrap();
        assert_eq!(m3.len(), support.len());
        assert!((m3.mass(&g.identity()) - returns as f64 / 64.0).abs() < 1e-15);
        assert!((m3.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_cap() {
        let g = f2();
        let m = simple_random_walk(&g);
        let err = m.power(3, 20).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn radial_profile_examples() {
        let g = f2();
        assert!((simple_random_walk(&g).radial_profile().defect - 4f64.ln()).abs() < 1e-15);
        let b1 = uniform_ball(&g, 1, 100).unwrap().radial_profile();
        assert!((b1.defect - 0.8 * 4f64.ln()).abs() < 1e-12);
        assert!((b1.defect - 1.109035).abs() < 1e-6);
        let e = FinMeasure::point(&g, g.identity()).unwrap();
        assert_eq!(e.radial_profile().defect, 0.0);
    }

    #[test]
    fn rejects_bad_masses() {
        let g = f2();
        let a = g.parse_word("a").unwrap();
        assert!(FinMeasure::new(g.clone(), vec![(a.clone(), 0.5)]).is_err());
        assert!(FinMeasure::new(g.clone(), vec![(a.clone(), -1.0), (g.identity(), 2.0)]).is_err());
        assert!(FinMeasure::new(g.clone(), vec![]).is_err());
        let m = FinMeasure::new(g.clone(), vec![(a.clone(), 0.5), (a, 0.5)]).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.with_symmetric_flag().is_err());
    }
}
