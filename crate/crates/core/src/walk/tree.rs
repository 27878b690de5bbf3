use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Element, Factor, FiniteGroup, GroupSpec, Letter, Part, Syllable, Word};
use crate::measure::FinMeasure;

/// Stopping tolerance (sup-norm change) of the first-passage fixed point.
pub const TREE_TOLERANCE: f64 = 1e-14;
const MAX_ITERATIONS: usize = 5_000_000;

/// Harmonic data of one block element: a free letter or a nontrivial
/// element of a finite factor.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicEntry {
    pub element: Element,
    pub label: String,
    /// F(x) = P(the walk ever visits x).
    pub first_passage: f64,
    /// -log F(x).
    pub green_length: f64,
    /// ν(Cyl x): probability that the limit point starts with x.
    pub cylinder: f64,
}

/// Exact harmonic data of a nearest-neighbor walk on a tree-like group.
///
/// For direct products with a finite group the data refer to the projection
/// to the base, which has the same drift and entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeHarmonicData {
    pub entries: Vec<HarmonicEntry>,
    pub drift: f64,
    /// Asymptotic entropy, computed as the drift of the Green distance.
    pub entropy: f64,
    /// Σ ν(Cyl x) over all block elements.
    pub cylinder_total: f64,
    /// Set for recurrent walks, where ν is undefined and ℓ = h = 0 are reported.
    pub degenerate: bool,
    pub iterations: usize,
    base: GroupSpec,
}

enum Kind {
    /// Generator `gen` of a free group or free factor; local index 0 is the
    /// letter, 1 its inverse.
    Letter { factor: Option<u16>, gen: usize },
    Finite { factor: u16, group: Arc<FiniteGroup> },
}

struct Block {
    kind: Kind,
    mu: Vec<f64>,
    f: Vec<f64>,
    nu: Vec<f64>,
}

impl Block {
    fn element(&self, local: usize) -> Element {
        match &self.kind {
            Kind::Letter { factor, gen } => {
                let w = Word::from_elem(Letter::new(*gen, local == 1), 1);
                match factor {
                    None => Element::Free(w),
                    Some(f) => Element::Product(vec![Syllable { factor: *f, part: Part::Free(w) }]),
                }
            }
            Kind::Finite { factor, .. } => Element::Product(vec![Syllable {
                factor: *factor,
                part: Part::Finite(local as u32),
            }]),
        }
    }

    /// Local indices of nontrivial elements.
    fn locals(&self) -> Vec<usize> {
        match &self.kind {
            Kind::Letter { .. } => vec![0, 1],
            Kind::Finite { group, .. } => group.nontrivial().map(|x| x as usize).collect(),
        }
    }

    /// Σ_y μ(y) F(y⁻¹): probability of leaving through this block and coming back.
    fn return_mass(&self) -> f64 {
        match &self.kind {
            Kind::Letter { .. } => self.mu[0] * self.f[1] + self.mu[1] * self.f[0],
            Kind::Finite { group, .. } => group
                .nontrivial()
                .map(|y| self.mu[y as usize] * self.f[group.inv(y) as usize])
                .sum(),
        }
    }

    /// One Jacobi step of F(x) = μ(x) + Σ_{y≠x} μ(y)F(y⁻¹x) + s F(x), where
    /// `stay` = s is the probability of staying put or making a returning
    /// excursion through another block.
    fn update(&self, stay: f64) -> Vec<f64> {
        match &self.kind {
            Kind::Letter { .. } => {
                let (p, m) = (self.mu[0], self.mu[1]);
                let (fp, fm) = (self.f[0], self.f[1]);
                vec![p + m * fp * fp + stay * fp, m + p * fm * fm + stay * fm]
            }
            Kind::Finite { group, .. } => {
                let mut out = vec![0.0; group.order()];
                for x in group.nontrivial() {
                    let mut v = self.mu[x as usize] + stay * self.f[x as usize];
                    for y in group.nontrivial() {
                        let my = self.mu[y as usize];
                        if y != x && my > 0.0 {
                            v += my * self.f[group.mul(group.inv(y), x) as usize];
                        }
                    }
                    out[x as usize] = v;
                }
                out
            }
        }
    }

    fn length(&self, local: usize) -> f64 {
        match &self.kind {
            Kind::Letter { .. } => 1.0,
            Kind::Finite { group, .. } => group.length(local as u32) as f64,
        }
    }
}

fn blocks_of(base: &GroupSpec) -> Result<Vec<Block>> {
    let mut kinds = Vec::new();
    match base {
        GroupSpec::Free { rank } => {
            kinds.extend((0..*rank).map(|gen| Kind::Letter { factor: None, gen }));
        }
        GroupSpec::FreeProduct(factors) => {
            for (f, factor) in factors.iter().enumerate() {
                match factor {
                    Factor::Free { rank } => kinds.extend((0..*rank).map(|gen| Kind::Letter {
                        factor: Some(f as u16),
                        gen,
                    })),
                    Factor::Finite(g) => kinds.push(Kind::Finite {
                        factor: f as u16,
                        group: g.clone(),
                    }),
                }
            }
        }
        _ => {
            return Err(Error::Unsupported(
                "harmonic data need a free group or a free product".into(),
            ))
        }
    }
    Ok(kinds
        .into_iter()
        .map(|kind| {
            let n = match &kind {
                Kind::Letter { .. } => 2,
                Kind::Finite { group, .. } => group.order(),
            };
            Block {
                kind,
                mu: vec![0.0; n],
                f: vec![0.0; n],
                nu: vec![0.0; n],
            }
        })
        .collect())
}

/// Block index and local index of a single-block element; None for the identity.
fn locate(blocks: &[Block], x: &Element) -> Result<Option<(usize, usize)>> {
    let not_nn = || Error::Unsupported("measure is not nearest-neighbor".into());
    let (factor, part) = match x {
        Element::Free(w) if w.is_empty() => return Ok(None),
        Element::Free(w) if w.len() == 1 => (None, Part::Free(w.clone())),
        Element::Product(s) if s.is_empty() => return Ok(None),
        Element::Product(s) if s.len() == 1 => (Some(s[0].factor), s[0].part.clone()),
        _ => return Err(not_nn()),
    };
    for (b, block) in blocks.iter().enumerate() {
        match (&block.kind, &part) {
            (Kind::Letter { factor: bf, gen }, Part::Free(w)) if *bf == factor => {
                if w.len() != 1 {
                    return Err(not_nn());
                }
                if w[0].generator() == *gen {
                    return Ok(Some((b, w[0].is_inverse() as usize)));
                }
            }
            (Kind::Finite { factor: bf, .. }, Part::Finite(y)) if Some(*bf) == factor => {
                return Ok(Some((b, *y as usize)));
            }
            _ => {}
        }
    }
    Err(not_nn())
}

fn green(f: f64) -> f64 {
    -f.ln()
}

/// Exact first-passage probabilities, harmonic measure, drift and entropy of
/// a nearest-neighbor walk: the support must lie in the identity and single
/// letters of free factors or single elements of finite factors.
///
/// F is the minimal solution of its first-step equations, reached by
/// iterating from 0 until the sup-norm change is below `tol`.
pub fn tree_harmonic(measure: &FinMeasure, tol: f64) -> Result<TreeHarmonicData> {
    let (base, atoms): (GroupSpec, Vec<(Element, f64)>) = match measure.group() {
        GroupSpec::DirectWithFinite { base, .. } => {
            let projected = measure.map(base, |x| match x {
                Element::Direct(_, b) => (**b).clone(),
                _ => unreachable!("validated element"),
            });
            ((**base).clone(), projected.atoms().to_vec())
        }
        g => (g.clone(), measure.atoms().to_vec()),
    };
    let mut blocks = blocks_of(&base)?;
    let mut mu_e = 0.0;
    for (x, m) in &atoms {
        match locate(&blocks, x)? {
            None => mu_e += m,
            Some((b, i)) => blocks[b].mu[i] += m,
        }
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let returns: Vec<f64> = blocks.iter().map(Block::return_mass).collect();
        let total: f64 = returns.iter().sum();
        let mut diff: f64 = 0.0;
        let updates: Vec<Vec<f64>> = blocks
            .iter()
            .zip(&returns)
            .map(|(b, r)| b.update(mu_e + total - r))
            .collect();
        for (b, new) in blocks.iter_mut().zip(updates) {
            for (old, v) in b.f.iter_mut().zip(new) {
                let v = v.min(1.0);
                diff = diff.max((v - *old).abs());
                *old = v;
            }
        }
        if diff < tol {
            converged = true;
            break;
        }
    }

    let mut degenerate = !converged;
    let mut cylinder_total = 0.0;
    for b in &mut blocks {
        match &b.kind {
            Kind::Letter { .. } => {
                let (fp, fm) = (b.f[0], b.f[1]);
                let den = 1.0 - fp * fm;
                if den < 1e-9 {
                    degenerate = true;
                    continue;
                }
                b.nu[0] = fp * (1.0 - fm) / den;
                b.nu[1] = fm * (1.0 - fp) / den;
            }
            Kind::Finite { .. } => {
                let phi: f64 = b.locals().iter().map(|&x| b.f[x]).sum();
                for x in b.locals() {
                    b.nu[x] = b.f[x] / (1.0 + phi);
                }
            }
        }
        cylinder_total += b.nu.iter().sum::<f64>();
    }
    if (cylinder_total - 1.0).abs() > 1e-6 {
        degenerate = true;
    }

    let (mut drift, mut entropy) = (0.0, 0.0);
    if !degenerate {
        for b in &blocks {
            match &b.kind {
                Kind::Letter { .. } => {
                    for (s, t) in [(0, 1), (1, 0)] {
                        let ms = b.mu[s];
                        if ms == 0.0 {
                            continue;
                        }
                        let back = b.nu[t];
                        drift += ms * (1.0 - 2.0 * back);
                        let mut dh = green(b.f[s]) * (1.0 - back);
                        if back > 0.0 {
                            dh -= green(b.f[t]) * back;
                        }
                        entropy += ms * dh;
                    }
                }
                Kind::Finite { group, .. } => {
                    let nu_block: f64 = b.nu.iter().sum();
                    let w = |x: u32| if x == group.identity() { 0.0 } else { green(b.f[x as usize]) };
                    for y in group.nontrivial() {
                        let my = b.mu[y as usize];
                        if my == 0.0 {
                            continue;
                        }
                        let mut dl = (1.0 - nu_block) * b.length(y as usize);
                        let mut dh = (1.0 - nu_block) * w(y);
                        for x in group.nontrivial() {
                            let nx = b.nu[x as usize];
                            if nx == 0.0 {
                                continue;
                            }
                            let yx = group.mul(y, x);
                            dl += nx * (group.length(yx) as f64 - group.length(x) as f64);
                            dh += nx * (w(yx) - w(x));
                        }
                        drift += my * dl;
                        entropy += my * dh;
                    }
                }
            }
        }
    }

    let entries = blocks
        .iter()
        .flat_map(|b| {
            let base = &base;
            b.locals().into_iter().map(move |x| {
                let element = b.element(x);
                HarmonicEntry {
                    label: base.format_element(&element),
                    element,
                    first_passage: b.f[x],
                    green_length: green(b.f[x]),
                    cylinder: b.nu[x],
                }
            })
        })
        .collect();

    Ok(TreeHarmonicData {
        entries,
        drift,
        entropy,
        cylinder_total,
        degenerate,
        iterations,
        base,
    })
}

impl TreeHarmonicData {
    pub fn entry(&self, label: &str) -> Option<&HarmonicEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    fn green_of(&self, element: &Element) -> f64 {
        self.entries
            .iter()
            .find(|e| &e.element == element)
            .map_or(f64::INFINITY, |e| e.green_length)
    }

    /// Green distance d_μ(e, g) = -log P(the walk ever visits g), additive
    /// over the syllables (and letters) of g.
    pub fn green_distance(&self, g: &Element) -> f64 {
        match g {
            Element::Direct(_, b) => self.green_distance(b),
            Element::Free(w) => w
                .iter()
                .map(|&l| self.green_of(&Element::Free(Word::from_elem(l, 1))))
                .sum(),
            Element::Product(syls) => syls
                .iter()
                .map(|s| match &s.part {
                    Part::Finite(_) => self.green_of(&Element::Product(vec![s.clone()])),
                    Part::Free(w) => w
                        .iter()
                        .map(|&l| {
                            self.green_of(&Element::Product(vec![Syllable {
                                factor: s.factor,
                                part: Part::Free(Word::from_elem(l, 1)),
                            }]))
                        })
                        .sum(),
                })
                .sum(),
            Element::Finite(_) => f64::NAN,
        }
    }

    /// The group the entries refer to.
    pub fn base(&self) -> &GroupSpec {
        &self.base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{interpolation, simple_random_walk, uniform_on_set};
    use crate::walk::{estimate_drift, estimate_entropy, WalkConfig};

    fn measure(g: &GroupSpec, atoms: &[(&str, f64)]) -> FinMeasure {
        FinMeasure::new(
            g.clone(),
            atoms.iter().map(|(w, m)| (g.parse_word(w).unwrap(), *m)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn free_group_srw() {
        let g = GroupSpec::free(2).unwrap();
        let t = tree_harmonic(&simple_random_walk(&g), TREE_TOLERANCE).unwrap();
        for e in &t.entries {
            assert!((e.first_passage - 1.0 / 3.0).abs() < 1e-14);
            assert!((e.cylinder - 0.25).abs() < 1e-12);
            assert!((e.green_length - 3f64.ln()).abs() < 1e-10);
        }
        assert!((t.drift - 0.5).abs() < 1e-12);
        assert!((t.entropy - 0.5 * 3f64.ln()).abs() < 1e-12);
        let x = g.parse_word("a b^-1 a a").unwrap();
        assert!((t.green_distance(&x) - 4.0 * 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn deterministic_and_biased_z() {
        let z = GroupSpec::free(1).unwrap();
        let t = tree_harmonic(&measure(&z, &[("a", 1.0)]), TREE_TOLERANCE).unwrap();
        assert_eq!(t.entry("a").unwrap().first_passage, 1.0);
        assert_eq!(t.entry("a^-1").unwrap().first_passage, 0.0);
        assert_eq!(t.entry("a").unwrap().cylinder, 1.0);
        assert_eq!((t.drift, t.entropy), (1.0, 0.0));

        let t = tree_harmonic(&measure(&z, &[("a", 0.8), ("a^-1", 0.2)]), TREE_TOLERANCE).unwrap();
        assert!((t.entry("a").unwrap().first_passage - 1.0).abs() < 1e-12);
        assert!((t.entry("a^-1").unwrap().first_passage - 0.25).abs() < 1e-12);
        assert!((t.entry("a").unwrap().cylinder - 1.0).abs() < 1e-12);
        assert!((t.drift - 0.6).abs() < 1e-12);
        assert!(t.entropy.abs() < 1e-12);
    }

    #[test]
    fn symmetric_z_is_degenerate() {
        let z = GroupSpec::free(1).unwrap();
        let t = tree_harmonic(&simple_random_walk(&z), TREE_TOLERANCE).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.drift, 0.0);
    }

    #[test]
    fn rejects_long_atoms() {
        let g = GroupSpec::free(2).unwrap();
        assert!(tree_harmonic(&measure(&g, &[("a b", 1.0)]), TREE_TOLERANCE).is_err());
        assert!(tree_harmonic(&measure(&g, &[("a^2", 1.0)]), TREE_TOLERANCE).is_err());
    }

    #[test]
    fn entropy_is_below_convolution_increments() {
        // Free product and lazy free-group examples: ΔH_n decreases to h from above.
        let g = GroupSpec::free_product(vec![
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::cyclic(3).unwrap(),
        ])
        .unwrap();
        let m = measure(&g, &[("a", 0.5), ("b", 0.3), ("b^-1", 0.2)]);
        let f2 = GroupSpec::free(2).unwrap();
        let lazy = interpolation(
            &simple_random_walk(&f2),
            &uniform_on_set(&f2, vec![f2.identity()]).unwrap(),
            0.3,
        )
        .unwrap();
        for m in [m, lazy] {
            let t = tree_harmonic(&m, TREE_TOLERANCE).unwrap();
            assert!((t.cylinder_total - 1.0).abs() < 1e-10);
            let e = estimate_entropy(&m, 10, 2_000_000).unwrap();
            let rows = &e.rows;
            let last = rows.last().unwrap().entropy_increment;
            assert!(last >= t.entropy - 1e-9, "{last} < {}", t.entropy);
            assert!(last - t.entropy < 0.1, "{last} vs {}", t.entropy);
            let cfg = WalkConfig {
                horizon: 20_000,
                replicas: 400,
                seed: 3,
                stride: 0,
            };
            let mc = estimate_drift(&m, &cfg).unwrap();
            assert!((mc.value - t.drift).abs() < 3.0 * mc.std_error, "{mc:?} vs {}", t.drift);
        }
    }

    #[test]
    fn direct_product_projects() {
        let g = GroupSpec::direct_with_finite(
            GroupSpec::cyclic(2).unwrap(),
            GroupSpec::free(2).unwrap(),
        )
        .unwrap();
        let t = tree_harmonic(&simple_random_walk(&g), TREE_TOLERANCE).unwrap();
        // The finite generator acts as laziness 1/5 on the base.
        let f2 = GroupSpec::free(2).unwrap();
        let lazy = interpolation(
            &simple_random_walk(&f2),
            &uniform_on_set(&f2, vec![f2.identity()]).unwrap(),
            0.2,
        )
        .unwrap();
        let u = tree_harmonic(&lazy, TREE_TOLERANCE).unwrap();
        assert!((t.drift - 0.4).abs() < 1e-12);
        assert!((t.entropy - u.entropy).abs() < 1e-14);
    }
}
