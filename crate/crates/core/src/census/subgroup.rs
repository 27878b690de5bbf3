use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::StallingsGraph;
use crate::error::{Error, Result};
use crate::group::{Element, Factor, FiniteGroup, GroupConfig, GroupSpec, Word};

/// A subgroup Λ of a free group or free product.
///
/// Kernel images are listed per generator of the ambient group in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupSpec {
    Generated {
        ambient: GroupSpec,
        words: Vec<Element>,
        graph: StallingsGraph,
    },
    FiniteKernel {
        ambient: GroupSpec,
        target: Arc<FiniteGroup>,
        images: Vec<u32>,
    },
    IntegerKernel {
        ambient: GroupSpec,
        images: Vec<i64>,
    },
}

fn free_rank(ambient: &GroupSpec, what: &str) -> Result<usize> {
    match ambient {
        GroupSpec::Free { rank } => Ok(*rank),
        _ => Err(Error::Unsupported(format!("{what} needs a free ambient group"))),
    }
}

impl SubgroupSpec {
    /// Subgroup generated by the given elements of a free group.
    pub fn generated(ambient: &GroupSpec, words: Vec<Element>) -> Result<Self> {
        let rank = free_rank(ambient, "a generated subgroup")?;
        let letters: Vec<Word> = words
            .iter()
            .map(|w| {
                ambient.validate(w)?;
                match w {
                    Element::Free(w) => Ok(w.clone()),
                    _ => unreachable!("validated free word"),
                }
            })
            .collect::<Result<_>>()?;
        Ok(SubgroupSpec::Generated {
            ambient: ambient.clone(),
            graph: StallingsGraph::fold(rank, &letters),
            words,
        })
    }

    /// Kernel of the homomorphism to `target` sending generator i to `images[i]`.
    pub fn finite_kernel(ambient: &GroupSpec, target: Arc<FiniteGroup>, images: Vec<u32>) -> Result<Self> {
        check_image_count(ambient, images.len())?;
        if images.iter().any(|&x| x as usize >= target.order()) {
            return Err(Error::InvalidSpec("kernel image out of range".into()));
        }
        let mut off = 0;
        for factor in ambient_factors(ambient)? {
            match &factor {
                Factor::Free { rank } => {
                    for g in 0..*rank {
                        let (x, y) = (images[off + 2 * g], images[off + 2 * g + 1]);
                        if target.mul(x, y) != target.identity() {
                            return Err(Error::InvalidSpec(
                                "images of a letter and its inverse are not inverse".into(),
                            ));
                        }
                    }
                }
                Factor::Finite(g) => check_finite_hom(g, &images[off..off + g.gens().len()], &target)?,
            }
            off += factor.generator_count();
        }
        Ok(SubgroupSpec::FiniteKernel {
            ambient: ambient.clone(),
            target,
            images,
        })
    }

    /// Kernel of the homomorphism to Z sending generator i to `images[i]`.
    pub fn integer_kernel(ambient: &GroupSpec, images: Vec<i64>) -> Result<Self> {
        free_rank(ambient, "an integer kernel")?;
        check_image_count(ambient, images.len())?;
        if images.chunks(2).any(|p| p[0] != -p[1]) {
            return Err(Error::InvalidSpec(
                "images of a letter and its inverse must be opposite".into(),
            ));
        }
        if images.iter().all(|&x| x == 0) {
            return Err(Error::InvalidSpec("integer kernel of the zero map is the whole group".into()));
        }
        Ok(SubgroupSpec::IntegerKernel {
            ambient: ambient.clone(),
            images,
        })
    }

    pub fn ambient(&self) -> &GroupSpec {
        match self {
            SubgroupSpec::Generated { ambient, .. }
            | SubgroupSpec::FiniteKernel { ambient, .. }
            | SubgroupSpec::IntegerKernel { ambient, .. } => ambient,
        }
    }

    pub fn stallings(&self) -> Option<&StallingsGraph> {
        match self {
            SubgroupSpec::Generated { graph, .. } => Some(graph),
            _ => None,
        }
    }

    /// Largest |φ(s)| over generators, for integer kernels.
    pub fn max_step(&self) -> i64 {
        match self {
            SubgroupSpec::IntegerKernel { images, .. } => images.iter().map(|x| x.abs()).max().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn integer_image(&self, g: &Element) -> Option<i64> {
        match self {
            SubgroupSpec::IntegerKernel { ambient, images } => {
                Some(ambient.geodesic_word(g).iter().map(|&i| images[i]).sum())
            }
            _ => None,
        }
    }

    pub fn finite_image(&self, g: &Element) -> Option<u32> {
        match self {
            SubgroupSpec::FiniteKernel {
                ambient,
                target,
                images,
            } => Some(
                ambient
                    .geodesic_word(g)
                    .iter()
                    .fold(target.identity(), |x, &i| target.mul(x, images[i])),
            ),
            _ => None,
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match self {
            SubgroupSpec::Generated { graph, .. } => match g {
                Element::Free(w) => graph.contains(w),
                _ => false,
            },
            SubgroupSpec::FiniteKernel { target, .. } => self.finite_image(g) == Some(target.identity()),
            SubgroupSpec::IntegerKernel { .. } => self.integer_image(g) == Some(0),
        }
    }

    /// Exact d(g, Λ) = min{|u| : gu ∈ Λ}. For kernels this is the word length
    /// of φ(g)⁻¹ in the image generated by φ(generators); for generated
    /// subgroups it is the shortest way back to the base of the Stallings
    /// graph after cancelling a suffix of g.
    pub fn distance_to_subgroup(&self, g: &Element) -> usize {
        match self {
            SubgroupSpec::Generated { graph, .. } => {
                let Element::Free(w) = g else { unreachable!("free ambient") };
                let dist = graph.distances_to_base();
                let mut best = w.len();
                let mut v = 0u32;
                for (k, l) in w.iter().enumerate() {
                    best = best.min(w.len() - k + dist[v as usize]);
                    match graph.edge(v, l.code()) {
                        Some(t) => v = t,
                        None => return best,
                    }
                }
                best.min(dist[v as usize])
            }
            SubgroupSpec::FiniteKernel { .. } => {
                let x = self.finite_image(g).expect("finite kernel");
                self.finite_quotient_distances()[x as usize]
            }
            SubgroupSpec::IntegerKernel { .. } => {
                let k = self.integer_image(g).expect("integer kernel");
                self.integer_quotient_distances(k.unsigned_abs() as usize)[k.unsigned_abs() as usize]
            }
        }
    }

    /// d(g, Λ) by breadth-first search over corrections u with |u| ≤ radius and
    /// membership tests; None when no correction of that length exists.
    pub fn distance_by_search(&self, g: &Element, radius: usize, cap: usize) -> Result<Option<usize>> {
        let ambient = self.ambient();
        for r in 0..=radius {
            for u in ambient.enumerate_sphere(r, cap)? {
                if self.contains(&ambient.mul_unchecked(g, &u)) {
                    return Ok(Some(r));
                }
            }
        }
        Ok(None)
    }

    /// Word lengths of the elements of the finite image.
    pub(crate) fn finite_quotient_distances(&self) -> Vec<usize> {
        let SubgroupSpec::FiniteKernel { target, images, .. } = self else {
            panic!("finite kernel expected")
        };
        let mut dist = vec![usize::MAX; target.order()];
        dist[target.identity() as usize] = 0;
        let mut queue = VecDeque::from([target.identity()]);
        while let Some(x) = queue.pop_front() {
            for &s in images {
                let y = target.mul(x, s);
                if dist[y as usize] == usize::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Word lengths of 0..=k_max in Z with steps φ(generators); usize::MAX when unreachable.
    pub(crate) fn integer_quotient_distances(&self, k_max: usize) -> Vec<usize> {
        let SubgroupSpec::IntegerKernel { images, .. } = self else {
            panic!("integer kernel expected")
        };
        let m = self.max_step();
        // Shortest paths can be reordered to stay within [-m, k_max + m].
        let (lo, hi) = (-m, k_max as i64 + m);
        let width = (hi - lo + 1) as usize;
        let mut dist = vec![usize::MAX; width];
        dist[(-lo) as usize] = 0;
        let mut queue = VecDeque::from([0i64]);
        while let Some(x) = queue.pop_front() {
            let d = dist[(x - lo) as usize];
            for &s in images {
                let y = x + s;
                if (lo..=hi).contains(&y) && dist[(y - lo) as usize] == usize::MAX {
                    dist[(y - lo) as usize] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        dist[(-lo) as usize..=(k_max as i64 - lo) as usize].to_vec()
    }

    pub fn to_config(&self) -> SubgroupConfig {
        let names: Vec<String> = self.ambient().generators().into_iter().map(|g| g.name).collect();
        match self {
            SubgroupSpec::Generated { ambient, words, .. } => SubgroupConfig::Generated {
                words: words.iter().map(|w| ambient.format_element(w)).collect(),
            },
            SubgroupSpec::FiniteKernel { target, images, .. } => SubgroupConfig::FiniteKernel {
                images: names.into_iter().zip(images.iter().copied()).collect(),
                target: GroupSpec::Finite(target.clone()).to_config(),
            },
            SubgroupSpec::IntegerKernel { images, .. } => SubgroupConfig::IntegerKernel {
                images: names.into_iter().zip(images.iter().copied()).collect(),
            },
        }
    }
}

fn ambient_factors(ambient: &GroupSpec) -> Result<Vec<Factor>> {
    match ambient {
        GroupSpec::Free { .. } | GroupSpec::FreeProduct(_) => Ok(ambient.factors()),
        _ => Err(Error::Unsupported(
            "kernels need a free group or a free product as ambient group".into(),
        )),
    }
}

fn check_image_count(ambient: &GroupSpec, n: usize) -> Result<()> {
    if n != ambient.generator_count() {
        return Err(Error::InvalidSpec(format!(
            "{n} images given for {} generators",
            ambient.generator_count()
        )));
    }
    Ok(())
}

/// Checks that generator images of a finite factor extend to a homomorphism.
fn check_finite_hom(g: &FiniteGroup, images: &[u32], target: &FiniteGroup) -> Result<()> {
    let mut phi = vec![target.identity(); g.order()];
    for x in g.nontrivial() {
        phi[x as usize] = g
            .geodesic(x)
            .iter()
            .fold(target.identity(), |acc, &p| target.mul(acc, images[p]));
    }
    for x in 0..g.order() as u32 {
        for (p, &s) in g.gens().iter().enumerate() {
            if phi[g.mul(x, s) as usize] != target.mul(phi[x as usize], images[p]) {
                return Err(Error::InvalidSpec(
                    "generator images do not respect the relations of a finite factor".into(),
                ));
            }
        }
    }
    Ok(())
}

/// JSON form of a subgroup; image maps are keyed by generator names, and
/// images of inverse generators may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubgroupConfig {
    Generated {
        words: Vec<String>,
    },
    FiniteKernel {
        images: BTreeMap<String, u32>,
        target: GroupConfig,
    },
    IntegerKernel {
        images: BTreeMap<String, i64>,
    },
}

fn resolve_images<T: Copy>(
    ambient: &GroupSpec,
    given: &BTreeMap<String, T>,
    inverse: impl Fn(T) -> T,
) -> Result<Vec<T>> {
    let names: Vec<String> = ambient.generators().into_iter().map(|g| g.name).collect();
    if let Some(unknown) = given.keys().find(|k| !names.contains(k)) {
        return Err(Error::Config(format!("unknown generator `{unknown}` in images")));
    }
    names
        .iter()
        .map(|name| {
            if let Some(&x) = given.get(name) {
                return Ok(x);
            }
            name.strip_suffix("^-1")
                .and_then(|base| given.get(base))
                .map(|&x| inverse(x))
                .ok_or_else(|| Error::Config(format!("missing image of generator `{name}`")))
        })
        .collect()
}

impl SubgroupConfig {
    pub fn build(&self, ambient: &GroupSpec) -> Result<SubgroupSpec> {
        match self {
            SubgroupConfig::Generated { words } => {
                let words = words
                    .iter()
                    .map(|w| ambient.parse_word(w))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Config(e.to_string()))?;
                SubgroupSpec::generated(ambient, words)
            }
            SubgroupConfig::FiniteKernel { images, target } => {
                let GroupSpec::Finite(target) = target.build()? else {
                    return Err(Error::Config("kernel target must be a finite group".into()));
                };
                let images = resolve_images(ambient, images, |x| target.inv(x))?;
                SubgroupSpec::finite_kernel(ambient, target, images)
            }
            SubgroupConfig::IntegerKernel { images } => {
                let images = resolve_images(ambient, images, |x: i64| -x)?;
                SubgroupSpec::integer_kernel(ambient, images)
            }
        }
    }

    pub fn from_json(text: &str, ambient: &GroupSpec) -> Result<SubgroupSpec> {
        let cfg: SubgroupConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("subgroup spec: {e}")))?;
        cfg.build(ambient)
    }
}
