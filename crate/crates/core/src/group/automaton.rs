use num_bigint::BigUint;
use num_traits::Zero;
use rustc_hash::FxHashMap;

use super::{product_offsets, Element, Factor, GroupSpec};

/// State of the geodesic automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AutState {
    Start,
    /// Last letter read lies in a free factor.
    InFree { factor: u16, letter: u8 },
    /// Inside a finite-factor syllable whose current value is `elem`.
    InFinite { factor: u16, elem: u32 },
    /// Reading the finite coordinate of a direct product.
    Tail { elem: u32 },
}

/// Deterministic automaton accepting exactly one geodesic per group element:
/// freely reduced words in free factors, and the breadth-first-tree geodesic
/// inside each finite syllable. Every state is accepting, and a word of length
/// n is accepted iff it is the canonical geodesic of an element of S^n.
#[derive(Debug, Clone)]
pub struct GeodesicAutomaton {
    states: Vec<AutState>,
    /// Outgoing edges `(generator, target)` sorted by generator index.
    edges: Vec<Vec<(usize, usize)>>,
    generator_count: usize,
}

struct Builder {
    states: Vec<AutState>,
    index: FxHashMap<AutState, usize>,
}

impl Builder {
    fn id(&mut self, s: AutState) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.states.len();
        self.states.push(s);
        self.index.insert(s, i);
        i
    }
}

impl GeodesicAutomaton {
    pub fn new(group: &GroupSpec) -> Self {
        let (factors, tail) = match group {
            GroupSpec::Free { rank } => (vec![Factor::Free { rank: *rank }], None),
            GroupSpec::Finite(g) => (vec![Factor::Finite(g.clone())], None),
            GroupSpec::FreeProduct(fs) => (fs.clone(), None),
            GroupSpec::DirectWithFinite { finite, base } => (base.factors(), Some(finite.clone())),
        };
        let offsets = product_offsets(&factors);
        let base_count: usize = factors.iter().map(Factor::generator_count).sum();

        let mut b = Builder {
            states: Vec::new(),
            index: FxHashMap::default(),
        };
        b.id(AutState::Start);
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut k = 0;
        while k < b.states.len() {
            let s = b.states[k];
            let mut out = Vec::new();
            let in_tail = matches!(s, AutState::Tail { .. });
            if !in_tail {
                for (f, factor) in factors.iter().enumerate() {
                    let off = offsets[f];
                    match factor {
                        Factor::Free { rank } => {
                            for code in 0..2 * rank {
                                let allowed = match s {
                                    AutState::InFree { factor, letter } if factor as usize == f => {
                                        code != (letter ^ 1) as usize
                                    }
                                    _ => true,
                                };
                                if allowed {
                                    let t = b.id(AutState::InFree {
                                        factor: f as u16,
                                        letter: code as u8,
                                    });
                                    out.push((off + code, t));
                                }
                            }
                        }
                        Factor::Finite(g) => {
                            let cur = match s {
                                AutState::InFinite { factor, elem } if factor as usize == f => elem,
                                _ => g.identity(),
                            };
                            for (p, &x) in g.gens().iter().enumerate() {
                                let y = g.mul(cur, x);
                                if g.parent(y) == Some((cur, p)) {
                                    let t = b.id(AutState::InFinite {
                                        factor: f as u16,
                                        elem: y,
                                    });
                                    out.push((off + p, t));
                                }
                            }
                        }
                    }
                }
            }
            if let Some(fin) = &tail {
                let cur = match s {
                    AutState::Tail { elem } => elem,
                    _ => fin.identity(),
                };
                for (p, &x) in fin.gens().iter().enumerate() {
                    let y = fin.mul(cur, x);
                    if fin.parent(y) == Some((cur, p)) {
                        let t = b.id(AutState::Tail { elem: y });
                        out.push((base_count + p, t));
                    }
                }
            }
            out.sort_unstable();
            edges.push(out);
            k += 1;
        }
        Self {
            states: b.states,
            edges,
            generator_count: group.generator_count(),
        }
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> AutState {
        self.states[i]
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Outgoing `(generator, target)` pairs of state `i`, sorted by generator.
    pub fn edges(&self, i: usize) -> &[(usize, usize)] {
        &self.edges[i]
    }

    /// Number of accepted words of each length 0..=n.
    pub fn path_counts(&self, n: usize) -> Vec<BigUint> {
        let mut cur = vec![BigUint::zero(); self.states.len()];
        cur[0] = BigUint::from(1u8);
        let mut totals = Vec::with_capacity(n + 1);
        for k in 0..=n {
            totals.push(cur.iter().sum());
            if k == n {
                break;
            }
            let mut next = vec![BigUint::zero(); self.states.len()];
            for (s, c) in cur.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &(_, t) in &self.edges[s] {
                    next[t] += c;
                }
            }
            cur = next;
        }
        totals
    }

    /// Calls `f(word, element)` for every accepted word of length `n`, in
    /// lexicographic order of generator indices.
    pub fn for_each_word(&self, group: &GroupSpec, n: usize, mut f: impl FnMut(&[usize], &Element)) {
        let gens: Vec<Element> = (0..self.generator_count).map(|i| group.generator(i)).collect();
        let mut word = Vec::with_capacity(n);
        let mut elems = vec![group.identity()];
        self.dfs(group, &gens, 0, n, &mut word, &mut elems, &mut f);
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        group: &GroupSpec,
        gens: &[Element],
        state: usize,
        remaining: usize,
        word: &mut Vec<usize>,
        elems: &mut Vec<Element>,
        f: &mut impl FnMut(&[usize], &Element),
    ) {
        if remaining == 0 {
            f(word, elems.last().expect("non-empty stack"));
            return;
        }
        for &(g, t) in &self.edges[state] {
            let mut next = elems.last().expect("non-empty stack").clone();
            group.mul_assign(&mut next, &gens[g]);
            word.push(g);
            elems.push(next);
            self.dfs(group, gens, t, remaining - 1, word, elems, f);
            elems.pop();
            word.pop();
        }
    }
}
