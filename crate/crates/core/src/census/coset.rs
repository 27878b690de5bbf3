use num_bigint::BigUint;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{StallingsGraph, SubgroupSpec};
use crate::error::{Error, Result};
use crate::group::{GeodesicAutomaton, GroupSpec};
use crate::series::{big_ln, group_series};

/// Right cosets Λg tracked while reading a word.
#[derive(Debug, Clone)]
enum Cosets {
    Trivial,
    Finite { order: usize, table: Vec<u32>, identity: u32, images: Vec<u32> },
    /// Index k + window for k in [-window, window]; 2·window + 1 is the overflow.
    Integer { window: i64, images: Vec<i64> },
    /// Stallings vertices; `vertex_count` is the sink for words leaving the graph.
    Graph(StallingsGraph),
}

impl Cosets {
    fn identity(&self) -> u32 {
        match self {
            Cosets::Trivial => 0,
            Cosets::Finite { identity, .. } => *identity,
            Cosets::Integer { window, .. } => *window as u32,
            Cosets::Graph(_) => 0,
        }
    }

    fn step(&self, c: u32, gen: usize) -> u32 {
        match self {
            Cosets::Trivial => 0,
            Cosets::Finite { order, table, images, .. } => table[c as usize * order + images[gen] as usize],
            Cosets::Integer { window, images } => {
                let overflow = 2 * *window as u32 + 1;
                if c == overflow {
                    return overflow;
                }
                let k = c as i64 - window + images[gen];
                if k.abs() > *window {
                    overflow
                } else {
                    (k + window) as u32
                }
            }
            Cosets::Graph(g) => {
                let sink = g.vertex_count() as u32;
                if c == sink {
                    return sink;
                }
                g.edge(c, gen as u8).unwrap_or(sink)
            }
        }
    }

    fn count(&self) -> usize {
        match self {
            Cosets::Trivial => 1,
            Cosets::Finite { order, .. } => *order,
            Cosets::Integer { window, .. } => 2 * *window as usize + 2,
            Cosets::Graph(g) => g.vertex_count() + 1,
        }
    }

    fn is_overflow(&self, c: u32) -> bool {
        matches!(self, Cosets::Integer { window, .. } if c == 2 * *window as u32 + 1)
    }
}

/// The geodesic automaton lifted to the coset space of a subgroup.
///
/// Product state (s, c) has index s·C + c where C is the number of cosets
/// (including the overflow or sink coset). A geodesic word lies in Λ iff its
/// path from (start, Λ) ends at a state whose coset is Λ itself.
#[derive(Debug, Clone)]
pub struct CosetAutomaton {
    group: GroupSpec,
    cosets: Cosets,
    states: Vec<(usize, u32)>,
    edges: Vec<Vec<(usize, usize)>>,
    start: usize,
    max_step: i64,
}

/// Perron data of the maximal strongly connected component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    /// Spectral radius e^v of the transfer matrix.
    pub spectral_radius: f64,
    /// Positive right eigenvector on `component`, zero elsewhere, normalized to max 1.
    pub vector: Vec<f64>,
    pub component: Vec<usize>,
    pub iterations: usize,
}

/// One row of a subgroup census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    /// Card S^n ∩ Λ.
    pub count: BigUint,
    /// Card B_n ∩ Λ.
    pub ball_count: BigUint,
    pub sphere: BigUint,
    pub ball: BigUint,
    /// Card(B_n ∩ Λ) / Card B_n.
    pub density: f64,
    /// log of `density`; None when the count is zero.
    pub log_density: Option<f64>,
}

/// Ratio a/b of big integers as a float, with its logarithm.
pub(crate) fn big_ratio(a: &BigUint, b: &BigUint) -> (f64, Option<f64>) {
    if a.is_zero() {
        return (0.0, None);
    }
    let l = big_ln(a) - big_ln(b);
    (l.exp(), Some(l))
}

impl CosetAutomaton {
    /// The geodesic automaton itself (one coset).
    pub fn unlifted(group: &GroupSpec) -> Self {
        Self::build(group, Cosets::Trivial, 1)
    }

    /// Lift by the cosets of `subgroup`; `window` bounds integer cosets and is
    /// ignored otherwise.
    pub fn new(subgroup: &SubgroupSpec, window: usize) -> Result<Self> {
        let group = subgroup.ambient();
        if !matches!(group, GroupSpec::Free { .. } | GroupSpec::FreeProduct(_)) {
            return Err(Error::Unsupported(
                "coset automata need a free group or a free product".into(),
            ));
        }
        let cosets = match subgroup {
            SubgroupSpec::Generated { graph, .. } => Cosets::Graph(graph.clone()),
            SubgroupSpec::FiniteKernel { target, images, .. } => Cosets::Finite {
                order: target.order(),
                table: target.rows().concat(),
                identity: target.identity(),
                images: images.clone(),
            },
            SubgroupSpec::IntegerKernel { images, .. } => Cosets::Integer {
                window: window as i64,
                images: images.clone(),
            },
        };
        Ok(Self::build(group, cosets, subgroup.max_step()))
    }

    fn build(group: &GroupSpec, cosets: Cosets, max_step: i64) -> Self {
        let aut = GeodesicAutomaton::new(group);
        let c_count = cosets.count();
        let mut states = Vec::with_capacity(aut.state_count() * c_count);
        let mut edges = Vec::with_capacity(aut.state_count() * c_count);
        for s in 0..aut.state_count() {
            for c in 0..c_count as u32 {
                states.push((s, c));
                edges.push(
                    aut.edges(s)
                        .iter()
                        .map(|&(gen, t)| (gen, t * c_count + cosets.step(c, gen) as usize))
                        .collect(),
                );
            }
        }
        Self {
            group: group.clone(),
            start: aut.start() * c_count + cosets.identity() as usize,
            cosets,
            states,
            edges,
            max_step,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// (geodesic-automaton state, coset index) of product state `i`.
    pub fn state(&self, i: usize) -> (usize, u32) {
        self.states[i]
    }

    pub fn edges(&self, i: usize) -> &[(usize, usize)] {
        &self.edges[i]
    }

    pub fn is_member(&self, i: usize) -> bool {
        self.states[i].1 == self.cosets.identity()
    }

    pub fn is_overflow(&self, i: usize) -> bool {
        self.cosets.is_overflow(self.states[i].1)
    }

    /// Coset of an integer kernel as the integer φ(g); None on overflow or for other subgroups.
    pub fn integer_coset(&self, i: usize) -> Option<i64> {
        match &self.cosets {
            Cosets::Integer { window, .. } if !self.is_overflow(i) => Some(self.states[i].1 as i64 - window),
            _ => None,
        }
    }

    /// State reached from the start by reading a word of generator indices,
    /// if the word is accepted.
    pub fn state_after(&self, word: &[usize]) -> Option<usize> {
        word.iter().try_fold(self.start, |s, &g| {
            self.edges[s].iter().find(|&&(h, _)| h == g).map(|&(_, t)| t)
        })
    }

    /// Largest length for which counts are exact: windowed integer cosets can
    /// only be corrupted by paths that leave the window and come back.
    pub fn valid_length(&self) -> usize {
        match &self.cosets {
            Cosets::Integer { window, .. } => {
                let m = self.max_step.max(1);
                let out_and_back = 2 * ((window + 1 + m - 1) / m);
                (out_and_back - 1) as usize
            }
            _ => usize::MAX,
        }
    }

    fn check_valid(&self, n: usize, overflow_mass: bool) -> Result<()> {
        if overflow_mass && n > self.valid_length() {
            return Err(Error::WindowOverflow(n));
        }
        Ok(())
    }

    /// Number of accepted words of each length 0..=n, ignoring cosets.
    pub fn path_counts(&self, n: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(n + 1);
        self.propagate(n, |_, v| out.push(v.iter().sum()));
        out
    }

    /// Runs the forward recursion from the start state, calling `f(k, vector)` for k = 0..=n.
    fn propagate(&self, n: usize, mut f: impl FnMut(usize, &[BigUint])) {
        let mut cur = vec![BigUint::zero(); self.states.len()];
        cur[self.start] = BigUint::one();
        for k in 0..=n {
            f(k, &cur);
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
    }

    /// Census rows for n = 0..=n_max.
    pub fn census(&self, n_max: usize) -> Result<Vec<CensusRow>> {
        let mut rows = Vec::with_capacity(n_max + 1);
        let mut err = None;
        let (mut ball_count, mut ball) = (BigUint::zero(), BigUint::zero());
        self.propagate(n_max, |k, v| {
            if err.is_some() {
                return;
            }
            let overflow = v.iter().enumerate().any(|(s, c)| !c.is_zero() && self.is_overflow(s));
            if let Err(e) = self.check_valid(k, overflow) {
                err = Some(e);
                return;
            }
            let count: BigUint = v.iter().enumerate().filter(|(s, _)| self.is_member(*s)).map(|(_, c)| c).sum();
            let sphere: BigUint = v.iter().sum();
            ball_count += &count;
            ball += &sphere;
            let (density, log_density) = big_ratio(&ball_count, &ball);
            rows.push(CensusRow {
                n: k,
                count,
                ball_count: ball_count.clone(),
                sphere,
                ball: ball.clone(),
                density,
                log_density,
            });
        });
        match err {
            Some(e) => Err(e),
            None => Ok(rows),
        }
    }

    /// Exact Card S^n ∩ Λ with the ball density.
    pub fn count_in_sphere(&self, n: usize) -> Result<CensusRow> {
        Ok(self.census(n)?.pop().expect("n + 1 rows"))
    }

    /// Perron root and vector of the strongly connected component with the
    /// largest spectral radius, by power iteration on A + I.
    pub fn perron(&self) -> PerronData {
        let mut graph = DiGraph::<(), ()>::with_capacity(self.states.len(), 0);
        let nodes: Vec<_> = (0..self.states.len()).map(|_| graph.add_node(())).collect();
        for (s, out) in self.edges.iter().enumerate() {
            for &(_, t) in out {
                graph.add_edge(nodes[s], nodes[t], ());
            }
        }
        let mut best: Option<PerronData> = None;
        for comp in tarjan_scc(&graph) {
            let members: Vec<usize> = comp.iter().map(|n| n.index()).collect();
            let cyclic = members.len() > 1 || self.edges[members[0]].iter().any(|&(_, t)| t == members[0]);
            if !cyclic {
                continue;
            }
            let data = self.power_iteration(&members);
            if best.as_ref().is_none_or(|b| data.spectral_radius > b.spectral_radius + 1e-12) {
                best = Some(data);
            }
        }
        best.unwrap_or(PerronData {
            spectral_radius: 0.0,
            vector: vec![0.0; self.states.len()],
            component: Vec::new(),
            iterations: 0,
        })
    }

    fn power_iteration(&self, members: &[usize]) -> PerronData {
        let mut inside = vec![false; self.states.len()];
        for &m in members {
            inside[m] = true;
        }
        let mut q = vec![0.0; self.states.len()];
        for &m in members {
            q[m] = 1.0;
        }
        let mut rho = 0.0;
        let mut iterations = 0;
        for it in 1..=1_000_000 {
            iterations = it;
            let mut next = vec![0.0; self.states.len()];
            for &x in members {
                let mut acc = q[x];
                for &(_, y) in &self.edges[x] {
                    if inside[y] {
                        acc += q[y];
                    }
                }
                next[x] = acc;
            }
            let max = members.iter().map(|&x| next[x]).fold(0.0, f64::max);
            let mut change: f64 = 0.0;
            for &x in members {
                next[x] /= max;
                change = change.max((next[x] - q[x]).abs());
            }
            rho = max - 1.0;
            q = next;
            if change < 1e-15 {
                break;
            }
        }
        // Rayleigh-type refinement with the converged vector.
        let (num, den) = members.iter().fold((0.0, 0.0), |(n, d), &x| {
            let aq: f64 = self.edges[x].iter().filter(|(_, y)| inside[*y]).map(|&(_, y)| q[y]).sum();
            (n + aq, d + q[x])
        });
        if den > 0.0 {
            rho = num / den;
        }
        let mut component = members.to_vec();
        component.sort_unstable();
        PerronData {
            spectral_radius: rho,
            vector: q,
            component,
            iterations,
        }
    }

    /// Normalized chain p(x, y) = A_xy q(y) / (ρ q(x)) on the Perron component,
    /// as (x, y, p) triples with parallel edges merged.
    pub fn normalized_chain(&self, perron: &PerronData) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        let inside: Vec<bool> = perron.vector.iter().map(|&v| v > 0.0).collect();
        for &x in &perron.component {
            let mut row: Vec<(usize, f64)> = Vec::new();
            for &(_, y) in &self.edges[x] {
                if !inside[y] {
                    continue;
                }
                let p = perron.vector[y] / (perron.spectral_radius * perron.vector[x]);
                match row.iter_mut().find(|(t, _)| *t == y) {
                    Some(e) => e.1 += p,
                    None => row.push((y, p)),
                }
            }
            row.sort_by_key(|e| e.0);
            out.extend(row.into_iter().map(|(y, p)| (x, y, p)));
        }
        out
    }
}

/// One row of the lifted return experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnRow {
    pub n: usize,
    /// Paths of length n from the state back to it visiting it at least ⌈ε₀n⌉ times.
    pub count: BigUint,
    /// e^{-nv} · count.
    pub normalized: f64,
}

/// Counts closed lifted paths at `state` with many visits, for n = 0..=n_max.
/// Visits are the times 1..=n spent at the state; the visit coordinate of the
/// recursion saturates at the threshold ⌈ε₀n⌉.
pub fn lifted_return_experiment(aut: &CosetAutomaton, state: usize, n_max: usize, eps0: f64) -> Result<Vec<ReturnRow>> {
    if state >= aut.state_count() {
        return Err(Error::Config(format!("state {state} out of range")));
    }
    if !(0.0..=1.0).contains(&eps0) {
        return Err(Error::Config("ε₀ must lie in [0, 1]".into()));
    }
    if n_max > aut.valid_length() {
        return Err(Error::WindowOverflow(n_max));
    }
    let v = group_series(aut.group()).growth_rate()?.v;
    let mut rows = Vec::with_capacity(n_max + 1);
    let states = aut.state_count();
    for n in 0..=n_max {
        let t = (eps0 * n as f64 - 1e-12).ceil().max(0.0) as usize;
        let width = t + 1;
        let mut cur = vec![BigUint::zero(); states * width];
        cur[state * width] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); states * width];
            for s in 0..states {
                for c in 0..width {
                    let m = &cur[s * width + c];
                    if m.is_zero() {
                        continue;
                    }
                    for &(_, y) in aut.edges(s) {
                        let c2 = if y == state { (c + 1).min(t) } else { c };
                        next[y * width + c2] += m;
                    }
                }
            }
            cur = next;
        }
        let count = cur[state * width + t].clone();
        let normalized = if count.is_zero() {
            0.0
        } else {
            (big_ln(&count) - n as f64 * v).exp()
        };
        rows.push(ReturnRow { n, count, normalized });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::FiniteGroup;

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    /// Card S^n ∩ Λ by enumeration and membership.
    fn brute(s: &SubgroupSpec, n: usize) -> BigUint {
        let g = s.ambient();
        BigUint::from(g.enumerate_sphere(n, 1_000_000).unwrap().iter().filter(|x| s.contains(x)).count())
    }

    #[test]
    fn unlifted_free_group() {
        let aut = CosetAutomaton::unlifted(&f2());
        assert_eq!(aut.state_count(), 5);
        let p = aut.perron();
        assert!((p.spectral_radius - 3.0).abs() < 1e-12);
        assert_eq!(p.component.len(), 4);
        for (_, _, q) in aut.normalized_chain(&p) {
            assert!((q - 1.0 / 3.0).abs() < 1e-12);
        }
        let counts: Vec<u64> = aut.path_counts(4).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(counts, vec![1, 4, 12, 36, 108]);
    }

    #[test]
    fn spectral_radius_matches_growth() {
        for g in [
            f2(),
            GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()]).unwrap(),
            GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(3).unwrap()]).unwrap(),
            GroupSpec::free(3).unwrap(),
        ] {
            let aut = CosetAutomaton::unlifted(&g);
            let p = aut.perron();
            let v = group_series(&g).growth_rate().unwrap().v;
            assert!((p.spectral_radius.ln() - v).abs() < 1e-10, "{g:?}");
            let mut sums = vec![0.0; aut.state_count()];
            for (x, _, q) in aut.normalized_chain(&p) {
                sums[x] += q;
            }
            for &x in &p.component {
                assert!((sums[x] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn finite_kernel_counts() {
        let g = f2();
        let s = SubgroupSpec::finite_kernel(&g, Arc::new(FiniteGroup::cyclic(3).unwrap()), vec![1, 2, 0, 0]).unwrap();
        let aut = CosetAutomaton::new(&s, 0).unwrap();
        assert_eq!(aut.state_count(), 15);
        let rows = aut.census(8).unwrap();
        for row in &rows {
            assert_eq!(row.count, brute(&s, row.n), "n={}", row.n);
        }
    }

    #[test]
    fn integer_kernel_counts() {
        let g = f2();
        let s = SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1]).unwrap();
        let aut = CosetAutomaton::new(&s, 8).unwrap();
        let rows = aut.census(8).unwrap();
        let want = [1u32, 0, 4, 0, 28, 0, 212, 0, 1676];
        for (row, w) in rows.iter().zip(want) {
            assert_eq!(row.count, BigUint::from(w));
            assert_eq!(row.count, brute(&s, row.n));
        }
        // A window of 2 is exact up to length 5 only.
        let small = CosetAutomaton::new(&s, 2).unwrap();
        assert_eq!(small.valid_length(), 5);
        assert!(small.census(5).is_ok());
        assert!(matches!(small.census(6), Err(Error::WindowOverflow(6))));
    }

    #[test]
    fn generated_subgroup_counts() {
        let g = f2();
        for words in [vec!["a^2", "b", "a b a^-1"], vec!["a^2", "b^2"], vec!["a"], vec!["a b a^-1 b^-1"]] {
            let s = SubgroupSpec::generated(&g, words.iter().map(|w| g.parse_word(w).unwrap()).collect()).unwrap();
            let aut = CosetAutomaton::new(&s, 0).unwrap();
            for row in aut.census(7).unwrap() {
                assert_eq!(row.count, brute(&s, row.n), "{words:?} n={}", row.n);
            }
        }
    }

    #[test]
    fn free_product_kernel_counts() {
        let g = GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()]).unwrap();
        let s = SubgroupSpec::finite_kernel(&g, Arc::new(FiniteGroup::cyclic(2).unwrap()), vec![1, 1, 1]).unwrap();
        let aut = CosetAutomaton::new(&s, 0).unwrap();
        for row in aut.census(8).unwrap() {
            assert_eq!(row.count, brute(&s, row.n));
        }
    }

    #[test]
    fn returns_decay() {
        let g = f2();
        let s = SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1]).unwrap();
        let aut = CosetAutomaton::new(&s, 40).unwrap();
        // After reading a b⁻¹: last letter b⁻¹, coset 0.
        let x = aut.state_after(&[0, 3]).unwrap();
        assert_eq!(aut.integer_coset(x), Some(0));
        let rows = lifted_return_experiment(&aut, x, 40, 0.25).unwrap();
        assert_eq!(rows[0].count, BigUint::one());
        assert!(rows[40].normalized < rows[20].normalized);
        assert!(rows[20].normalized < rows[10].normalized);
        let plain = lifted_return_experiment(&aut, x, 12, 0.0).unwrap();
        assert!(plain[12].count >= rows[12].count);
    }
}
