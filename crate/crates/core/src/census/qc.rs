use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::coset::big_ratio;
use super::{CosetAutomaton, SubgroupSpec};
use crate::error::{Error, Result};
use crate::group::Element;

/// Quasi-convex census at one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcRow {
    pub n: usize,
    /// Card S^n ∩ Λ.
    pub members: BigUint,
    /// Card S^n ∩ Λ_QC(ε, M).
    pub qc: BigUint,
    pub ball: BigUint,
    /// qc / Card B_n.
    pub density: f64,
    pub log_density: Option<f64>,
}

/// Number of prefix times i in 1..=|g| at which the canonical geodesic of g
/// is within distance `m` of Λ.
pub fn qc_prefix_count(subgroup: &SubgroupSpec, g: &Element, m: usize) -> usize {
    let group = subgroup.ambient();
    let mut x = group.identity();
    let mut count = 0;
    for i in group.geodesic_word(g) {
        group.mul_assign(&mut x, &group.generator(i));
        if subgroup.distance_to_subgroup(&x) <= m {
            count += 1;
        }
    }
    count
}

fn threshold(eps: f64, n: usize) -> usize {
    (eps * n as f64 - 1e-12).ceil().max(0.0) as usize
}

/// Distance to Λ of every product state's coset (usize::MAX for overflow or sink).
fn state_distances(subgroup: &SubgroupSpec, aut: &CosetAutomaton) -> Vec<usize> {
    let per_coset: Box<dyn Fn(usize) -> usize> = match subgroup {
        SubgroupSpec::Generated { graph, .. } => {
            let d = graph.distances_to_base();
            Box::new(move |i| {
                let c = aut.state(i).1 as usize;
                d.get(c).copied().unwrap_or(usize::MAX)
            })
        }
        SubgroupSpec::FiniteKernel { .. } => {
            let d = subgroup.finite_quotient_distances();
            Box::new(move |i| d[aut.state(i).1 as usize])
        }
        SubgroupSpec::IntegerKernel { .. } => {
            let k_max = (0..aut.state_count()).filter_map(|i| aut.integer_coset(i)).map(i64::unsigned_abs).max();
            let d = subgroup.integer_quotient_distances(k_max.unwrap_or(0) as usize);
            Box::new(move |i| aut.integer_coset(i).map_or(usize::MAX, |k| d[k.unsigned_abs() as usize]))
        }
    };
    (0..aut.state_count()).map(per_coset).collect()
}

/// Exact Card(S^n ∩ Λ_QC(ε, M)): elements of Λ whose canonical geodesic is
/// within distance M of Λ at no fewer than εn of the times 1..=n.
///
/// d(γ(i), Λ) depends only on the coset Λγ(i), so the census is a
/// recursion over (lifted state, capped count of close times).
pub fn qc_census(subgroup: &SubgroupSpec, eps: f64, m: usize, n: usize) -> Result<QcRow> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Config("ε must lie in [0, 1]".into()));
    }
    let window = n * subgroup.max_step() as usize;
    let aut = CosetAutomaton::new(subgroup, window)?;
    let near: Vec<bool> = state_distances(subgroup, &aut).into_iter().map(|d| d <= m).collect();
    let t = threshold(eps, n);
    let width = t + 1;
    let states = aut.state_count();
    let mut cur = vec![BigUint::zero(); states * width];
    cur[aut.start() * width] = BigUint::one();
    let mut ball = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); states * width];
        for s in 0..states {
            for c in 0..width {
                let x = &cur[s * width + c];
                if x.is_zero() {
                    continue;
                }
                for &(_, y) in aut.edges(s) {
                    let c2 = if near[y] { (c + 1).min(t) } else { c };
                    next[y * width + c2] += x;
                }
            }
        }
        cur = next;
        ball += cur.iter().sum::<BigUint>();
    }
    let mut members = BigUint::zero();
    let mut qc = BigUint::zero();
    for s in (0..states).filter(|&s| aut.is_member(s)) {
        for c in 0..width {
            members += &cur[s * width + c];
        }
        qc += &cur[s * width + t];
    }
    let (density, log_density) = big_ratio(&qc, &ball);
    Ok(QcRow {
        n,
        members,
        qc,
        ball,
        density,
        log_density,
    })
}

/// Undistorted census at one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UdRow {
    pub n: usize,
    pub members: BigUint,
    /// Card{g ∈ S^n ∩ Λ : d_Λ(e, g) ≤ D |g|}.
    pub undistorted: BigUint,
}

/// Exact Card(S^n ∩ Λ_UD(D)) for a generated subgroup: the subgroup length
/// is the number of non-tree edges on the path of g in the Stallings graph.
pub fn ud_census(subgroup: &SubgroupSpec, d: f64, n: usize) -> Result<UdRow> {
    let graph = subgroup
        .stallings()
        .ok_or_else(|| Error::Unsupported("undistorted census needs a generated subgroup".into()))?;
    if d < 0.0 || !d.is_finite() {
        return Err(Error::Config("D must be a nonnegative number".into()));
    }
    let aut = CosetAutomaton::new(subgroup, 0)?;
    let limit = ((d * n as f64 + 1e-12).floor() as usize).min(n);
    let width = limit + 1;
    let states = aut.state_count();
    let sink = graph.vertex_count() as u32;
    let mut cur = vec![BigUint::zero(); states * width];
    let mut all = vec![BigUint::zero(); states];
    cur[aut.start() * width] = BigUint::one();
    all[aut.start()] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); states * width];
        let mut next_all = vec![BigUint::zero(); states];
        for s in 0..states {
            let v = aut.state(s).1;
            if !all[s].is_zero() {
                for &(_, y) in aut.edges(s) {
                    next_all[y] += &all[s];
                }
            }
            if v == sink {
                continue;
            }
            for k in 0..width {
                let x = &cur[s * width + k];
                if x.is_zero() {
                    continue;
                }
                for &(gen, y) in aut.edges(s) {
                    let k2 = k + graph.edge_label(v, gen as u8).is_some() as usize;
                    if k2 < width && aut.state(y).1 != sink {
                        next[y * width + k2] += x;
                    }
                }
            }
        }
        cur = next;
        all = next_all;
    }
    let mut members = BigUint::zero();
    let mut undistorted = BigUint::zero();
    for s in (0..states).filter(|&s| aut.is_member(s)) {
        members += &all[s];
        for k in 0..width {
            undistorted += &cur[s * width + k];
        }
    }
    Ok(UdRow {
        n,
        members,
        undistorted,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::{FiniteGroup, GroupSpec};

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    fn generated(g: &GroupSpec, ws: &[&str]) -> SubgroupSpec {
        SubgroupSpec::generated(g, ws.iter().map(|w| g.parse_word(w).unwrap()).collect()).unwrap()
    }

    fn brute_qc(s: &SubgroupSpec, eps: f64, m: usize, n: usize) -> (usize, usize) {
        let members: Vec<Element> =
            s.ambient().enumerate_sphere(n, 1_000_000).unwrap().into_iter().filter(|x| s.contains(x)).collect();
        let qc = members.iter().filter(|x| qc_prefix_count(s, x, m) >= threshold(eps, n)).count();
        (members.len(), qc)
    }

    #[test]
    fn qc_matches_enumeration() {
        let g = f2();
        let specs = [
            SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1]).unwrap(),
            SubgroupSpec::finite_kernel(&g, Arc::new(FiniteGroup::cyclic(3).unwrap()), vec![1, 2, 0, 0]).unwrap(),
            generated(&g, &["a^2", "b a b^-1"]),
        ];
        for s in &specs {
            for (eps, m) in [(0.5, 1), (0.5, 2), (1.0, 1), (0.0, 0)] {
                for n in [4, 6, 7] {
                    let row = qc_census(s, eps, m, n).unwrap();
                    let (members, qc) = brute_qc(s, eps, m, n);
                    assert_eq!(row.members, BigUint::from(members));
                    assert_eq!(row.qc, BigUint::from(qc), "{s:?} eps={eps} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn qc_examples() {
        let g = f2();
        let s = SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1]).unwrap();
        for k in 1..6 {
            let x = g.power(&g.parse_word("a b^-1").unwrap(), k);
            assert_eq!(qc_prefix_count(&s, &x, 1), 2 * k as usize);
        }
        let x = g.parse_word("a^5 b^-5").unwrap();
        assert!(qc_prefix_count(&s, &x, 1) < 5);
        // ε = 0 counts all of S^n ∩ Λ.
        let row = qc_census(&s, 0.0, 1, 8).unwrap();
        assert_eq!(row.qc, row.members);
        assert_eq!(row.members, BigUint::from(1676u32));
    }

    #[test]
    fn ud_examples() {
        let g = f2();
        let k2 = generated(&g, &["a^2", "b", "a b a^-1"]);
        for n in 0..=6 {
            let row = ud_census(&k2, 2.0, n).unwrap();
            assert_eq!(row.undistorted, row.members);
            let brute = g
                .enumerate_sphere(n, 10_000)
                .unwrap()
                .into_iter()
                .filter(|x| k2.contains(x) && match x {
                    Element::Free(w) => k2.stallings().unwrap().subgroup_length(w).unwrap() <= n,
                    _ => false,
                })
                .count();
            assert_eq!(ud_census(&k2, 1.0, n).unwrap().undistorted, BigUint::from(brute));
        }
        let cyc = generated(&g, &["a"]);
        for n in 1..6 {
            assert_eq!(ud_census(&cyc, 1.0, n).unwrap().undistorted, BigUint::from(2u8));
        }
        assert_eq!(ud_census(&k2, 0.0, 0).unwrap().undistorted, BigUint::one());
        assert!(ud_census(&k2, 0.0, 3).unwrap().undistorted.is_zero());
        // a⁴ = (a²)² has subgroup length 2.
        assert!(ud_census(&k2, 0.25, 4).unwrap().undistorted < ud_census(&k2, 0.5, 4).unwrap().undistorted);
    }
}
