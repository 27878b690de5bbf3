use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A finite group given by its multiplication table and a symmetric
/// generating set.
///
/// Word lengths and canonical geodesics are computed once by a breadth-first
/// search from the identity that scans generators in list order, so the
/// canonical geodesic of every element is the lexicographically least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    gens: Vec<u32>,
    dist: Vec<u32>,
    /// BFS tree parent of each non-identity element: (parent, generator position).
    parent: Vec<Option<(u32, u16)>>,
    cyclic: bool,
}

impl FiniteGroup {
    pub fn new(rows: Vec<Vec<u32>>, gens: Vec<u32>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidSpec("empty multiplication table".into()));
        }
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::InvalidSpec("multiplication table is not square".into()));
        }
        if rows.iter().flatten().any(|&x| x as usize >= order) {
            return Err(Error::InvalidSpec("table entry out of range".into()));
        }
        let table: Vec<u32> = rows.into_iter().flatten().collect();
        let at = |x: usize, y: usize| table[x * order + y] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidSpec("table has no identity".into()))?;

        for x in 0..order {
            for y in 0..order {
                let xy = at(x, y);
                for z in 0..order {
                    if at(xy, z) != at(x, at(y, z)) {
                        return Err(Error::InvalidSpec(format!(
                            "table is not associative at ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }

        let mut inverse = vec![0u32; order];
        for (x, inv) in inverse.iter_mut().enumerate() {
            let y = (0..order)
                .find(|&y| at(x, y) == identity)
                .ok_or_else(|| Error::InvalidSpec(format!("element {x} has no inverse")))?;
            *inv = y as u32;
        }

        let mut seen = vec![false; order];
        for &g in &gens {
            if g as usize >= order {
                return Err(Error::InvalidSpec(format!("generator {g} out of range")));
            }
            if g as usize == identity {
                return Err(Error::InvalidSpec("identity listed as a generator".into()));
            }
            if seen[g as usize] {
                return Err(Error::InvalidSpec(format!("generator {g} listed twice")));
            }
            seen[g as usize] = true;
        }
        if gens.iter().any(|&g| !seen[inverse[g as usize] as usize]) {
            return Err(Error::InvalidSpec("generating set is not closed under inversion".into()));
        }

        let mut dist = vec![u32::MAX; order];
        let mut parent = vec![None; order];
        dist[identity] = 0;
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for (p, &g) in gens.iter().enumerate() {
                let y = at(x, g as usize);
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = Some((x as u32, p as u16));
                    queue.push_back(y);
                }
            }
        }
        if dist.contains(&u32::MAX) {
            return Err(Error::InvalidSpec("declared generators do not generate the group".into()));
        }

        Ok(Self {
            order,
            table,
            identity: identity as u32,
            inverse,
            gens,
            dist,
            parent,
            cyclic: false,
        })
    }

    /// Z/n with generators {1, n-1}.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec("cyclic group order must be at least 2".into()));
        }
        let rows = (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
            .collect();
        let mut gens = vec![1u32];
        if n > 2 {
            gens.push((n - 1) as u32);
        }
        let mut g = Self::new(rows, gens)?;
        g.cyclic = true;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn gens(&self) -> &[u32] {
        &self.gens
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize * self.order + y as usize]
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        self.inverse[x as usize]
    }

    #[inline]
    pub fn length(&self, x: u32) -> usize {
        self.dist[x as usize] as usize
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// BFS-tree parent of `x`, as (parent element, generator position).
    pub fn parent(&self, x: u32) -> Option<(u32, usize)> {
        self.parent[x as usize].map(|(p, g)| (p, g as usize))
    }

    /// Canonical geodesic of `x` as positions into [`Self::gens`].
    pub fn geodesic(&self, x: u32) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length(x));
        let mut cur = x;
        while let Some((p, g)) = self.parent(cur) {
            word.push(g);
            cur = p;
        }
        word.reverse();
        word
    }

    /// Number of elements at each distance from the identity.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let max = self.dist.iter().copied().max().unwrap_or(0) as usize;
        let mut sizes = vec![0; max + 1];
        for &d in &self.dist {
            sizes[d as usize] += 1;
        }
        sizes
    }

    /// Nontrivial elements in increasing index order.
    pub fn nontrivial(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.order as u32).filter(move |&x| x != self.identity)
    }

    /// Position in the generator list of the element `g`, if it is a generator.
    pub fn gen_position(&self, g: u32) -> Option<usize> {
        self.gens.iter().position(|&s| s == g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_four_lengths_and_geodesics() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(z4.length(3), 1);
        assert_eq!(z4.length(2), 2);
        assert_eq!(z4.inv(3), 1);
        assert_eq!(z4.geodesic(2), vec![0, 0]);
        assert_eq!(z4.sphere_sizes(), vec![1, 2, 1]);
    }

    #[test]
    fn rejects_non_associative_table() {
        // A Latin square with identity 0 that is not a group.
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::new(rows, vec![1, 2, 3, 4]).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
    }

    #[test]
    fn rejects_non_generating_and_asymmetric_sets() {
        let rows = FiniteGroup::cyclic(4).unwrap().rows();
        assert!(FiniteGroup::new(rows.clone(), vec![2]).is_err());
        assert!(FiniteGroup::new(rows, vec![1]).is_err());
    }

    #[test]
    fn klein_four_group() {
        let rows = (0..4u32).map(|i| (0..4u32).map(|j| i ^ j).collect()).collect();
        let v4 = FiniteGroup::new(rows, vec![1, 2]).unwrap();
        assert_eq!(v4.sphere_sizes(), vec![1, 2, 1]);
        assert_eq!(v4.geodesic(3), vec![0, 1]);
    }
}
