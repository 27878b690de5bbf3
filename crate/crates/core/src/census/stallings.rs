use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{invert_word, push_reduced, Letter, Word};

/// Folded core graph of a finitely generated subgroup of a free group.
///
/// Vertices are numbered in breadth-first order from the base vertex 0
/// (letters scanned in code order), which also fixes the spanning tree and
/// the order of the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsGraph {
    rank: usize,
    /// `out[v][code]`: target of the edge labeled by letter `code` at `v`.
    out: Vec<Vec<Option<u32>>>,
    /// Tree parent and the letter leading from it.
    parent: Vec<Option<(u32, u8)>>,
    /// Basis index and orientation of every non-tree edge end.
    label: Vec<Vec<Option<(usize, bool)>>>,
    basis: Vec<Word>,
}

struct Folder {
    out: Vec<Vec<Option<u32>>>,
    uf: Vec<u32>,
    queue: Vec<(u32, u8, u32)>,
}

impl Folder {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.uf[x as usize] != x {
            let up = self.uf[self.uf[x as usize] as usize];
            self.uf[x as usize] = up;
            x = up;
        }
        x
    }

    fn vertex(&mut self, degree: usize) -> u32 {
        self.out.push(vec![None; degree]);
        self.uf.push(self.uf.len() as u32);
        (self.out.len() - 1) as u32
    }

    fn add(&mut self, u: u32, code: u8, v: u32) {
        self.queue.push((u, code, v));
        while let Some((u, l, v)) = self.queue.pop() {
            self.half(u, l, v);
            self.half(v, l ^ 1, u);
        }
    }

    fn half(&mut self, u: u32, l: u8, v: u32) {
        let (u, v) = (self.find(u), self.find(v));
        match self.out[u as usize][l as usize] {
            None => self.out[u as usize][l as usize] = Some(v),
            Some(w) => {
                let w = self.find(w);
                if w == v {
                    self.out[u as usize][l as usize] = Some(v);
                } else {
                    self.union(w, v);
                }
            }
        }
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, gone) = (a.min(b), a.max(b));
        self.uf[gone as usize] = keep;
        let edges = std::mem::take(&mut self.out[gone as usize]);
        self.out[gone as usize] = vec![None; edges.len()];
        for (l, t) in edges.into_iter().enumerate() {
            if let Some(t) = t {
                self.queue.push((keep, l as u8, t));
            }
        }
    }
}

impl StallingsGraph {
    /// Folds the bouquet of the given reduced words (identity words are ignored).
    pub fn fold(rank: usize, words: &[Word]) -> Self {
        let degree = 2 * rank;
        let mut f = Folder {
            out: Vec::new(),
            uf: Vec::new(),
            queue: Vec::new(),
        };
        f.vertex(degree);
        for w in words.iter().filter(|w| !w.is_empty()) {
            let mut cur = 0;
            for (i, l) in w.iter().enumerate() {
                let next = if i + 1 == w.len() { 0 } else { f.vertex(degree) };
                f.add(cur, l.code(), next);
                cur = next;
            }
        }

        // Relabel the surviving vertices breadth-first from the base.
        let base = f.find(0);
        let mut index = vec![u32::MAX; f.out.len()];
        let mut order = vec![base];
        index[base as usize] = 0;
        let mut parent = vec![None];
        let mut k = 0;
        while k < order.len() {
            let v = order[k];
            for l in 0..degree {
                if let Some(t) = f.out[v as usize][l] {
                    let t = f.find(t);
                    if index[t as usize] == u32::MAX {
                        index[t as usize] = order.len() as u32;
                        order.push(t);
                        parent.push(Some((k as u32, l as u8)));
                    }
                }
            }
            k += 1;
        }
        let mut out = vec![vec![None; degree]; order.len()];
        for (i, &v) in order.iter().enumerate() {
            for (l, slot) in out[i].iter_mut().enumerate() {
                if let Some(t) = f.out[v as usize][l] {
                    *slot = Some(index[f.find(t) as usize]);
                }
            }
        }

        let mut g = Self {
            rank,
            out,
            parent,
            label: vec![vec![None; degree]; order.len()],
            basis: Vec::new(),
        };
        for v in 0..g.out.len() {
            for l in (0..degree).step_by(2) {
                let Some(t) = g.out[v][l] else { continue };
                let is_tree = g.parent[t as usize] == Some((v as u32, l as u8))
                    || g.parent[v] == Some((t, (l ^ 1) as u8));
                if is_tree {
                    continue;
                }
                let mut w = g.tree_path(v as u32);
                push_reduced(&mut w, Letter::from_code(l as u8));
                for &x in invert_word(&g.tree_path(t)).iter() {
                    push_reduced(&mut w, x);
                }
                let i = g.basis.len();
                g.basis.push(w);
                g.label[v][l] = Some((i, false));
                g.label[t as usize][l ^ 1] = Some((i, true));
            }
        }
        g
    }

    /// Reduced word read along the tree from the base to `v`.
    pub fn tree_path(&self, v: u32) -> Word {
        let mut letters = Vec::new();
        let mut cur = v;
        while let Some((p, l)) = self.parent[cur as usize] {
            letters.push(Letter::from_code(l));
            cur = p;
        }
        letters.into_iter().rev().collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge(&self, v: u32, code: u8) -> Option<u32> {
        self.out[v as usize][code as usize]
    }

    /// Basis index and orientation of the edge, or None for tree edges.
    pub fn edge_label(&self, v: u32, code: u8) -> Option<(usize, bool)> {
        self.label[v as usize][code as usize]
    }

    pub fn is_complete(&self) -> bool {
        self.out.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Index of the subgroup, None when infinite.
    pub fn index(&self) -> Option<usize> {
        self.is_complete().then_some(self.vertex_count())
    }

    /// Free basis read off the non-tree edges.
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Vertex reached by reading `w` from the base, if the path exists.
    pub fn read(&self, w: &[Letter]) -> Option<u32> {
        w.iter().try_fold(0u32, |v, l| self.edge(v, l.code()))
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.read(w) == Some(0)
    }

    /// The reduced expression of `w` in the basis, as (index, inverse) pairs.
    pub fn express(&self, w: &[Letter]) -> Result<Vec<(usize, bool)>> {
        let mut v = 0u32;
        let mut out = Vec::new();
        for l in w {
            let t = self.edge(v, l.code()).ok_or(Error::NotMember)?;
            if let Some(b) = self.edge_label(v, l.code()) {
                out.push(b);
            }
            v = t;
        }
        if v != 0 {
            return Err(Error::NotMember);
        }
        Ok(out)
    }

    /// Word length of `w` with respect to the basis.
    pub fn subgroup_length(&self, w: &[Letter]) -> Result<usize> {
        self.express(w).map(|e| e.len())
    }

    /// Graph distance from each vertex to the base, following edges in either direction.
    pub fn distances_to_base(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            for t in self.out[v as usize].iter().flatten() {
                if dist[*t as usize] == usize::MAX {
                    dist[*t as usize] = dist[v as usize] + 1;
                    queue.push_back(*t);
                }
            }
        }
        dist
    }
}
