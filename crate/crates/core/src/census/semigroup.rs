use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::coset::big_ratio;
use crate::error::{Error, Result};
use crate::group::{Letter, Word};

/// Generating slices S^{n_j}_{a,a}: reduced words of length n_j in F_rank
/// that start and end with the letter a.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupSlices {
    pub rank: usize,
    pub letter: Letter,
    /// Distinct slice lengths in increasing order.
    pub lengths: Vec<usize>,
}

/// Largest supported slice length (ages are tracked in a 64-bit mask).
const MAX_SLICE: usize = 63;

impl SemigroupSlices {
    pub fn new(rank: usize, letter: Letter, mut lengths: Vec<usize>) -> Result<Self> {
        if rank == 0 || letter.generator() >= rank {
            return Err(Error::InvalidSpec("designated letter outside the free group".into()));
        }
        if lengths.iter().any(|&n| n == 0 || n > MAX_SLICE) {
            return Err(Error::InvalidSpec(format!("slice lengths must lie in 1..={MAX_SLICE}")));
        }
        lengths.sort_unstable();
        lengths.dedup();
        Ok(Self { rank, letter, lengths })
    }

    /// The words of S^n_{a,a} in lexicographic order of letter codes.
    pub fn slice_words(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        let mut w = Word::new();
        w.push(self.letter);
        self.extend(&mut w, n, &mut out);
        out
    }

    fn extend(&self, w: &mut Word, n: usize, out: &mut Vec<Word>) {
        if w.len() == n {
            if w.last() == Some(&self.letter) {
                out.push(w.clone());
            }
            return;
        }
        let last = *w.last().expect("non-empty");
        for code in 0..2 * self.rank as u8 {
            let l = Letter::from_code(code);
            if l != last.inverse() {
                w.push(l);
                self.extend(w, n, out);
                w.pop();
            }
        }
    }

    /// Membership in the generated semigroup Λ⁺ by a prefix recursion over
    /// block boundaries. Slice words start and end with a, so products never
    /// cancel and w ∈ Λ⁺ iff its letters split into consecutive slice blocks.
    pub fn contains(&self, w: &[Letter]) -> bool {
        if w.is_empty() || w.windows(2).any(|p| p[1] == p[0].inverse()) {
            return false;
        }
        let n = w.len();
        let mut ok = vec![false; n + 1];
        ok[0] = true;
        for end in 1..=n {
            ok[end] = w[end - 1] == self.letter
                && self.lengths.iter().any(|&len| len <= end && ok[end - len] && w[end - len] == self.letter);
        }
        ok[n]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupRow {
    pub n: usize,
    /// Card S^n ∩ Λ⁺.
    pub count: BigUint,
    pub ball_count: BigUint,
    pub ball: BigUint,
    /// Card(B_n ∩ Λ⁺) / Card B_n.
    pub density: f64,
}

/// Exact Card(S^n ∩ Λ⁺) for n = 0..=n_max.
///
/// Counts words, not factorizations: a deterministic automaton reads the
/// word and tracks the last letter together with the set of ages (letters
/// since a possible block boundary) that are consistent with some split of
/// the prefix. Age 0 means the prefix itself lies in Λ⁺ (or is empty).
pub fn semigroup_density(slices: &SemigroupSlices, n_max: usize) -> Vec<SemigroupRow> {
    let a = slices.letter;
    let max_len = slices.lengths.last().copied().unwrap_or(0);
    let ends: u64 = slices.lengths.iter().fold(0, |m, &l| m | 1 << l);
    let mut cur: FxHashMap<(u8, u64), BigUint> = FxHashMap::default();
    // Before the first letter there is no last letter (code u8::MAX) and a boundary at 0.
    cur.insert((u8::MAX, 1), BigUint::one());
    let mut rows = Vec::with_capacity(n_max + 1);
    let (mut ball_count, mut ball) = (BigUint::zero(), BigUint::zero());
    for n in 0..=n_max {
        let count: BigUint = if n == 0 {
            BigUint::zero()
        } else {
            cur.iter().filter(|((_, ages), _)| ages & 1 == 1).map(|(_, c)| c).sum()
        };
        let sphere: BigUint = cur.values().sum();
        ball_count += &count;
        ball += &sphere;
        rows.push(SemigroupRow {
            n,
            count,
            ball_count: ball_count.clone(),
            ball: ball.clone(),
            density: big_ratio(&ball_count, &ball).0,
        });
        if n == n_max {
            break;
        }
        let mut next: FxHashMap<(u8, u64), BigUint> = FxHashMap::default();
        for ((last, ages), c) in &cur {
            for code in 0..2 * slices.rank as u8 {
                if *last != u8::MAX && code == last ^ 1 {
                    continue;
                }
                let l = Letter::from_code(code);
                // A block may only start with a.
                let mut shifted = if l == a { ages << 1 } else { (ages & !1) << 1 };
                shifted &= if max_len >= 63 { u64::MAX } else { (1u64 << (max_len + 1)) - 1 };
                if l == a && shifted & ends != 0 {
                    shifted |= 1;
                }
                *next.entry((code, shifted)).or_default() += c;
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
    }
    rows
}
