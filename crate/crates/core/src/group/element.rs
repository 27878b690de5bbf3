use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A free-group letter: generator index and orientation packed as `2 * gen + inverse`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(u8);

impl Letter {
    pub const MAX_RANK: usize = 127;

    #[inline]
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < Self::MAX_RANK);
        Letter((generator as u8) << 1 | inverse as u8)
    }

    #[inline]
    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

pub type Word = SmallVec<[Letter; 16]>;

/// Appends `l` to a reduced word, cancelling against the last letter.
#[inline]
pub fn push_reduced(word: &mut Word, l: Letter) {
    if word.last() == Some(&l.inverse()) {
        word.pop();
    } else {
        word.push(l);
    }
}

pub fn invert_word(word: &[Letter]) -> Word {
    word.iter().rev().map(|l| l.inverse()).collect()
}

/// The factor-local part of a free-product syllable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Finite(u32),
    Free(Word),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub factor: u16,
    pub part: Part,
}

/// A group element in canonical normal form.
///
/// Equal group elements always have identical representations, so the
/// derived `Eq`, `Hash` and `Ord` are the group-theoretic ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// Freely reduced word.
    Free(Word),
    /// Index into the multiplication table.
    Finite(u32),
    /// Nontrivial syllables from strictly alternating factors.
    Product(Vec<Syllable>),
    /// (finite coordinate, base coordinate).
    Direct(u32, Box<Element>),
}

impl Element {
    pub fn free(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::new();
        for l in letters {
            push_reduced(&mut w, l);
        }
        Element::Free(w)
    }

    /// Number of syllables for free-product elements, letters for free words.
    pub fn syllable_count(&self) -> usize {
        match self {
            Element::Free(w) => w.len(),
            Element::Finite(_) => 1,
            Element::Product(s) => s.len(),
            Element::Direct(_, b) => b.syllable_count(),
        }
    }
}
