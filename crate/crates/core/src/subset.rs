//! Fixed-width bitsets over element indices.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::MAX_ORDER;

const WORDS: usize = MAX_ORDER / 64;

/// A set of element indices of one algebra, stored as a bitmask.
///
/// The universe size is kept so that complements and full sets are well defined.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    n: u16,
    words: [u64; WORDS],
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_ORDER, "subset universe {n} exceeds {MAX_ORDER}");
        Subset {
            n: n as u16,
            words: [0; WORDS],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Subset::empty(n);
        for x in 0..n {
            s.insert(x);
        }
        s
    }

    /// The trivial subset `{0}`.
    pub fn identity(n: usize) -> Self {
        Subset::from_indices(n, [0])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, items: I) -> Self {
        let mut s = Subset::empty(n);
        for x in items {
            s.insert(x);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < self.n as usize && self.words[x >> 6] & (1u64 << (x & 63)) != 0
    }

    /// Inserts `x`; returns true if it was not already present.
    #[inline]
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x < self.n as usize, "index {x} outside universe {}", self.n);
        let bit = 1u64 << (x & 63);
        let fresh = self.words[x >> 6] & bit == 0;
        self.words[x >> 6] |= bit;
        fresh
    }

    pub fn remove(&mut self, x: usize) {
        if x < self.n as usize {
            self.words[x >> 6] &= !(1u64 << (x & 63));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// True for `{0}` (and for the empty set, which never arises from closures).
    pub fn is_trivial(&self) -> bool {
        self.iter().all(|x| x == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n as usize).filter(move |&x| self.contains(x))
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
        out
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w &= o;
        }
        out
    }
}

impl Ord for Subset {
    /// Size first, then the sorted member lists lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
