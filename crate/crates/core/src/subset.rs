//! Ground sets and subsets.
//!
//! Elements are 0-based indices `0..n` inside the library. Every serialized
//! form (JSON, CSV, CLI output) uses 1-based indices instead; see
//! [`Subset::to_one_based`] and [`Subset::from_one_based`].

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// The ground set `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain(
                "ground set must have at least one element".into(),
            ));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn empty(&self) -> Subset {
        Subset::empty(self.n)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn check(&self, j: usize) -> Result<()> {
        if j < self.n {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "element {j} out of range for n = {}",
                self.n
            )))
        }
    }
}

const WORD: usize = 64;

/// A subset of `{0, .., n-1}` stored as a fixed-width bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    n: usize,
    words: Vec<u64>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(WORD)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for j in 0..n {
            s.insert(j);
        }
        s
    }

    pub fn from_indices(n: usize, items: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for j in items {
            if j >= n {
                return Err(Error::Domain(format!(
                    "element {j} out of range for n = {n}"
                )));
            }
            s.insert(j);
        }
        Ok(s)
    }

    /// Builds a subset from 1-based element labels.
    pub fn from_one_based(n: usize, items: &[usize]) -> Result<Self> {
        let mut s = Self::empty(n);
        for &j in items {
            if j == 0 || j > n {
                return Err(Error::Domain(format!("element {j} out of range 1..={n}")));
            }
            s.insert(j - 1);
        }
        Ok(s)
    }

    /// Subset whose members are the set bits of `mask` (bit `j` is element `j`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = Self::empty(n);
        if n > 0 {
            s.words[0] = if n == 64 {
                mask
            } else {
                mask & ((1u64 << n) - 1)
            };
        }
        s
    }

    /// Bitmask form, for `n <= 64`.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, j: usize) -> bool {
        j < self.n && self.words[j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn insert(&mut self, j: usize) {
        assert!(j < self.n, "element {j} out of range for n = {}", self.n);
        self.words[j / WORD] |= 1 << (j % WORD);
    }

    pub fn remove(&mut self, j: usize) {
        assert!(j < self.n, "element {j} out of range for n = {}", self.n);
        self.words[j / WORD] &= !(1 << (j % WORD));
    }

    pub fn with(&self, j: usize) -> Self {
        let mut s = self.clone();
        s.insert(j);
        s
    }

    pub fn without(&self, j: usize) -> Self {
        let mut s = self.clone();
        s.remove(j);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.contains(j))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|j| j + 1).collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "subsets over different ground sets");
        Self {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    /// Canonical order: smaller cardinality first, then lexicographically
    /// smaller sorted index list.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    /// 1-based, e.g. `{1, 3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "}}")
    }
}

/// A permutation of the ground set with its chain `S_i = {order[0], .., order[i-1]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || seen[j] {
                return Err(Error::Domain(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[j] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The chain prefix of length `i`.
    pub fn prefix(&self, i: usize) -> Subset {
        let mut s = Subset::empty(self.order.len());
        for &j in &self.order[..i] {
            s.insert(j);
        }
        s
    }

    /// True when the chain passes through `y`, i.e. the first `|y|` entries are exactly `y`.
    pub fn chain_contains(&self, y: &Subset) -> bool {
        y.n() == self.order.len() && self.order[..y.len()].iter().all(|&j| y.contains(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices(5, [0, 2, 4]).unwrap();
        let b = Subset::from_indices(5, [2, 3]).unwrap();
        assert_eq!(a.union(&b).to_vec(), vec![0, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 4]);
        assert_eq!(a.complement().to_vec(), vec![1, 3]);
        assert!(a.intersection(&b).is_subset(&a));
        assert_eq!(format!("{a}"), "{1, 3, 5}");
    }

    #[test]
    fn wide_sets() {
        let mut s = Subset::empty(130);
        s.insert(129);
        s.insert(64);
        assert_eq!(s.to_vec(), vec![64, 129]);
        assert_eq!(s.complement().len(), 128);
        assert!(Subset::from_indices(130, [130]).is_err());
    }

    #[test]
    fn canonical_order() {
        let a = Subset::from_indices(4, [0, 3]).unwrap();
        let b = Subset::from_indices(4, [1, 2]).unwrap();
        let c = Subset::from_indices(4, [3]).unwrap();
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
        assert_eq!(c.canonical_cmp(&a), Ordering::Less);
    }

    #[test]
    fn permutation_chain() {
        let p = Permutation::new(vec![1, 0, 2]).unwrap();
        assert!(p.chain_contains(&Subset::from_indices(3, [1]).unwrap()));
        assert!(!p.chain_contains(&Subset::from_indices(3, [0]).unwrap()));
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(GroundSet::new(0).is_err());
    }
}
