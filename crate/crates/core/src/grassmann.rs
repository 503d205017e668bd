//! Sign combinatorics of anticommuting generators.
//!
//! Generators are numbered from 1. A [`MultiIndex`] is a strictly increasing
//! set of generator indices and stands for the ordered product
//! `g^{i1} g^{i2} ... g^{ik}` with `i1 < i2 < ... < ik`. Every sign produced
//! here is relative to that ascending order.

use std::cmp::Ordering;
use std::fmt;

/// Largest generator index a [`MultiIndex`] can hold.
pub const MAX_GENERATORS: usize = 32;

/// A strictly increasing list of generator indices in `1..=MAX_GENERATORS`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    bits: u32,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { bits: 0 };

    /// Builds a multi-index from arbitrary indices. Returns `None` when an
    /// index is out of range or repeated.
    pub fn new(indices: &[usize]) -> Option<MultiIndex> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_GENERATORS {
                return None;
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return None;
            }
            bits |= b;
        }
        Some(MultiIndex { bits })
    }

    /// Panicking constructor for literals in code and tests.
    pub fn of(indices: &[usize]) -> MultiIndex {
        MultiIndex::new(indices).unwrap_or_else(|| panic!("invalid multi-index {indices:?}"))
    }

    pub fn single(i: usize) -> MultiIndex {
        MultiIndex::of(&[i])
    }

    pub fn from_bits(bits: u32) -> MultiIndex {
        MultiIndex { bits }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// 0 for even, 1 for odd.
    pub fn parity(self) -> u8 {
        (self.len() % 2) as u8
    }

    pub fn is_even(self) -> bool {
        self.parity() == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_GENERATORS).contains(&i) && self.bits & (1 << (i - 1)) != 0
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.bits & other.bits == 0
    }

    pub fn is_subset(self, other: MultiIndex) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex { bits: self.bits | other.bits }
    }

    pub fn difference(self, other: MultiIndex) -> MultiIndex {
        MultiIndex { bits: self.bits & !other.bits }
    }

    /// Largest index, if any.
    pub fn max_index(self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(32 - self.bits.leading_zeros() as usize)
        }
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros();
                rest &= rest - 1;
                Some(tz as usize + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }

    /// Number of pairs `(i, j)` with `i` in `self`, `j` in `other` and
    /// `i > j`: the inversions of the concatenation `self ++ other`.
    pub fn crossings(self, other: MultiIndex) -> u32 {
        other.indices().map(|j| (self.bits >> j).count_ones()).sum()
    }
}

impl Ord for MultiIndex {
    /// Lexicographic order on the index lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// Result of multiplying two generator monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignedIndex {
    Zero,
    Signed { index: MultiIndex, negative: bool },
}

impl SignedIndex {
    pub fn sign(self) -> i32 {
        match self {
            SignedIndex::Zero => 0,
            SignedIndex::Signed { negative: false, .. } => 1,
            SignedIndex::Signed { negative: true, .. } => -1,
        }
    }

    pub fn index(self) -> Option<MultiIndex> {
        match self {
            SignedIndex::Zero => None,
            SignedIndex::Signed { index, .. } => Some(index),
        }
    }
}

/// `g^I g^J` in normal order.
pub fn concat_sign(i: MultiIndex, j: MultiIndex) -> SignedIndex {
    if !i.is_disjoint(j) {
        return SignedIndex::Zero;
    }
    SignedIndex::Signed { index: i.union(j), negative: i.crossings(j) % 2 == 1 }
}

/// The sign attached to splitting `target` into the ordered nonempty blocks
/// `blocks`: zero unless the blocks are nonempty, pairwise disjoint and
/// cover `target` exactly; otherwise the signature of the permutation taking
/// the concatenated blocks to ascending order. No blocks and an empty target
/// give `+1`.
pub fn epsilon(blocks: &[MultiIndex], target: MultiIndex) -> i32 {
    let mut acc = MultiIndex::EMPTY;
    let mut negative = false;
    for &b in blocks {
        if b.is_empty() {
            return 0;
        }
        match concat_sign(acc, b) {
            SignedIndex::Zero => return 0,
            SignedIndex::Signed { index, negative: n } => {
                acc = index;
                negative ^= n;
            }
        }
    }
    if acc != target {
        0
    } else if negative {
        -1
    } else {
        1
    }
}

/// Which multi-indices to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityClass {
    /// Every multi-index, including the empty one.
    All,
    /// Even degree, including the empty one.
    Even,
    /// Odd degree.
    Odd,
    /// Even and nonempty.
    EvenPositive,
}

impl ParityClass {
    fn admits(self, degree: usize) -> bool {
        match self {
            ParityClass::All => true,
            ParityClass::Even => degree.is_multiple_of(2),
            ParityClass::Odd => degree % 2 == 1,
            ParityClass::EvenPositive => degree > 0 && degree.is_multiple_of(2),
        }
    }
}

/// `q` odd coordinates followed by `L` auxiliary odd generators. Indices
/// `1..=q` are the coordinates, `q+1..=q+L` the auxiliaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    q: usize,
    aux: usize,
}

impl GeneratorSet {
    pub fn new(q: usize, aux: usize) -> Option<GeneratorSet> {
        if q + aux > MAX_GENERATORS {
            None
        } else {
            Some(GeneratorSet { q, aux })
        }
    }

    /// Only coordinate generators.
    pub fn coordinates(q: usize) -> GeneratorSet {
        GeneratorSet::new(q, 0).expect("too many generators")
    }

    pub fn q(self) -> usize {
        self.q
    }

    pub fn aux(self) -> usize {
        self.aux
    }

    pub fn total(self) -> usize {
        self.q + self.aux
    }

    /// The multi-index of all generators.
    pub fn full(self) -> MultiIndex {
        MultiIndex::from_bits(low_bits(self.total()))
    }

    /// Whether `index` only uses generators of this set.
    pub fn admits(self, index: MultiIndex) -> bool {
        index.max_index().is_none_or(|m| m <= self.total())
    }

    /// All multi-indices of the given degree, in lexicographic order.
    pub fn degree(self, k: usize) -> Vec<MultiIndex> {
        let g = self.total();
        let mut out = Vec::new();
        if k > g {
            return out;
        }
        let mut current = Vec::with_capacity(k);
        combinations(1, g, k, &mut current, &mut out);
        out
    }

    /// All multi-indices whose degree lies in the class, in lexicographic
    /// order.
    pub fn class(self, class: ParityClass) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> =
            (0..=self.total()).filter(|&k| class.admits(k)).flat_map(|k| self.degree(k)).collect();
        out.sort();
        out
    }
}

fn low_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn combinations(start: usize, g: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if current.len() == k {
        out.push(MultiIndex::of(current));
        return;
    }
    let needed = k - current.len();
    for i in start..=g {
        if g - i + 1 < needed {
            break;
        }
        current.push(i);
        combinations(i + 1, g, k, current, out);
        current.pop();
    }
}

/// Every ordered tuple of nonempty, pairwise disjoint blocks from `allowed`
/// whose union is `target`, together with its epsilon sign.
pub fn ordered_splittings(
    target: MultiIndex,
    allowed: impl Fn(MultiIndex) -> bool + Copy,
) -> Vec<(Vec<MultiIndex>, i32)> {
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    split_rec(target, allowed, &mut blocks, &mut out, target);
    out
}

fn split_rec(
    rest: MultiIndex,
    allowed: impl Fn(MultiIndex) -> bool + Copy,
    blocks: &mut Vec<MultiIndex>,
    out: &mut Vec<(Vec<MultiIndex>, i32)>,
    target: MultiIndex,
) {
    if rest.is_empty() {
        let e = epsilon(blocks, target);
        debug_assert!(e != 0);
        out.push((blocks.clone(), e));
        return;
    }
    // Walk the nonempty submasks of `rest`.
    let r = rest.bits();
    let mut sub = r;
    while sub != 0 {
        let block = MultiIndex::from_bits(sub);
        if allowed(block) {
            blocks.push(block);
            split_rec(MultiIndex::from_bits(r & !sub), allowed, blocks, out, target);
            blocks.pop();
        }
        sub = (sub - 1) & r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::of(v)
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat_sign(mi(&[1]), mi(&[2])), SignedIndex::Signed { index: mi(&[1, 2]), negative: false });
        assert_eq!(concat_sign(mi(&[2]), mi(&[1])), SignedIndex::Signed { index: mi(&[1, 2]), negative: true });
        assert_eq!(concat_sign(mi(&[1, 2]), mi(&[2, 3])), SignedIndex::Zero);
        assert_eq!(concat_sign(MultiIndex::EMPTY, mi(&[3])).sign(), 1);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&[mi(&[1, 2]), mi(&[3, 4])], mi(&[1, 2, 3, 4])), 1);
        assert_eq!(epsilon(&[mi(&[1, 3]), mi(&[2, 4])], mi(&[1, 2, 3, 4])), -1);
        assert_eq!(epsilon(&[mi(&[1, 2])], mi(&[1, 2, 3, 4])), 0);
        assert_eq!(epsilon(&[], MultiIndex::EMPTY), 1);
        assert_eq!(epsilon(&[], mi(&[1, 2])), 0);
        assert_eq!(epsilon(&[MultiIndex::EMPTY, mi(&[1, 2])], mi(&[1, 2])), 0);
    }

    #[test]
    fn enumerate_examples() {
        let g3 = GeneratorSet::coordinates(3);
        assert_eq!(g3.degree(2), vec![mi(&[1, 2]), mi(&[1, 3]), mi(&[2, 3])]);
        assert_eq!(g3.degree(0), vec![MultiIndex::EMPTY]);
        assert_eq!(g3.degree(4), vec![]);
        let g2 = GeneratorSet::coordinates(2);
        assert_eq!(g2.class(ParityClass::EvenPositive), vec![mi(&[1, 2])]);
        assert_eq!(g2.class(ParityClass::Even), vec![MultiIndex::EMPTY, mi(&[1, 2])]);
        assert_eq!(g2.class(ParityClass::Odd), vec![mi(&[1]), mi(&[2])]);
        assert_eq!(GeneratorSet::coordinates(0).class(ParityClass::Even), vec![MultiIndex::EMPTY]);
    }

    #[test]
    fn lexicographic_order() {
        let mut v = vec![mi(&[2]), mi(&[1, 2]), MultiIndex::EMPTY, mi(&[1])];
        v.sort();
        assert_eq!(v, vec![MultiIndex::EMPTY, mi(&[1]), mi(&[1, 2]), mi(&[2])]);
    }

    #[test]
    fn constructor_rejects_repeats() {
        assert!(MultiIndex::new(&[1, 1]).is_none());
        assert!(MultiIndex::new(&[0]).is_none());
        assert_eq!(MultiIndex::new(&[3, 1]), Some(mi(&[1, 3])));
    }

    #[test]
    fn splittings_of_four() {
        let even = |b: MultiIndex| b.is_even();
        let s = ordered_splittings(mi(&[1, 2, 3, 4]), even);
        // one single block plus 3 pairings in 2 orders each
        assert_eq!(s.len(), 7);
        let total: i32 = s.iter().filter(|(b, _)| b.len() == 2).map(|(_, e)| e).sum();
        // (12)(34) + (34)(12) - (13)(24) - (24)(13) + (14)(23) + (23)(14)
        assert_eq!(total, 2);
    }
}
