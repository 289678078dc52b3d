//! Index types over `[m] = {1, ..., m}` and enumeration of ordered samples.
//!
//! Elements are 1-based throughout, in memory and on disk.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Once;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default upper bound on the dimension `m`.
pub const DEFAULT_MAX_M: usize = 8;

/// Absolute bound imposed by the `u32` subset encoding.
pub const HARD_MAX_M: usize = 31;

/// Environment variable overriding [`DEFAULT_MAX_M`].
pub const MAX_M_ENV: &str = "PRECEDENCE_MAX_M";

/// Current dimension cap: `PRECEDENCE_MAX_M` if set and valid, else 8.
pub fn max_m() -> usize {
    std::env::var(MAX_M_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(HARD_MAX_M))
        .unwrap_or(DEFAULT_MAX_M)
}

static LARGE_M_WARNING: Once = Once::new();

pub fn check_dimension(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("dimension m must be at least 1".into()));
    }
    let cap = max_m();
    if m > cap {
        return Err(Error::Domain(format!(
            "m={m} exceeds the cap of {cap}; set {MAX_M_ENV} to raise it"
        )));
    }
    if m > DEFAULT_MAX_M {
        LARGE_M_WARNING.call_once(|| {
            log::warn!("m={m} is above {DEFAULT_MAX_M}; enumeration over m! permutations may be slow")
        });
    }
    Ok(())
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// `n! / (n-k)!`, the number of ordered samples of size `k` from `n` items.
pub fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    ((n - k + 1) as u64..=n as u64).map(BigUint::from).product()
}

/// A subset of `[m]` encoded as a bit mask (bit `i-1` for element `i`).
///
/// Ordering is lexicographic on the sorted element lists, so `{1,2} < {1,2,3}
/// < {1,3} < {2,3}`. This is the order used for all deterministic output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(m: usize) -> Self {
        if m >= 32 {
            SubsetMask(u32::MAX)
        } else {
            SubsetMask((1u32 << m) - 1)
        }
    }

    pub fn singleton(i: u8) -> Self {
        SubsetMask(1 << (i - 1))
    }

    /// Builds a subset of `[m]`, rejecting out-of-range and repeated elements.
    pub fn from_elements(m: usize, elements: &[u8]) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e as usize > m {
                return Err(Error::Domain(format!("element {e} is outside [1, {m}]")));
            }
            let bit = 1u32 << (e - 1);
            if bits & bit != 0 {
                return Err(Error::Domain(format!("element {e} repeated in subset")));
            }
            bits |= bit;
        }
        Ok(SubsetMask(bits))
    }

    pub fn contains(self, i: u8) -> bool {
        (1..=32).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn insert(self, i: u8) -> Self {
        SubsetMask(self.0 | (1 << (i - 1)))
    }

    pub fn remove(self, i: u8) -> Self {
        SubsetMask(self.0 & !(1 << (i - 1)))
    }

    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    /// Complement within `[m]`.
    pub fn complement(self, m: usize) -> Self {
        SubsetMask(!self.0 & SubsetMask::full(m).0)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        let bits = self.0;
        (1..=32u8).filter(move |&i| bits & (1u32 << (i - 1)) != 0)
    }

    pub fn elements(self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<u8>::deserialize(d)?;
        SubsetMask::from_elements(HARD_MAX_M, &elements).map_err(serde::de::Error::custom)
    }
}

/// All subsets of `[m]` with at least `min_size` elements, in subset order.
pub fn subsets_at_least(m: usize, min_size: usize) -> Vec<SubsetMask> {
    let mut out: Vec<SubsetMask> = (0..=SubsetMask::full(m).bits())
        .map(SubsetMask::from_bits)
        .filter(|s| s.len() >= min_size)
        .collect();
    out.sort();
    out
}

/// An ordered list of distinct elements of `[m]` (a failure-order prefix).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct OrderedPrefix(Vec<u8>);

impl OrderedPrefix {
    pub fn empty() -> Self {
        OrderedPrefix(Vec::new())
    }

    pub fn new(m: usize, elements: Vec<u8>) -> Result<Self> {
        SubsetMask::from_elements(m, &elements)?;
        Ok(OrderedPrefix(elements))
    }

    /// Skips validation; callers guarantee distinct in-range elements.
    pub(crate) fn from_vec_unchecked(elements: Vec<u8>) -> Self {
        OrderedPrefix(elements)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set(&self) -> SubsetMask {
        self.0
            .iter()
            .fold(SubsetMask::EMPTY, |acc, &e| acc.insert(e))
    }

    pub fn extended(&self, j: u8) -> Self {
        let mut v = self.0.clone();
        v.push(j);
        OrderedPrefix(v)
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Debug for OrderedPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl<'de> Deserialize<'de> for OrderedPrefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        OrderedPrefix::new(HARD_MAX_M, v).map_err(serde::de::Error::custom)
    }
}

/// A bijection on `[m]`, listed as `(j_1, ..., j_m)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(elements: Vec<u8>) -> Result<Self> {
        let m = elements.len();
        let set = SubsetMask::from_elements(m, &elements)?;
        debug_assert_eq!(set.len(), m);
        Ok(Permutation(elements))
    }

    pub fn identity(m: usize) -> Self {
        Permutation((1..=m as u8).collect())
    }

    pub(crate) fn from_vec_unchecked(elements: Vec<u8>) -> Self {
        Permutation(elements)
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn prefix(&self, k: usize) -> OrderedPrefix {
        OrderedPrefix(self.0[..k].to_vec())
    }

    /// The first element of `set` in this order.
    pub fn first_in(&self, set: SubsetMask) -> Option<u8> {
        self.0.iter().copied().find(|&e| set.contains(e))
    }

    /// 0-based position of element `i`.
    pub fn position(&self, i: u8) -> Option<usize> {
        self.0.iter().position(|&e| e == i)
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        Permutation::new(v).map_err(serde::de::Error::custom)
    }
}

/// `D(B, k)`: the ordered samples of size `k` drawn without replacement from
/// `[m] \ B`, in lexicographic order.
pub fn enumerate_d(m: usize, excluded: SubsetMask, k: usize) -> Result<Vec<OrderedPrefix>> {
    let available = excluded.complement(m);
    if k > available.len() {
        return Err(Error::Domain(format!(
            "k={k} exceeds the {} elements outside {excluded}",
            available.len()
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    for_each_ordered(available, k, &mut current, &mut |p| {
        out.push(OrderedPrefix(p.to_vec()))
    });
    Ok(out)
}

/// Calls `visit` on every ordered sample of size `k` from `available`, in
/// lexicographic order, without allocating per sample.
pub fn for_each_ordered(
    available: SubsetMask,
    k: usize,
    current: &mut Vec<u8>,
    visit: &mut dyn FnMut(&[u8]),
) {
    if current.len() == k {
        visit(current);
        return;
    }
    for e in available.iter() {
        current.push(e);
        for_each_ordered(available.remove(e), k, current, visit);
        current.pop();
    }
}

/// All permutations of `[m]` in lexicographic order.
pub fn all_permutations(m: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    for_each_ordered(SubsetMask::full(m), m, &mut current, &mut |p| {
        out.push(Permutation(p.to_vec()))
    });
    out
}

/// Parses a comma-separated 1-based index list such as `"1,3"`.
pub fn parse_index_list(text: &str) -> Result<Vec<u8>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| Error::Parse(format!("bad index {t:?} in {text:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_empty_full_is_all_permutations() {
        let d = enumerate_d(3, SubsetMask::EMPTY, 3).unwrap();
        let got: Vec<Vec<u8>> = d.into_iter().map(|p| p.into_vec()).collect();
        assert_eq!(
            got,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
    }

    #[test]
    fn d_single_outside_element() {
        let b = SubsetMask::from_elements(3, &[1, 2]).unwrap();
        let d = enumerate_d(3, b, 1).unwrap();
        assert_eq!(d, vec![OrderedPrefix(vec![3])]);
    }

    #[test]
    fn d_pairs_from_three() {
        let b = SubsetMask::from_elements(4, &[4]).unwrap();
        let d = enumerate_d(4, b, 2).unwrap();
        assert_eq!(d.len(), 6);
        for p in &d {
            assert!(!p.set().contains(4));
            assert_eq!(p.len(), 2);
        }
        let mut sorted = d.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, d);
    }

    #[test]
    fn d_k_out_of_range() {
        let b = SubsetMask::from_elements(3, &[1, 2]).unwrap();
        assert!(matches!(enumerate_d(3, b, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn d_counts_match_falling_factorial() {
        for m in 1..=6 {
            for bits in 0..(1u32 << m) {
                let b = SubsetMask::from_bits(bits);
                let free = m - b.len();
                for k in 0..=free {
                    let d = enumerate_d(m, b, k).unwrap();
                    assert_eq!(BigUint::from(d.len()), falling_factorial(free, k));
                }
            }
        }
    }

    #[test]
    fn subset_order_is_lexicographic() {
        let subs = subsets_at_least(3, 2);
        let lists: Vec<Vec<u8>> = subs.iter().map(|s| s.elements()).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![1, 2, 3], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![2, 1, 3]).is_ok());
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![1, 4, 3]).is_err());
        assert!(OrderedPrefix::new(3, vec![0]).is_err());
    }

    #[test]
    fn dimension_cap() {
        assert!(check_dimension(0).is_err());
        assert!(check_dimension(8).is_ok());
        if std::env::var(MAX_M_ENV).is_err() {
            assert!(check_dimension(9).is_err());
        }
    }
}
