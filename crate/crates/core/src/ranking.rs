//! Ranking functions and ranking patterns.
//!
//! A ranking function on a subset `A` assigns ranks `1..=w` (dense, ties
//! allowed) to the members of `A`; rank 1 is the most likely first failure.
//! A ranking pattern has one ranking function per subset of size at least 2.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_dimension, factorial, subsets_at_least, SubsetMask};
use crate::error::{Error, Result};
use crate::permdist::WinningProbabilityFamily;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankingFunction {
    set: SubsetMask,
    ranks: BTreeMap<u8, u32>,
}

impl RankingFunction {
    /// Requires exactly the members of `set` as keys and a rank image equal
    /// to `{1, ..., w}` for some `w`.
    pub fn new(set: SubsetMask, ranks: BTreeMap<u8, u32>) -> Result<Self> {
        if ranks.keys().copied().ne(set.iter()) {
            return Err(Error::Domain(format!("ranks on {set} do not cover exactly its members")));
        }
        let mut image: Vec<u32> = ranks.values().copied().collect();
        image.sort_unstable();
        image.dedup();
        if image.iter().enumerate().any(|(k, &r)| r != k as u32 + 1) {
            return Err(Error::Domain(format!(
                "ranks on {set} have image {image:?}, not {{1..w}}"
            )));
        }
        Ok(RankingFunction { set, ranks })
    }

    /// Strict ranking listing the members from rank 1 downwards.
    pub fn from_order(order: &[u8]) -> Result<Self> {
        let set = SubsetMask::from_elements(crate::combinatorics::HARD_MAX_M, order)?;
        let ranks = order.iter().enumerate().map(|(k, &e)| (e, k as u32 + 1)).collect();
        RankingFunction::new(set, ranks)
    }

    pub fn set(&self) -> SubsetMask {
        self.set
    }

    pub fn rank(&self, j: u8) -> Option<u32> {
        self.ranks.get(&j).copied()
    }

    pub fn ranks(&self) -> &BTreeMap<u8, u32> {
        &self.ranks
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.values().copied().max().unwrap_or(0)
    }

    pub fn is_weak(&self) -> bool {
        (self.max_rank() as usize) < self.set.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankingPattern {
    m: usize,
    functions: BTreeMap<SubsetMask, RankingFunction>,
}

impl RankingPattern {
    /// Requires exactly one function per subset of `[m]` of size >= 2.
    pub fn new(m: usize, functions: impl IntoIterator<Item = RankingFunction>) -> Result<Self> {
        check_dimension(m)?;
        let mut map = BTreeMap::new();
        for f in functions {
            if !f.set.is_subset_of(SubsetMask::full(m)) || f.set.len() < 2 {
                return Err(Error::Domain(format!("subset {} is not a subset of [{m}] of size >= 2", f.set)));
            }
            if map.contains_key(&f.set) {
                return Err(Error::Domain(format!("duplicate ranking function for {}", f.set)));
            }
            map.insert(f.set, f);
        }
        if let Some(missing) = subsets_at_least(m, 2).into_iter().find(|s| !map.contains_key(s)) {
            return Err(Error::Domain(format!("no ranking function for subset {missing}")));
        }
        Ok(RankingPattern { m, functions: map })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn function(&self, set: SubsetMask) -> Option<&RankingFunction> {
        self.functions.get(&set)
    }

    pub fn functions(&self) -> impl Iterator<Item = &RankingFunction> {
        self.functions.values()
    }

    /// `sigma(A, j)`.
    pub fn rank(&self, set: SubsetMask, j: u8) -> Option<u32> {
        self.functions.get(&set).and_then(|f| f.rank(j))
    }

    pub fn is_weak(&self) -> bool {
        self.first_weak_subset().is_some()
    }

    pub fn first_weak_subset(&self) -> Option<SubsetMask> {
        self.functions.values().find(|f| f.is_weak()).map(|f| f.set)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternFile {
    m: usize,
    functions: Vec<FunctionEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionEntry {
    set: SubsetMask,
    ranks: BTreeMap<u8, u32>,
}

impl Serialize for RankingPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternFile {
            m: self.m,
            functions: self
                .functions
                .values()
                .map(|f| FunctionEntry { set: f.set, ranks: f.ranks.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankingPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PatternFile::deserialize(d)?;
        let functions = f
            .functions
            .into_iter()
            .map(|e| RankingFunction::new(e.set, e.ranks))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RankingPattern::new(f.m, functions).map_err(serde::de::Error::custom)
    }
}

/// Dense ranks by descending score; equal scores share a rank.
pub(crate) fn dense_ranks_desc<T: Ord>(scores: &BTreeMap<u8, T>) -> BTreeMap<u8, u32> {
    let mut order: Vec<(&u8, &T)> = scores.iter().collect();
    order.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    let mut ranks = BTreeMap::new();
    let mut rank = 0u32;
    let mut prev: Option<&T> = None;
    for (j, s) in order {
        if prev != Some(s) {
            rank += 1;
            prev = Some(s);
        }
        ranks.insert(*j, rank);
    }
    ranks
}

/// The ranking pattern induced by a family of winning probabilities.
pub fn induced_pattern(fam: &WinningProbabilityFamily) -> RankingPattern {
    let functions = fam
        .rows()
        .map(|(set, row)| RankingFunction {
            set: *set,
            ranks: dense_ranks_desc(row),
        })
        .map(|f| (f.set, f))
        .collect();
    RankingPattern { m: fam.m(), functions }
}

/// One failed concordance condition on subset `set` between `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub set: SubsetMask,
    pub i: u8,
    pub j: u8,
    pub rank_i: u32,
    pub rank_j: u32,
    /// Exact scores as text (`alpha` values or vote counts).
    pub score_i: String,
    pub score_j: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl ConcordanceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Checks, for every subset and every pair `i < j` in it, that the ranks
/// order the pair exactly opposite to the scores: a smaller rank iff a larger
/// score, and equal ranks iff equal scores.
pub(crate) fn concordance_against<T, F>(sigma: &RankingPattern, mut score: F) -> Result<ConcordanceReport>
where
    T: Ord + std::fmt::Display,
    F: FnMut(SubsetMask, u8) -> Result<T>,
{
    let mut violations = Vec::new();
    for f in sigma.functions.values() {
        let members = f.set.elements();
        let scores: Vec<T> = members.iter().map(|&j| score(f.set, j)).collect::<Result<_>>()?;
        for a in 0..members.len() {
            for b in (a + 1)..members.len() {
                let (ri, rj) = (f.ranks[&members[a]], f.ranks[&members[b]]);
                let by_rank = ri.cmp(&rj);
                let by_score = scores[b].cmp(&scores[a]);
                if by_rank != by_score {
                    violations.push(Violation {
                        set: f.set,
                        i: members[a],
                        j: members[b],
                        rank_i: ri,
                        rank_j: rj,
                        score_i: scores[a].to_string(),
                        score_j: scores[b].to_string(),
                    });
                }
            }
        }
    }
    let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(ConcordanceReport { verdict, violations })
}

/// p-concordance of a pattern with a family of winning probabilities.
pub fn check_p_concordance(sigma: &RankingPattern, fam: &WinningProbabilityFamily) -> Result<ConcordanceReport> {
    if sigma.m != fam.m() {
        return Err(Error::DimensionMismatch { expected: sigma.m, found: fam.m() });
    }
    concordance_against(sigma, |set, j| fam.alpha(set, j).cloned())
}

fn ascending(set: SubsetMask) -> RankingFunction {
    RankingFunction::from_order(&set.elements()).expect("valid subset")
}

/// Element 1 wins every pairwise comparison and comes last in every larger
/// subset containing it. Everything else is ranked ascending by index.
pub fn pattern_very_paradox(m: usize) -> Result<RankingPattern> {
    if m < 3 {
        return Err(Error::Domain(format!("pattern needs m >= 3, got {m}")));
    }
    check_dimension(m)?;
    let functions = subsets_at_least(m, 2).into_iter().map(|set| {
        if !set.contains(1) {
            return ascending(set);
        }
        let mut order: Vec<u8> = set.remove(1).elements();
        if set.len() == 2 {
            order.insert(0, 1);
        } else {
            order.push(1);
        }
        RankingFunction::from_order(&order).expect("valid subset")
    });
    RankingPattern::new(m, functions)
}

/// Pairwise cycle `1 > 2 > ... > m > 1` on cyclically adjacent pairs; all
/// other subsets ranked ascending by index.
pub fn pattern_cyclic(m: usize) -> Result<RankingPattern> {
    if m < 3 {
        return Err(Error::Domain(format!("pattern needs m >= 3, got {m}")));
    }
    check_dimension(m)?;
    let functions = subsets_at_least(m, 2).into_iter().map(|set| {
        if set.len() == 2 {
            let e = set.elements();
            let (a, b) = (e[0], e[1]);
            if b == a + 1 {
                return RankingFunction::from_order(&[a, b]).expect("pair");
            }
            if a == 1 && b as usize == m {
                return RankingFunction::from_order(&[b, a]).expect("pair");
            }
        }
        ascending(set)
    });
    RankingPattern::new(m, functions)
}

fn strict_functions(set: SubsetMask) -> Vec<RankingFunction> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(set.len());
    crate::combinatorics::for_each_ordered(set, set.len(), &mut current, &mut |order| {
        out.push(RankingFunction::from_order(order).expect("valid order"))
    });
    out
}

/// All ranking functions on `set`, weak ones included (ordered set
/// partitions of the members).
fn all_functions(set: SubsetMask) -> Vec<RankingFunction> {
    let members = set.elements();
    let n = members.len();
    let mut out = Vec::new();
    // Every map members -> 1..=n whose image is an initial segment.
    let mut assignment = vec![1u32; n];
    loop {
        let mut image: Vec<u32> = assignment.clone();
        image.sort_unstable();
        image.dedup();
        if image.iter().enumerate().all(|(k, &r)| r == k as u32 + 1) {
            let ranks = members.iter().copied().zip(assignment.iter().copied()).collect();
            out.push(RankingFunction { set, ranks });
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if assignment[pos] < n as u32 {
                assignment[pos] += 1;
                for a in assignment.iter_mut().skip(pos + 1) {
                    *a = 1;
                }
                break;
            }
        }
    }
}

/// Ordered Bell (Fubini) number: count of ranking functions on `n` items.
fn fubini(n: usize) -> BigUint {
    let mut a = vec![BigUint::from(1u8)];
    for k in 1..=n {
        let mut total = BigUint::from(0u8);
        let mut binom = BigUint::from(1u8);
        for i in 1..=k {
            binom = binom * BigUint::from((k - i + 1) as u64) / BigUint::from(i as u64);
            total += &binom * &a[k - i];
        }
        a.push(total);
    }
    a[n].clone()
}

/// Number of ranking patterns over `[m]`.
pub fn pattern_count(m: usize, non_weak_only: bool) -> BigUint {
    subsets_at_least(m, 2)
        .into_iter()
        .map(|s| if non_weak_only { factorial(s.len()) } else { fubini(s.len()) })
        .product()
}

/// Largest `m` for which exhaustive enumeration is offered.
pub const EXHAUSTIVE_MAX_M: usize = 3;

/// Every ranking pattern over `[m]` exactly once (`m <= 3`), in the
/// lexicographic product order of per-subset functions.
pub fn enumerate_patterns(m: usize, non_weak_only: bool) -> Result<Vec<RankingPattern>> {
    check_dimension(m)?;
    if m > EXHAUSTIVE_MAX_M {
        return Err(Error::TooMany { m, count: pattern_count(m, non_weak_only).to_string() });
    }
    let subsets = subsets_at_least(m, 2);
    let choices: Vec<Vec<RankingFunction>> = subsets
        .iter()
        .map(|&s| if non_weak_only { strict_functions(s) } else { all_functions(s) })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    if choices.is_empty() {
        return Ok(vec![RankingPattern { m, functions: BTreeMap::new() }]);
    }
    loop {
        let functions = choices
            .iter()
            .zip(&idx)
            .map(|(c, &i)| (c[i].set, c[i].clone()))
            .collect();
        out.push(RankingPattern { m, functions });
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// One random pattern; strict orders are uniform per subset, weak ones are
/// drawn by densifying uniform rank labels.
pub fn random_pattern<R: Rng>(m: usize, non_weak_only: bool, rng: &mut R) -> RankingPattern {
    let functions = subsets_at_least(m, 2)
        .into_iter()
        .map(|set| {
            if non_weak_only {
                let mut order = set.elements();
                order.shuffle(rng);
                RankingFunction::from_order(&order).expect("valid order")
            } else {
                let labels: BTreeMap<u8, u32> =
                    set.iter().map(|j| (j, rng.random_range(0..set.len() as u32))).collect();
                RankingFunction { set, ranks: dense_ranks_desc(&labels) }
            }
        })
        .map(|f| (f.set, f))
        .collect();
    RankingPattern { m, functions }
}

/// A deterministic stream of `count` random patterns for a given seed.
pub fn sample_patterns(m: usize, count: usize, non_weak_only: bool, seed: u64) -> Result<Vec<RankingPattern>> {
    check_dimension(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| random_pattern(m, non_weak_only, &mut rng)).collect())
}

impl RankingPattern {
    /// Members of `set` from rank 1 downwards (ties broken by index).
    pub fn order(&self, set: SubsetMask) -> Option<Vec<u8>> {
        let f = self.functions.get(&set)?;
        let mut members: Vec<u8> = f.set.elements();
        members.sort_by(|a, b| match f.ranks[a].cmp(&f.ranks[b]) {
            Ordering::Equal => a.cmp(b),
            o => o,
        });
        Some(members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permdist::{alpha_family, tests::example_distribution, PermutationDistribution};
    use crate::rational::{ratio, Rational};

    fn set(e: &[u8]) -> SubsetMask {
        SubsetMask::from_elements(8, e).unwrap()
    }

    #[test]
    fn ranking_function_image_must_be_dense() {
        let s = set(&[1, 2, 3]);
        assert!(RankingFunction::new(s, BTreeMap::from([(1, 1), (2, 3), (3, 1)])).is_err());
        assert!(RankingFunction::new(s, BTreeMap::from([(1, 1), (2, 2)])).is_err());
        let weak = RankingFunction::new(s, BTreeMap::from([(1, 1), (2, 2), (3, 1)])).unwrap();
        assert!(weak.is_weak());
        let strict = RankingFunction::from_order(&[3, 1, 2]).unwrap();
        assert!(!strict.is_weak());
        assert_eq!(strict.rank(3), Some(1));
    }

    #[test]
    fn example_distribution_induces_the_weak_example_pattern() {
        let sigma = induced_pattern(&alpha_family(&example_distribution()));
        let full = set(&[1, 2, 3]);
        assert_eq!(sigma.rank(full, 3), Some(1));
        assert_eq!(sigma.rank(full, 1), Some(2));
        assert_eq!(sigma.rank(full, 2), Some(3));
        assert_eq!(sigma.rank(set(&[1, 3]), 3), Some(1));
        assert_eq!(sigma.rank(set(&[1, 3]), 1), Some(2));
        assert_eq!(sigma.rank(set(&[2, 3]), 3), Some(1));
        assert_eq!(sigma.rank(set(&[2, 3]), 2), Some(2));
        assert_eq!(sigma.rank(set(&[1, 2]), 1), Some(1));
        assert_eq!(sigma.rank(set(&[1, 2]), 2), Some(1));
        assert!(sigma.is_weak());
        assert!(check_p_concordance(&sigma, &alpha_family(&example_distribution())).unwrap().passed());
    }

    #[test]
    fn uniform_family_gives_all_ties() {
        let fam = alpha_family(&PermutationDistribution::uniform(3).unwrap());
        let sigma = induced_pattern(&fam);
        assert!(sigma.functions().all(|f| f.ranks().values().all(|&r| r == 1)));
        assert!(check_p_concordance(&sigma, &fam).unwrap().passed());
    }

    #[test]
    fn strictly_sorted_family() {
        let row = BTreeMap::from([(1, ratio(4, 10)), (2, ratio(3, 10)), (3, ratio(2, 10)), (4, ratio(1, 10))]);
        let ranks = dense_ranks_desc(&row);
        assert_eq!(ranks.values().copied().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        let tied = BTreeMap::from([(1, ratio(1, 3)), (2, ratio(1, 6)), (3, ratio(1, 3)), (4, ratio(1, 6))]);
        assert_eq!(dense_ranks_desc(&tied).values().copied().collect::<Vec<_>>(), vec![1, 2, 1, 2]);
    }

    #[test]
    fn perturbed_rank_fails_at_the_full_set() {
        let fam = alpha_family(&example_distribution());
        let sigma = induced_pattern(&fam);
        let full = set(&[1, 2, 3]);
        let functions = sigma.functions().map(|f| {
            if f.set() == full {
                // (sigma(1), sigma(2), sigma(3)) = (2, 1, 3) instead of (2, 3, 1)
                RankingFunction::new(full, BTreeMap::from([(1, 2), (2, 1), (3, 3)])).unwrap()
            } else {
                f.clone()
            }
        });
        let bad = RankingPattern::new(3, functions.collect::<Vec<_>>()).unwrap();
        let report = check_p_concordance(&bad, &fam).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(!report.violations.is_empty());
        assert!(report.violations.iter().all(|v| v.set == full));
    }

    #[test]
    fn dimension_mismatch() {
        let fam = alpha_family(&PermutationDistribution::uniform(4).unwrap());
        let sigma = pattern_cyclic(3).unwrap();
        assert!(matches!(check_p_concordance(&sigma, &fam), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn very_paradox_shape() {
        let s3 = pattern_very_paradox(3).unwrap();
        assert_eq!(s3.rank(set(&[1, 2]), 1), Some(1));
        assert_eq!(s3.rank(set(&[1, 3]), 1), Some(1));
        assert_eq!(s3.rank(set(&[1, 2, 3]), 1), Some(3));
        let s4 = pattern_very_paradox(4).unwrap();
        assert_eq!(s4.rank(set(&[1, 2, 3]), 1), Some(3));
        assert_eq!(s4.order(set(&[2, 3, 4])).unwrap(), vec![2, 3, 4]);
        assert!(!s4.is_weak());
        assert!(pattern_very_paradox(2).is_err());
    }

    #[test]
    fn cyclic_shape() {
        let s3 = pattern_cyclic(3).unwrap();
        assert_eq!(s3.rank(set(&[1, 2]), 1), Some(1));
        assert_eq!(s3.rank(set(&[2, 3]), 2), Some(1));
        assert_eq!(s3.rank(set(&[1, 3]), 3), Some(1));
        assert_eq!(s3.order(set(&[1, 2, 3])).unwrap(), vec![1, 2, 3]);
        let s4 = pattern_cyclic(4).unwrap();
        assert_eq!(s4.rank(set(&[1, 4]), 4), Some(1));
        assert_eq!(s4.rank(set(&[1, 3]), 1), Some(1));
        assert!(!s4.is_weak());
        assert!(pattern_cyclic(2).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_patterns(3, true).unwrap().len(), 48);
        assert_eq!(enumerate_patterns(2, true).unwrap().len(), 2);
        assert_eq!(enumerate_patterns(3, false).unwrap().len(), 351);
        assert_eq!(pattern_count(3, false), BigUint::from(351u32));
        let all = enumerate_patterns(3, false).unwrap();
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 351);
        assert!(enumerate_patterns(3, true).unwrap().iter().all(|p| !p.is_weak()));
        match enumerate_patterns(4, true) {
            Err(Error::TooMany { count, .. }) => assert_eq!(count, pattern_count(4, true).to_string()),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_patterns(4, 10, true, 7).unwrap();
        let b = sample_patterns(4, 10, true, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_patterns(4, 10, true, 8).unwrap());
        assert!(a.iter().all(|p| !p.is_weak()));
        let weak = sample_patterns(4, 10, false, 7).unwrap();
        for p in &weak {
            for f in p.functions() {
                RankingFunction::new(f.set(), f.ranks().clone()).unwrap();
            }
        }
    }

    #[test]
    fn pattern_json_roundtrip_and_validation() {
        let p = pattern_cyclic(3).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"m":3,"functions":[{"set":[1,2],"ranks":{"1":1,"2":2}}"#));
        let back: RankingPattern = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let incomplete = r#"{"m":3,"functions":[{"set":[1,2],"ranks":{"1":1,"2":1}}]}"#;
        assert!(serde_json::from_str::<RankingPattern>(incomplete).is_err());
        let sparse = r#"{"m":2,"functions":[{"set":[1,2],"ranks":{"1":1,"2":3}}]}"#;
        assert!(serde_json::from_str::<RankingPattern>(sparse).is_err());
        let _ = Rational::zero();
    }
}
