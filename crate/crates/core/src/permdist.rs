//! Distributions over failure orders and the winning probabilities they
//! determine.
//!
//! A [`PermutationDistribution`] is the law of `(J_1, ..., J_m)`, where `J_r`
//! is the index of the `r`-th smallest lifetime. Everything about "who fails
//! first within a subset" is a function of it: the prefix marginals `p_k`,
//! the conditional next-failure probabilities, and the winning
//! probabilities `alpha_j(A)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    all_permutations, check_dimension, for_each_ordered, OrderedPrefix, Permutation, SubsetMask,
    subsets_at_least,
};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Probability weights on the permutations of `[m]`. Zero weights are not
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationDistribution {
    m: usize,
    weights: BTreeMap<Permutation, Rational>,
}

impl PermutationDistribution {
    /// Validates dimension, non-negativity, uniqueness and exact unit mass.
    pub fn new(m: usize, weights: impl IntoIterator<Item = (Permutation, Rational)>) -> Result<Self> {
        check_dimension(m)?;
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (perm, p) in weights {
            if perm.m() != m {
                return Err(Error::DimensionMismatch { expected: m, found: perm.m() });
            }
            if p.is_negative() {
                return Err(Error::Domain(format!("negative weight {p} on {perm:?}")));
            }
            total += &p;
            if map.contains_key(&perm) {
                return Err(Error::Domain(format!("duplicate permutation {perm:?}")));
            }
            map.insert(perm, p);
        }
        if !total.is_one() {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        map.retain(|_, p| !p.is_zero());
        Ok(PermutationDistribution { m, weights: map })
    }

    pub(crate) fn from_map_unchecked(m: usize, mut weights: BTreeMap<Permutation, Rational>) -> Self {
        weights.retain(|_, p| !p.is_zero());
        PermutationDistribution { m, weights }
    }

    pub fn uniform(m: usize) -> Result<Self> {
        check_dimension(m)?;
        let perms = all_permutations(m);
        let p = Rational::new(1, perms.len() as u64)?;
        Ok(PermutationDistribution {
            m,
            weights: perms.into_iter().map(|perm| (perm, p.clone())).collect(),
        })
    }

    pub fn point_mass(perm: Permutation) -> Result<Self> {
        let m = perm.m();
        PermutationDistribution::new(m, [(perm, Rational::one())])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Weight of a permutation; zero if not in the support.
    pub fn weight(&self, perm: &Permutation) -> Rational {
        self.weights.get(perm).cloned().unwrap_or_else(Rational::zero)
    }

    /// Support in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = (&Permutation, &Rational)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// `p_k(prefix)` for every prefix of every supported permutation,
    /// including the empty prefix (mass 1). Prefixes with zero mass are absent.
    pub fn prefix_marginals(&self) -> HashMap<Vec<u8>, Rational> {
        let mut out: HashMap<Vec<u8>, Rational> = HashMap::new();
        for (perm, p) in &self.weights {
            let s = perm.as_slice();
            for k in 0..=s.len() {
                *out.entry(s[..k].to_vec()).or_insert_with(Rational::zero) += p;
            }
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DistributionFile::from(self)).expect("serializable")
    }
}

/// On-disk form: `{"m":3,"weights":[{"perm":[1,2,3],"p":"1/9"}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub m: usize,
    pub weights: Vec<WeightEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub perm: Permutation,
    pub p: Rational,
}

impl From<&PermutationDistribution> for DistributionFile {
    fn from(d: &PermutationDistribution) -> Self {
        DistributionFile {
            m: d.m,
            weights: d
                .weights
                .iter()
                .map(|(perm, p)| WeightEntry { perm: perm.clone(), p: p.clone() })
                .collect(),
        }
    }
}

impl TryFrom<DistributionFile> for PermutationDistribution {
    type Error = Error;
    fn try_from(f: DistributionFile) -> Result<Self> {
        PermutationDistribution::new(f.m, f.weights.into_iter().map(|w| (w.perm, w.p)))
    }
}

impl Serialize for PermutationDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermutationDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = DistributionFile::deserialize(d)?;
        PermutationDistribution::try_from(f).map_err(serde::de::Error::custom)
    }
}

fn check_prefix(m: usize, prefix: &OrderedPrefix) -> Result<()> {
    if prefix.len() > m || prefix.as_slice().iter().any(|&e| e == 0 || e as usize > m) {
        return Err(Error::Domain(format!("prefix {prefix:?} is not an ordered sample from [{m}]")));
    }
    if prefix.set().len() != prefix.len() {
        return Err(Error::Domain(format!("prefix {prefix:?} repeats an index")));
    }
    Ok(())
}

/// `p_k(j_1, ..., j_k)`: probability that the first `k` failures are, in
/// order, the given prefix.
pub fn pk_marginal(rho: &PermutationDistribution, prefix: &OrderedPrefix) -> Result<Rational> {
    if prefix.is_empty() {
        return Err(Error::Domain("prefix must be non-empty".into()));
    }
    check_prefix(rho.m, prefix)?;
    let p = prefix.as_slice();
    Ok(rho
        .weights
        .iter()
        .filter(|(perm, _)| perm.as_slice().starts_with(p))
        .map(|(_, w)| w)
        .sum())
}

/// `P(J_{k+1} = j | J_1..J_k = prefix)` with `0/0 := 0`.
pub fn conditional_next(rho: &PermutationDistribution, prefix: &OrderedPrefix, j: u8) -> Result<Rational> {
    check_prefix(rho.m, prefix)?;
    if j == 0 || j as usize > rho.m {
        return Err(Error::Domain(format!("index {j} is outside [1, {}]", rho.m)));
    }
    if prefix.set().contains(j) {
        return Err(Error::Domain(format!("index {j} already in prefix {prefix:?}")));
    }
    let denom = if prefix.is_empty() { Rational::one() } else { pk_marginal(rho, prefix)? };
    let numer = pk_marginal(rho, &prefix.extended(j))?;
    numer.ratio_or_zero(&denom)
}

/// The family `{alpha_j(A)}` over all subsets with at least two elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningProbabilityFamily {
    m: usize,
    alphas: BTreeMap<SubsetMask, BTreeMap<u8, Rational>>,
}

impl WinningProbabilityFamily {
    /// Validates completeness over the subsets of size >= 2, range and
    /// per-subset normalisation.
    pub fn new(m: usize, alphas: BTreeMap<SubsetMask, BTreeMap<u8, Rational>>) -> Result<Self> {
        check_dimension(m)?;
        for set in subsets_at_least(m, 2) {
            let row = alphas
                .get(&set)
                .ok_or_else(|| Error::Domain(format!("missing subset {set}")))?;
            if row.keys().copied().ne(set.iter()) {
                return Err(Error::Domain(format!("entries for {set} do not match its members")));
            }
            if row.values().any(|a| a.is_negative() || a > &Rational::one()) {
                return Err(Error::Domain(format!("alpha outside [0,1] on {set}")));
            }
            let total: Rational = row.values().sum();
            if !total.is_one() {
                return Err(Error::Domain(format!("alphas on {set} sum to {total}")));
            }
        }
        if alphas.len() != subsets_at_least(m, 2).len() {
            return Err(Error::Domain("family has subsets outside [m] or of size < 2".into()));
        }
        Ok(WinningProbabilityFamily { m, alphas })
    }

    /// Builds from a possibly partial table without completeness checks;
    /// used for hand-built families in majority-graph queries.
    pub fn from_partial(m: usize, alphas: BTreeMap<SubsetMask, BTreeMap<u8, Rational>>) -> Self {
        WinningProbabilityFamily { m, alphas }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, set: SubsetMask, j: u8) -> Option<&Rational> {
        self.alphas.get(&set).and_then(|row| row.get(&j))
    }

    pub fn alpha(&self, set: SubsetMask, j: u8) -> Result<&Rational> {
        self.get(set, j)
            .ok_or_else(|| Error::Domain(format!("no entry for alpha_{j}({set})")))
    }

    pub fn row(&self, set: SubsetMask) -> Option<&BTreeMap<u8, Rational>> {
        self.alphas.get(&set)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&SubsetMask, &BTreeMap<u8, Rational>)> {
        self.alphas.iter()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    m: usize,
    alphas: Vec<FamilyRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRow {
    set: SubsetMask,
    alpha: BTreeMap<u8, Rational>,
}

impl Serialize for WinningProbabilityFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyFile {
            m: self.m,
            alphas: self
                .alphas
                .iter()
                .map(|(set, row)| FamilyRow { set: *set, alpha: row.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WinningProbabilityFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = FamilyFile::deserialize(d)?;
        let mut map = BTreeMap::new();
        for row in f.alphas {
            if map.insert(row.set, row.alpha).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate subset {}", row.set)));
            }
        }
        WinningProbabilityFamily::new(f.m, map).map_err(serde::de::Error::custom)
    }
}

/// Winning probabilities through the prefix-marginal sum
/// `alpha_j(A) = P(J_1 = j) + sum_k sum_{D(A,k)} p_{k+1}(i_1..i_k, j)`.
pub fn alpha_family(rho: &PermutationDistribution) -> WinningProbabilityFamily {
    let m = rho.m;
    let marginals = rho.prefix_marginals();
    let alphas = subsets_at_least(m, 2)
        .into_par_iter()
        .map(|set| {
            let outside = set.complement(m);
            let row: BTreeMap<u8, Rational> = set
                .iter()
                .map(|j| {
                    let mut total = marginals.get(&vec![j]).cloned().unwrap_or_else(Rational::zero);
                    for k in 1..=outside.len() {
                        let mut prefix = Vec::with_capacity(k + 1);
                        for_each_ordered(outside, k, &mut prefix, &mut |p| {
                            let mut key = Vec::with_capacity(p.len() + 1);
                            key.extend_from_slice(p);
                            key.push(j);
                            if let Some(w) = marginals.get(&key) {
                                total += w;
                            }
                        });
                    }
                    (j, total)
                })
                .collect();
            (set, row)
        })
        .collect();
    WinningProbabilityFamily { m, alphas }
}

/// Brute-force winning probabilities: for every supported permutation and
/// every subset, credit the first member of the subset in that order.
pub fn alpha_family_scan(rho: &PermutationDistribution) -> WinningProbabilityFamily {
    let m = rho.m;
    let mut alphas = BTreeMap::new();
    for set in subsets_at_least(m, 2) {
        let mut row: BTreeMap<u8, Rational> = set.iter().map(|j| (j, Rational::zero())).collect();
        for (perm, w) in &rho.weights {
            let winner = perm.first_in(set).expect("subset is non-empty");
            *row.get_mut(&winner).expect("winner in subset") += w;
        }
        alphas.insert(set, row);
    }
    WinningProbabilityFamily { m, alphas }
}

/// Pairwise stochastic-precedence digraph: arc `(i, j)` iff
/// `alpha_i({i,j}) >= alpha_j({i,j})`. Ties keep both arcs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityDigraph {
    pub m: usize,
    pub edges: BTreeSet<(u8, u8)>,
}

impl MajorityDigraph {
    pub fn has_edge(&self, i: u8, j: u8) -> bool {
        self.edges.contains(&(i, j))
    }

    /// True if the strict part of the digraph contains the directed cycle
    /// `cycle[0] -> cycle[1] -> ... -> cycle[0]`.
    pub fn has_strict_cycle(&self, cycle: &[u8]) -> bool {
        cycle.iter().zip(cycle.iter().cycle().skip(1)).all(|(&a, &b)| {
            self.has_edge(a, b) && !self.has_edge(b, a)
        })
    }
}

pub fn majority_digraph(fam: &WinningProbabilityFamily) -> Result<MajorityDigraph> {
    let m = fam.m;
    let mut edges = BTreeSet::new();
    for i in 1..=m as u8 {
        for j in (i + 1)..=m as u8 {
            let pair = SubsetMask::singleton(i).insert(j);
            let ai = fam.alpha(pair, i)?;
            let aj = fam.alpha(pair, j)?;
            if ai >= aj {
                edges.insert((i, j));
            }
            if aj >= ai {
                edges.insert((j, i));
            }
        }
    }
    Ok(MajorityDigraph { m, edges })
}
