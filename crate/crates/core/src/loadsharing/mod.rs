//! Time-homogeneous load-sharing models.
//!
//! Component lifetimes evolve as a sequence of exponential races: while the
//! failed components are `(i_1, ..., i_k)` (in that order), each survivor `j`
//! fails at the constant rate `mu_j(i_1, ..., i_k)`. The order of failures is
//! then a Markov chain whose next-failure probabilities are `mu_j / M`, where
//! `M` is the total rate of the survivors.
//!
//! Two concrete models are provided:
//!
//! * [`OrderDependentLSModel`], with rates keyed by the ordered prefix;
//! * [`SetInvariantLSModel`], with rates keyed by the set of survivors only.
//!
//! Both implement [`LoadSharing`], and every operation in this module is
//! generic over that trait.

mod bounds;

pub use bounds::{beta_gamma_split, check_prefix_bounds, PrefixBoundReport};
pub(crate) use bounds::split_row;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_dimension, subsets_at_least, OrderedPrefix, Permutation, SubsetMask};
use crate::error::{Error, Result};
use crate::permdist::{PermutationDistribution, WinningProbabilityFamily};
use crate::rational::Rational;

/// A rate table `mu_j(prefix)`.
pub trait LoadSharing {
    fn m(&self) -> usize;

    /// Rate of survivor `j` after the failures in `prefix`. Callers
    /// guarantee `j` is not in `prefix` and `prefix.len() < m`.
    fn rate(&self, prefix: &[u8], j: u8) -> Rational;
}

fn survivors_of(m: usize, prefix: &[u8]) -> SubsetMask {
    prefix
        .iter()
        .fold(SubsetMask::full(m), |acc, &e| acc.remove(e))
}

/// `M(prefix)`: the sum of the survivors' rates.
pub fn total_rate<L: LoadSharing + ?Sized>(model: &L, prefix: &OrderedPrefix) -> Result<Rational> {
    let m = model.m();
    if prefix.len() >= m {
        return Err(Error::Domain(format!("prefix {prefix:?} leaves no survivors (m={m})")));
    }
    Ok(total_rate_raw(model, prefix.as_slice()))
}

fn total_rate_raw<L: LoadSharing + ?Sized>(model: &L, prefix: &[u8]) -> Rational {
    survivors_of(model.m(), prefix)
        .iter()
        .map(|j| model.rate(prefix, j))
        .sum()
}

/// `P(J_1..J_k = prefix)` as the product of next-failure ratios, with
/// `0/0 := 0`. A full-length prefix is evaluated at its first `m-1`
/// entries, since the last failure is forced.
pub fn prefix_probability<L: LoadSharing + ?Sized>(model: &L, prefix: &OrderedPrefix) -> Result<Rational> {
    let m = model.m();
    if prefix.is_empty() {
        return Err(Error::Domain("prefix must be non-empty".into()));
    }
    if prefix.len() > m || prefix.as_slice().iter().any(|&e| e == 0 || e as usize > m) {
        return Err(Error::Domain(format!("prefix {prefix:?} is not an ordered sample from [{m}]")));
    }
    let p = prefix.as_slice();
    let effective = p.len().min(m - 1);
    let mut prob = Rational::one();
    for r in 0..effective {
        let head = &p[..r];
        let total = total_rate_raw(model, head);
        let factor = model.rate(head, p[r]).ratio_or_zero(&total)?;
        if factor.is_zero() {
            return Ok(Rational::zero());
        }
        prob *= &factor;
    }
    Ok(prob)
}

/// The law of the failure order generated by the model.
///
/// Fails if a prefix reached with positive probability (of length at most
/// `m-2`) has zero total rate, since the process would then stall.
pub fn distribution_of<L: LoadSharing + ?Sized>(model: &L) -> Result<PermutationDistribution> {
    let m = model.m();
    let mut weights = BTreeMap::new();
    let mut prefix = Vec::with_capacity(m);
    walk_distribution(model, &mut prefix, Rational::one(), &mut weights)?;
    let total: Rational = weights.values().sum();
    if !total.is_one() {
        return Err(Error::InvalidModel(format!("order probabilities sum to {total}")));
    }
    Ok(PermutationDistribution::from_map_unchecked(m, weights))
}

fn walk_distribution<L: LoadSharing + ?Sized>(
    model: &L,
    prefix: &mut Vec<u8>,
    prob: Rational,
    out: &mut BTreeMap<Permutation, Rational>,
) -> Result<()> {
    let m = model.m();
    let survivors = survivors_of(m, prefix);
    if prefix.len() + 1 >= m {
        let mut full = prefix.clone();
        full.extend(survivors.iter());
        out.insert(Permutation::from_vec_unchecked(full), prob);
        return Ok(());
    }
    let rates: Vec<(u8, Rational)> = survivors.iter().map(|j| (j, model.rate(prefix, j))).collect();
    let total: Rational = rates.iter().map(|(_, r)| r).sum();
    if total.is_zero() {
        return Err(Error::InvalidModel(format!(
            "total rate vanishes after failures {prefix:?}, which occur with probability {prob}"
        )));
    }
    for (j, r) in rates {
        if r.is_zero() {
            continue;
        }
        prefix.push(j);
        walk_distribution(model, prefix, &prob * &r / &total, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Winning probabilities computed directly from the rates:
/// `alpha_j(A) = sum over ordered prefixes (i_1..i_k) of A^c of
/// p_k(i_1..i_k) * mu_j(i_1..i_k) / M(i_1..i_k)`.
pub fn alpha_family_ls<L: LoadSharing + Sync + ?Sized>(model: &L) -> WinningProbabilityFamily {
    use rayon::prelude::*;
    let m = model.m();
    let alphas = subsets_at_least(m, 2)
        .into_par_iter()
        .map(|set| {
            let mut row: BTreeMap<u8, Rational> = set.iter().map(|j| (j, Rational::zero())).collect();
            let mut prefix = Vec::with_capacity(m);
            accumulate_alpha(model, set, &mut prefix, &Rational::one(), &mut row);
            (set, row)
        })
        .collect();
    WinningProbabilityFamily::from_partial(m, alphas)
}

fn accumulate_alpha<L: LoadSharing + ?Sized>(
    model: &L,
    set: SubsetMask,
    prefix: &mut Vec<u8>,
    prob: &Rational,
    row: &mut BTreeMap<u8, Rational>,
) {
    let m = model.m();
    let survivors = survivors_of(m, prefix);
    let rates: Vec<(u8, Rational)> = survivors.iter().map(|j| (j, model.rate(prefix, j))).collect();
    let total: Rational = rates.iter().map(|(_, r)| r).sum();
    if total.is_zero() {
        return;
    }
    for (j, r) in &rates {
        if r.is_zero() {
            continue;
        }
        let step = prob * r / &total;
        if set.contains(*j) {
            *row.get_mut(j).expect("member of set") += step;
        } else {
            prefix.push(*j);
            accumulate_alpha(model, set, prefix, &step, row);
            prefix.pop();
        }
    }
}

/// Rates keyed by the ordered failure prefix, stored sparsely over a
/// default value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderDependentLSModel {
    m: usize,
    rates: HashMap<Vec<u8>, BTreeMap<u8, Rational>>,
    default: Rational,
}

impl OrderDependentLSModel {
    pub fn new(
        m: usize,
        entries: impl IntoIterator<Item = (OrderedPrefix, u8, Rational)>,
        default: Rational,
    ) -> Result<Self> {
        check_dimension(m)?;
        if default.is_negative() {
            return Err(Error::Domain(format!("negative default rate {default}")));
        }
        let mut rates: HashMap<Vec<u8>, BTreeMap<u8, Rational>> = HashMap::new();
        for (prefix, j, mu) in entries {
            if prefix.len() >= m || prefix.as_slice().iter().any(|&e| e as usize > m) {
                return Err(Error::Domain(format!("prefix {prefix:?} is not a proper prefix over [{m}]")));
            }
            if j == 0 || j as usize > m || prefix.set().contains(j) {
                return Err(Error::Domain(format!("rate index {j} invalid after prefix {prefix:?}")));
            }
            if mu.is_negative() {
                return Err(Error::Domain(format!("negative rate {mu} for j={j} after {prefix:?}")));
            }
            if rates.entry(prefix.as_slice().to_vec()).or_default().insert(j, mu).is_some() {
                return Err(Error::Domain(format!("duplicate rate for j={j} after {prefix:?}")));
            }
        }
        Ok(OrderDependentLSModel { m, rates, default })
    }

    /// Every rate equal to `value`.
    pub fn constant(m: usize, value: Rational) -> Result<Self> {
        OrderDependentLSModel::new(m, [], value)
    }

    pub fn default_rate(&self) -> &Rational {
        &self.default
    }

    /// Returns a copy with one rate replaced.
    pub fn with_rate(&self, prefix: &OrderedPrefix, j: u8, mu: Rational) -> Self {
        let mut out = self.clone();
        out.rates.entry(prefix.as_slice().to_vec()).or_default().insert(j, mu);
        out
    }

    /// Explicit entries sorted by prefix length, then prefix, then index.
    pub fn entries(&self) -> Vec<(OrderedPrefix, u8, Rational)> {
        let mut out: Vec<(OrderedPrefix, u8, Rational)> = self
            .rates
            .iter()
            .flat_map(|(p, row)| {
                row.iter()
                    .map(move |(j, mu)| (OrderedPrefix::from_vec_unchecked(p.clone()), *j, mu.clone()))
            })
            .collect();
        out.sort_by(|a, b| {
            (a.0.len(), a.0.as_slice(), a.1).cmp(&(b.0.len(), b.0.as_slice(), b.1))
        });
        out
    }
}

impl LoadSharing for OrderDependentLSModel {
    fn m(&self) -> usize {
        self.m
    }

    fn rate(&self, prefix: &[u8], j: u8) -> Rational {
        self.rates
            .get(prefix)
            .and_then(|row| row.get(&j))
            .cloned()
            .unwrap_or_else(|| self.default.clone())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderDependentFile {
    m: usize,
    rates: Vec<OrderedRateEntry>,
    #[serde(default = "Rational::zero")]
    default: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderedRateEntry {
    prefix: OrderedPrefix,
    j: u8,
    mu: Rational,
}

impl Serialize for OrderDependentLSModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrderDependentFile {
            m: self.m,
            rates: self
                .entries()
                .into_iter()
                .filter(|(_, _, mu)| *mu != self.default)
                .map(|(prefix, j, mu)| OrderedRateEntry { prefix, j, mu })
                .collect(),
            default: self.default.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderDependentLSModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = OrderDependentFile::deserialize(d)?;
        OrderDependentLSModel::new(f.m, f.rates.into_iter().map(|e| (e.prefix, e.j, e.mu)), f.default)
            .map_err(serde::de::Error::custom)
    }
}

/// Rates depending only on the set of failed components, stored as
/// `mu_j([m] \ A)` keyed by the survivor set `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetInvariantLSModel {
    m: usize,
    // indexed by survivor-set bits; entry j-1 holds mu_j for j in the set
    table: Vec<Vec<Option<Rational>>>,
}

impl SetInvariantLSModel {
    /// Requires a rate for every member of every non-empty survivor set,
    /// non-negative rates and a positive total per survivor set.
    pub fn new(m: usize, entries: impl IntoIterator<Item = (SubsetMask, u8, Rational)>) -> Result<Self> {
        check_dimension(m)?;
        let full = SubsetMask::full(m);
        let mut table = vec![vec![None; m]; 1usize << m];
        for (survivors, j, mu) in entries {
            if !survivors.is_subset_of(full) || !survivors.contains(j) {
                return Err(Error::Domain(format!("rate for j={j} with survivors {survivors} is not defined")));
            }
            if mu.is_negative() {
                return Err(Error::Domain(format!("negative rate {mu} for j={j} with survivors {survivors}")));
            }
            let slot = &mut table[survivors.bits() as usize][j as usize - 1];
            if slot.is_some() {
                return Err(Error::Domain(format!("duplicate rate for j={j} with survivors {survivors}")));
            }
            *slot = Some(mu);
        }
        for bits in 1..=full.bits() {
            let survivors = SubsetMask::from_bits(bits);
            let mut total = Rational::zero();
            for j in survivors.iter() {
                match &table[bits as usize][j as usize - 1] {
                    Some(mu) => total += mu,
                    None => {
                        return Err(Error::Domain(format!(
                            "missing rate for j={j} with survivors {survivors}"
                        )))
                    }
                }
            }
            if !total.is_positive() {
                return Err(Error::InvalidModel(format!("total rate is zero with survivors {survivors}")));
            }
        }
        Ok(SetInvariantLSModel { m, table })
    }

    /// `mu_j([m] \ survivors)`.
    pub fn rate_for_survivors(&self, survivors: SubsetMask, j: u8) -> &Rational {
        self.table[survivors.bits() as usize][j as usize - 1]
            .as_ref()
            .expect("complete table")
    }

    /// Total rate of a survivor set.
    pub fn total_for_survivors(&self, survivors: SubsetMask) -> Rational {
        survivors.iter().map(|j| self.rate_for_survivors(survivors, j)).sum()
    }

    /// All `(survivors, j, mu)` in subset order, then index.
    pub fn entries(&self) -> Vec<(SubsetMask, u8, Rational)> {
        let mut sets: Vec<SubsetMask> = subsets_at_least(self.m, 1);
        sets.sort();
        sets.into_iter()
            .flat_map(|s| s.iter().map(move |j| (s, j)))
            .map(|(s, j)| (s, j, self.rate_for_survivors(s, j).clone()))
            .collect()
    }

    /// The same model written as an order-dependent rate table.
    pub fn to_order_dependent(&self) -> OrderDependentLSModel {
        let mut rates: HashMap<Vec<u8>, BTreeMap<u8, Rational>> = HashMap::new();
        let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() >= self.m {
                continue;
            }
            let survivors = survivors_of(self.m, &prefix);
            let row = survivors
                .iter()
                .map(|j| (j, self.rate_for_survivors(survivors, j).clone()))
                .collect();
            for j in survivors.iter() {
                let mut next = prefix.clone();
                next.push(j);
                stack.push(next);
            }
            rates.insert(prefix, row);
        }
        OrderDependentLSModel { m: self.m, rates, default: Rational::zero() }
    }

    /// Winning probabilities through a dynamic programme over failed sets:
    /// `q(I)` is the probability that the first `|I|` failures are exactly
    /// `I` (in any order), and `alpha_j(A) = sum_{I in A^c} q(I) mu_j(I)/M(I)`.
    pub fn alpha_family(&self) -> WinningProbabilityFamily {
        let m = self.m;
        let full = SubsetMask::full(m);
        let size = 1usize << m;
        // next-failure probabilities per failed set
        let mut step: Vec<Vec<Rational>> = vec![Vec::new(); size];
        for (bits, row) in step.iter_mut().enumerate() {
            let failed = SubsetMask::from_bits(bits as u32);
            if failed == full {
                continue;
            }
            let survivors = failed.complement(m);
            let total = self.total_for_survivors(survivors);
            *row = (1..=m as u8)
                .map(|j| {
                    if survivors.contains(j) {
                        self.rate_for_survivors(survivors, j) / &total
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
        }
        let mut reach = vec![Rational::zero(); size];
        reach[0] = Rational::one();
        let mut by_size: Vec<u32> = (0..size as u32).collect();
        by_size.sort_by_key(|b| b.count_ones());
        for &bits in &by_size {
            let failed = SubsetMask::from_bits(bits);
            if failed == full || reach[bits as usize].is_zero() {
                continue;
            }
            let q = reach[bits as usize].clone();
            for j in failed.complement(m).iter() {
                let p = &step[bits as usize][j as usize - 1];
                if !p.is_zero() {
                    let next = failed.insert(j).bits() as usize;
                    reach[next] += &q * p;
                }
            }
        }
        let alphas = subsets_at_least(m, 2)
            .into_iter()
            .map(|set| {
                let outside = set.complement(m);
                let row = set
                    .iter()
                    .map(|j| {
                        let mut total = Rational::zero();
                        // enumerate subsets of the complement
                        let mut sub = outside.bits();
                        loop {
                            let q = &reach[sub as usize];
                            if !q.is_zero() {
                                total += q * &step[sub as usize][j as usize - 1];
                            }
                            if sub == 0 {
                                break;
                            }
                            sub = (sub - 1) & outside.bits();
                        }
                        (j, total)
                    })
                    .collect();
                (set, row)
            })
            .collect();
        WinningProbabilityFamily::from_partial(m, alphas)
    }
}

impl LoadSharing for SetInvariantLSModel {
    fn m(&self) -> usize {
        self.m
    }

    fn rate(&self, prefix: &[u8], j: u8) -> Rational {
        self.rate_for_survivors(survivors_of(self.m, prefix), j).clone()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetInvariantFile {
    m: usize,
    rates: Vec<SurvivorRateEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurvivorRateEntry {
    survivors: SubsetMask,
    j: u8,
    mu: Rational,
}

impl Serialize for SetInvariantLSModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetInvariantFile {
            m: self.m,
            rates: self
                .entries()
                .into_iter()
                .map(|(survivors, j, mu)| SurvivorRateEntry { survivors, j, mu })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetInvariantLSModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SetInvariantFile::deserialize(d)?;
        SetInvariantLSModel::new(f.m, f.rates.into_iter().map(|e| (e.survivors, e.j, e.mu)))
            .map_err(serde::de::Error::custom)
    }
}

/// Either model, as read from a model file. The two file layouts are told
/// apart by their rate entries (`prefix` vs `survivors`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyModel {
    OrderDependent(OrderDependentLSModel),
    SetInvariant(SetInvariantLSModel),
}

impl AnyModel {
    /// Parses either layout, choosing the set-invariant one when the rate
    /// entries are keyed by `survivors`.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let set_keyed = value["rates"]
            .as_array()
            .and_then(|rates| rates.first())
            .is_some_and(|entry| entry.get("survivors").is_some());
        let parsed = if set_keyed {
            serde_json::from_value::<SetInvariantLSModel>(value).map(AnyModel::SetInvariant)
        } else {
            serde_json::from_value::<OrderDependentLSModel>(value).map(AnyModel::OrderDependent)
        };
        Ok(parsed?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        AnyModel::from_json_value(serde_json::from_str(text)?)
    }
}

impl LoadSharing for AnyModel {
    fn m(&self) -> usize {
        match self {
            AnyModel::OrderDependent(x) => x.m(),
            AnyModel::SetInvariant(x) => x.m(),
        }
    }

    fn rate(&self, prefix: &[u8], j: u8) -> Rational {
        match self {
            AnyModel::OrderDependent(x) => x.rate(prefix, j),
            AnyModel::SetInvariant(x) => x.rate(prefix, j),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pre(e: &[u8]) -> OrderedPrefix {
        OrderedPrefix::new(8, e.to_vec()).unwrap()
    }

    /// Rates of the worked three-component construction, written out by hand.
    pub(crate) fn example_model() -> OrderDependentLSModel {
        let mut entries = vec![
            (pre(&[]), 1, ratio(1, 3)),
            (pre(&[]), 2, ratio(2, 9)),
            (pre(&[]), 3, ratio(4, 9)),
            (pre(&[2]), 1, ratio(1, 2)),
            (pre(&[3]), 1, ratio(3, 8)),
            (pre(&[1]), 2, ratio(1, 3)),
            (pre(&[3]), 2, ratio(5, 8)),
            (pre(&[1]), 3, ratio(2, 3)),
            (pre(&[2]), 3, ratio(1, 2)),
        ];
        for p in crate::combinatorics::all_permutations(3) {
            let s = p.as_slice();
            entries.push((pre(&s[..2]), s[2], Rational::one()));
        }
        OrderDependentLSModel::new(3, entries, Rational::zero()).unwrap()
    }

    #[test]
    fn totals() {
        let model = example_model();
        assert_eq!(total_rate(&model, &pre(&[1])).unwrap(), Rational::one());
        assert_eq!(total_rate(&model, &pre(&[3])).unwrap(), Rational::one());
        let ones = OrderDependentLSModel::constant(4, Rational::one()).unwrap();
        assert_eq!(total_rate(&ones, &pre(&[])).unwrap(), Rational::from_integer(4));
        assert!(total_rate(&ones, &pre(&[1, 2, 3, 4])).is_err());
    }

    #[test]
    fn prefix_probabilities() {
        let model = example_model();
        assert_eq!(prefix_probability(&model, &pre(&[3, 2, 1])).unwrap(), ratio(5, 18));
        assert_eq!(prefix_probability(&model, &pre(&[1, 3])).unwrap(), ratio(2, 9));
        let ones = OrderDependentLSModel::constant(3, Rational::one()).unwrap();
        for p in crate::combinatorics::all_permutations(3) {
            assert_eq!(prefix_probability(&ones, &p.prefix(3)).unwrap(), ratio(1, 6));
        }
    }

    #[test]
    fn zero_mass_ancestor_gives_zero() {
        let pm = OrderDependentLSModel::new(
            3,
            [(pre(&[]), 2, Rational::one()), (pre(&[2]), 1, Rational::one())],
            Rational::zero(),
        )
        .unwrap();
        assert_eq!(prefix_probability(&pm, &pre(&[1, 2])).unwrap(), Rational::zero());
        assert_eq!(prefix_probability(&pm, &pre(&[2, 1, 3])).unwrap(), Rational::one());
    }

    #[test]
    fn example_model_reproduces_example_distribution() {
        let d = distribution_of(&example_model()).unwrap();
        assert_eq!(d, crate::permdist::tests::example_distribution());
    }

    #[test]
    fn constant_model_is_uniform() {
        for m in 2..=5 {
            let ones = OrderDependentLSModel::constant(m, Rational::one()).unwrap();
            assert_eq!(distribution_of(&ones).unwrap(), PermutationDistribution::uniform(m).unwrap());
        }
    }

    #[test]
    fn stalled_model_is_invalid() {
        let stalled = OrderDependentLSModel::new(3, [(pre(&[]), 1, Rational::one())], Rational::zero()).unwrap();
        assert!(matches!(distribution_of(&stalled), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn alpha_direct_sum() {
        let model = example_model();
        let fam = alpha_family_ls(&model);
        let s = |e: &[u8]| SubsetMask::from_elements(3, e).unwrap();
        assert_eq!(fam.alpha(s(&[1, 3]), 3).unwrap(), &ratio(5, 9));
        assert_eq!(fam.alpha(s(&[2, 3]), 2).unwrap(), &ratio(1, 3));
        assert_eq!(fam, crate::permdist::alpha_family(&distribution_of(&model).unwrap()));
        let ones = OrderDependentLSModel::constant(4, Rational::one()).unwrap();
        for (set, row) in alpha_family_ls(&ones).rows() {
            for a in row.values() {
                assert_eq!(*a, Rational::new(1, set.len() as u64).unwrap());
            }
        }
    }

    #[test]
    fn set_invariant_embedding_and_dp() {
        // rates 1 + (index of j) / (|survivors| + 1), arbitrary but set-keyed
        let m = 4;
        let entries: Vec<_> = subsets_at_least(m, 1)
            .into_iter()
            .flat_map(|s| s.iter().map(move |j| (s, j)))
            .map(|(s, j)| (s, j, Rational::one() + Rational::new(j as i64, s.len() as i64 + 1).unwrap()))
            .collect();
        let model = SetInvariantLSModel::new(m, entries).unwrap();
        let od = model.to_order_dependent();
        assert_eq!(distribution_of(&model).unwrap(), distribution_of(&od).unwrap());
        assert_eq!(model.alpha_family(), alpha_family_ls(&od));
        assert_eq!(model.alpha_family(), alpha_family_ls(&model));
    }

    #[test]
    fn set_invariant_validation() {
        let s = SubsetMask::from_elements(2, &[1, 2]).unwrap();
        let one = SubsetMask::singleton(1);
        let two = SubsetMask::singleton(2);
        assert!(SetInvariantLSModel::new(2, [(s, 1, Rational::one()), (s, 2, Rational::one())]).is_err());
        let zero_total = [
            (s, 1, Rational::zero()),
            (s, 2, Rational::zero()),
            (one, 1, Rational::one()),
            (two, 2, Rational::one()),
        ];
        assert!(matches!(SetInvariantLSModel::new(2, zero_total), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn model_json() {
        let model = example_model();
        let text = serde_json::to_string(&model).unwrap();
        assert!(text.starts_with(r#"{"m":3,"rates":[{"prefix":[],"j":1,"mu":"1/3"}"#));
        let back: OrderDependentLSModel = serde_json::from_str(&text).unwrap();
        assert_eq!(distribution_of(&back).unwrap(), distribution_of(&model).unwrap());
        let any: AnyModel = serde_json::from_str(&text).unwrap();
        assert!(matches!(any, AnyModel::OrderDependent(_)));
        let ones = r#"{"m":3,"rates":[],"default":"1"}"#;
        let any: AnyModel = serde_json::from_str(ones).unwrap();
        assert_eq!(distribution_of(&any).unwrap(), PermutationDistribution::uniform(3).unwrap());
    }
}
