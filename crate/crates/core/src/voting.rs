//! Voting situations and plurality tallies.
//!
//! A voting situation counts voters per linear preference order. On an
//! agenda `A`, each voter votes for the first member of `A` on their list;
//! `n_i(A)` is the number of votes for `i`. Read as a permutation
//! distribution, `n_i(A) = n * alpha_i(A)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_dimension, subsets_at_least, Permutation, SubsetMask};
use crate::construction::{build_ls_epsilon, epsilon_schedule};
use crate::error::{Error, Result};
use crate::loadsharing::distribution_of;
use crate::permdist::PermutationDistribution;
use crate::rational::Rational;
use crate::ranking::{concordance_against, ConcordanceReport, RankingPattern};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VotingSituation {
    m: usize,
    counts: BTreeMap<Permutation, BigUint>,
    n: BigUint,
}

impl VotingSituation {
    /// Zero counts are dropped; at least one voter is required.
    pub fn new(m: usize, counts: impl IntoIterator<Item = (Permutation, BigUint)>) -> Result<Self> {
        check_dimension(m)?;
        let mut table = BTreeMap::new();
        for (perm, n) in counts {
            if perm.m() != m {
                return Err(Error::DimensionMismatch { expected: m, found: perm.m() });
            }
            if table.contains_key(&perm) {
                return Err(Error::Domain(format!("duplicate ranking {perm:?}")));
            }
            if !n.is_zero() {
                table.insert(perm, n);
            }
        }
        let n: BigUint = table.values().sum();
        if n.is_zero() {
            return Err(Error::Domain("voting situation has no voters".into()));
        }
        Ok(VotingSituation { m, counts: table, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn count(&self, perm: &Permutation) -> BigUint {
        self.counts.get(perm).cloned().unwrap_or_default()
    }

    pub fn counts(&self) -> impl Iterator<Item = (&Permutation, &BigUint)> {
        self.counts.iter()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VotingFile {
    m: usize,
    counts: Vec<CountEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountEntry {
    perm: Permutation,
    #[serde(with = "decimal")]
    n: BigUint,
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(serde::de::Error::custom(format!("count {text:?} is not a decimal integer")));
        }
        BigUint::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("count {text:?} is not a decimal integer")))
    }
}

impl Serialize for VotingSituation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VotingFile {
            m: self.m,
            counts: self
                .counts
                .iter()
                .map(|(perm, n)| CountEntry { perm: perm.clone(), n: n.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VotingSituation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = VotingFile::deserialize(d)?;
        VotingSituation::new(f.m, f.counts.into_iter().map(|e| (e.perm, e.n))).map_err(serde::de::Error::custom)
    }
}

/// `rho(perm) = N(perm) / n`.
pub fn rho_from_voting(vs: &VotingSituation) -> PermutationDistribution {
    let n = Rational::from(vs.n.clone());
    let weights = vs
        .counts
        .iter()
        .map(|(perm, c)| (perm.clone(), Rational::from(c.clone()) / &n))
        .collect();
    PermutationDistribution::from_map_unchecked(vs.m, weights)
}

/// Plurality tallies `n_i(A)` for every agenda of size at least 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TallyTable {
    m: usize,
    tallies: BTreeMap<SubsetMask, BTreeMap<u8, BigUint>>,
}

impl TallyTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn votes(&self, set: SubsetMask, i: u8) -> Option<&BigUint> {
        self.tallies.get(&set)?.get(&i)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&SubsetMask, &BTreeMap<u8, BigUint>)> {
        self.tallies.iter()
    }
}

#[derive(Serialize)]
struct TallyRow<'a> {
    set: SubsetMask,
    #[serde(serialize_with = "decimal_map")]
    votes: &'a BTreeMap<u8, BigUint>,
}

fn decimal_map<S: serde::Serializer>(map: &&BTreeMap<u8, BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut out = s.serialize_map(Some(map.len()))?;
    for (k, v) in map.iter() {
        out.serialize_entry(&k.to_string(), &v.to_str_radix(10))?;
    }
    out.end()
}

impl Serialize for TallyTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            m: usize,
            tallies: Vec<TallyRow<'a>>,
        }
        Out {
            m: self.m,
            tallies: self.tallies.iter().map(|(set, votes)| TallyRow { set: *set, votes }).collect(),
        }
        .serialize(s)
    }
}

pub fn tally(vs: &VotingSituation) -> TallyTable {
    let tallies = subsets_at_least(vs.m, 2)
        .into_iter()
        .map(|set| {
            let mut row: BTreeMap<u8, BigUint> = set.iter().map(|i| (i, BigUint::zero())).collect();
            for (perm, c) in &vs.counts {
                let first = perm.first_in(set).expect("non-empty agenda");
                *row.get_mut(&first).expect("member") += c;
            }
            (set, row)
        })
        .collect();
    TallyTable { m: vs.m, tallies }
}

/// N-concordance: on every agenda, smaller rank iff more votes and equal
/// rank iff equal votes.
pub fn check_n_concordance(tau: &RankingPattern, vs: &VotingSituation) -> Result<ConcordanceReport> {
    if tau.m() != vs.m {
        return Err(Error::DimensionMismatch { expected: tau.m(), found: vs.m });
    }
    let table = tally(vs);
    concordance_against(tau, |set, i| {
        table
            .votes(set, i)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("no tally for {i} in {set}")))
    })
}

/// An integer electorate realizing `sigma`: the failure-order law of
/// LS(eps, sigma) scaled by the least common multiple of its denominators.
pub fn synthesize_voting_situation(sigma: &RankingPattern) -> Result<VotingSituation> {
    let m = sigma.m();
    let model = build_ls_epsilon(sigma, &epsilon_schedule(m)?)?;
    let rho = distribution_of(&model)?;
    let lcm = rho
        .support()
        .fold(BigUint::one(), |acc, (_, w)| acc.lcm(&w.denom_unsigned()));
    let scale = Rational::from(lcm);
    let counts = rho
        .support()
        .map(|(perm, w)| {
            let c = (w * &scale).to_biguint().expect("integer after scaling");
            (perm.clone(), c)
        })
        .collect::<Vec<_>>();
    VotingSituation::new(m, counts)
}
