//! Probability signatures of coherent systems.
//!
//! A coherent system of `r` components is given by its minimal path sets:
//! it works while every component of at least one path set works. Under
//! a no-tie failure order, the system fails exactly at some component
//! failure; `p_k` is the probability that this is the `k`-th failure.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{all_permutations, check_dimension, Permutation, SubsetMask};
use crate::construction::invert_to_ls;
use crate::error::{Error, Result};
use crate::loadsharing::{distribution_of, LoadSharing, OrderDependentLSModel};
use crate::permdist::PermutationDistribution;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureFunction {
    r: usize,
    path_sets: Vec<SubsetMask>,
}

impl StructureFunction {
    /// Path sets must be non-empty, pairwise incomparable and together
    /// cover every component.
    pub fn new(r: usize, path_sets: &[Vec<u8>]) -> Result<Self> {
        check_dimension(r)?;
        let mut sets = Vec::with_capacity(path_sets.len());
        for p in path_sets {
            let set = SubsetMask::from_elements(r, p)?;
            if set.is_empty() {
                return Err(Error::Domain("empty path set".into()));
            }
            sets.push(set);
        }
        if sets.is_empty() {
            return Err(Error::Domain("no path sets".into()));
        }
        for (a, x) in sets.iter().enumerate() {
            for (b, y) in sets.iter().enumerate() {
                if a != b && x.is_subset_of(*y) {
                    return Err(Error::Domain(format!("path set {y} is not minimal: it contains {x}")));
                }
            }
        }
        let covered = sets.iter().fold(SubsetMask::EMPTY, |acc, s| acc.union(*s));
        if covered != SubsetMask::full(r) {
            let missing = SubsetMask::full(r).intersection(covered.complement(r));
            return Err(Error::Domain(format!("components {missing} are irrelevant")));
        }
        sets.sort();
        Ok(StructureFunction { r, path_sets: sets })
    }

    /// Imports a structure function from its truth table, where entry `x`
    /// is the state of the system when component `i` works iff bit `i-1`
    /// of `x` is set.
    pub fn from_truth_table(r: usize, table: &[bool]) -> Result<Self> {
        check_dimension(r)?;
        if table.len() != 1usize << r {
            return Err(Error::DimensionMismatch { expected: 1usize << r, found: table.len() });
        }
        for x in 0..table.len() {
            for i in 0..r {
                let up = x | (1 << i);
                if table[x] && !table[up] {
                    return Err(Error::Domain(format!("truth table is not monotone at state {x:#b}")));
                }
            }
        }
        let minimal: Vec<Vec<u8>> = (0..table.len())
            .filter(|&x| table[x] && (0..r).all(|i| x & (1 << i) == 0 || !table[x & !(1 << i)]))
            .map(|x| SubsetMask::from_bits(x as u32).elements())
            .collect();
        StructureFunction::new(r, &minimal)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn path_sets(&self) -> &[SubsetMask] {
        &self.path_sets
    }

    /// Whether the system works with the components in `failed` down.
    pub fn works(&self, failed: SubsetMask) -> bool {
        self.path_sets.iter().any(|p| p.intersection(failed).is_empty())
    }

    /// `k-out-of-r` system: works while at least `k` components work.
    pub fn k_out_of_r(k: usize, r: usize) -> Result<Self> {
        if k == 0 || k > r {
            return Err(Error::Domain(format!("need 1 <= k <= r, got k={k}, r={r}")));
        }
        check_dimension(r)?;
        let sets: Vec<Vec<u8>> = crate::combinatorics::subsets_at_least(r, k)
            .into_iter()
            .filter(|s| s.len() == k)
            .map(|s| s.elements())
            .collect();
        StructureFunction::new(r, &sets)
    }

    pub fn series(r: usize) -> Result<Self> {
        StructureFunction::k_out_of_r(r, r)
    }

    pub fn parallel(r: usize) -> Result<Self> {
        StructureFunction::k_out_of_r(1, r)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    r: usize,
    path_sets: Vec<Vec<u8>>,
}

impl Serialize for StructureFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StructureFile { r: self.r, path_sets: self.path_sets.iter().map(|p| p.elements()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = StructureFile::deserialize(d)?;
        StructureFunction::new(f.r, &f.path_sets).map_err(serde::de::Error::custom)
    }
}

/// `p_k = P(system fails at the k-th component failure)`, `k = 1..r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SignatureFile", into = "SignatureFile")]
pub struct ProbabilitySignature {
    p: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureFile {
    p: Vec<Rational>,
}

impl TryFrom<SignatureFile> for ProbabilitySignature {
    type Error = Error;
    fn try_from(f: SignatureFile) -> Result<Self> {
        ProbabilitySignature::new(f.p)
    }
}

impl From<ProbabilitySignature> for SignatureFile {
    fn from(s: ProbabilitySignature) -> Self {
        SignatureFile { p: s.p }
    }
}

impl ProbabilitySignature {
    pub fn new(p: Vec<Rational>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Domain("empty signature".into()));
        }
        if let Some(bad) = p.iter().find(|x| x.is_negative()) {
            return Err(Error::Domain(format!("negative signature entry {bad}")));
        }
        let total: Rational = p.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("signature sums to {total}, not 1")));
        }
        Ok(ProbabilitySignature { p })
    }

    pub fn r(&self) -> usize {
        self.p.len()
    }

    /// `p_k` for `1 <= k <= r`.
    pub fn get(&self, k: usize) -> &Rational {
        &self.p[k - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.p
    }
}

/// The number of failures after which the system is down.
pub fn failure_step(phi: &StructureFunction, perm: &Permutation) -> Result<usize> {
    if perm.m() != phi.r {
        return Err(Error::DimensionMismatch { expected: phi.r, found: perm.m() });
    }
    let mut failed = SubsetMask::EMPTY;
    for (k, &c) in perm.as_slice().iter().enumerate() {
        failed = failed.insert(c);
        if !phi.works(failed) {
            return Ok(k + 1);
        }
    }
    unreachable!("a structure with non-empty path sets fails once every component has")
}

pub fn probability_signature(phi: &StructureFunction, rho: &PermutationDistribution) -> Result<ProbabilitySignature> {
    if rho.m() != phi.r {
        return Err(Error::DimensionMismatch { expected: phi.r, found: rho.m() });
    }
    let mut p = vec![Rational::zero(); phi.r];
    for (perm, w) in rho.support() {
        p[failure_step(phi, perm)? - 1] += w;
    }
    ProbabilitySignature::new(p)
}

pub fn signature_from_ls<L: LoadSharing + ?Sized>(phi: &StructureFunction, model: &L) -> Result<ProbabilitySignature> {
    probability_signature(phi, &distribution_of(model)?)
}

/// The permutations of `[r]` grouped by failure step.
pub fn fibers(phi: &StructureFunction) -> Vec<Vec<Permutation>> {
    let mut out = vec![Vec::new(); phi.r];
    for perm in all_permutations(phi.r) {
        let k = failure_step(phi, &perm).expect("matching dimension");
        out[k - 1].push(perm);
    }
    out
}

/// A load-sharing model whose system signature is `target`, built by
/// spreading each `p_k` uniformly over the orders failing at step `k`.
pub fn ls_for_target_signature(
    phi: &StructureFunction,
    target: &ProbabilitySignature,
) -> Result<OrderDependentLSModel> {
    if target.r() != phi.r {
        return Err(Error::DimensionMismatch { expected: phi.r, found: target.r() });
    }
    if phi.r < 2 {
        return Err(Error::Domain("a single component has no failure order to shape".into()));
    }
    let mut weights = Vec::new();
    for (k, fiber) in fibers(phi).into_iter().enumerate() {
        let pk = target.get(k + 1);
        if pk.is_zero() {
            continue;
        }
        if fiber.is_empty() {
            return Err(Error::Infeasible { step: k + 1, mass: pk.to_string() });
        }
        let share = pk / &Rational::from_integer(fiber.len() as i64);
        weights.extend(fiber.into_iter().map(|perm| (perm, share.clone())));
    }
    invert_to_ls(&PermutationDistribution::new(phi.r, weights)?)
}

/// One summand of the decomposition of the system lifetime law over
/// `{system fails at the k-th failure}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureTerm {
    pub step: usize,
    pub p: Rational,
    pub fiber: Vec<Permutation>,
}

pub fn survival_decomposition_terms(
    phi: &StructureFunction,
    rho: &PermutationDistribution,
) -> Result<Vec<SignatureTerm>> {
    let sig = probability_signature(phi, rho)?;
    Ok(fibers(phi)
        .into_iter()
        .enumerate()
        .map(|(k, fiber)| SignatureTerm { step: k + 1, p: sig.get(k + 1).clone(), fiber })
        .collect())
}
