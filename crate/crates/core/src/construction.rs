//! Constructive realizations.
//!
//! * [`invert_to_ls`] turns any permutation distribution into an
//!   order-dependent load-sharing model generating it.
//! * [`build_ls_epsilon`] builds the set-invariant model LS(eps, sigma), whose
//!   rates are `1 - (sigma(A, i) - 1) * eps(|A|)`; with a schedule decaying
//!   fast enough its winning probabilities are p-concordant with `sigma`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_dimension, factorial, subsets_at_least, OrderedPrefix, SubsetMask};
use crate::error::{Error, Result};
use crate::loadsharing::{split_row, OrderDependentLSModel, SetInvariantLSModel};
use crate::permdist::{PermutationDistribution, WinningProbabilityFamily};
use crate::rational::Rational;
use crate::ranking::{check_p_concordance, RankingFunction, RankingPattern, Verdict, Violation};

/// The load-sharing model whose failure order has law `rho`.
///
/// With `w` the prefix marginals of `rho`, the rates are
/// `mu_j(prefix) = w(prefix, j) / w(prefix)` (with `0/0 := 0`) up to
/// prefixes of length `m-2`; every last-level rate is 1.
pub fn invert_to_ls(rho: &PermutationDistribution) -> Result<OrderDependentLSModel> {
    let m = rho.m();
    if m < 2 {
        return Err(Error::Domain(format!("inversion needs m >= 2, got {m}")));
    }
    let w = rho.prefix_marginals();
    let mut entries = Vec::new();
    for (prefix, mass) in &w {
        if prefix.is_empty() || prefix.len() > m - 1 || mass.is_zero() {
            continue;
        }
        let (head, last) = prefix.split_at(prefix.len() - 1);
        let parent = &w[head];
        entries.push((OrderedPrefix::from_vec_unchecked(head.to_vec()), last[0], mass / parent));
    }
    for perm in crate::combinatorics::all_permutations(m) {
        let s = perm.as_slice();
        entries.push((OrderedPrefix::from_vec_unchecked(s[..m - 1].to_vec()), s[m - 1], Rational::one()));
    }
    OrderDependentLSModel::new(m, entries, Rational::zero())
}

/// `eps(1), ..., eps(m)` for the LS(eps, sigma) construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonSchedule {
    m: usize,
    eps: Vec<Rational>,
}

impl EpsilonSchedule {
    /// Any non-negative values; whether they are usable is decided by
    /// [`check_epsilon_condition`] and by the rate check in
    /// [`build_ls_epsilon`].
    pub fn new(m: usize, eps: Vec<Rational>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("schedule needs m >= 2, got {m}")));
        }
        check_dimension(m)?;
        if eps.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: eps.len() });
        }
        if let Some(bad) = eps.iter().find(|e| e.is_negative()) {
            return Err(Error::Schedule(format!("negative value {bad}")));
        }
        Ok(EpsilonSchedule { m, eps })
    }

    /// All zeros: every LS(eps, sigma) rate equals 1.
    pub fn degenerate(m: usize) -> Result<Self> {
        EpsilonSchedule::new(m, vec![Rational::zero(); m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `eps(level)` for `1 <= level <= m`.
    pub fn eps(&self, level: usize) -> &Rational {
        &self.eps[level - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.eps
    }

    pub fn is_degenerate(&self) -> bool {
        self.eps.iter().all(Rational::is_zero)
    }

    /// `rho(u) = eps(u) * (u - 1) / 2`.
    pub fn rho(&self, u: usize) -> Rational {
        self.eps(u) * &Rational::new(u as i64 - 1, 2).expect("nonzero")
    }

    /// Total rate of `h` survivors under LS(eps, sigma):
    /// `h - h(h-1)/2 * eps(h)`.
    pub fn total_rate(&self, h: usize) -> Rational {
        let h_r = Rational::from_integer(h as i64);
        &h_r - &(self.eps(h) * &Rational::new((h * (h - 1)) as i64, 2).expect("nonzero"))
    }

    /// The decay and positivity conditions the prefix bounds rely on:
    /// `rho(2) < 1/8`, `2 rho(u) < rho(u-1)` for `u >= 3`, and
    /// `0 < (l - 1) eps(l) < 1` for `l >= 2`.
    pub fn check_decay(&self) -> Vec<ConditionCheck> {
        let mut out = vec![ConditionCheck::less("rho(2) < 1/8", self.rho(2), Rational::new(1, 8).unwrap())];
        for u in 3..=self.m {
            out.push(ConditionCheck::less(
                format!("2 rho({u}) < rho({})", u - 1),
                &self.rho(u) * &Rational::from_integer(2),
                self.rho(u - 1),
            ));
        }
        for l in 2..=self.m {
            out.push(ConditionCheck::less(format!("0 < eps({l})"), Rational::zero(), self.eps(l).clone()));
            out.push(ConditionCheck::less(
                format!("({}) eps({l}) < 1", l - 1),
                self.eps(l) * &Rational::from_integer(l as i64 - 1),
                Rational::one(),
            ));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    m: usize,
    eps: Vec<Rational>,
}

impl Serialize for EpsilonSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleFile { m: self.m, eps: self.eps.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EpsilonSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ScheduleFile::deserialize(d)?;
        EpsilonSchedule::new(f.m, f.eps).map_err(serde::de::Error::custom)
    }
}

/// `eps(l) = (17 m m!)^-(l-1)` for `l >= 2`, and `eps(1) = 0`.
pub fn epsilon_schedule(m: usize) -> Result<EpsilonSchedule> {
    if m < 2 {
        return Err(Error::Domain(format!("schedule needs m >= 2, got {m}")));
    }
    check_dimension(m)?;
    let base = Rational::from(factorial(m)) * Rational::from_integer(17 * m as i64);
    let eps = (1..=m)
        .map(|l| if l == 1 { Rational::zero() } else { base.pow(-(l as i32 - 1)) })
        .collect();
    EpsilonSchedule::new(m, eps)
}

/// A single strict inequality `lhs < rhs` with its slack `rhs - lhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub slack: Rational,
    pub ok: bool,
}

impl ConditionCheck {
    fn less(condition: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let slack = &rhs - &lhs;
        ConditionCheck { condition: condition.into(), ok: slack.is_positive(), lhs, rhs, slack }
    }
}

/// Per-level separation condition
/// `(m-l)! (l-1)! / (2 m!) * eps(l) > 8 l eps(l+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSlack {
    pub level: usize,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `lhs - rhs`
    pub slack: Rational,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonCheckReport {
    pub verdict: Verdict,
    pub m: usize,
    pub levels: Vec<LevelSlack>,
    pub auxiliary: Vec<ConditionCheck>,
}

impl EpsilonCheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// The scale constant `(m-l)! (l-1)! / (2 m!)` of the separation bound.
pub fn separation_coefficient(m: usize, level: usize) -> Rational {
    Rational::from(factorial(m - level) * factorial(level - 1)) / Rational::from(factorial(m) * 2u32)
}

/// Checks the separation condition at every level `1..m-1` together with
/// the decay conditions of [`EpsilonSchedule::check_decay`].
///
/// Level 1 uses `eps(1)` when it is positive and 1 otherwise: with the
/// usual `eps(1) = 0` the condition there reads `eps(2) < 1/(16 m)`.
pub fn check_epsilon_condition(eps: &EpsilonSchedule) -> EpsilonCheckReport {
    let m = eps.m();
    let levels: Vec<LevelSlack> = (1..m)
        .map(|l| {
            let e_l = if l == 1 && eps.eps(1).is_zero() { Rational::one() } else { eps.eps(l).clone() };
            let lhs = separation_coefficient(m, l) * e_l;
            let rhs = eps.eps(l + 1) * &Rational::from_integer(8 * l as i64);
            let slack = &lhs - &rhs;
            LevelSlack { level: l, ok: slack.is_positive(), lhs, rhs, slack }
        })
        .collect();
    let auxiliary = eps.check_decay();
    let ok = levels.iter().all(|l| l.ok) && auxiliary.iter().all(|c| c.ok);
    EpsilonCheckReport { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, m, levels, auxiliary }
}

/// LS(eps, sigma): `mu_i([m] \ A) = 1 - (sigma(A, i) - 1) eps(|A|)` for
/// `|A| >= 2` and rate 1 for a lone survivor.
pub fn build_ls_epsilon(sigma: &RankingPattern, eps: &EpsilonSchedule) -> Result<SetInvariantLSModel> {
    let m = sigma.m();
    if eps.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: eps.m() });
    }
    if let Some(set) = sigma.first_weak_subset() {
        return Err(Error::WeakPattern { set: set.elements() });
    }
    let mut entries = Vec::new();
    for j in 1..=m as u8 {
        entries.push((SubsetMask::singleton(j), j, Rational::one()));
    }
    for f in sigma.functions() {
        let e = eps.eps(f.set().len());
        for (&i, &r) in f.ranks() {
            let mu = Rational::one() - e * &Rational::from_integer(r as i64 - 1);
            if !mu.is_positive() {
                return Err(Error::Schedule(format!(
                    "rate for {i} with survivors {} is {mu}, not positive",
                    f.set()
                )));
            }
            entries.push((f.set(), i, mu));
        }
    }
    SetInvariantLSModel::new(m, entries)
}

/// Reads `sigma` back from an LS(eps, sigma) model, failing if the rates
/// do not have that form. Under a zero `eps(|A|)` every order on `A` fits
/// and the ascending one is returned.
pub fn recover_pattern(model: &SetInvariantLSModel, eps: &EpsilonSchedule) -> Result<RankingPattern> {
    use crate::loadsharing::LoadSharing;
    let m = model.m();
    if eps.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: eps.m() });
    }
    for j in 1..=m as u8 {
        if !model.rate_for_survivors(SubsetMask::singleton(j), j).is_one() {
            return Err(Error::InvalidModel(format!("lone survivor {j} has rate other than 1")));
        }
    }
    let mut functions = Vec::new();
    for set in subsets_at_least(m, 2) {
        let e = eps.eps(set.len());
        let mut ranks = BTreeMap::new();
        for i in set.iter() {
            let deficit = Rational::one() - model.rate_for_survivors(set, i);
            let rank = if e.is_zero() {
                if !deficit.is_zero() {
                    return Err(Error::InvalidModel(format!("rate of {i} with survivors {set} is not 1")));
                }
                set.iter().position(|x| x == i).expect("member") as u32 + 1
            } else {
                let r = (&deficit / e) + Rational::one();
                r.to_biguint()
                    .and_then(|b| u32::try_from(b).ok())
                    .filter(|&r| r >= 1 && r as usize <= set.len())
                    .ok_or_else(|| {
                        Error::InvalidModel(format!("rate of {i} with survivors {set} gives rank {r}"))
                    })?
            };
            ranks.insert(i, rank);
        }
        let f = RankingFunction::new(set, ranks)?;
        if f.is_weak() {
            return Err(Error::InvalidModel(format!("rates with survivors {set} repeat a rank")));
        }
        functions.push(f);
    }
    RankingPattern::new(m, functions)
}

/// Machine-checkable evidence that LS(eps, sigma) realizes `sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcordanceCertificate {
    pub sigma: RankingPattern,
    pub eps: EpsilonSchedule,
    pub model: SetInvariantLSModel,
    pub alphas: WinningProbabilityFamily,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl ConcordanceCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Builds LS(eps, sigma) with the universal schedule and checks
/// p-concordance of its winning probabilities.
pub fn certify_concordance(sigma: &RankingPattern) -> Result<ConcordanceCertificate> {
    certify_unchecked(sigma, epsilon_schedule(sigma.m())?)
}

/// As [`certify_concordance`] with a caller's schedule, which must pass
/// [`check_epsilon_condition`].
pub fn certify_concordance_with(sigma: &RankingPattern, eps: &EpsilonSchedule) -> Result<ConcordanceCertificate> {
    let report = check_epsilon_condition(eps);
    if !report.passed() {
        let first = report
            .levels
            .iter()
            .find(|l| !l.ok)
            .map(|l| format!("separation at level {}", l.level))
            .or_else(|| report.auxiliary.iter().find(|c| !c.ok).map(|c| c.condition.clone()))
            .unwrap_or_default();
        return Err(Error::Schedule(format!("schedule fails {first}")));
    }
    certify_unchecked(sigma, eps.clone())
}

fn certify_unchecked(sigma: &RankingPattern, eps: EpsilonSchedule) -> Result<ConcordanceCertificate> {
    let model = build_ls_epsilon(sigma, &eps)?;
    let alphas = model.alpha_family();
    let report = check_p_concordance(sigma, &alphas)?;
    Ok(ConcordanceCertificate {
        sigma: sigma.clone(),
        eps,
        model,
        alphas,
        verdict: report.verdict,
        violations: report.violations,
    })
}

/// Observed extremes of the `beta`/`gamma` split at one subset size,
/// compared with their analytic bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitObservation {
    pub level: usize,
    /// Largest `beta_i(A) - beta_j(A)` seen; a lower witness for the true
    /// maximum over all patterns.
    pub max_beta_difference: Rational,
    /// `8 l eps(l+1)`
    pub beta_bound: Rational,
    /// Smallest `gamma_i(A) - gamma_j(A)` seen over pairs with
    /// `sigma(A, i) < sigma(A, j)`; an upper witness for the true minimum.
    pub min_gamma_difference: Rational,
    /// `(m-l)! (l-1)! / (2 m!) * eps(l)`
    pub gamma_bound: Rational,
    pub holds: bool,
}

/// Evaluates the split bounds at every level `2..m-1` over the given
/// patterns.
pub fn observe_split_bounds(patterns: &[RankingPattern], eps: &EpsilonSchedule) -> Result<Vec<SplitObservation>> {
    let m = eps.m();
    let mut max_beta: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut min_gamma: BTreeMap<usize, Rational> = BTreeMap::new();
    for sigma in patterns {
        let model = build_ls_epsilon(sigma, eps)?;
        for set in subsets_at_least(m, 2) {
            let l = set.len();
            if l == m {
                continue;
            }
            let row = split_row(&model, set)?;
            for (&i, (bi, gi)) in &row {
                for (&j, (bj, gj)) in &row {
                    if i == j {
                        continue;
                    }
                    let db = bi - bj;
                    let slot = max_beta.entry(l).or_insert_with(|| db.clone());
                    if db > *slot {
                        *slot = db;
                    }
                    if sigma.rank(set, i) < sigma.rank(set, j) {
                        let dg = gi - gj;
                        let slot = min_gamma.entry(l).or_insert_with(|| dg.clone());
                        if dg < *slot {
                            *slot = dg;
                        }
                    }
                }
            }
        }
    }
    Ok(max_beta
        .into_iter()
        .map(|(l, max_beta_difference)| {
            let min_gamma_difference = min_gamma.remove(&l).unwrap_or_else(Rational::zero);
            let beta_bound = eps.eps(l + 1) * &Rational::from_integer(8 * l as i64);
            let gamma_bound = separation_coefficient(m, l) * eps.eps(l);
            let holds = max_beta_difference <= beta_bound && min_gamma_difference >= gamma_bound;
            SplitObservation { level: l, max_beta_difference, beta_bound, min_gamma_difference, gamma_bound, holds }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Permutation;
    use crate::loadsharing::{distribution_of, LoadSharing};
    use crate::permdist::tests::example_distribution;
    use crate::rational::ratio;
    use crate::ranking::{enumerate_patterns, pattern_cyclic, pattern_very_paradox, sample_patterns};

    fn pre(e: &[u8]) -> Vec<u8> {
        e.to_vec()
    }

    #[test]
    fn inverts_example_distribution() {
        let model = invert_to_ls(&example_distribution()).unwrap();
        let expect = [
            (pre(&[2]), 1, ratio(1, 2)),
            (pre(&[3]), 1, ratio(3, 8)),
            (pre(&[1]), 2, ratio(1, 3)),
            (pre(&[3]), 2, ratio(5, 8)),
            (pre(&[1]), 3, ratio(2, 3)),
            (pre(&[2]), 3, ratio(1, 2)),
            (pre(&[]), 1, ratio(1, 3)),
            (pre(&[]), 2, ratio(2, 9)),
            (pre(&[]), 3, ratio(4, 9)),
        ];
        for (p, j, mu) in expect {
            assert_eq!(model.rate(&p, j), mu, "mu_{j}({p:?})");
        }
        for perm in crate::combinatorics::all_permutations(3) {
            let s = perm.as_slice();
            assert_eq!(model.rate(&s[..2], s[2]), Rational::one());
        }
        assert_eq!(model, crate::loadsharing::tests::example_model());
        assert_eq!(distribution_of(&model).unwrap(), example_distribution());
    }

    #[test]
    fn inverts_uniform_and_point_mass() {
        let model = invert_to_ls(&PermutationDistribution::uniform(3).unwrap()).unwrap();
        assert_eq!(model.rate(&[], 2), ratio(1, 3));
        assert_eq!(model.rate(&[2], 3), ratio(1, 2));
        let perm = Permutation::new(vec![2, 1, 3]).unwrap();
        let pm = PermutationDistribution::point_mass(perm).unwrap();
        let model = invert_to_ls(&pm).unwrap();
        assert_eq!(model.rate(&[], 2), Rational::one());
        assert_eq!(model.rate(&[], 1), Rational::zero());
        assert_eq!(model.rate(&[2], 1), Rational::one());
        assert_eq!(model.rate(&[2], 3), Rational::zero());
        assert_eq!(model.rate(&[1], 3), Rational::zero());
        assert_eq!(distribution_of(&model).unwrap(), pm);
    }

    #[test]
    fn last_level_rates_are_irrelevant() {
        let model = invert_to_ls(&example_distribution()).unwrap();
        let tweaked = model
            .with_rate(&Permutation::identity(3).prefix(2), 3, ratio(7, 2))
            .with_rate(&Permutation::new(vec![3, 2, 1]).unwrap().prefix(2), 1, ratio(1, 100));
        assert_eq!(distribution_of(&tweaked).unwrap(), example_distribution());
    }

    #[test]
    fn schedule_values() {
        let e3 = epsilon_schedule(3).unwrap();
        assert_eq!(e3.values(), &[Rational::zero(), ratio(1, 306), ratio(1, 93636)]);
        assert_eq!(epsilon_schedule(2).unwrap().eps(2), &ratio(1, 68));
        assert_eq!(epsilon_schedule(4).unwrap().eps(2), &ratio(1, 1632));
        assert!(epsilon_schedule(1).is_err());
        assert_eq!(e3.total_rate(3), Rational::from_integer(3) - ratio(3, 93636));
    }

    #[test]
    fn schedule_condition() {
        for m in 2..=8 {
            let report = check_epsilon_condition(&epsilon_schedule(m).unwrap());
            assert!(report.passed(), "m={m}: {report:?}");
            assert_eq!(report.levels.len(), m - 1);
        }
        let halves = EpsilonSchedule::new(3, vec![ratio(1, 2); 3]).unwrap();
        let report = check_epsilon_condition(&halves);
        assert!(!report.passed());
        assert!(report.levels.iter().all(|l| !l.ok));
    }

    #[test]
    fn level_two_exact() {
        // m=3, l=2: 1!1!/(2*6) * 1/306 > 16/93636
        let report = check_epsilon_condition(&epsilon_schedule(3).unwrap());
        let l2 = &report.levels[1];
        assert_eq!(l2.lhs, ratio(1, 12 * 306));
        assert_eq!(l2.rhs, ratio(16, 93636));
        assert_eq!(l2.slack, ratio(1, 3672) - ratio(16, 93636));
    }

    #[test]
    fn build_rates() {
        let m = 3;
        let eps = epsilon_schedule(m).unwrap();
        let full = SubsetMask::full(m);
        let mut sigma = pattern_cyclic(m).unwrap();
        let top = RankingFunction::new(full, [(1, 2), (2, 3), (3, 1)].into_iter().collect()).unwrap();
        sigma = RankingPattern::new(
            m,
            sigma.functions().filter(|f| f.set() != full).cloned().chain([top]),
        )
        .unwrap();
        let model = build_ls_epsilon(&sigma, &eps).unwrap();
        assert_eq!(model.rate(&[], 1), Rational::one() - eps.eps(3));
        assert_eq!(model.rate(&[], 2), Rational::one() - eps.eps(3) * &Rational::from_integer(2));
        assert_eq!(model.rate(&[], 3), Rational::one());
        assert_eq!(model.rate(&[1, 2], 3), Rational::one());
        assert_eq!(recover_pattern(&model, &eps).unwrap(), sigma);
    }

    #[test]
    fn build_very_paradox() {
        let m = 4;
        let eps = epsilon_schedule(m).unwrap();
        let model = build_ls_epsilon(&pattern_very_paradox(m).unwrap(), &eps).unwrap();
        let k = Rational::from_integer(17 * 4 * 24);
        for j in 2..=4u8 {
            let a = SubsetMask::from_elements(m, &[1, j]).unwrap();
            assert_eq!(model.rate_for_survivors(a, 1), &Rational::one());
            assert_eq!(model.rate_for_survivors(a, j), &(Rational::one() - k.pow(-1)));
        }
        for set in subsets_at_least(m, 3).into_iter().filter(|s| s.contains(1)) {
            let l = set.len() as i32;
            let expect = Rational::one() - Rational::from_integer(l as i64 - 1) * k.pow(-(l - 1));
            assert_eq!(model.rate_for_survivors(set, 1), &expect);
        }
    }

    #[test]
    fn build_rejects_weak_and_nonpositive() {
        let weak = RankingPattern::new(
            2,
            [RankingFunction::new(SubsetMask::full(2), [(1, 1), (2, 1)].into_iter().collect()).unwrap()],
        )
        .unwrap();
        let eps = epsilon_schedule(2).unwrap();
        assert_eq!(build_ls_epsilon(&weak, &eps), Err(Error::WeakPattern { set: vec![1, 2] }));
        let big = EpsilonSchedule::new(3, vec![Rational::zero(), Rational::one(), ratio(1, 9)]).unwrap();
        assert!(matches!(build_ls_epsilon(&pattern_cyclic(3).unwrap(), &big), Err(Error::Schedule(_))));
    }

    #[test]
    fn certifies_all_m3() {
        let patterns = enumerate_patterns(3, true).unwrap();
        assert_eq!(patterns.len(), 48);
        for sigma in &patterns {
            assert!(certify_concordance(sigma).unwrap().passed());
        }
    }

    #[test]
    fn user_schedule_must_pass() {
        let sigma = pattern_cyclic(3).unwrap();
        let halves = EpsilonSchedule::new(3, vec![ratio(1, 2); 3]).unwrap();
        assert!(matches!(certify_concordance_with(&sigma, &halves), Err(Error::Schedule(_))));
        let ok = epsilon_schedule(3).unwrap();
        assert!(certify_concordance_with(&sigma, &ok).unwrap().passed());
    }

    #[test]
    fn split_bounds_small() {
        let m = 4;
        let eps = epsilon_schedule(m).unwrap();
        let patterns = sample_patterns(m, 5, true, 3).unwrap();
        let obs = observe_split_bounds(&patterns, &eps).unwrap();
        assert_eq!(obs.iter().map(|o| o.level).collect::<Vec<_>>(), vec![2, 3]);
        assert!(obs.iter().all(|o| o.holds), "{obs:?}");
    }

    #[test]
    fn certificate_json_shape() {
        let cert = certify_concordance(&pattern_cyclic(3).unwrap()).unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["verdict"], "PASS");
        assert_eq!(v["eps"]["eps"][1], "1/306");
        assert!(v["violations"].as_array().unwrap().is_empty());
        let back: SetInvariantLSModel = serde_json::from_value(v["model"].clone()).unwrap();
        assert_eq!(back, cert.model);
    }
}
