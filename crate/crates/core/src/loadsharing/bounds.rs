use std::collections::BTreeMap;

use serde::Serialize;

use super::{prefix_probability, survivors_of, LoadSharing, SetInvariantLSModel};
use crate::combinatorics::{factorial, OrderedPrefix, SubsetMask};
use crate::construction::{recover_pattern, EpsilonSchedule};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Splits `alpha_i(A)` by whether some element of `A^c` survives `i`.
///
/// `beta_i(A)` collects the orders where `i` fails before the whole of
/// `A^c` has failed, `gamma_i(A)` those where every element of `A^c` fails
/// first. Their sum is `alpha_i(A)`.
pub fn beta_gamma_split<L: LoadSharing + ?Sized>(model: &L, set: SubsetMask, i: u8) -> Result<(Rational, Rational)> {
    let row = split_row(model, set)?;
    row.get(&i)
        .cloned()
        .ok_or_else(|| Error::Domain(format!("{i} is not a member of {set}")))
}

/// `(beta_i(A), gamma_i(A))` for every member `i` of `A`.
pub(crate) fn split_row<L: LoadSharing + ?Sized>(
    model: &L,
    set: SubsetMask,
) -> Result<BTreeMap<u8, (Rational, Rational)>> {
    let m = model.m();
    if !set.is_subset_of(SubsetMask::full(m)) || set.len() < 2 || set.len() > m - 1 {
        return Err(Error::Domain(format!(
            "split needs 2 <= |A| <= m-1 with A in [{m}], got {set}"
        )));
    }
    let mut row: BTreeMap<u8, (Rational, Rational)> =
        set.iter().map(|j| (j, (Rational::zero(), Rational::zero()))).collect();
    let outside = m - set.len();
    let mut prefix = Vec::with_capacity(outside);
    split_walk(model, outside, &mut prefix, &Rational::one(), &mut row);
    Ok(row)
}

fn split_walk<L: LoadSharing + ?Sized>(
    model: &L,
    outside: usize,
    prefix: &mut Vec<u8>,
    prob: &Rational,
    row: &mut BTreeMap<u8, (Rational, Rational)>,
) {
    let survivors = survivors_of(model.m(), prefix);
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
        if let Some(slot) = row.get_mut(j) {
            if prefix.len() == outside {
                slot.1 += step;
            } else {
                slot.0 += step;
            }
        } else {
            prefix.push(*j);
            split_walk(model, outside, prefix, &step, row);
            prefix.pop();
        }
    }
}

/// Outcome of comparing a prefix probability with its two-sided bound
/// `(m-k)!/m! * (1 -+ 2 * sum_{u=m-k+1}^{m} rho(u))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixBoundReport {
    pub prefix: OrderedPrefix,
    pub probability: Rational,
    pub lower: Rational,
    pub upper: Rational,
    /// `probability - lower`
    pub lower_margin: Rational,
    /// `upper - probability`
    pub upper_margin: Rational,
    pub holds: bool,
}

/// Checks the prefix bound on an LS(eps, sigma) model.
///
/// The schedule must satisfy the auxiliary decay conditions (or be
/// identically zero), and the model's rates must have the LS(eps, sigma)
/// form for some strict pattern; otherwise this is a precondition error.
pub fn check_prefix_bounds(
    model: &SetInvariantLSModel,
    eps: &EpsilonSchedule,
    prefix: &OrderedPrefix,
) -> Result<PrefixBoundReport> {
    let m = model.m();
    if eps.m() != m {
        return Err(Error::DimensionMismatch { expected: m, found: eps.m() });
    }
    if !eps.is_degenerate() {
        let report = eps.check_decay();
        if let Some(bad) = report.iter().find(|c| !c.ok) {
            return Err(Error::Precondition(format!("schedule violates {}", bad.condition)));
        }
    }
    recover_pattern(model, eps).map_err(|e| Error::Precondition(format!("model is not LS(eps, sigma): {e}")))?;
    let k = prefix.len();
    let probability = prefix_probability(model, prefix)?;
    let base = Rational::from(factorial(m - k)) / Rational::from(factorial(m));
    let spread: Rational = (m - k + 1..=m).map(|u| eps.rho(u)).sum::<Rational>() * Rational::from_integer(2);
    let lower = &base * &(Rational::one() - &spread);
    let upper = &base * &(Rational::one() + &spread);
    let lower_margin = &probability - &lower;
    let upper_margin = &upper - &probability;
    let holds = !lower_margin.is_negative() && !upper_margin.is_negative();
    Ok(PrefixBoundReport { prefix: prefix.clone(), probability, lower, upper, lower_margin, upper_margin, holds })
}
