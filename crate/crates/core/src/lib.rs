//! Stochastic precedence among dependent lifetimes.
//!
//! For random lifetimes `X_1, ..., X_m` without ties, the winning
//! probability `alpha_j(A)` is the probability that `X_j` is the smallest
//! among `{X_i : i in A}`. These probabilities depend only on the law of the
//! failure order, a distribution on permutations of `[m]`. This crate
//! computes them exactly, relates them to ranking patterns, and realizes
//! any permutation law or any strict ranking pattern with a time-homogeneous
//! load-sharing model. Voting tallies and reliability signatures fall out as
//! applications of the same machinery.
//!
//! All probabilities are exact [`Rational`]s; floating point appears only in
//! the Monte Carlo sampler and in optional decimal annotations.

pub mod cli;
pub mod combinatorics;
pub mod construction;
pub mod error;
pub mod loadsharing;
pub mod montecarlo;
pub mod permdist;
pub mod rational;
pub mod ranking;
pub mod signature;
pub mod voting;

pub use combinatorics::{OrderedPrefix, Permutation, SubsetMask};
pub use construction::{
    build_ls_epsilon, certify_concordance, check_epsilon_condition, epsilon_schedule, invert_to_ls,
    ConcordanceCertificate, EpsilonSchedule,
};
pub use error::{Error, Result};
pub use loadsharing::{
    alpha_family_ls, distribution_of, prefix_probability, total_rate, AnyModel, LoadSharing, OrderDependentLSModel,
    SetInvariantLSModel,
};
pub use permdist::{alpha_family, alpha_family_scan, PermutationDistribution, WinningProbabilityFamily};
pub use rational::Rational;
pub use ranking::{check_p_concordance, induced_pattern, RankingFunction, RankingPattern, Verdict};
pub use signature::{probability_signature, ProbabilitySignature, StructureFunction};
pub use voting::{synthesize_voting_situation, tally, TallyTable, VotingSituation};
