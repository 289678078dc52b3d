//! Simulation of the load-sharing failure process.
//!
//! Each trajectory is a sequence of exponential races: with survivors
//! racing at total rate `M(prefix)`, the next failure comes after an
//! `Exp(M)` sojourn and hits `j` with probability `mu_j / M`. Rates are
//! converted to `f64` here and nowhere else.
//!
//! Trajectory `t` draws from the ChaCha8 stream `t` of the run's seed, so a
//! summary depends only on `(seed, samples)` and not on how the work is
//! split across threads.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{check_dimension, subsets_at_least, Permutation, SubsetMask};
use crate::error::{Error, Result};
use crate::loadsharing::LoadSharing;
use crate::permdist::{PermutationDistribution, WinningProbabilityFamily};
use crate::rational::Rational;

const LEAF: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    total: f64,
    // (component, cumulative rate, child node)
    choices: Vec<(u8, f64, u32)>,
}

/// A model's reachable prefixes with floating-point rates, ready for
/// sampling.
#[derive(Clone, Debug)]
pub struct Sampler {
    m: usize,
    nodes: Vec<Node>,
}

impl Sampler {
    /// Fails if a reachable prefix with survivors has zero total rate.
    pub fn new<L: LoadSharing + ?Sized>(model: &L) -> Result<Self> {
        let m = model.m();
        check_dimension(m)?;
        let mut sampler = Sampler { m, nodes: Vec::new() };
        let mut prefix = Vec::with_capacity(m);
        sampler.compile(model, &mut prefix)?;
        Ok(sampler)
    }

    fn compile<L: LoadSharing + ?Sized>(&mut self, model: &L, prefix: &mut Vec<u8>) -> Result<u32> {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { total: 0.0, choices: Vec::new() });
        let survivors = prefix.iter().fold(SubsetMask::full(self.m), |acc, &e| acc.remove(e));
        let rates: Vec<(u8, Rational)> = survivors
            .iter()
            .map(|j| (j, model.rate(prefix, j)))
            .filter(|(_, r)| !r.is_zero())
            .collect();
        if rates.is_empty() {
            return Err(Error::Simulation(format!("total rate is zero after failures {prefix:?}")));
        }
        let mut cumulative = 0.0;
        let mut choices = Vec::with_capacity(rates.len());
        for (j, r) in rates {
            cumulative += r.to_f64();
            let child = if prefix.len() + 1 == self.m {
                LEAF
            } else {
                prefix.push(j);
                let c = self.compile(model, prefix)?;
                prefix.pop();
                c
            };
            choices.push((j, cumulative, child));
        }
        let node = &mut self.nodes[id as usize];
        node.total = cumulative;
        node.choices = choices;
        Ok(id)
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Failure identities in order, with their failure times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub order: Permutation,
    pub times: Vec<f64>,
}

pub fn sample_trajectory<R: Rng + ?Sized>(sampler: &Sampler, rng: &mut R) -> Trajectory {
    let mut order = Vec::with_capacity(sampler.m);
    let mut times = Vec::with_capacity(sampler.m);
    let mut now = 0.0;
    let mut node = 0u32;
    while node != LEAF {
        let n = &sampler.nodes[node as usize];
        now += Exp::new(n.total).expect("positive total").sample(rng);
        let u = rng.random::<f64>() * n.total;
        let &(j, _, child) = n
            .choices
            .iter()
            .find(|(_, cum, _)| u < *cum)
            .unwrap_or_else(|| n.choices.last().expect("non-empty"));
        order.push(j);
        times.push(now);
        node = child;
    }
    Trajectory { order: Permutation::from_vec_unchecked(order), times }
}

/// The generator for trajectory `index` of a run seeded with `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn pack(order: &[u8]) -> u64 {
    order.iter().fold(0u64, |acc, &e| (acc << 4) | e as u64)
}

fn unpack(mut code: u64, m: usize) -> Vec<u8> {
    let mut out = vec![0u8; m];
    for slot in out.iter_mut().rev() {
        *slot = (code & 0xf) as u8;
        code >>= 4;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderFrequency {
    pub perm: Permutation,
    pub count: u64,
    pub freq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaFrequency {
    pub set: SubsetMask,
    pub counts: BTreeMap<u8, u64>,
    pub alpha: BTreeMap<u8, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub empirical_rho: Vec<OrderFrequency>,
    pub empirical_alpha: Vec<AlphaFrequency>,
}

impl SimulationSummary {
    pub fn alpha(&self, set: SubsetMask, j: u8) -> Option<f64> {
        self.empirical_alpha.iter().find(|a| a.set == set)?.alpha.get(&j).copied()
    }

    /// Total-variation distance between the empirical order law and `rho`.
    pub fn total_variation(&self, rho: &PermutationDistribution) -> f64 {
        let seen: HashMap<&Permutation, f64> = self.empirical_rho.iter().map(|o| (&o.perm, o.freq)).collect();
        let mut tv: f64 = rho
            .support()
            .map(|(p, w)| (w.to_f64() - seen.get(p).copied().unwrap_or(0.0)).abs())
            .sum();
        tv += self
            .empirical_rho
            .iter()
            .filter(|o| rho.weight(&o.perm).is_zero())
            .map(|o| o.freq)
            .sum::<f64>();
        tv / 2.0
    }
}

/// Simulates `samples` trajectories on `workers` threads (0 means the
/// rayon default) and reports empirical order and winning frequencies.
pub fn estimate_alphas<L: LoadSharing + ?Sized>(
    model: &L,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationSummary> {
    if samples == 0 {
        return Err(Error::Simulation("need at least one sample".into()));
    }
    let sampler = Sampler::new(model)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Simulation(format!("thread pool: {e}")))?;
    let counts: HashMap<u64, u64> = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<u64, u64>, t| {
                let traj = sample_trajectory(&sampler, &mut trajectory_rng(seed, t));
                *acc.entry(pack(traj.order.as_slice())).or_default() += 1;
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            })
    });
    Ok(summarize(sampler.m, counts, samples, seed, pool.current_num_threads()))
}

fn summarize(m: usize, counts: HashMap<u64, u64>, samples: u64, seed: u64, workers: usize) -> SimulationSummary {
    let mut orders: Vec<(Permutation, u64)> = counts
        .into_iter()
        .map(|(code, c)| (Permutation::from_vec_unchecked(unpack(code, m)), c))
        .collect();
    orders.sort();
    let n = samples as f64;
    let empirical_alpha = subsets_at_least(m, 2)
        .into_iter()
        .map(|set| {
            let mut row: BTreeMap<u8, u64> = set.iter().map(|j| (j, 0)).collect();
            for (perm, c) in &orders {
                *row.get_mut(&perm.first_in(set).expect("non-empty")).expect("member") += c;
            }
            let alpha = row.iter().map(|(&j, &c)| (j, c as f64 / n)).collect();
            AlphaFrequency { set, counts: row, alpha }
        })
        .collect();
    let empirical_rho = orders
        .into_iter()
        .map(|(perm, count)| OrderFrequency { perm, count, freq: count as f64 / n })
        .collect();
    SimulationSummary { samples, seed, workers, empirical_rho, empirical_alpha }
}

/// One empirical winning frequency set against its exact value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaComparison {
    pub set: SubsetMask,
    pub j: u8,
    pub empirical: f64,
    pub exact: Rational,
    /// `sqrt(alpha (1 - alpha) / N)`
    pub std_error: f64,
    pub within: bool,
}

/// Compares every empirical `alpha_j(A)` with `exact`, accepting
/// deviations up to `sigmas` standard errors.
pub fn compare_alphas(summary: &SimulationSummary, exact: &WinningProbabilityFamily, sigmas: f64) -> Vec<AlphaComparison> {
    let n = summary.samples as f64;
    summary
        .empirical_alpha
        .iter()
        .flat_map(|row| {
            row.alpha.iter().map(move |(&j, &empirical)| {
                let exact = exact.get(row.set, j).cloned().unwrap_or_else(Rational::zero);
                let a = exact.to_f64();
                let std_error = (a * (1.0 - a) / n).sqrt();
                let within = (empirical - a).abs() <= sigmas * std_error;
                AlphaComparison { set: row.set, j, empirical, exact, std_error, within }
            })
        })
        .collect()
}

/// Checks on `samples` trajectories that the earliest member of each
/// agenda by failure order is also the one with the smallest failure time.
pub fn check_time_consistency<L: LoadSharing + ?Sized>(model: &L, samples: u64, seed: u64) -> Result<bool> {
    let sampler = Sampler::new(model)?;
    let sets = subsets_at_least(sampler.m, 2);
    for t in 0..samples {
        let traj = sample_trajectory(&sampler, &mut trajectory_rng(seed, t));
        if traj.times.windows(2).any(|w| w[0] >= w[1]) {
            return Ok(false);
        }
        for &set in &sets {
            let by_order = traj.order.first_in(set);
            let by_time = set.iter().min_by(|&a, &b| {
                let ta = traj.times[traj.order.position(a).expect("member")];
                let tb = traj.times[traj.order.position(b).expect("member")];
                ta.total_cmp(&tb)
            });
            if by_order != by_time {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
