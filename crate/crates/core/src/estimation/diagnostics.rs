//! Consistency and convergence diagnostics.

use std::collections::{BTreeMap, BTreeSet};

use super::{EmpiricalDistribution, EstimationError, ExactChain, PrefixOutcome};
use crate::formal_system::ClaimsSet;
use crate::ndr_machine::NdrMachine;

/// Comparison of a prefix-`n` distribution with the prefix-`(n+1)`
/// distribution marginalized over its last claim.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    pub n: usize,
    pub max_discrepancy: f64,
    /// Largest discrepancy in units of its two-sample standard error.
    pub max_sigmas: f64,
    pub worst: Option<PrefixOutcome>,
    pub consistent: bool,
}

fn marginal_comparison(
    n: usize,
    dist_n: &EmpiricalDistribution<PrefixOutcome>,
    dist_n1: &EmpiricalDistribution<PrefixOutcome>,
) -> (f64, f64, Option<PrefixOutcome>) {
    let mut marginal: BTreeMap<PrefixOutcome, u64> = BTreeMap::new();
    for (outcome, e) in &dist_n1.support {
        *marginal.entry(outcome.truncate(n)).or_default() += e.count;
    }
    let keys: BTreeSet<&PrefixOutcome> = dist_n.support.keys().chain(marginal.keys()).collect();
    let (big_n, big_n1) = (dist_n.replicas, dist_n1.replicas);
    let (mut max_disc, mut max_sigmas, mut worst) = (0.0f64, 0.0f64, None);
    for key in keys {
        let a = dist_n.support.get(key).map_or(0, |e| e.count);
        let b = marginal.get(key).copied().unwrap_or(0);
        // |a/N - b/N1| in integers so equal proportions give exactly 0
        let num = (a as u128 * big_n1 as u128).abs_diff(b as u128 * big_n as u128);
        let disc = num as f64 / (big_n as f64 * big_n1 as f64);
        let pooled = (a + b) as f64 / (big_n + big_n1) as f64;
        let sigma = (pooled * (1.0 - pooled) * (1.0 / big_n as f64 + 1.0 / big_n1 as f64)).sqrt();
        let sigmas = if num == 0 {
            0.0
        } else if sigma == 0.0 {
            f64::INFINITY
        } else {
            disc / sigma
        };
        if disc > max_disc || (worst.is_none() && disc > 0.0) {
            worst = Some(key.clone());
        }
        max_disc = max_disc.max(disc);
        max_sigmas = max_sigmas.max(sigmas);
    }
    (max_disc, max_sigmas, worst)
}

/// Passes when every discrepancy is at most `tol`. Distributions tabulated
/// from the same replicas always give exactly 0.
pub fn check_marginal_consistency(
    n: usize,
    dist_n: &EmpiricalDistribution<PrefixOutcome>,
    dist_n1: &EmpiricalDistribution<PrefixOutcome>,
    tol: f64,
) -> MarginalReport {
    let (max_discrepancy, max_sigmas, worst) = marginal_comparison(n, dist_n, dist_n1);
    MarginalReport {
        n,
        max_discrepancy,
        max_sigmas,
        worst,
        consistent: max_discrepancy <= tol,
    }
}

/// For independent samples: passes when every discrepancy is within
/// `k_sigma` two-sample binomial standard errors.
pub fn check_marginal_consistency_sigma(
    n: usize,
    dist_n: &EmpiricalDistribution<PrefixOutcome>,
    dist_n1: &EmpiricalDistribution<PrefixOutcome>,
    k_sigma: f64,
) -> MarginalReport {
    let (max_discrepancy, max_sigmas, worst) = marginal_comparison(n, dist_n, dist_n1);
    MarginalReport {
        n,
        max_discrepancy,
        max_sigmas,
        worst,
        consistent: max_sigmas <= k_sigma,
    }
}

pub fn total_variation<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let keys: BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Exact total variation between the prefix-`n` distributions at horizons
/// `k` and `2k`, for `k = 1, 2, 4, …, ≤ k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n: usize,
    pub points: Vec<(u64, f64)>,
    pub threshold: f64,
    /// Distances never increase along `points`.
    pub monotone: bool,
    /// Smallest `k` from which distances never increase.
    pub monotone_from: u64,
    /// First `k` whose distance is below `threshold`.
    pub converged_at: Option<u64>,
}

pub fn convergence_diagnostic(
    machine: &NdrMachine,
    n: usize,
    k_max: u64,
    bound: usize,
    threshold: f64,
) -> Result<ConvergenceReport, EstimationError> {
    let ks: Vec<u64> = std::iter::successors(Some(1u64), |k| Some(k * 2))
        .take_while(|k| *k <= k_max.max(1))
        .collect();
    let mut wanted: BTreeSet<u64> = ks.iter().copied().collect();
    wanted.extend(ks.iter().map(|k| 2 * k));
    let mut chain = ExactChain::new(machine, bound, &[]);
    let mut at: BTreeMap<u64, BTreeMap<PrefixOutcome, f64>> = BTreeMap::new();
    for k in wanted {
        chain.advance_to(k)?;
        at.insert(k, chain.prefix_distribution(n));
    }
    let points: Vec<(u64, f64)> = ks.iter().map(|k| (*k, total_variation(&at[k], &at[&(2 * k)]))).collect();
    let rises = |w: &[(u64, f64)]| w[1].1 > w[0].1 + 1e-15;
    let monotone = !points.windows(2).any(rises);
    let monotone_from = points
        .windows(2)
        .rposition(rises)
        .map_or(points[0].0, |i| points[i + 1].0);
    let converged_at = points.iter().find(|(_, tv)| *tv < threshold).map(|(k, _)| *k);
    Ok(ConvergenceReport {
        n,
        points,
        threshold,
        monotone,
        monotone_from,
        converged_at,
    })
}

/// `values[i][j]`: exact probability that the first `ns[j]` claims at
/// horizon `ks[i]` contain every claim of the set (lists shorter than
/// `ns[j]` count whole). The last row approximates "horizon first", the
/// last column "prefix length first".
#[derive(Debug, Clone, PartialEq)]
pub struct LimitGrid {
    pub ks: Vec<u64>,
    pub ns: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl LimitGrid {
    /// For each `n`, the value at the largest horizon.
    pub fn horizon_first(&self) -> Vec<f64> {
        self.values.last().cloned().unwrap_or_default()
    }

    /// For each `k`, the value at the largest prefix length.
    pub fn prefix_first(&self) -> Vec<f64> {
        self.values.iter().map(|row| row.last().copied().unwrap_or(0.0)).collect()
    }
}

pub fn limit_orderings(
    machine: &NdrMachine,
    c: &ClaimsSet,
    ks: &[u64],
    ns: &[usize],
    bound: usize,
) -> Result<LimitGrid, EstimationError> {
    let mut sorted_ks = ks.to_vec();
    sorted_ks.sort_unstable();
    sorted_ks.dedup();
    let mut sorted_ns = ns.to_vec();
    sorted_ns.sort_unstable();
    sorted_ns.dedup();
    let mut chain = ExactChain::new(machine, bound, &[]);
    let mut values = Vec::new();
    for &k in &sorted_ks {
        chain.advance_to(k)?;
        let lists = chain.list_distribution();
        values.push(
            sorted_ns
                .iter()
                .map(|&n| {
                    lists
                        .iter()
                        .filter(|(l, _)| PrefixOutcome::of(l, n).list().contains_all(c))
                        .map(|(_, p)| p)
                        .sum()
                })
                .collect(),
        );
    }
    Ok(LimitGrid {
        ks: sorted_ks,
        ns: sorted_ns,
        values,
    })
}
