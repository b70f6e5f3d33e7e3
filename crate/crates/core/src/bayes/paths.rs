//! Posterior growth along a sequence of proof paths.

use std::fmt;

use super::{BayesError, ClaimJoint, EXACT_TOL};
use crate::formal_system::{ClaimsSet, Question};

/// Coefficients of `paths` for the question `q`, with
/// `A_i = P(paths 1..i, v=t)` and `B_i = P(paths 1..i, v≠t)`:
/// `alpha[i-1] = A_i / A_{i-1}`, `beta[i-1] = B_i / B_{i-1}`,
/// `trajectory[i-1] = A_i / (A_i + B_i)`. `epsilon` holds the multipliers
/// for paths `2..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofPathReport {
    pub question: Question,
    pub paths: Vec<ClaimsSet>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub trajectory: Vec<f64>,
    /// `P(v=t | q)` before any path.
    pub prior: f64,
    /// `(A_i, B_i)` for `i = 0..=n`.
    pub masses: Vec<(f64, f64)>,
}

impl ProofPathReport {
    /// `P(v=t | q, paths 1..n)` computed directly.
    pub fn direct_posterior(&self) -> f64 {
        *self.trajectory.last().expect("at least one path")
    }

    /// Odds of `v=t` after `i` paths, for `i = 0..=n`.
    pub fn odds(&self) -> Vec<f64> {
        self.masses.iter().map(|(a, b)| a / b).collect()
    }

    /// Largest relative deviation of `alpha_i / beta_i` from
    /// `odds_i / odds_{i-1}`.
    pub fn bayes_factor_error(&self) -> f64 {
        let odds = self.odds();
        self.alpha
            .iter()
            .zip(&self.beta)
            .enumerate()
            .map(|(i, (a, b))| {
                let lhs = a / b;
                let rhs = odds[i + 1] / odds[i];
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// `epsilon_i >= 1` exactly when `alpha_i >= beta_i`, up to `EXACT_TOL`
    /// at the boundary.
    pub fn sign_law_holds(&self) -> bool {
        self.epsilon.iter().enumerate().all(|(j, eps)| {
            let (a, b) = (self.alpha[j + 1], self.beta[j + 1]);
            let boundary = (eps - 1.0).abs() <= EXACT_TOL || (a - b).abs() <= EXACT_TOL * a.max(b);
            boundary || (*eps > 1.0) == (a > b)
        })
    }
}

impl fmt::Display for ProofPathReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "question: {}", self.question)?;
        writeln!(f, "prior: {:.15}", self.prior)?;
        writeln!(f, "path\talpha\tbeta\tepsilon\tposterior\tclaims")?;
        for (i, path) in self.paths.iter().enumerate() {
            let eps = if i == 0 {
                "-".to_string()
            } else {
                format!("{:.15}", self.epsilon[i - 1])
            };
            writeln!(
                f,
                "{}\t{:.15}\t{:.15}\t{}\t{:.15}\t{}",
                i + 1,
                self.alpha[i],
                self.beta[i],
                eps,
                self.trajectory[i],
                path
            )?;
        }
        writeln!(f, "product posterior: {:.15}", posterior_product(self))?;
        write!(f, "direct posterior: {:.15}", self.direct_posterior())
    }
}

pub fn proof_path_coefficients(joint: &ClaimJoint, q: &Question, paths: &[ClaimsSet]) -> Result<ProofPathReport, BayesError> {
    if paths.is_empty() {
        return Err(BayesError::ZeroDenominator("no proof paths given".into()));
    }
    if let Some(list) = joint.conditioning() {
        if let Some(c) = paths.iter().flat_map(|p| p.iter()).find(|c| list.contains(c)) {
            return Err(BayesError::PathInConditioning(c.clone()));
        }
    }
    let mut cumulative = ClaimsSet::new();
    let mut masses = vec![joint.split(q, &cumulative)];
    for path in paths {
        cumulative = cumulative.union(path);
        masses.push(joint.split(q, &cumulative));
    }
    let (mut alpha, mut beta, mut epsilon, mut trajectory) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 1..masses.len() {
        let (y, x) = masses[i - 1];
        let (a, b) = masses[i];
        if y == 0.0 {
            return Err(BayesError::ZeroDenominator(format!("P(paths 1..{}, v=t) = 0", i - 1)));
        }
        if x == 0.0 {
            return Err(BayesError::ZeroDenominator(format!("P(paths 1..{}, v≠t) = 0", i - 1)));
        }
        if a + b == 0.0 {
            return Err(BayesError::ZeroDenominator(format!("P(paths 1..{i}, q answered) = 0")));
        }
        let (al, be) = (a / y, b / x);
        alpha.push(al);
        beta.push(be);
        trajectory.push(a / (a + b));
        if i >= 2 {
            // r (X + Y) / (X + r Y) with r = alpha / beta, cleared of beta
            let denom = be * x + al * y;
            if denom == 0.0 {
                return Err(BayesError::ZeroDenominator(format!("multiplier of path {i}")));
            }
            epsilon.push(al * (x + y) / denom);
        }
    }
    let (t0, n0) = masses[0];
    Ok(ProofPathReport {
        question: q.clone(),
        paths: paths.to_vec(),
        alpha,
        beta,
        epsilon,
        trajectory,
        prior: t0 / (t0 + n0),
        masses,
    })
}

/// `P(v=t | q, path 1)` times the multipliers of the later paths.
pub fn posterior_product(report: &ProofPathReport) -> f64 {
    report.trajectory[0] * report.epsilon.iter().product::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Holds,
    Violated,
    /// Some later path has `alpha < beta`, so no claim is made.
    NotApplicable,
}

/// Whenever every path after the first has `alpha >= beta`, the posterior
/// trajectory must be non-decreasing.
pub fn monotonicity_check(report: &ProofPathReport) -> Monotonicity {
    let applicable = report
        .alpha
        .iter()
        .zip(&report.beta)
        .skip(1)
        .all(|(a, b)| *a >= *b - EXACT_TOL * a.max(*b));
    if !applicable {
        return Monotonicity::NotApplicable;
    }
    if report.trajectory.windows(2).all(|w| w[1] >= w[0] - EXACT_TOL) {
        Monotonicity::Holds
    } else {
        Monotonicity::Violated
    }
}
