//! Randomized-joint suites for the abduction and proof-path results, and
//! checks on individual joints.

use std::fmt::Write as _;
use std::path::Path;

use ndr_core::bayes::{
    check_abduction, monotonicity_check, posterior_product, proof_path_coefficients, random_answer_joint,
    random_path_joint, BayesError, ClaimJoint, Monotonicity, Provenance,
};
use ndr_core::estimation::exact_chain;
use ndr_core::formal_system::{ClaimsSet, Question};
use ndr_core::rng::replica_rng;
use serde::{Deserialize, Serialize};

use crate::args::{CheckArgs, Global};
use crate::config::{parse_set, AbductionSuite, CheckSection, Context, JointCheck, ProofPathSuite};
use crate::error::{io_error, CliError};
use crate::output::write_file;

pub const REPORT_FILE: &str = "check_report.txt";
/// Largest accepted gap between the product posterior and direct conditioning.
pub const PRODUCT_TOL: f64 = 1e-10;

/// A joint distribution over claims sets.
///
/// ```toml
/// [[outcomes]]
/// claims = ["S:q/t", "S:r/t"]
/// probability = 0.4
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub outcomes: Vec<JointOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointOutcome {
    pub claims: Vec<String>,
    pub probability: f64,
}

impl JointFile {
    pub fn load(path: &Path) -> Result<ClaimJoint, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let file: JointFile = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })?;
        let outcomes = file
            .outcomes
            .iter()
            .map(|o| Ok((parse_set("outcomes.claims", &o.claims)?, o.probability)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ClaimJoint::new(outcomes, Provenance::Given)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AbductionSummary {
    pub checked: u64,
    pub undefined: u64,
    pub premise_holds: u64,
    pub inconsistent: u64,
}

pub fn abduction_suite(suite: &AbductionSuite, seed: u64) -> Result<AbductionSummary, CliError> {
    let mut rng = replica_rng(seed, 0);
    let questions: Vec<Question> = (0..4).map(|i| Question::new("S", &format!("x{i}"))).collect();
    let mut s = AbductionSummary::default();
    while s.checked < suite.joints {
        let m = 2 + (s.checked % 3) as usize;
        let joint = random_answer_joint(&mut rng, &questions[..m], suite.max_outcomes);
        match check_abduction(&joint, &questions[0], &questions[1]) {
            Ok(r) => {
                s.checked += 1;
                s.premise_holds += r.premise_holds as u64;
                s.inconsistent += !r.consistent() as u64;
            }
            Err(BayesError::ConditioningUndefined(_)) => s.undefined += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProofPathSummary {
    pub checked: u64,
    pub max_product_error: f64,
    pub max_bayes_factor_error: f64,
    pub sign_law_failures: u64,
    pub monotonicity_violations: u64,
    /// Joints with every multiplier above 1.
    pub increasing_cases: u64,
    /// Of those, trajectories that failed to increase strictly.
    pub growth_failures: u64,
}

impl ProofPathSummary {
    pub fn passed(&self) -> bool {
        self.max_product_error < PRODUCT_TOL
            && self.sign_law_failures == 0
            && self.monotonicity_violations == 0
            && self.growth_failures == 0
    }
}

fn union(paths: &[ClaimsSet]) -> ClaimsSet {
    paths.iter().fold(ClaimsSet::new(), |a, p| a.union(p))
}

pub fn proofpath_suite(suite: &ProofPathSuite, seed: u64) -> Result<ProofPathSummary, CliError> {
    let mut rng = replica_rng(seed, 1);
    let q = Question::new("S", "q");
    let mut s = ProofPathSummary::default();
    for j in 0..suite.joints {
        let n = 1 + (j as usize) % suite.max_paths.max(1);
        let paths: Vec<ClaimsSet> = (0..n)
            .map(|i| ClaimsSet::new().with(Question::new("S", &format!("p{i}")).claim(ndr_core::formal_system::Valence::Theorem)))
            .collect();
        let joint = random_path_joint(&mut rng, &q, &paths);
        let r = proof_path_coefficients(&joint, &q, &paths)?;
        let direct = joint.posterior_true(&q, &union(&paths))?;
        s.checked += 1;
        s.max_product_error = s.max_product_error.max((posterior_product(&r) - direct).abs());
        s.max_bayes_factor_error = s.max_bayes_factor_error.max(r.bayes_factor_error());
        s.sign_law_failures += !r.sign_law_holds() as u64;
        s.monotonicity_violations += (monotonicity_check(&r) == Monotonicity::Violated) as u64;
        if n > 1 && r.epsilon.iter().all(|e| *e > 1.0) {
            s.increasing_cases += 1;
            s.growth_failures += !r.trajectory.windows(2).all(|w| w[1] > w[0]) as u64;
        }
    }
    Ok(s)
}

fn joint_for(ctx: &Context, check: &JointCheck) -> Result<ClaimJoint, CliError> {
    match &check.file {
        Some(path) => JointFile::load(path),
        None => {
            let machine = ctx.machine()?;
            let bound = ctx.config.estimate.as_ref().map_or(100_000, |e| e.state_bound);
            let chain = exact_chain(&machine, ctx.config.horizon, bound)?;
            Ok(ClaimJoint::from_exact_chain(&chain, None)?)
        }
    }
}

/// Appends the report of one joint check; returns whether it passed.
fn joint_check(ctx: &Context, check: &JointCheck, report: &mut String) -> Result<bool, CliError> {
    let joint = joint_for(ctx, check)?;
    let source = check
        .file
        .as_ref()
        .map_or_else(|| format!("exact chain at horizon {}", ctx.config.horizon), |p| p.display().to_string());
    writeln!(report, "joint: {source} ({})", joint.provenance()).unwrap();
    let mut ok = true;
    if let Some(evidence) = &check.evidence {
        let r = check_abduction(&joint, &check.question, evidence)?;
        writeln!(report, "{r}").unwrap();
        ok &= !r.assertable || r.consistent();
    }
    if !check.paths.is_empty() {
        let paths = check
            .paths
            .iter()
            .map(|p| parse_set("paths", p))
            .collect::<Result<Vec<_>, _>>()?;
        let r = proof_path_coefficients(&joint, &check.question, &paths)?;
        let direct = joint.posterior_true(&check.question, &union(&paths))?;
        let err = (posterior_product(&r) - direct).abs();
        writeln!(report, "{r}").unwrap();
        writeln!(report, "product error: {err:e}").unwrap();
        writeln!(report, "monotonicity: {:?}", monotonicity_check(&r)).unwrap();
        ok &= err < PRODUCT_TOL && r.sign_law_holds() && monotonicity_check(&r) != Monotonicity::Violated;
    }
    writeln!(report, "result: {}\n", if ok { "pass" } else { "FAIL" }).unwrap();
    Ok(ok)
}

pub fn run(global: &Global, args: &CheckArgs) -> Result<bool, CliError> {
    let mut ctx = Context::load(global)?;
    let mut section = ctx.config.check.clone().unwrap_or(CheckSection {
        abduction: Some(AbductionSuite::default()),
        proofpath: Some(ProofPathSuite::default()),
        joints: Vec::new(),
    });
    if let Some(n) = args.abduction_joints {
        section.abduction.get_or_insert_with(AbductionSuite::default).joints = n;
    }
    if let Some(n) = args.proofpath_joints {
        section.proofpath.get_or_insert_with(ProofPathSuite::default).joints = n;
    }
    ctx.config.check = Some(section.clone());
    ctx.prepare_output()?;

    let seed = ctx.config.seed;
    let mut report = String::new();
    let mut ok = true;
    if let Some(suite) = &section.abduction {
        let s = abduction_suite(suite, seed)?;
        let pass = s.inconsistent == 0;
        writeln!(report, "abduction suite").unwrap();
        writeln!(report, "  joints checked: {}", s.checked).unwrap();
        writeln!(report, "  joints skipped (evidence never a theorem): {}", s.undefined).unwrap();
        writeln!(report, "  premise holds: {}", s.premise_holds).unwrap();
        writeln!(report, "  premise/conclusion disagreements: {}", s.inconsistent).unwrap();
        writeln!(report, "  result: {}\n", if pass { "pass" } else { "FAIL" }).unwrap();
        ok &= pass;
    }
    if let Some(suite) = &section.proofpath {
        let s = proofpath_suite(suite, seed)?;
        writeln!(report, "proof-path suite").unwrap();
        writeln!(report, "  joints checked: {}", s.checked).unwrap();
        writeln!(report, "  max product error: {:e} (tolerance {PRODUCT_TOL:e})", s.max_product_error).unwrap();
        writeln!(report, "  max bayes-factor error: {:e}", s.max_bayes_factor_error).unwrap();
        writeln!(report, "  sign-law failures: {}", s.sign_law_failures).unwrap();
        writeln!(report, "  monotonicity violations: {}", s.monotonicity_violations).unwrap();
        writeln!(report, "  all multipliers above 1: {}", s.increasing_cases).unwrap();
        writeln!(report, "  of which not strictly increasing: {}", s.growth_failures).unwrap();
        writeln!(report, "  result: {}\n", if s.passed() { "pass" } else { "FAIL" }).unwrap();
        ok &= s.passed();
    }
    for check in &section.joints {
        ok &= joint_check(&ctx, check, &mut report)?;
    }
    writeln!(report, "overall: {}", if ok { "pass" } else { "FAIL" }).unwrap();
    write_file(&ctx.out.join(REPORT_FILE), report.as_bytes())?;
    print!("{report}");
    Ok(ok)
}
