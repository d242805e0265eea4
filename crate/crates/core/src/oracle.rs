//! Numeric cross-checks of the symbolic decisions.
//!
//! Representatives are evaluated in `f64` at the midpoints of blocks
//! `20..=k_max`, which is deep enough for leading terms to dominate with the
//! exponent and coefficient ranges produced by [`crate::random`]. The
//! symbolic answer is authoritative; the oracle only reports agreement.

use std::fmt;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocksets::{block_midpoint, BlockSet};
use crate::error::Result;
use crate::ghquat::GenQuaternion;
use crate::gnum::GenScalar;
use crate::random;
use crate::rational::{to_f64, Q};

pub const FIRST_BLOCK: usize = 20;
pub const DEFAULT_DEPTH: usize = 40;
/// Relative slack below which approximate inputs give no verdict.
pub const APPROX_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirm,
    Refute,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub eps: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub decision: String,
    pub samples: Vec<Sample>,
    pub verdict: Verdict,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Sample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Unit,
    Association,
    QPositivity,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Unit => "unit",
            Decision::Association => "association",
            Decision::QPositivity => "qpositivity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Subject {
    Scalar(GenScalar),
    Quaternion(GenQuaternion),
}

/// A symbolic verdict to be audited numerically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub decision: Decision,
    pub subject: Subject,
    pub claimed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub decision: Decision,
    pub claimed: bool,
    pub report: OracleReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub confirmed: usize,
    pub refuted: usize,
    pub inconclusive: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Blocks sampled for a scalar: `FIRST_BLOCK..=k_max`, plus the first block
/// past `FIRST_BLOCK` of any branch that the window misses.
fn schedule(branches: &[(BlockSet, Q)], k_max: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (FIRST_BLOCK..=k_max).collect();
    for (s, _) in branches {
        if !ks.iter().any(|&k| s.contains(k)) {
            if let Some(k) = s.blocks().find(|&k| k >= FIRST_BLOCK) {
                ks.push(k);
            }
        }
    }
    ks.sort_unstable();
    ks
}

/// Branch sets with the branch's leading exponent (`None` for zero germs).
fn leading_map(x: &GenScalar) -> Result<Vec<(BlockSet, Option<Q>)>> {
    x.branches()
        .iter()
        .map(|(s, g)| Ok((s.clone(), g.leading_exponent()?.cloned())))
        .collect()
}

fn with_exponents(m: &[(BlockSet, Option<Q>)]) -> Vec<(BlockSet, Q)> {
    m.iter().map(|(s, e)| (s.clone(), e.clone().unwrap_or_else(Q::zero))).collect()
}

fn exponent_at(m: &[(BlockSet, Option<Q>)], k: usize) -> Option<&Q> {
    m.iter().find(|(s, _)| s.contains(k)).and_then(|(_, e)| e.as_ref())
}

fn finish(decision: String, samples: Vec<Sample>, slacks: Vec<f64>, approx: bool) -> OracleReport {
    let margin = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let failing = slacks.iter().position(|&s| s < 0.0);
    let verdict = if approx && margin.abs() < APPROX_MARGIN {
        Verdict::Inconclusive
    } else if failing.is_some() {
        Verdict::Refute
    } else {
        Verdict::Confirm
    };
    let counterexample = match verdict {
        Verdict::Refute => failing.map(|i| samples[i]),
        _ => None,
    };
    OracleReport { decision, samples, verdict, margin, counterexample }
}

/// Confirms when `|x(ε)| ≥ ε^r` at every sample.
pub fn check_unit_threshold(x: &GenScalar, r: &Q, k_max: usize) -> Result<OracleReport> {
    let m = leading_map(x)?;
    let ks = schedule(&with_exponents(&m), k_max);
    threshold_report(
        format!("unit threshold |x| >= eps^{}", crate::rational::fmt_q(r)),
        ks,
        |eps| x.eval(eps).abs(),
        r,
        !x.has_exact_coeffs(),
    )
}

/// Quaternion version of [`check_unit_threshold`] with `|x(ε)|` the
/// Euclidean norm of the four sampled components.
pub fn check_unit_threshold_quat(x: &GenQuaternion, r: &Q, k_max: usize) -> Result<OracleReport> {
    let m = leading_map(&x.normsq())?;
    let ks = schedule(&with_exponents(&m), k_max);
    threshold_report(
        format!("unit threshold |x| >= eps^{}", crate::rational::fmt_q(r)),
        ks,
        |eps| x.eval_abs(eps),
        r,
        !x.has_exact_coeffs(),
    )
}

fn threshold_report(
    decision: String,
    ks: Vec<usize>,
    abs_at: impl Fn(f64) -> f64,
    r: &Q,
    approx: bool,
) -> Result<OracleReport> {
    let rf = to_f64(r);
    let mut samples = Vec::with_capacity(ks.len());
    let mut slacks = Vec::with_capacity(ks.len());
    for k in ks {
        let eps = block_midpoint(k);
        let value = abs_at(eps);
        let bound = eps.powf(rf);
        samples.push(Sample { eps, value });
        slacks.push((value - bound) / bound);
    }
    Ok(finish(decision, samples, slacks, approx))
}

/// Exponent `r` for the unit check: one above the largest branch leading
/// exponent, so every nonzero branch clears `ε^r` at small `ε`.
pub fn unit_exponent(x: &GenScalar) -> Result<Q> {
    let m = leading_map(x)?;
    let top = m.iter().filter_map(|(_, e)| e.clone()).max().unwrap_or_else(Q::zero);
    Ok(top + Q::from_integer(1.into()))
}

pub fn unit_exponent_quat(x: &GenQuaternion) -> Result<Q> {
    Ok((unit_exponent(&x.normsq())? - Q::from_integer(1.into())) / Q::from_integer(2.into())
        + Q::from_integer(1.into()))
}

/// Per branch: the deepest sample is below `1e-3` and no larger than the
/// shallowest one.
pub fn check_association(x: &GenScalar, k_max: usize) -> Result<OracleReport> {
    let m = leading_map(x)?;
    association_report(&with_exponents(&m), k_max, |eps| x.eval(eps).abs(), !x.has_exact_coeffs())
}

/// Componentwise association through `|x(ε)|`.
pub fn check_association_quat(x: &GenQuaternion, k_max: usize) -> Result<OracleReport> {
    let m = leading_map(&x.normsq())?;
    association_report(&with_exponents(&m), k_max, |eps| x.eval_abs(eps), !x.has_exact_coeffs())
}

fn association_report(
    branches: &[(BlockSet, Q)],
    k_max: usize,
    abs_at: impl Fn(f64) -> f64,
    approx: bool,
) -> Result<OracleReport> {
    let ks = schedule(branches, k_max);
    let samples: Vec<Sample> = ks
        .iter()
        .map(|&k| {
            let eps = block_midpoint(k);
            Sample { eps, value: abs_at(eps) }
        })
        .collect();
    let mut slacks = vec![f64::INFINITY; samples.len()];
    for (s, _) in branches {
        let idx: Vec<usize> = (0..ks.len()).filter(|&i| s.contains(ks[i])).collect();
        let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else { continue };
        let deepest = samples[last].value;
        let limit = 1e-3 - deepest;
        let trend = samples[first].value - deepest;
        slacks[last] = limit.min(trend);
    }
    Ok(finish("association |x| -> 0".into(), samples, slacks, approx))
}

/// `ε^{-V_b}·x(ε) ≥ -ε` at every sample, where `V_b` is the leading exponent
/// of the branch holding the sample. Reported values are the scaled ones.
pub fn check_qpositivity(x: &GenScalar, k_max: usize) -> Result<OracleReport> {
    let m = leading_map(x)?;
    let ks = schedule(&with_exponents(&m), k_max);
    let mut samples = Vec::with_capacity(ks.len());
    let mut slacks = Vec::with_capacity(ks.len());
    for k in ks {
        let eps = block_midpoint(k);
        let scale = exponent_at(&m, k).map_or(1.0, |v| eps.powf(-to_f64(v)));
        let value = x.eval(eps) * scale;
        samples.push(Sample { eps, value });
        slacks.push((value + eps) / eps);
    }
    Ok(finish("qpositivity eps^-V x >= -eps".into(), samples, slacks, !x.has_exact_coeffs()))
}

/// Runs the oracle counterpart of each claim.
pub fn report_for(claim: &Claim) -> Result<OracleReport> {
    match (&claim.decision, &claim.subject) {
        (Decision::Unit, Subject::Scalar(x)) => check_unit_threshold(x, &unit_exponent(x)?, DEFAULT_DEPTH),
        (Decision::Unit, Subject::Quaternion(x)) => {
            check_unit_threshold_quat(x, &unit_exponent_quat(x)?, DEFAULT_DEPTH)
        }
        (Decision::Association, Subject::Scalar(x)) => check_association(x, DEFAULT_DEPTH),
        (Decision::Association, Subject::Quaternion(x)) => check_association_quat(x, DEFAULT_DEPTH),
        (Decision::QPositivity, Subject::Scalar(x)) => check_qpositivity(x, DEFAULT_DEPTH),
        (Decision::QPositivity, Subject::Quaternion(x)) => check_qpositivity(&x.normsq(), DEFAULT_DEPTH),
    }
}

/// A claim conflicts with the oracle when a true claim is refuted or a
/// false claim is confirmed.
pub fn conflicts(claimed: bool, verdict: Verdict) -> bool {
    matches!((claimed, verdict), (true, Verdict::Refute) | (false, Verdict::Confirm))
}

/// Audits claims, returning the report of every conflicting one.
pub fn audit(claims: &[Claim]) -> Result<Vec<(usize, OracleReport)>> {
    let mut out = Vec::new();
    for (i, c) in claims.iter().enumerate() {
        let r = report_for(c)?;
        if conflicts(c.claimed, r.verdict) {
            out.push((i, r));
        }
    }
    Ok(out)
}

/// The symbolic claims made about one random trial.
pub fn trial_claims(seed: u64, trial: usize) -> Result<Vec<Claim>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let x = random::scalar(&mut rng);
    let y = random::quaternion(&mut rng);
    Ok(vec![
        Claim { decision: Decision::Unit, claimed: x.is_unit()?, subject: Subject::Scalar(x.clone()) },
        Claim { decision: Decision::Association, claimed: x.associates_zero()?, subject: Subject::Scalar(x.clone()) },
        Claim { decision: Decision::QPositivity, claimed: x.is_qpositive()?, subject: Subject::Scalar(x) },
        Claim { decision: Decision::Unit, claimed: y.is_unit()?, subject: Subject::Quaternion(y.clone()) },
        Claim { decision: Decision::Association, claimed: y.associates_zero()?, subject: Subject::Quaternion(y) },
    ])
}

/// Random exact inputs, every symbolic decision checked against the oracle.
/// Trials run in parallel; results are assembled in trial order.
pub fn cross_validate_suite(seed: u64, trials: usize) -> Result<SuiteSummary> {
    let per_trial: Vec<Vec<(Decision, bool, OracleReport)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            trial_claims(seed, t)?
                .into_iter()
                .map(|c| Ok((c.decision, c.claimed, report_for(&c)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut summary = SuiteSummary {
        seed,
        trials,
        checks: 0,
        confirmed: 0,
        refuted: 0,
        inconclusive: 0,
        mismatches: Vec::new(),
    };
    for (trial, rows) in per_trial.into_iter().enumerate() {
        for (decision, claimed, report) in rows {
            summary.checks += 1;
            match report.verdict {
                Verdict::Confirm => summary.confirmed += 1,
                Verdict::Refute => summary.refuted += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
            }
            if conflicts(claimed, report.verdict) {
                summary.mismatches.push(Mismatch { trial, decision, claimed, report });
            }
        }
    }
    Ok(summary)
}
