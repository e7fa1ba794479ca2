//! Seeded randomized invariant suites behind the `selftest` command.

use std::collections::BTreeMap;

use serde::Serialize;

use super::report::Report;
use crate::error::Result;
use crate::hilbmod::OperatorMatrix;
use crate::polar::{
    adjoint_polar_check, closed_range_suite, cor32_check, polar_decompose, verify_thm31, Operator,
};
use crate::random;
use crate::regular::{btransform, inverse_btransform, remark22_residuals, RealPolynomial};
use crate::Tolerances;

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteOutcome {
    pub failed: usize,
    pub passed: usize,
    /// Largest residual seen, where the suite measures one.
    pub worst: f64,
}

impl SuiteOutcome {
    fn record(&mut self, ok: bool, residual: f64) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if residual.is_finite() {
            self.worst = self.worst.max(residual);
        } else {
            self.worst = f64::MAX;
        }
    }

    fn check(&mut self, result: Result<f64>, bound: f64) {
        match result {
            Ok(r) => self.record(r <= bound, r),
            Err(_) => self.record(false, f64::INFINITY),
        }
    }
}

/// The four polynomials used by the commutation suite: `1`, `x`, `x²`, `3x³ − x`.
pub fn commutation_polynomials() -> Vec<RealPolynomial> {
    [
        vec![1.0],
        vec![0.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, -1.0, 0.0, 3.0],
    ]
    .into_iter()
    .map(|c| RealPolynomial::new(c).expect("low degree"))
    .collect()
}

fn equivalence(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let r = verify_thm31(&t.clone().into(), tol)?;
    if r.cond_i && r.cond_ii && r.cond_iii {
        Ok(r.max_residual())
    } else {
        Ok(f64::INFINITY)
    }
}

fn round_trip(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let f = btransform(&t.clone().into(), tol)?;
    let back = inverse_btransform(&f, tol)?.explicit(tol)?;
    let rel = back.distance(t) / (1.0 + t.norm());
    let adj = f.adjoint().distance(&btransform(&t.adjoint().into(), tol)?);
    // the two bounds differ by a factor of 100
    Ok(rel.max(adj * 100.0))
}

fn commutation(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in commutation_polynomials() {
        let (a, b) = remark22_residuals(&t.clone().into(), &p, tol)?;
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}

fn dual(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let r = verify_thm31(&t.clone().into(), tol)?;
    Ok(["s dual agreement", "graph decomposition", "V unique"]
        .iter()
        .map(|k| r.residuals.get(*k).copied().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max))
}

fn corollaries(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let op: Operator = t.clone().into();
    let c = closed_range_suite(&op, tol)?;
    if !(c.consistent && c.range_closed && c.s_bounded) {
        return Ok(f64::INFINITY);
    }
    Ok(cor32_check(&op, tol)?.max(adjoint_polar_check(&op, tol)?))
}

/// Runs every suite on `count` seeded instances and fills `report`.
/// Returns whether all instances passed.
pub fn run_selftest(seed: u64, count: usize, tol: &Tolerances, report: &mut Report) -> bool {
    let corpus = random::corpus(seed, count);
    let mut suites: BTreeMap<&str, SuiteOutcome> = BTreeMap::new();
    type Check = fn(&OperatorMatrix, &Tolerances) -> Result<f64>;
    let matrix_suites: [(&str, Check, f64); 5] = [
        ("equivalence", equivalence, tol.identity),
        ("btransform_round_trip", round_trip, tol.identity),
        ("transform_commutation", commutation, tol.identity),
        ("dual_inverse", dual, tol.identity),
        ("corollaries", corollaries, tol.identity),
    ];
    for (name, check, bound) in matrix_suites {
        let outcome = suites.entry(name).or_default();
        for t in &corpus {
            outcome.check(check(t, tol), bound);
        }
    }

    let mut rng = random::rng(seed ^ 0x5eed);
    let rejected = suites.entry("function_rooted_rejected").or_default();
    for _ in 0..count {
        let d = random::rooted_diag(&mut rng);
        let op: Operator = d.into();
        let ok = verify_thm31(&op, tol)
            .is_ok_and(|r| !r.cond_i && !r.cond_ii && !r.cond_iii && r.certificate.is_some())
            && polar_decompose(&op, tol).is_err();
        rejected.record(ok, 0.0);
    }
    let accepted = suites.entry("function_clopen_accepted").or_default();
    for _ in 0..count {
        let d = random::clopen_diag(&mut rng);
        let op: Operator = d.into();
        let ok = verify_thm31(&op, tol).is_ok_and(|r| {
            r.cond_i && r.cond_ii && r.cond_iii && r.residuals.values().all(|&v| v == 0.0)
        }) && closed_range_suite(&op, tol).is_ok_and(|c| c.consistent);
        accepted.record(ok, 0.0);
    }

    let mut all = true;
    for (name, outcome) in &suites {
        all &= outcome.failed == 0;
        report.verdict(name, outcome.failed == 0);
        report.value(name, outcome);
    }
    report.value("seed", seed);
    report.value("count", count);
    all
}
