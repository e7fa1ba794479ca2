//! Command implementations: each turns a validated problem into a report.

use serde_json::{json, Value};

use super::problem::{domain_to_input, operator_to_blocks, pw_to_input, Problem};
use super::report::{CertificateEntry, Report};
use super::{CliError, Command};
use crate::error::Error;
use crate::funbackend::{diag_complement_check, diag_identities, DiagOperator};
use crate::hilbmod::OperatorMatrix;
use crate::polar::{
    adjoint_polar_check, closed_range_suite, complement_residuals, cor32_check,
    generalized_inverse, polar_decompose, verify_thm31, InverseDatum, Operator, PolarDecomposition,
};
use crate::regular::{
    btransform, classify, graded_report, inverse_btransform, validate_transform, RegularOperator,
};
use crate::Tolerances;

pub fn operator_json(t: &OperatorMatrix) -> Value {
    json!({
        "codomain_rank": t.codomain_rank(),
        "domain_rank": t.domain_rank(),
        "blocks": operator_to_blocks(t),
        "profile": t.profile().sizes(),
    })
}

pub fn diag_json(d: &DiagOperator) -> Value {
    json!({
        "domain": domain_to_input(d.domain()),
        "entries": d.entries().iter().map(pw_to_input).collect::<Vec<_>>(),
    })
}

fn unsupported(cmd: Command, problem: &Problem) -> CliError {
    CliError::UnsupportedCommandForBackend {
        command: cmd.name().to_string(),
        backend: problem.file.backend.name().to_string(),
    }
}

fn explicit(t: &RegularOperator, tol: &Tolerances) -> Result<OperatorMatrix, CliError> {
    Ok(t.explicit(tol)?)
}

pub fn run_command(cmd: Command, problem: &Problem, tol: &Tolerances) -> Result<Report, CliError> {
    let mut r = Report::new(cmd.name());
    r.backend = Some(problem.file.backend.name().to_string());
    let op = &problem.operator;
    match cmd {
        Command::Polar => polar(&mut r, op, tol)?,
        Command::Pinv => pinv(&mut r, op, tol)?,
        Command::Btransform => match op {
            Operator::Matrix(t) => {
                let f = btransform(t, tol)?;
                let validity = validate_transform(&f, tol)?;
                r.object("F_t", operator_json(&f));
                r.number("norm", f.norm());
                r.verdict("contractive", validity.contractive);
                r.verdict("dense_defect", validity.dense_defect);
                let tm = explicit(t, tol)?;
                let back = inverse_btransform(&f, tol)?.explicit(tol)?;
                r.residual("round_trip", back.distance(&tm) / (1.0 + tm.norm()));
                let f_adj = btransform(&t.adjoint(), tol)?;
                r.residual("F_t*=F_{t*}", f.adjoint().distance(&f_adj));
            }
            Operator::Graded(g) => {
                let mut list = Vec::new();
                let mut sup = 0.0f64;
                for c in g.components() {
                    let f = btransform(&c.operator(tol)?.into(), tol)?;
                    sup = sup.max(f.norm());
                    list.push(operator_json(&f));
                }
                r.object("F_t", Value::Array(list));
                r.number("sup_norm", sup);
                r.verdict("contractive", sup <= 1.0 + 1e-12);
            }
            Operator::Function(_) => return Err(unsupported(cmd, problem)),
        },
        Command::InvBtransform => {
            let Some(f) = &problem.payload else {
                return Err(unsupported(cmd, problem));
            };
            let validity = validate_transform(f, tol)?;
            r.verdict("contractive", validity.contractive);
            r.verdict("dense_defect", validity.dense_defect);
            r.number("defect_min_eigenvalue", validity.defect_min_eigenvalue);
            let t = inverse_btransform(f, tol)?.explicit(tol)?;
            r.object("t", operator_json(&t));
            let again = btransform(&t.clone().into(), tol)?;
            r.residual("round_trip", again.distance(f));
        }
        Command::VerifyThm31 => {
            let rep = verify_thm31(op, tol)?;
            r.verdict("cond_i", rep.cond_i);
            r.verdict("cond_ii", rep.cond_ii);
            r.verdict("cond_iii", rep.cond_iii);
            r.verdict("equivalent", rep.verdicts_agree());
            r.residuals_from(&rep.residuals);
            r.certificate = rep.certificate.as_ref().map(CertificateEntry::from);
            if let Some(p) = &rep.polar {
                polar_objects(&mut r, p);
            }
            if let Some(inv) = &rep.inverse {
                inverse_objects(&mut r, &inv.s);
            }
        }
        Command::CheckComplemented => match op {
            Operator::Function(d) => {
                let c = diag_complement_check(d)?;
                for (i, ok) in c.entries.iter().enumerate() {
                    r.verdict(&format!("entry_{}", i + 1), *ok);
                }
                r.verdict("complemented", c.complemented);
                r.certificate = c.certificate.as_ref().map(CertificateEntry::from);
            }
            Operator::Matrix(t) => {
                let (e, f) = complement_residuals(&explicit(t, tol)?, tol)?;
                r.residual("E=ker|t|+ran|t|", e);
                r.residual("F=ker t*+ran t", f);
                r.verdict("complemented", e <= tol.identity && f <= tol.identity);
            }
            Operator::Graded(g) => {
                let (mut e, mut f) = (0.0f64, 0.0f64);
                for c in g.components() {
                    let (a, b) = complement_residuals(&c.operator(tol)?, tol)?;
                    e = e.max(a);
                    f = f.max(b);
                }
                r.residual("E=ker|t|+ran|t|", e);
                r.residual("F=ker t*+ran t", f);
                r.verdict("complemented", e <= tol.identity && f <= tol.identity);
            }
        },
        Command::ClosedRange => {
            let c = closed_range_suite(op, tol)?;
            r.verdict("range_closed", c.range_closed);
            r.verdict("s_bounded", c.s_bounded);
            r.verdict("transform_range_closed", c.transform_range_closed);
            r.verdict("consistent", c.consistent);
        }
        Command::Classify => match op {
            Operator::Matrix(t) => {
                let c = classify(t, tol)?;
                r.verdict("normal", c.normal);
                r.verdict("selfadjoint", c.selfadjoint);
                r.verdict("positive", c.positive);
                r.verdict("transform_agrees", c.transform_agrees);
                r.residual("t*t=tt*", c.normal_residual);
                r.residual("t*=t", c.selfadjoint_residual);
                if let Some(m) = c.min_eigenvalue {
                    r.number("min_eigenvalue", m);
                }
            }
            _ => return Err(unsupported(cmd, problem)),
        },
        Command::GradedReport => match op {
            Operator::Graded(g) => {
                let rep = graded_report(g, tol)?;
                r.verdict("unbounded_inverse", rep.unbounded_inverse);
                r.verdict("range_not_uniformly_closed", rep.range_not_uniformly_closed);
                r.value("components", &rep.components);
                r.number("threshold", rep.threshold);
                r.number("sup_inverse_norm", rep.sup_inverse_norm);
                r.number("sup_transform_norm", rep.sup_transform_norm);
                if let Some(s) = rep.inf_min_singular_value {
                    r.number("inf_min_singular_value", s);
                }
                r.verdict("transform_contractive", rep.sup_transform_norm < 1.0);
                let c = closed_range_suite(op, tol)?;
                r.verdict("closed_range_consistent", c.consistent);
            }
            _ => return Err(unsupported(cmd, problem)),
        },
        Command::Selftest => unreachable!("selftest takes no problem file"),
    }
    Ok(r)
}

fn polar_objects(r: &mut Report, p: &PolarDecomposition) {
    match p {
        PolarDecomposition::Matrix(m) => {
            r.object("V", operator_json(&m.v));
            r.object("abs_t", operator_json(&m.abs_t));
            r.object("V*V", operator_json(&m.initial));
            r.object("VV*", operator_json(&m.final_projection));
        }
        PolarDecomposition::Graded(list) => {
            r.object(
                "V",
                Value::Array(list.iter().map(|m| operator_json(&m.v)).collect()),
            );
            r.object(
                "abs_t",
                Value::Array(list.iter().map(|m| operator_json(&m.abs_t)).collect()),
            );
        }
        PolarDecomposition::Function(f) => {
            r.object("V", diag_json(&f.v));
            r.object("abs_t", diag_json(&f.abs_t));
        }
    }
}

fn inverse_objects(r: &mut Report, s: &InverseDatum) {
    let v = match s {
        InverseDatum::Matrix(s) => operator_json(s),
        InverseDatum::Graded(list) => Value::Array(list.iter().map(operator_json).collect()),
        InverseDatum::Function(d) => diag_json(d),
    };
    r.object("s", v);
}

fn polar(r: &mut Report, op: &Operator, tol: &Tolerances) -> Result<(), CliError> {
    match polar_decompose(op, tol) {
        Ok(p) => {
            r.verdict("polar_exists", true);
            if let (PolarDecomposition::Function(f), Operator::Function(t)) = (&p, op) {
                let s = crate::funbackend::diag_pinv(t)?;
                for (name, v) in diag_identities(t, &f.v, &f.abs_t, &s)? {
                    if matches!(
                        name,
                        "t=V|t|"
                            | "V*t=|t|"
                            | "VV*t=t"
                            | "partial_isometry"
                            | "V*V=ran t*"
                            | "VV*=ran t"
                    ) {
                        r.residual(name, v);
                    }
                }
            } else {
                r.residuals_from(&p.residuals());
            }
            r.residual("adjoint polar", adjoint_polar_check(op, tol)?);
            if !matches!(op, Operator::Function(_)) {
                r.residual("transform polar", cor32_check(op, tol)?);
            }
            polar_objects(r, &p);
        }
        Err(Error::NotComplemented(c)) => {
            r.verdict("polar_exists", false);
            r.certificate = Some(CertificateEntry::from(&c));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn pinv(r: &mut Report, op: &Operator, tol: &Tolerances) -> Result<(), CliError> {
    match generalized_inverse(op, tol) {
        Ok(inv) => {
            r.verdict("inverse_exists", true);
            r.verdict("bounded", inv.bounded);
            r.residuals_from(&inv.residuals);
            inverse_objects(r, &inv.s);
        }
        Err(Error::NotComplemented(c)) => {
            r.verdict("inverse_exists", false);
            r.certificate = Some(CertificateEntry::from(&c));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
