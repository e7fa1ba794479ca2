//! Polar decompositions, generalized inverses and the equivalence checks
//! tying them to orthogonal complementability of range closures.
//!
//! Every entry point takes an [`Operator`] from one of three backends: a
//! matrix-backend regular operator, a graded direct sum of those, or a
//! diagonal multiplication operator over `C(X)`.

pub mod matrix;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

pub use matrix::{
    inverse_identity_residuals, isometry_from_abs, pinv_from_decomposition, pinv_matrix,
    polar_matrix, MatrixPinv, MatrixPolar, INVERSE_IDENTITIES,
};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::funbackend::{
    diag_complement_check, diag_identities, diag_pinv, diag_polar, zero_set, Certificate,
    DiagOperator,
};
use crate::hilbmod::{abs_op, kernel_projection, range_projection, OperatorMatrix};
use crate::regular::{
    btransform_matrix, graded_report, graph_decomposition_check, GradedOperator, RegularOperator,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Matrix(RegularOperator),
    Graded(GradedOperator),
    Function(DiagOperator),
}

impl From<OperatorMatrix> for Operator {
    fn from(t: OperatorMatrix) -> Self {
        Operator::Matrix(t.into())
    }
}

impl From<RegularOperator> for Operator {
    fn from(t: RegularOperator) -> Self {
        Operator::Matrix(t)
    }
}

impl From<GradedOperator> for Operator {
    fn from(t: GradedOperator) -> Self {
        Operator::Graded(t)
    }
}

impl From<DiagOperator> for Operator {
    fn from(t: DiagOperator) -> Self {
        Operator::Function(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionPolar {
    pub v: DiagOperator,
    pub abs_t: DiagOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolarDecomposition {
    Matrix(MatrixPolar),
    Graded(Vec<MatrixPolar>),
    Function(FunctionPolar),
}

impl PolarDecomposition {
    /// Largest residual over all components.
    pub fn residuals(&self) -> BTreeMap<String, f64> {
        match self {
            PolarDecomposition::Matrix(p) => p.residuals.clone(),
            PolarDecomposition::Graded(ps) => max_merge(ps.iter().map(|p| &p.residuals)),
            PolarDecomposition::Function(_) => BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InverseDatum {
    Matrix(OperatorMatrix),
    Graded(Vec<OperatorMatrix>),
    Function(DiagOperator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedInverse {
    pub s: InverseDatum,
    /// Whether `sup ‖s‖` stays below the graded threshold; always true
    /// outside the graded backend.
    pub bounded: bool,
    pub residuals: BTreeMap<String, f64>,
}

fn max_merge<'a>(maps: impl Iterator<Item = &'a BTreeMap<String, f64>>) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for m in maps {
        for (k, &v) in m {
            let e = out.entry(k.clone()).or_insert(0.0);
            *e = e.max(v);
        }
    }
    out
}

fn graded_matrices(g: &GradedOperator, tol: &Tolerances) -> Result<Vec<OperatorMatrix>> {
    g.components().iter().map(|c| c.operator(tol)).collect()
}

pub fn polar_decompose(t: &Operator, tol: &Tolerances) -> Result<PolarDecomposition> {
    match t {
        Operator::Matrix(t) => Ok(PolarDecomposition::Matrix(polar_matrix(
            &t.explicit(tol)?,
            tol,
        )?)),
        Operator::Graded(g) => Ok(PolarDecomposition::Graded(
            graded_matrices(g, tol)?
                .iter()
                .map(|t| polar_matrix(t, tol))
                .collect::<Result<_>>()?,
        )),
        Operator::Function(d) => {
            let (v, abs_t) = diag_polar(d)?;
            Ok(PolarDecomposition::Function(FunctionPolar { v, abs_t }))
        }
    }
}

pub fn generalized_inverse(t: &Operator, tol: &Tolerances) -> Result<GeneralizedInverse> {
    match t {
        Operator::Matrix(t) => {
            let p = pinv_matrix(&t.explicit(tol)?, tol)?;
            Ok(GeneralizedInverse {
                s: InverseDatum::Matrix(p.s),
                bounded: true,
                residuals: p.residuals,
            })
        }
        Operator::Graded(g) => {
            let parts = graded_matrices(g, tol)?
                .iter()
                .map(|t| pinv_matrix(t, tol))
                .collect::<Result<Vec<_>>>()?;
            let report = graded_report(g, tol)?;
            Ok(GeneralizedInverse {
                residuals: max_merge(parts.iter().map(|p| &p.residuals)),
                s: InverseDatum::Graded(parts.into_iter().map(|p| p.s).collect()),
                bounded: report.sup_inverse_norm <= report.threshold,
            })
        }
        Operator::Function(d) => {
            let s = diag_pinv(d)?;
            let (v, abs_t) = diag_polar(d)?;
            let residuals = diag_identities(d, &v, &abs_t, &s)?
                .into_iter()
                .filter(|(name, _)| INVERSE_IDENTITIES.contains(name) || *name == "s* inverts t*")
                .map(|(n, r)| (n.to_string(), r))
                .collect();
            Ok(GeneralizedInverse {
                s: InverseDatum::Function(s),
                bounded: true,
                residuals,
            })
        }
    }
}

/// Outcome of checking the three equivalent conditions on one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm31Report {
    /// `t` has a polar decomposition.
    pub cond_i: bool,
    /// `Ker |t| ⊕ cl Ran |t|` and `Ker t* ⊕ cl Ran t` fill the modules.
    pub cond_ii: bool,
    /// `t` has a generalized inverse.
    pub cond_iii: bool,
    pub polar: Option<PolarDecomposition>,
    pub inverse: Option<GeneralizedInverse>,
    pub residuals: BTreeMap<String, f64>,
    pub certificate: Option<Certificate>,
}

impl Thm31Report {
    pub fn verdicts_agree(&self) -> bool {
        self.cond_i == self.cond_ii && self.cond_ii == self.cond_iii
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }
}

/// Residual names for the polar side of the check.
const POLAR_KEYS: [&str; 9] = [
    "partial_isometry",
    "t=V|t|",
    "V*t=|t|",
    "VV*t=t",
    "V*V=ran t*",
    "VV*=ran t",
    "V*V=closure(t*s*)",
    "VV*=closure(ts)",
    "V unique",
];

/// `‖P_{Ker |t|} + P_{cl Ran |t|} − 1‖` and `‖P_{Ker t*} + P_{cl Ran t} − 1‖`.
pub fn complement_residuals(t: &OperatorMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    let abs_t = abs_op(t, tol)?;
    let e_split = kernel_projection(&abs_t, tol)?
        .operator()
        .add(range_projection(&abs_t, tol)?.operator())?
        .distance(&OperatorMatrix::identity(t.profile(), t.domain_rank()));
    let f_split = kernel_projection(&t.adjoint(), tol)?
        .operator()
        .add(range_projection(t, tol)?.operator())?
        .distance(&OperatorMatrix::identity(t.profile(), t.codomain_rank()));
    Ok((e_split, f_split))
}

fn matrix_equivalence_residuals(
    t: &OperatorMatrix,
    tol: &Tolerances,
) -> Result<BTreeMap<String, f64>> {
    let mut r = BTreeMap::new();

    let (e_split, f_split) = complement_residuals(t, tol)?;
    r.insert("E=ker|t|+ran|t|".to_string(), e_split);
    r.insert("F=ker t*+ran t".to_string(), f_split);

    let p = polar_matrix(t, tol)?;
    let v = &p.v;
    let vt = v.adjoint();
    let inv = pinv_matrix(t, tol)?;
    let s = &inv.s;
    r.extend(p.residuals.clone());
    r.extend(inv.residuals.clone());
    r.insert("V*t=|t|".into(), t.then(&vt)?.distance(&p.abs_t));
    r.insert("VV*t=t".into(), t.then(&vt)?.then(v)?.distance(t));
    r.insert(
        "V*V=ran t*".into(),
        p.initial
            .distance(range_projection(&t.adjoint(), tol)?.operator()),
    );
    r.insert(
        "VV*=ran t".into(),
        p.final_projection
            .distance(range_projection(t, tol)?.operator()),
    );
    // t*s* is "s*, then t*"; ts is "s, then t"
    r.insert(
        "V*V=closure(t*s*)".into(),
        p.initial.distance(&s.adjoint().then(&t.adjoint())?),
    );
    r.insert(
        "VV*=closure(ts)".into(),
        p.final_projection.distance(&s.then(t)?),
    );
    r.insert("V unique".into(), v.distance(&isometry_from_abs(t, tol)?));
    r.insert(
        "s dual agreement".into(),
        s.distance(&pinv_from_decomposition(t, tol)?),
    );
    r.insert(
        "graph decomposition".into(),
        graph_decomposition_check(
            &t.clone().into(),
            &s.clone().into(),
            &s.adjoint().into(),
            tol,
        )?,
    );
    Ok(r)
}

fn verdicts(r: &BTreeMap<String, f64>, tol: &Tolerances) -> (bool, bool, bool) {
    let ok = |k: &str| r.get(k).is_some_and(|&v| v <= tol.identity);
    let cond_ii = ok("E=ker|t|+ran|t|") && ok("F=ker t*+ran t");
    let cond_i = POLAR_KEYS.iter().all(|k| ok(k));
    let cond_iii = INVERSE_IDENTITIES.iter().all(|k| ok(k)) && ok("s* inverts t*");
    (cond_i, cond_ii, cond_iii)
}

/// Decides complementability directly, and when it holds constructs the
/// polar decomposition and generalized inverse and measures every identity.
///
/// Never fails on a negative answer: a missing decomposition is reported
/// through the verdicts and the certificate.
pub fn verify_thm31(t: &Operator, tol: &Tolerances) -> Result<Thm31Report> {
    match t {
        Operator::Matrix(rt) => {
            let m = rt.explicit(tol)?;
            let residuals = matrix_equivalence_residuals(&m, tol)?;
            let (cond_i, cond_ii, cond_iii) = verdicts(&residuals, tol);
            Ok(Thm31Report {
                cond_i,
                cond_ii,
                cond_iii,
                polar: Some(PolarDecomposition::Matrix(polar_matrix(&m, tol)?)),
                inverse: Some(generalized_inverse(t, tol)?),
                residuals,
                certificate: None,
            })
        }
        Operator::Graded(g) => {
            let maps = graded_matrices(g, tol)?
                .iter()
                .map(|m| matrix_equivalence_residuals(m, tol))
                .collect::<Result<Vec<_>>>()?;
            let residuals = max_merge(maps.iter());
            let (cond_i, cond_ii, cond_iii) = verdicts(&residuals, tol);
            Ok(Thm31Report {
                cond_i,
                cond_ii,
                cond_iii,
                polar: Some(polar_decompose(t, tol)?),
                inverse: Some(generalized_inverse(t, tol)?),
                residuals,
                certificate: None,
            })
        }
        Operator::Function(d) => {
            let check = diag_complement_check(d)?;
            if !check.complemented {
                return Ok(Thm31Report {
                    cond_i: false,
                    cond_ii: false,
                    cond_iii: false,
                    polar: None,
                    inverse: None,
                    residuals: BTreeMap::new(),
                    certificate: check.certificate,
                });
            }
            let (v, abs_t) = diag_polar(d)?;
            let s = diag_pinv(d)?;
            let residuals: BTreeMap<String, f64> = diag_identities(d, &v, &abs_t, &s)?
                .into_iter()
                .map(|(n, r)| (n.to_string(), r))
                .collect();
            let exact = |names: &[&str]| names.iter().all(|n| residuals.get(*n) == Some(&0.0));
            Ok(Thm31Report {
                cond_i: exact(&[
                    "partial_isometry",
                    "t=V|t|",
                    "V*t=|t|",
                    "VV*t=t",
                    "V*V=ran t*",
                    "VV*=ran t",
                ]),
                cond_ii: true,
                cond_iii: exact(&INVERSE_IDENTITIES) && exact(&["s* inverts t*"]),
                inverse: Some(generalized_inverse(t, tol)?),
                polar: Some(PolarDecomposition::Function(FunctionPolar { v, abs_t })),
                residuals,
                certificate: None,
            })
        }
    }
}

fn matrix_adjoint_polar(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let p = polar_matrix(t, tol)?;
    let vt = p.v.adjoint();
    let abs_tstar = abs_op(&t.adjoint(), tol)?;
    // t* = V* |t*|: first |t*|, then V*
    let r1 = abs_tstar.then(&vt)?.distance(&t.adjoint());
    let f = btransform_matrix(t, tol)?;
    let abs_f = abs_op(&f, tol)?;
    let abs_f_star = abs_op(&btransform_matrix(&t.adjoint(), tol)?, tol)?;
    // V |F_t| V*: first V*, then |F_t|, then V
    let r2 = vt.then(&abs_f)?.then(&p.v)?.distance(&abs_f_star);
    Ok(r1.max(r2))
}

/// Largest residual of `t* = V*|t*|` and `|F_{t*}| = V |F_t| V*`.
pub fn adjoint_polar_check(t: &Operator, tol: &Tolerances) -> Result<f64> {
    match t {
        Operator::Matrix(rt) => matrix_adjoint_polar(&rt.explicit(tol)?, tol),
        Operator::Graded(g) => graded_matrices(g, tol)?
            .iter()
            .map(|m| matrix_adjoint_polar(m, tol))
            .try_fold(0.0, |acc, r| Ok(f64::max(acc, r?))),
        Operator::Function(d) => {
            // the bounded transform leaves the piecewise-rational class, so
            // only t* = V*|t*| is checked, exactly
            let (v, _) = diag_polar(d)?;
            let tstar = d.adjoint();
            let (_, abs_tstar) = diag_polar(&tstar)?;
            crate::funbackend::exact_residual(&v.adjoint().mul(&abs_tstar)?, &tstar)
        }
    }
}

fn matrix_cor32(t: &OperatorMatrix, tol: &Tolerances) -> Result<f64> {
    let f = btransform_matrix(t, tol)?;
    let abs_f = abs_op(&f, tol)?;
    let f_abs = btransform_matrix(&abs_op(t, tol)?, tol)?;
    let v = polar_matrix(t, tol)?.v;
    Ok(f_abs.distance(&abs_f).max(abs_f.then(&v)?.distance(&f)))
}

/// Largest residual of `F_{|t|} = |F_t|` and `F_t = V |F_t|`.
pub fn cor32_check(t: &Operator, tol: &Tolerances) -> Result<f64> {
    match t {
        Operator::Matrix(rt) => matrix_cor32(&rt.explicit(tol)?, tol),
        Operator::Graded(g) => graded_matrices(g, tol)?
            .iter()
            .map(|m| matrix_cor32(m, tol))
            .try_fold(0.0, |acc, r| Ok(f64::max(acc, r?))),
        Operator::Function(_) => Err(Error::Unsupported(
            "bounded transform in the function backend".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedRange {
    pub range_closed: bool,
    pub s_bounded: bool,
    /// Closed range of the bounded transform `F_t`.
    pub transform_range_closed: bool,
    pub consistent: bool,
}

impl ClosedRange {
    fn new(range_closed: bool, s_bounded: bool, transform_range_closed: bool) -> Self {
        ClosedRange {
            range_closed,
            s_bounded,
            transform_range_closed,
            consistent: range_closed == s_bounded && range_closed == transform_range_closed,
        }
    }
}

/// `x / sqrt(1 + x²)`, the singular value of `F_t` over one of `t`.
fn transform_singular_value(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// Closed range, boundedness of the generalized inverse, and closed range of
/// the bounded transform, each decided independently.
pub fn closed_range_suite(t: &Operator, tol: &Tolerances) -> Result<ClosedRange> {
    match t {
        Operator::Matrix(rt) => {
            let m = rt.explicit(tol)?;
            let s = pinv_matrix(&m, tol)?.s;
            let f = btransform_matrix(&m, tol)?;
            // finite dimension: every range is closed
            let f_sigma_ok = f.min_nonzero_singular_value(tol)?.is_none_or(|x| x > 0.0);
            Ok(ClosedRange::new(true, s.norm().is_finite(), f_sigma_ok))
        }
        Operator::Graded(g) => {
            let report = graded_report(g, tol)?;
            let tau = report.threshold;
            let range_closed = report.inf_min_singular_value.is_none_or(|s| s >= 1.0 / tau);
            let s_bounded = report.sup_inverse_norm <= tau;
            let mut f_inf: Option<f64> = None;
            for m in graded_matrices(g, tol)? {
                if let Some(x) = btransform_matrix(&m, tol)?.min_nonzero_singular_value(tol)? {
                    f_inf = Some(f_inf.map_or(x, |y: f64| y.min(x)));
                }
            }
            // 1/τ carried through x ↦ x/√(1+x²), with slack for rounding
            let f_threshold = transform_singular_value(1.0 / tau) * (1.0 - tol.identity);
            let transform_closed = f_inf.is_none_or(|x| x >= f_threshold);
            Ok(ClosedRange::new(range_closed, s_bounded, transform_closed))
        }
        Operator::Function(d) => {
            let range_closed = diag_complement_check(d)?.complemented;
            let s_bounded = function_inverse_bounded(d)?;
            // F_t = f / sqrt(1 + f²) has the zero set of f
            let mut transform_closed = true;
            for f in d.entries() {
                transform_closed &= crate::funbackend::is_clopen(&zero_set(f)?).0;
            }
            Ok(ClosedRange::new(range_closed, s_bounded, transform_closed))
        }
    }
}

/// `1/f` on `{f ≠ 0}` is bounded exactly when every component is either
/// inside the zero set or free of zeros.
fn function_inverse_bounded(d: &DiagOperator) -> Result<bool> {
    use crate::funbackend::sturm::SturmChain;
    for f in d.entries() {
        for part in f.pieces() {
            let vanishing = part.iter().filter(|p| p.num.is_zero()).count();
            if vanishing == part.len() {
                continue;
            }
            if vanishing > 0 {
                return Ok(false);
            }
            for p in part {
                if SturmChain::new(&p.num.real_part()).count_closed(&p.span.lo, &p.span.hi) > 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Float value of an exact rational, for reports.
pub fn q_to_f64(q: &crate::funbackend::Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
