use serde::{Deserialize, Serialize};

use super::{btransform_matrix, q_of_matrix, RegularOperator};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hilbmod::OperatorMatrix;
use crate::matalg::{eigen, CMat};

const MAX_DEGREE: usize = 16;

/// Real polynomial, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealPolynomial(Vec<f64>);

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(coeffs.len() - 1));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient".into()));
        }
        Ok(RealPolynomial(coeffs))
    }

    pub fn one() -> Self {
        RealPolynomial(vec![1.0])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, x: &CMat) -> CMat {
        let n = x.nrows();
        let mut acc = CMat::zeros(n, n);
        for &c in self.0.iter().rev() {
            acc = &acc * x;
            for i in 0..n {
                acc[(i, i)].re += c;
            }
        }
        acc
    }
}

impl TryFrom<Vec<f64>> for RealPolynomial {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealPolynomial::new(v)
    }
}

impl From<RealPolynomial> for Vec<f64> {
    fn from(p: RealPolynomial) -> Self {
        p.0
    }
}

/// `(‖F·p(F*F) − p(FF*)·F‖, ‖t Q_t² − Q_{t*} t Q_t‖)`, compositions read right to left.
pub fn remark22_residuals(
    t: &RegularOperator,
    p: &RealPolynomial,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let t = t.explicit(tol)?;
    let f = btransform_matrix(&t, tol)?;
    let mut first = 0.0f64;
    for fb in f.blocks() {
        // F·p(F*F) is "p(F*F), then F": p(F F^H)·F in the row convention.
        let left = p.eval_matrix(&(fb * fb.adjoint())) * fb;
        let right = fb * p.eval_matrix(&(fb.adjoint() * fb));
        first = first.max(eigen::spectral_norm(&(left - right)));
    }
    let q = q_of_matrix(&t, tol)?;
    let q_adj = q_of_matrix(&t.adjoint(), tol)?;
    let lhs = q.then(&q)?.then(&t)?;
    let rhs = q.then(&t)?.then(&q_adj)?;
    Ok((first, lhs.distance(&rhs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorClass {
    pub normal: bool,
    pub selfadjoint: bool,
    pub positive: bool,
    pub normal_residual: f64,
    pub selfadjoint_residual: f64,
    /// Smallest eigenvalue of the Hermitian part, when self-adjoint.
    pub min_eigenvalue: Option<f64>,
    /// The same three flags computed for `F_t` agree with those of `t`.
    pub transform_agrees: bool,
}

fn flags(m: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorClass> {
    let threshold = tol.identity * (1.0 + m.norm());
    let selfadjoint_residual = m.distance(&m.adjoint());
    let normal_residual = m.then(&m.adjoint())?.distance(&m.adjoint().then(m)?);
    let selfadjoint = selfadjoint_residual <= threshold;
    let normal = selfadjoint || normal_residual <= threshold;
    let mut min_eigenvalue = None;
    let mut positive = false;
    if selfadjoint {
        let mut lo = f64::INFINITY;
        for b in m.blocks() {
            if b.nrows() == 0 {
                continue;
            }
            let h = crate::matalg::funcalc::hermitian_part(b);
            let (vals, _) = eigen::eigh(&h, tol)?;
            lo = lo.min(vals[0]);
        }
        if lo.is_finite() {
            min_eigenvalue = Some(lo);
        }
        positive = lo >= -tol.rank_cutoff(m.norm());
    }
    Ok(OperatorClass {
        normal,
        selfadjoint,
        positive,
        normal_residual,
        selfadjoint_residual,
        min_eigenvalue,
        transform_agrees: true,
    })
}

/// Normal / self-adjoint / positive flags of `t`, cross-checked against `F_t`.
pub fn classify(t: &RegularOperator, tol: &Tolerances) -> Result<OperatorClass> {
    if t.domain_rank() != t.codomain_rank() {
        return Err(Error::NotSquare {
            domain: t.domain_rank(),
            codomain: t.codomain_rank(),
        });
    }
    let m = t.explicit(tol)?;
    let mut class = flags(&m, tol)?;
    let f = flags(&btransform_matrix(&m, tol)?, tol)?;
    class.transform_agrees = class.normal == f.normal
        && class.selfadjoint == f.selfadjoint
        && class.positive == f.positive;
    Ok(class)
}
