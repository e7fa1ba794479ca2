//! Bounded-transform calculus for regular operators.
//!
//! `Q_t = (1 + t*t)^{-1/2}`, `F_t = t Q_t`, and the inverse
//! `t = F (1 - F*F)^{-1/2}`. In finite dimensions every submodule is closed,
//! so "`1 - F*F` has dense range" is read as "`1 - F*F` is invertible above
//! the rank cut-off". An operator whose transform fails that test is not a
//! bounded matrix; such operators only appear here as [`GradedOperator`]
//! truncations or as rejected transform data.

mod graded;
mod graph;
mod identities;

pub use graded::{graded_report, ComponentReport, GradedComponent, GradedOperator, GradedReport};
pub use graph::graph_decomposition_check;
pub use identities::{classify, remark22_residuals, OperatorClass, RealPolynomial};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hilbmod::OperatorMatrix;
use crate::matalg::{eigen, psd_funcalc_matrix, CMat, PsdFunction};

/// Contractivity and defect data of a candidate bounded transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValidity {
    pub contractive: bool,
    pub norm: f64,
    /// Smallest eigenvalue of `1 - F*F`; `1` on the zero module.
    pub defect_min_eigenvalue: f64,
    pub dense_defect: bool,
}

/// A regular operator, carried explicitly or by its bounded transform.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularOperator {
    Explicit(OperatorMatrix),
    Transform {
        transform: OperatorMatrix,
        validity: TransformValidity,
    },
}

impl From<OperatorMatrix> for RegularOperator {
    fn from(t: OperatorMatrix) -> Self {
        RegularOperator::Explicit(t)
    }
}

impl RegularOperator {
    /// Wrap transform data after checking it encodes a bounded operator.
    pub fn from_transform(f: OperatorMatrix, tol: &Tolerances) -> Result<Self> {
        let validity = validate_transform(&f, tol)?;
        if !validity.contractive {
            return Err(Error::DefectSingular {
                eigenvalue: validity.defect_min_eigenvalue,
            });
        }
        if !validity.dense_defect {
            return Err(Error::DefectSingular {
                eigenvalue: 1.0 - validity.defect_min_eigenvalue,
            });
        }
        Ok(RegularOperator::Transform {
            transform: f,
            validity,
        })
    }

    pub fn domain_rank(&self) -> usize {
        self.carrier().domain_rank()
    }

    pub fn codomain_rank(&self) -> usize {
        self.carrier().codomain_rank()
    }

    fn carrier(&self) -> &OperatorMatrix {
        match self {
            RegularOperator::Explicit(t) => t,
            RegularOperator::Transform { transform, .. } => transform,
        }
    }

    /// The operator matrix of `t` itself.
    pub fn explicit(&self, tol: &Tolerances) -> Result<OperatorMatrix> {
        match self {
            RegularOperator::Explicit(t) => Ok(t.clone()),
            RegularOperator::Transform { transform, .. } => {
                inverse_btransform(transform, tol)?.explicit(tol)
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            RegularOperator::Explicit(t) => RegularOperator::Explicit(t.adjoint()),
            RegularOperator::Transform {
                transform,
                validity,
            } => RegularOperator::Transform {
                transform: transform.adjoint(),
                validity: *validity,
            },
        }
    }
}

/// `Q_t`, an operator on the domain module.
pub fn q_of(t: &RegularOperator, tol: &Tolerances) -> Result<OperatorMatrix> {
    match t {
        RegularOperator::Explicit(m) => q_of_matrix(m, tol),
        RegularOperator::Transform { transform, .. } => {
            let k = transform.domain_rank();
            transform.try_with_blocks(k, k, |f| {
                psd_funcalc_matrix(&(f * f.adjoint()), PsdFunction::SqrtDefect, tol)
            })
        }
    }
}

pub(crate) fn q_of_matrix(t: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    let k = t.domain_rank();
    t.try_with_blocks(k, k, |m| {
        psd_funcalc_matrix(&(m * m.adjoint()), PsdFunction::InvSqrtShift, tol)
    })
}

/// `F_t = t ∘ Q_t`
pub fn btransform(t: &RegularOperator, tol: &Tolerances) -> Result<OperatorMatrix> {
    match t {
        RegularOperator::Explicit(m) => btransform_matrix(m, tol),
        RegularOperator::Transform { transform, .. } => Ok(transform.clone()),
    }
}

pub(crate) fn btransform_matrix(t: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    q_of_matrix(t, tol)?.then(t)
}

/// `t = F ∘ (1 - F*F)^{-1/2}`
pub fn inverse_btransform(f: &OperatorMatrix, tol: &Tolerances) -> Result<RegularOperator> {
    let validity = validate_transform(f, tol)?;
    if !validity.dense_defect || !validity.contractive {
        return Err(Error::DefectSingular {
            eigenvalue: 1.0 - validity.defect_min_eigenvalue,
        });
    }
    let (k, m) = (f.domain_rank(), f.codomain_rank());
    let t = f.try_with_blocks(k, m, |b| {
        let g = psd_funcalc_matrix(&(b * b.adjoint()), PsdFunction::InvSqrtDefect, tol)?;
        Ok(g * b)
    })?;
    Ok(RegularOperator::Explicit(t))
}

pub fn validate_transform(f: &OperatorMatrix, tol: &Tolerances) -> Result<TransformValidity> {
    let norm = f.norm();
    let mut min_eig: Option<f64> = None;
    for b in f.blocks() {
        if b.nrows() == 0 {
            continue;
        }
        let defect: CMat = CMat::identity(b.nrows(), b.nrows()) - b * b.adjoint();
        let (vals, _) = eigen::eigh(&defect, tol)?;
        if let Some(&lo) = vals.first() {
            min_eig = Some(min_eig.map_or(lo, |m: f64| m.min(lo)));
        }
    }
    let defect_min_eigenvalue = min_eig.unwrap_or(1.0);
    Ok(TransformValidity {
        contractive: norm <= 1.0 + 1e-12,
        norm,
        defect_min_eigenvalue,
        dense_defect: defect_min_eigenvalue > tol.rank_cutoff(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::BlockProfile;
    use nalgebra::Complex;

    fn scalar_diag(vals: &[f64]) -> OperatorMatrix {
        OperatorMatrix::from_blocks(
            BlockProfile::scalar(),
            vals.len(),
            vals.len(),
            vec![eigen::real_diagonal(vals)],
        )
        .unwrap()
    }

    #[test]
    fn zero_operator_transform() {
        let tol = Tolerances::default();
        let p = BlockProfile::new(vec![1, 2]).unwrap();
        let z: RegularOperator = OperatorMatrix::zero(&p, 2, 2).into();
        assert_eq!(q_of(&z, &tol).unwrap(), OperatorMatrix::identity(&p, 2));
        assert_eq!(
            btransform(&z, &tol).unwrap(),
            OperatorMatrix::zero(&p, 2, 2)
        );
        let back = inverse_btransform(&OperatorMatrix::zero(&p, 2, 2), &tol).unwrap();
        assert_eq!(back.explicit(&tol).unwrap(), OperatorMatrix::zero(&p, 2, 2));
    }

    #[test]
    fn scalar_three() {
        let tol = Tolerances::default();
        let t: RegularOperator = scalar_diag(&[3.0]).into();
        let q = q_of(&t, &tol).unwrap();
        assert!((q.block(0)[(0, 0)].re - 1.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diagonal_transform() {
        let tol = Tolerances::default();
        let f = btransform(&scalar_diag(&[3.0, 4.0]).into(), &tol).unwrap();
        let expected = scalar_diag(&[3.0 / 10f64.sqrt(), 4.0 / 17f64.sqrt()]);
        assert!(f.distance(&expected) < 1e-15);
    }

    #[test]
    fn unit_transform_is_singular() {
        let tol = Tolerances::default();
        assert!(matches!(
            inverse_btransform(&scalar_diag(&[1.0]), &tol),
            Err(Error::DefectSingular { .. })
        ));
        assert!(RegularOperator::from_transform(scalar_diag(&[1.0]), &tol).is_err());
    }

    #[test]
    fn validity_reports() {
        let tol = Tolerances::default();
        let p = BlockProfile::scalar();
        let v = validate_transform(&OperatorMatrix::zero(&p, 2, 2), &tol).unwrap();
        assert!(v.contractive && v.dense_defect);
        assert!((v.defect_min_eigenvalue - 1.0).abs() < 1e-15);
        let v = validate_transform(&scalar_diag(&[1.0, 0.5]), &tol).unwrap();
        assert!(v.contractive && !v.dense_defect);
        let v = validate_transform(&scalar_diag(&[2.0]), &tol).unwrap();
        assert!(!v.contractive);
    }

    #[test]
    fn transform_form_round_trip() {
        let tol = Tolerances::default();
        let t = OperatorMatrix::from_blocks(
            BlockProfile::scalar(),
            1,
            2,
            vec![CMat::from_row_slice(
                1,
                2,
                &[Complex::new(1.0, 2.0), Complex::new(-0.5, 0.0)],
            )],
        )
        .unwrap();
        let f = btransform_matrix(&t, &tol).unwrap();
        let carried = RegularOperator::from_transform(f.clone(), &tol).unwrap();
        assert!(carried.explicit(&tol).unwrap().distance(&t) < 1e-12);
        let q1 = q_of(&carried, &tol).unwrap();
        let q2 = q_of(&t.into(), &tol).unwrap();
        assert!(q1.distance(&q2) < 1e-12);
    }
}
