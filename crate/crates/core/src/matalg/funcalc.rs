use serde::{Deserialize, Serialize};

use super::eigen::{eigh, real_diagonal};
use super::CMat;
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Spectral functions applied to positive (semi-definite) Hermitian inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdFunction {
    /// `x ↦ x^{1/2}`
    Sqrt,
    /// `x ↦ (1 + x)^{-1/2}`
    InvSqrtShift,
    /// `x ↦ (1 - x)^{-1/2}`, defined only below `1 - defect_margin`
    InvSqrtDefect,
    /// `x ↦ x^{-1/2}` above the rank cut-off, `0` below it
    PinvSqrt,
    /// `x ↦ (1 - x)^{1/2}` on `[0, 1]`
    SqrtDefect,
}

/// Apply `func` to the Hermitian matrix `h` through its Jacobi spectrum.
pub fn psd_funcalc_matrix(h: &CMat, func: PsdFunction, tol: &Tolerances) -> Result<CMat> {
    let (values, u) = eigh(h, tol)?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = tol.rank_cutoff(scale);
    let mut mapped = Vec::with_capacity(values.len());
    for &lambda in &values {
        if lambda < -cutoff {
            return Err(Error::NegativeSpectrum { eigenvalue: lambda });
        }
        let x = if lambda.abs() <= cutoff { 0.0 } else { lambda };
        let y = match func {
            PsdFunction::Sqrt => x.sqrt(),
            PsdFunction::InvSqrtShift => 1.0 / (1.0 + x).sqrt(),
            PsdFunction::InvSqrtDefect => {
                if lambda > 1.0 - tol.defect_margin {
                    return Err(Error::DefectSingular { eigenvalue: lambda });
                }
                1.0 / (1.0 - x).sqrt()
            }
            PsdFunction::PinvSqrt => {
                if x > 0.0 {
                    1.0 / x.sqrt()
                } else {
                    0.0
                }
            }
            PsdFunction::SqrtDefect => {
                if lambda > 1.0 + cutoff {
                    return Err(Error::NegativeSpectrum {
                        eigenvalue: 1.0 - lambda,
                    });
                }
                (1.0 - x).max(0.0).sqrt()
            }
        };
        mapped.push(y);
    }
    let out = &u * real_diagonal(&mapped) * u.adjoint();
    Ok(hermitian_part(&out))
}

/// `(m + m*) / 2`
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}
