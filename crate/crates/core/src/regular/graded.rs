use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{btransform_matrix, RegularOperator};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hilbmod::OperatorMatrix;
use crate::polar::matrix::svd_parts;

/// One summand `c · base` of a graded operator, with an exact rational scale.
///
/// Keeping the scale exact lets the generalized inverse be reported as
/// `c⁻¹ · s(base)` without a rounding step in `1/c`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedComponent {
    pub label: String,
    pub scale: BigRational,
    pub base: RegularOperator,
}

impl GradedComponent {
    pub fn new(label: impl Into<String>, base: RegularOperator) -> Self {
        GradedComponent {
            label: label.into(),
            scale: BigRational::one(),
            base,
        }
    }

    pub fn scaled(label: impl Into<String>, scale: BigRational, base: RegularOperator) -> Self {
        GradedComponent {
            label: label.into(),
            scale,
            base,
        }
    }

    /// The operator matrix `c · base`.
    pub fn operator(&self, tol: &Tolerances) -> Result<OperatorMatrix> {
        let c = self.scale.to_f64().unwrap_or(f64::NAN);
        let base = self.base.explicit(tol)?;
        if self.scale.is_one() {
            Ok(base)
        } else {
            Ok(base.scale_real(c))
        }
    }
}

/// Finite direct sum of operators over one profile; the truncation of an
/// operator whose component norms grow without bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    components: Vec<GradedComponent>,
}

impl GradedOperator {
    pub fn new(components: Vec<GradedComponent>, tol: &Tolerances) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::ShapeMismatch("graded operator needs a component".into()))?;
        let profile = first.base.explicit(tol)?.profile().clone();
        for c in &components {
            if c.base.explicit(tol)?.profile() != &profile {
                return Err(Error::ShapeMismatch(format!(
                    "component {} has a different profile",
                    c.label
                )));
            }
        }
        Ok(GradedOperator { components })
    }

    /// `t_n = c_n · base` for `n = 1..=count`.
    pub fn family(
        base: &RegularOperator,
        count: usize,
        scale: impl Fn(u64) -> BigRational,
        tol: &Tolerances,
    ) -> Result<Self> {
        let components = (1..=count as u64)
            .map(|n| GradedComponent::scaled(n.to_string(), scale(n), base.clone()))
            .collect();
        GradedOperator::new(components, tol)
    }

    pub fn components(&self) -> &[GradedComponent] {
        &self.components
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub index: usize,
    pub label: String,
    pub t_norm: f64,
    pub transform_norm: f64,
    pub min_singular_value: Option<f64>,
    pub inverse_norm: f64,
    pub isometry_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedReport {
    pub components: Vec<ComponentReport>,
    pub threshold: f64,
    pub sup_inverse_norm: f64,
    pub inf_min_singular_value: Option<f64>,
    /// Largest `‖F_{t_n}‖` over components.
    pub sup_transform_norm: f64,
    pub unbounded_inverse: bool,
    pub range_not_uniformly_closed: bool,
}

/// Per-component norms of `t_n`, `F_{t_n}`, `s_n`, `V_n` and the smallest
/// nonzero singular value, with growth flags against `tol.graded_threshold`.
pub fn graded_report(gt: &GradedOperator, tol: &Tolerances) -> Result<GradedReport> {
    let mut components = Vec::with_capacity(gt.components.len());
    for (index, c) in gt.components.iter().enumerate() {
        let t = c.operator(tol)?;
        let base = c.base.explicit(tol)?;
        let parts = svd_parts(&base, tol)?;
        let inverse_norm = if c.scale.is_zero() {
            0.0
        } else {
            c.scale.recip().abs().to_f64().unwrap_or(f64::INFINITY) * parts.s.norm()
        };
        let isometry_norm = if c.scale.is_zero() {
            0.0
        } else {
            parts.v.norm()
        };
        let min_singular_value = parts
            .sigma_min
            .map(|s| s * c.scale.abs().to_f64().unwrap_or(f64::NAN))
            .filter(|_| !c.scale.is_zero());
        components.push(ComponentReport {
            index,
            label: c.label.clone(),
            t_norm: t.norm(),
            transform_norm: btransform_matrix(&t, tol)?.norm(),
            min_singular_value,
            inverse_norm,
            isometry_norm,
        });
    }
    let sup_inverse_norm = components
        .iter()
        .map(|c| c.inverse_norm)
        .fold(0.0, f64::max);
    let sup_transform_norm = components
        .iter()
        .map(|c| c.transform_norm)
        .fold(0.0, f64::max);
    let inf_min_singular_value = components
        .iter()
        .filter_map(|c| c.min_singular_value)
        .reduce(f64::min);
    let isometries_contractive = components
        .iter()
        .all(|c| c.isometry_norm <= 1.0 + tol.identity);
    let threshold = tol.graded_threshold;
    Ok(GradedReport {
        unbounded_inverse: sup_inverse_norm > threshold && isometries_contractive,
        range_not_uniformly_closed: inf_min_singular_value.is_some_and(|s| s < 1.0 / threshold),
        components,
        threshold,
        sup_inverse_norm,
        inf_min_singular_value,
        sup_transform_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::BlockProfile;
    use num_bigint::BigInt;

    fn unit() -> RegularOperator {
        OperatorMatrix::identity(&BlockProfile::scalar(), 1).into()
    }

    #[test]
    fn inverse_n_family() {
        let tol = Tolerances::default();
        let g = GradedOperator::family(
            &unit(),
            50,
            |n| BigRational::new(BigInt::from(1), BigInt::from(n)),
            &tol,
        )
        .unwrap();
        let r = graded_report(&g, &tol).unwrap();
        for (i, c) in r.components.iter().enumerate() {
            assert_eq!(c.inverse_norm, (i + 1) as f64);
            assert_eq!(c.isometry_norm, 1.0);
            assert!(c.transform_norm < 1.0);
        }
        assert!(r
            .components
            .windows(2)
            .all(|w| w[0].inverse_norm < w[1].inverse_norm));
        assert!(r.unbounded_inverse && r.range_not_uniformly_closed);
    }

    #[test]
    fn identity_family_has_no_flags() {
        let tol = Tolerances::default();
        let g = GradedOperator::family(&unit(), 10, |_| BigRational::one(), &tol).unwrap();
        let r = graded_report(&g, &tol).unwrap();
        assert!(r.components.iter().all(|c| c.inverse_norm == 1.0));
        assert!(!r.unbounded_inverse && !r.range_not_uniformly_closed);
    }

    #[test]
    fn growing_family() {
        let tol = Tolerances::default();
        let g = GradedOperator::family(
            &unit(),
            20,
            |n| BigRational::from_integer(BigInt::from(n)),
            &tol,
        )
        .unwrap();
        let r = graded_report(&g, &tol).unwrap();
        for (i, c) in r.components.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((c.t_norm - n).abs() < 1e-12);
            assert!((c.transform_norm - n / (1.0 + n * n).sqrt()).abs() < 1e-14);
            assert!(c.transform_norm <= 1.0);
        }
        assert!(!r.unbounded_inverse && !r.range_not_uniformly_closed);
    }
}
