use super::RegularOperator;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hilbmod::row_space_basis;
use crate::matalg::{eigen, CMat};

/// Checks `F ⊕ E = G(s) ⊕ V G(s̃)` with `V(x, y) = (y, -x)`.
///
/// Per block, `G(s)` is spanned by the rows `[I | S]` and `V G(s̃)` by the
/// rows `[S̃ | -I]` inside `ℂ^{(m+k)·n}`. Returns the larger of the
/// orthogonality residual `‖Q₁ Q₂*‖` of their orthonormal bases and the
/// dimension mismatch `|dim G(s) + dim V G(s̃) − (m+k)·n|`.
pub fn graph_decomposition_check(
    t: &RegularOperator,
    s: &RegularOperator,
    s_tilde: &RegularOperator,
    tol: &Tolerances,
) -> Result<f64> {
    let (k, m) = (t.domain_rank(), t.codomain_rank());
    if s.domain_rank() != m
        || s.codomain_rank() != k
        || s_tilde.domain_rank() != k
        || s_tilde.codomain_rank() != m
    {
        return Err(Error::ShapeMismatch(format!(
            "t: {k}->{m} needs s: {m}->{k} and s~: {k}->{m}"
        )));
    }
    let s = s.explicit(tol)?;
    let s_tilde = s_tilde.explicit(tol)?;
    let mut residual = 0.0f64;
    for (sb, stb) in s.blocks().iter().zip(s_tilde.blocks()) {
        let (fm, ek) = (sb.nrows(), sb.ncols());
        let total = fm + ek;
        let mut graph = CMat::zeros(fm, total);
        graph.view_mut((0, 0), (fm, fm)).fill_with_identity();
        graph.view_mut((0, fm), (fm, ek)).copy_from(sb);
        let mut rotated = CMat::zeros(ek, total);
        rotated.view_mut((0, 0), (ek, fm)).copy_from(stb);
        rotated.view_mut((0, fm), (ek, ek)).fill_with_identity();
        rotated.view_mut((0, fm), (ek, ek)).neg_mut();

        let q1 = row_space_basis(&graph, tol)?;
        let q2 = row_space_basis(&rotated, tol)?;
        let orth = if q1.nrows() == 0 || q2.nrows() == 0 {
            0.0
        } else {
            eigen::spectral_norm(&(&q1 * q2.adjoint()))
        };
        let mismatch = (q1.nrows() + q2.nrows()).abs_diff(total) as f64;
        residual = residual.max(orth).max(mismatch);
    }
    Ok(residual)
}
