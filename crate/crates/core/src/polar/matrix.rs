//! Matrix-backend constructions: the SVD partial isometry, the two
//! generalized-inverse routes, and the identity residuals checked against them.

use std::collections::BTreeMap;

use crate::config::Tolerances;
use crate::error::Result;
use crate::hilbmod::{abs_op, kernel_projection, range_projection, OperatorMatrix};
use crate::matalg::{eigen, psd_funcalc_matrix, CMat, PsdFunction};

pub(crate) struct SvdParts {
    pub v: OperatorMatrix,
    pub s: OperatorMatrix,
    pub sigma_min: Option<f64>,
}

/// Per block `M = U Σ W*` (compact, above the rank cut-off):
/// `V = U W*` and `s = W Σ⁻¹ U*`.
pub(crate) fn svd_parts(t: &OperatorMatrix, tol: &Tolerances) -> Result<SvdParts> {
    let svds = t.compact_svds(tol)?;
    let (k, m) = (t.domain_rank(), t.codomain_rank());
    let mut v_blocks = Vec::with_capacity(svds.len());
    let mut s_blocks = Vec::with_capacity(svds.len());
    for s in &svds {
        v_blocks.push(&s.u * s.w.adjoint());
        let inv: Vec<f64> = s.sigma.iter().map(|x| 1.0 / x).collect();
        s_blocks.push(&s.w * eigen::real_diagonal(&inv) * s.u.adjoint());
    }
    let sigma_min = svds
        .iter()
        .filter_map(|s| s.sigma.last().copied())
        .reduce(f64::min);
    Ok(SvdParts {
        v: OperatorMatrix::from_blocks(t.profile().clone(), k, m, v_blocks)?,
        s: OperatorMatrix::from_blocks(t.profile().clone(), m, k, s_blocks)?,
        sigma_min,
    })
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix through its Jacobi spectrum.
fn hermitian_pinv(g: &CMat, tol: &Tolerances) -> Result<CMat> {
    let (vals, u) = eigen::eigh(g, tol)?;
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cutoff = tol.rank_cutoff(scale);
    let inv: Vec<f64> = vals
        .iter()
        .map(|&x| if x > cutoff { 1.0 / x } else { 0.0 })
        .collect();
    Ok(&u * eigen::real_diagonal(&inv) * u.adjoint())
}

/// Generalized inverse built from `s(t(x₁ + x₂) + x₃) = x₁`.
///
/// A vector `y` of the codomain splits as `y_R + y_K` with `y_R ∈ Ran t` and
/// `y_K ∈ Ker t*`; `s` kills `y_K` and sends `y_R` to its unique preimage in
/// `Ran t*`. Both the splitting and the preimage come from the Gram matrix
/// `G = M M*` and its spectral pseudo-inverse, so no SVD is involved.
pub fn pinv_from_decomposition(t: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    let (k, m) = (t.domain_rank(), t.codomain_rank());
    let blocks = t
        .blocks()
        .iter()
        .map(|mb| {
            let gram_pinv = hermitian_pinv(&(mb * mb.adjoint()), tol)?;
            // y ↦ y_R: projection onto the row space of M
            let range = mb.adjoint() * &gram_pinv * mb;
            // y_R = x₁ M with x₁ = z M*, so z G = y_R M*
            Ok(range * mb.adjoint() * gram_pinv)
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorMatrix::from_blocks(t.profile().clone(), m, k, blocks)
}

/// The four generalized-inverse residuals `(‖tst−t‖, ‖sts−s‖, ‖(ts)*−ts‖, ‖(st)*−st‖)`.
pub fn inverse_identity_residuals(t: &OperatorMatrix, s: &OperatorMatrix) -> Result<[f64; 4]> {
    let tst = t.then(s)?.then(t)?;
    let sts = s.then(t)?.then(s)?;
    // ts is "s, then t"
    let ts = s.then(t)?;
    let st = t.then(s)?;
    Ok([
        tst.distance(t),
        sts.distance(s),
        ts.distance(&ts.adjoint()),
        st.distance(&st.adjoint()),
    ])
}

pub const INVERSE_IDENTITIES: [&str; 4] = ["tst=t", "sts=s", "(ts)*=ts", "(st)*=st"];

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolar {
    pub v: OperatorMatrix,
    pub abs_t: OperatorMatrix,
    /// `V*V`, the projection onto the closure of `Ran |t|`.
    pub initial: OperatorMatrix,
    /// `VV*`, the projection onto the closure of `Ran t`.
    pub final_projection: OperatorMatrix,
    pub residuals: BTreeMap<String, f64>,
}

pub fn polar_matrix(t: &OperatorMatrix, tol: &Tolerances) -> Result<MatrixPolar> {
    let parts = svd_parts(t, tol)?;
    let v = parts.v;
    let abs_t = abs_op(t, tol)?;
    let initial = v.then(&v.adjoint())?;
    let final_projection = v.adjoint().then(&v)?;

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "partial_isometry".to_string(),
        v.then(&v.adjoint())?.then(&v)?.distance(&v),
    );
    residuals.insert("t=V|t|".to_string(), abs_t.then(&v)?.distance(t));
    residuals.insert(
        "ker V=ker t".to_string(),
        kernel_projection(&v, tol)?
            .operator()
            .distance(kernel_projection(t, tol)?.operator()),
    );
    residuals.insert(
        "ran V=ran t".to_string(),
        range_projection(&v, tol)?
            .operator()
            .distance(range_projection(t, tol)?.operator()),
    );
    residuals.insert(
        "ran V*=ran |t|".to_string(),
        range_projection(&v.adjoint(), tol)?
            .operator()
            .distance(range_projection(&abs_t, tol)?.operator()),
    );
    Ok(MatrixPolar {
        v,
        abs_t,
        initial,
        final_projection,
        residuals,
    })
}

/// The partial isometry recovered from `|t|` alone: `V = t ∘ |t|⁺`.
pub fn isometry_from_abs(t: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    let k = t.domain_rank();
    let abs_pinv = t.try_with_blocks(k, k, |m| {
        psd_funcalc_matrix(&(m * m.adjoint()), PsdFunction::PinvSqrt, tol)
    })?;
    abs_pinv.then(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPinv {
    pub s: OperatorMatrix,
    pub residuals: BTreeMap<String, f64>,
}

pub fn pinv_matrix(t: &OperatorMatrix, tol: &Tolerances) -> Result<MatrixPinv> {
    let s = svd_parts(t, tol)?.s;
    let mut residuals = BTreeMap::new();
    for (name, r) in INVERSE_IDENTITIES
        .iter()
        .zip(inverse_identity_residuals(t, &s)?)
    {
        residuals.insert(name.to_string(), r);
    }
    let adj = inverse_identity_residuals(&t.adjoint(), &s.adjoint())?;
    residuals.insert(
        "s* inverts t*".to_string(),
        adj.into_iter().fold(0.0, f64::max),
    );
    residuals.insert(
        "closure(ts)=ran t".to_string(),
        s.then(t)?.distance(range_projection(t, tol)?.operator()),
    );
    Ok(MatrixPinv { s, residuals })
}
