use thiserror::Error;

use crate::funbackend::Certificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("block profiles differ: {left:?} vs {right:?}")]
    ProfileMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid block profile: {0}")]
    InvalidProfile(String),
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("element is not Hermitian (‖h - h*‖ = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("spectrum has negative eigenvalue {eigenvalue:e}")]
    NegativeSpectrum { eigenvalue: f64 },
    #[error("1 - F*F is singular: eigenvalue {eigenvalue:e} within margin of the boundary")]
    DefectSingular { eigenvalue: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("operator is not square ({domain} -> {codomain})")]
    NotSquare { domain: usize, codomain: usize },
    #[error("polynomial degree {0} exceeds the supported maximum of 16")]
    DegreeTooLarge(usize),
    #[error("domains differ")]
    DomainMismatch,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("function is not real-valued")]
    NotReal,
    #[error("irrational root in [{lo}, {hi}]")]
    UnsupportedIrrationalRoot { lo: String, hi: String },
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("range closure is not orthogonally complemented (witness {0})")]
    NotComplemented(Certificate),
}
