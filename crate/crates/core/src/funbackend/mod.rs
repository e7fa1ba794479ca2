//! Exact backend over `C(X)` for a finite union of closed intervals `X`.
//!
//! Functions are continuous and piecewise rational with Gaussian-rational
//! coefficients. Operators are diagonal multiplication operators with real
//! entries.

pub mod diag;
pub mod field;
pub mod poly;
pub mod pw;
pub mod sturm;
pub mod zeroset;

pub use diag::{
    diag_complement_check, diag_identities, diag_pinv, diag_polar, exact_residual, pw_abs,
    pw_recip_support, pw_sign_support, shifted_x, ComplementCheck, DiagOperator,
};
pub use field::{Gq, Q};
pub use poly::{GPoly, Poly, QPoly};
pub use pw::{pw_arith, pw_star, Domain1D, Interval, Piece, PwOp, PwRational};
pub use sturm::{rational_roots, sturm_count};
pub use zeroset::{is_clopen, zero_set, Certificate, ZeroSet};
