//! Polar decompositions, generalized inverses and the bounded-transform
//! calculus for regular operators on Hilbert C*-modules, made concrete over
//! two coefficient backends:
//!
//! * [`matalg`] / [`hilbmod`]: finite-dimensional algebras `A = ⊕ M_n(ℂ)` and
//!   the free modules `A^k` over them. Every closed submodule is an orthogonal
//!   summand here, so every operator has a polar decomposition.
//! * [`funbackend`]: exact piecewise-rational functions on a finite union of
//!   closed intervals, i.e. the commutative algebra `C(X)`. Multiplication
//!   operators over it can fail to have complemented range closure, and the
//!   backend certifies such failures with a point of the zero set.
//!
//! [`regular`] implements the bounded transform `F_t = t (1 + t*t)^{-1/2}` and
//! its inverse, [`polar`] the equivalence of polar decomposition,
//! complementability and generalized inverses, and [`cli`] the file-driven
//! front end behind the `regpolar` binary.
//!
//! # Conventions
//!
//! Module elements are *row* vectors and operators act by right
//! multiplication, `x ↦ x·B`. Adjoints are therefore star-transposes, and the
//! matrix of `second ∘ first` is `first · second`.

pub mod cli;
pub mod config;
pub mod error;
pub mod funbackend;
pub mod hilbmod;
pub mod matalg;
pub mod polar;
pub mod random;
pub mod regular;

pub use config::Tolerances;
pub use error::{Error, Result};
