//! The finite-dimensional C*-algebra `A = M_{n₁}(ℂ) ⊕ … ⊕ M_{n_r}(ℂ)`.
//!
//! Elements are tuples of square complex blocks. All arithmetic is
//! blockwise; the norm is the maximum spectral norm over blocks.

pub mod eigen;
pub mod funcalc;

use std::fmt;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub use eigen::{eigh, spectral_norm, svd, CompactSvd, Svd};
pub use funcalc::{psd_funcalc_matrix, PsdFunction};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Block sizes `[n₁, …, n_r]` of the coefficient algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockProfile(Vec<usize>);

impl BlockProfile {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidProfile(
                "profile must have at least one block".into(),
            ));
        }
        if let Some(pos) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidProfile(format!("block {pos} has size 0")));
        }
        Ok(BlockProfile(sizes))
    }

    /// The one-block profile `[1]`, i.e. `A = ℂ`.
    pub fn scalar() -> Self {
        BlockProfile(vec![1])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self, block: usize) -> usize {
        self.0[block]
    }

    /// Complex dimension of `A`.
    pub fn dimension(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    fn check_same(&self, other: &BlockProfile) -> Result<()> {
        if self != other {
            return Err(Error::ProfileMismatch {
                left: self.0.clone(),
                right: other.0.clone(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for BlockProfile {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        BlockProfile::new(v)
    }
}

impl From<BlockProfile> for Vec<usize> {
    fn from(p: BlockProfile) -> Self {
        p.0
    }
}

impl fmt::Display for BlockProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgOp {
    Add,
    Mul,
}

/// An element of `A`: one square complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    profile: BlockProfile,
    blocks: Vec<CMat>,
}

/// Spectrum of one Hermitian block: ascending eigenvalues and the unitary of eigenvectors.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMat,
}

#[derive(Debug, Clone)]
pub struct HermSpectrum {
    pub blocks: Vec<BlockSpectrum>,
}

impl HermSpectrum {
    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.blocks
            .iter()
            .filter_map(|b| b.eigenvalues.first().copied())
            .reduce(f64::min)
    }

    /// `U diag(λ) U*` per block.
    pub fn reconstruct(&self, profile: &BlockProfile) -> AlgElement {
        let blocks = self
            .blocks
            .iter()
            .map(|b| &b.vectors * eigen::real_diagonal(&b.eigenvalues) * b.vectors.adjoint())
            .collect();
        AlgElement {
            profile: profile.clone(),
            blocks,
        }
    }
}

impl AlgElement {
    pub fn new(profile: BlockProfile, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != profile.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "profile {profile} has {} blocks, got {}",
                profile.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(profile.sizes()).enumerate() {
            if b.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} should be {n}x{n}, got {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("block {i}")));
            }
        }
        Ok(AlgElement { profile, blocks })
    }

    pub fn zero(profile: &BlockProfile) -> Self {
        AlgElement {
            profile: profile.clone(),
            blocks: profile.sizes().iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn one(profile: &BlockProfile) -> Self {
        AlgElement {
            profile: profile.clone(),
            blocks: profile
                .sizes()
                .iter()
                .map(|&n| CMat::identity(n, n))
                .collect(),
        }
    }

    /// `z · 1`
    pub fn scalar(profile: &BlockProfile, z: C64) -> Self {
        AlgElement {
            profile: profile.clone(),
            blocks: profile
                .sizes()
                .iter()
                .map(|&n| CMat::identity(n, n) * z)
                .collect(),
        }
    }

    pub fn profile(&self) -> &BlockProfile {
        &self.profile
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn arith(&self, other: &AlgElement, op: AlgOp) -> Result<AlgElement> {
        self.profile.check_same(&other.profile)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match op {
                AlgOp::Add => a + b,
                AlgOp::Mul => a * b,
            })
            .collect();
        Ok(AlgElement {
            profile: self.profile.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        self.arith(other, AlgOp::Add)
    }

    pub fn mul(&self, other: &AlgElement) -> Result<AlgElement> {
        self.arith(other, AlgOp::Mul)
    }

    pub fn sub(&self, other: &AlgElement) -> Result<AlgElement> {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> AlgElement {
        AlgElement {
            profile: self.profile.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    /// Blockwise conjugate transpose.
    pub fn star(&self) -> AlgElement {
        AlgElement {
            profile: self.profile.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// C*-norm: largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: &Tolerances) -> bool {
        self.blocks
            .iter()
            .all(|b| eigen::hermitian_defect(b) <= tol.hermitian * (1.0 + b.norm()))
    }

    /// Hermitian with spectrum bounded below by `-rank cut-off`.
    pub fn is_positive(&self, tol: &Tolerances) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match self.herm_eig(tol) {
            Ok(spec) => {
                let cutoff = tol.rank_cutoff(self.norm());
                spec.min_eigenvalue().is_none_or(|m| m >= -cutoff)
            }
            Err(_) => false,
        }
    }

    pub fn herm_eig(&self, tol: &Tolerances) -> Result<HermSpectrum> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                eigh(b, tol).map(|(eigenvalues, vectors)| BlockSpectrum {
                    eigenvalues,
                    vectors,
                })
            })
            .collect::<Result<_>>()?;
        Ok(HermSpectrum { blocks })
    }

    pub fn psd_funcalc(&self, func: PsdFunction, tol: &Tolerances) -> Result<AlgElement> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| psd_funcalc_matrix(b, func, tol))
            .collect::<Result<_>>()?;
        Ok(AlgElement {
            profile: self.profile.clone(),
            blocks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn one_block(n: usize, entries: &[C64]) -> AlgElement {
        AlgElement::new(
            BlockProfile::new(vec![n]).unwrap(),
            vec![CMat::from_row_slice(n, n, entries)],
        )
        .unwrap()
    }

    fn nilpotent() -> AlgElement {
        one_block(2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
    }

    #[test]
    fn profile_validation() {
        assert!(BlockProfile::new(vec![]).is_err());
        assert!(BlockProfile::new(vec![2, 0]).is_err());
        assert_eq!(BlockProfile::new(vec![2, 3]).unwrap().dimension(), 13);
    }

    #[test]
    fn additive_and_multiplicative_identity() {
        let a = one_block(1, &[c(2., 1.)]);
        let zero = AlgElement::zero(a.profile());
        assert_eq!(a.add(&zero).unwrap(), a);
        assert_eq!(AlgElement::one(a.profile()).mul(&a).unwrap(), a);
    }

    #[test]
    fn nilpotent_squares_to_zero() {
        let n = nilpotent();
        assert_eq!(n.mul(&n).unwrap(), AlgElement::zero(n.profile()));
    }

    #[test]
    fn profile_mismatch() {
        let a = AlgElement::one(&BlockProfile::new(vec![1]).unwrap());
        let b = AlgElement::one(&BlockProfile::new(vec![2]).unwrap());
        assert!(matches!(a.add(&b), Err(Error::ProfileMismatch { .. })));
    }

    #[test]
    fn star_of_nilpotent() {
        let s = nilpotent().star();
        assert_eq!(
            s,
            one_block(2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)])
        );
        assert_eq!(s.star(), nilpotent());
    }

    #[test]
    fn hermitian_is_star_fixed() {
        let h = one_block(2, &[c(1., 0.), c(2., -1.), c(2., 1.), c(-3., 0.)]);
        assert_eq!(h.star(), h);
    }

    #[test]
    fn diagonal_spectrum() {
        let d = one_block(2, &[c(4., 0.), c(0., 0.), c(0., 0.), c(9., 0.)]);
        let spec = d.herm_eig(&Tolerances::default()).unwrap();
        assert_eq!(spec.blocks[0].eigenvalues, vec![4.0, 9.0]);
        assert_eq!(spec.blocks[0].vectors, CMat::identity(2, 2));
        let z = AlgElement::zero(d.profile())
            .herm_eig(&Tolerances::default())
            .unwrap();
        assert_eq!(z.blocks[0].eigenvalues, vec![0.0, 0.0]);
    }

    #[test]
    fn positivity_predicate() {
        let tol = Tolerances::default();
        assert!(one_block(2, &[c(2., 0.), c(1., 0.), c(1., 0.), c(2., 0.)]).is_positive(&tol));
        assert!(!nilpotent().is_positive(&tol));
        assert!(!one_block(1, &[c(-1., 0.)]).is_positive(&tol));
        assert_eq!(AlgElement::zero(&BlockProfile::scalar()).norm(), 0.0);
    }

    #[test]
    fn not_hermitian_error() {
        assert!(matches!(
            nilpotent().herm_eig(&Tolerances::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn shape_and_finiteness_checked() {
        let p = BlockProfile::new(vec![2]).unwrap();
        assert!(AlgElement::new(p.clone(), vec![CMat::zeros(2, 3)]).is_err());
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.);
        assert!(matches!(
            AlgElement::new(p, vec![m]),
            Err(Error::NonFinite(_))
        ));
    }
}
