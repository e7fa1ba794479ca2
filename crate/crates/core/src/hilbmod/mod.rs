//! Free Hilbert modules `A^k` over the block algebra and the adjointable
//! operators between them.
//!
//! Vectors are rows `x = (x₁, …, x_k)` of algebra elements; the inner product
//! `⟨x, y⟩ = Σ xⱼ yⱼ*` is A-linear in the first variable. An operator
//! `B: A^k → A^m` is a `k × m` array of algebra elements acting by right
//! multiplication, `(xB)_l = Σⱼ xⱼ B_{jl}`, so `B*` is the star-transpose and
//! the matrix of `second ∘ first` is `first · second`.
//!
//! Per block `i`, a vector is an `nᵢ × k·nᵢ` complex matrix and an operator a
//! `k·nᵢ × m·nᵢ` complex matrix; that is how operators are stored.

mod projection;

pub(crate) use projection::row_space_basis;
pub use projection::{
    decompose, kernel_projection, range_projection, ProjectionOperator, Submodule,
};

use nalgebra::Complex;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matalg::{eigen, AlgElement, BlockProfile, CMat, CompactSvd, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    profile: BlockProfile,
    entries: Vec<AlgElement>,
}

impl ModuleVector {
    pub fn new(profile: BlockProfile, entries: Vec<AlgElement>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| e.profile() != &profile) {
            return Err(Error::ProfileMismatch {
                left: profile.sizes().to_vec(),
                right: bad.profile().sizes().to_vec(),
            });
        }
        Ok(ModuleVector { profile, entries })
    }

    pub fn zero(profile: &BlockProfile, rank: usize) -> Self {
        ModuleVector {
            profile: profile.clone(),
            entries: vec![AlgElement::zero(profile); rank],
        }
    }

    /// Standard basis vector `e_j` (unit of A in slot `j`).
    pub fn basis(profile: &BlockProfile, rank: usize, j: usize) -> Self {
        let mut v = Self::zero(profile, rank);
        v.entries[j] = AlgElement::one(profile);
        v
    }

    pub fn profile(&self) -> &BlockProfile {
        &self.profile
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AlgElement] {
        &self.entries
    }

    /// Block `i` as an `nᵢ × k·nᵢ` complex matrix.
    pub fn block_row(&self, i: usize) -> CMat {
        let n = self.profile.size(i);
        let k = self.rank();
        CMat::from_fn(n, k * n, |r, c| self.entries[c / n].block(i)[(r, c % n)])
    }

    fn from_block_rows(profile: &BlockProfile, rank: usize, rows: &[CMat]) -> Self {
        let entries = (0..rank)
            .map(|j| {
                let blocks = rows
                    .iter()
                    .zip(profile.sizes())
                    .map(|(x, &n)| x.columns(j * n, n).into_owned())
                    .collect();
                AlgElement::new(profile.clone(), blocks).expect("block shapes follow the profile")
            })
            .collect();
        ModuleVector {
            profile: profile.clone(),
            entries,
        }
    }

    pub fn add(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(ModuleVector {
            profile: self.profile.clone(),
            entries,
        })
    }

    /// Left module action `a · x`.
    pub fn left_mul(&self, a: &AlgElement) -> Result<ModuleVector> {
        let entries = self
            .entries
            .iter()
            .map(|x| a.mul(x))
            .collect::<Result<_>>()?;
        Ok(ModuleVector {
            profile: self.profile.clone(),
            entries,
        })
    }

    /// Element of the orthogonal sum `E ⊕ F`.
    pub fn direct_sum(&self, other: &ModuleVector) -> Result<ModuleVector> {
        if self.profile != other.profile {
            return Err(Error::ProfileMismatch {
                left: self.profile.sizes().to_vec(),
                right: other.profile.sizes().to_vec(),
            });
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(ModuleVector {
            profile: self.profile.clone(),
            entries,
        })
    }

    /// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`
    pub fn norm(&self) -> f64 {
        inner_product(self, self)
            .map(|g| g.norm().sqrt())
            .unwrap_or(0.0)
    }

    fn check_shape(&self, other: &ModuleVector) -> Result<()> {
        if self.profile != other.profile || self.rank() != other.rank() {
            return Err(Error::ShapeMismatch(format!(
                "vectors of rank {} over {} and rank {} over {}",
                self.rank(),
                self.profile,
                other.rank(),
                other.profile
            )));
        }
        Ok(())
    }
}

/// `⟨x, y⟩ = Σⱼ xⱼ · yⱼ*`
pub fn inner_product(x: &ModuleVector, y: &ModuleVector) -> Result<AlgElement> {
    x.check_shape(y)?;
    let mut acc = AlgElement::zero(&x.profile);
    for (a, b) in x.entries.iter().zip(&y.entries) {
        acc = acc.add(&a.mul(&b.star())?)?;
    }
    Ok(acc)
}

/// Adjointable A-linear map `A^k → A^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    profile: BlockProfile,
    domain_rank: usize,
    codomain_rank: usize,
    blocks: Vec<CMat>,
}

impl OperatorMatrix {
    /// Build from the `k × m` array of entries, `entries[j][l] = B_{jl}`.
    pub fn from_entries(
        profile: BlockProfile,
        domain_rank: usize,
        codomain_rank: usize,
        entries: &[Vec<AlgElement>],
    ) -> Result<Self> {
        if entries.len() != domain_rank || entries.iter().any(|row| row.len() != codomain_rank) {
            return Err(Error::ShapeMismatch(format!(
                "expected {domain_rank}x{codomain_rank} array of entries"
            )));
        }
        for (j, row) in entries.iter().enumerate() {
            for (l, e) in row.iter().enumerate() {
                if e.profile() != &profile {
                    return Err(Error::ShapeMismatch(format!(
                        "entry [{j}][{l}] has profile {}, expected {profile}",
                        e.profile()
                    )));
                }
            }
        }
        let blocks = profile
            .sizes()
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                CMat::from_fn(domain_rank * n, codomain_rank * n, |r, c| {
                    entries[r / n][c / n].block(i)[(r % n, c % n)]
                })
            })
            .collect();
        Ok(OperatorMatrix {
            profile,
            domain_rank,
            codomain_rank,
            blocks,
        })
    }

    /// Build from per-block complex matrices of shape `k·nᵢ × m·nᵢ`.
    pub fn from_blocks(
        profile: BlockProfile,
        domain_rank: usize,
        codomain_rank: usize,
        blocks: Vec<CMat>,
    ) -> Result<Self> {
        if blocks.len() != profile.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                profile.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(profile.sizes()).enumerate() {
            if b.shape() != (domain_rank * n, codomain_rank * n) {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} should be {}x{}, got {}x{}",
                    domain_rank * n,
                    codomain_rank * n,
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("operator block {i}")));
            }
        }
        Ok(OperatorMatrix {
            profile,
            domain_rank,
            codomain_rank,
            blocks,
        })
    }

    pub fn zero(profile: &BlockProfile, domain_rank: usize, codomain_rank: usize) -> Self {
        OperatorMatrix {
            profile: profile.clone(),
            domain_rank,
            codomain_rank,
            blocks: profile
                .sizes()
                .iter()
                .map(|&n| CMat::zeros(domain_rank * n, codomain_rank * n))
                .collect(),
        }
    }

    pub fn identity(profile: &BlockProfile, rank: usize) -> Self {
        OperatorMatrix {
            profile: profile.clone(),
            domain_rank: rank,
            codomain_rank: rank,
            blocks: profile
                .sizes()
                .iter()
                .map(|&n| CMat::identity(rank * n, rank * n))
                .collect(),
        }
    }

    pub fn profile(&self) -> &BlockProfile {
        &self.profile
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn is_square(&self) -> bool {
        self.domain_rank == self.codomain_rank
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn entry(&self, j: usize, l: usize) -> AlgElement {
        let blocks = self
            .blocks
            .iter()
            .zip(self.profile.sizes())
            .map(|(b, &n)| b.view((j * n, l * n), (n, n)).into_owned())
            .collect();
        AlgElement::new(self.profile.clone(), blocks).expect("stored blocks are well formed")
    }

    /// The `k × m` array of entries.
    pub fn entries(&self) -> Vec<Vec<AlgElement>> {
        (0..self.domain_rank)
            .map(|j| (0..self.codomain_rank).map(|l| self.entry(j, l)).collect())
            .collect()
    }

    pub(crate) fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        OperatorMatrix {
            profile: self.profile.clone(),
            domain_rank: self.domain_rank,
            codomain_rank: self.codomain_rank,
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Replace the blocks by fallible per-block results of shape `rows(k) × cols(m)`.
    pub(crate) fn try_with_blocks(
        &self,
        domain_rank: usize,
        codomain_rank: usize,
        f: impl Fn(&CMat) -> Result<CMat>,
    ) -> Result<Self> {
        let blocks = self.blocks.iter().map(f).collect::<Result<_>>()?;
        OperatorMatrix::from_blocks(self.profile.clone(), domain_rank, codomain_rank, blocks)
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.profile() != &self.profile || x.rank() != self.domain_rank {
            return Err(Error::ShapeMismatch(format!(
                "operator on rank {} cannot act on vector of rank {}",
                self.domain_rank,
                x.rank()
            )));
        }
        let rows: Vec<CMat> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| x.block_row(i) * b)
            .collect();
        Ok(ModuleVector::from_block_rows(
            &self.profile,
            self.codomain_rank,
            &rows,
        ))
    }

    /// Star-transpose.
    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            profile: self.profile.clone(),
            domain_rank: self.codomain_rank,
            codomain_rank: self.domain_rank,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// `next ∘ self`: apply `self`, then `next`.
    pub fn then(&self, next: &OperatorMatrix) -> Result<Self> {
        if self.profile != next.profile || self.codomain_rank != next.domain_rank {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}->{} with {}->{}",
                self.domain_rank, self.codomain_rank, next.domain_rank, next.codomain_rank
            )));
        }
        Ok(OperatorMatrix {
            profile: self.profile.clone(),
            domain_rank: self.domain_rank,
            codomain_rank: next.codomain_rank,
            blocks: self
                .blocks
                .iter()
                .zip(&next.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(OperatorMatrix {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(OperatorMatrix {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map_blocks(|b| b * z)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex::new(x, 0.0))
    }

    /// Operator norm: largest singular value over the blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(eigen::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖`, or `+∞` when the shapes differ.
    pub fn distance(&self, other: &OperatorMatrix) -> f64 {
        self.sub(other).map(|d| d.norm()).unwrap_or(f64::INFINITY)
    }

    /// Compact SVD of every block with singular values above the rank cut-off.
    pub fn compact_svds(&self, tol: &Tolerances) -> Result<Vec<CompactSvd>> {
        self.blocks
            .iter()
            .map(|b| {
                let s = eigen::svd(b)?;
                let cutoff = tol.rank_cutoff(s.largest());
                Ok(s.compact(cutoff))
            })
            .collect()
    }

    /// Smallest singular value above the rank cut-off, over all blocks.
    pub fn min_nonzero_singular_value(&self, tol: &Tolerances) -> Result<Option<f64>> {
        Ok(self
            .compact_svds(tol)?
            .iter()
            .filter_map(|s| s.sigma.last().copied())
            .reduce(f64::min))
    }

    /// View a square operator on `A^k` as an element of `M_k(A) = ⊕ M_{k·nᵢ}(ℂ)`.
    pub fn as_algebra_element(&self) -> Result<AlgElement> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                domain: self.domain_rank,
                codomain: self.codomain_rank,
            });
        }
        let sizes = self
            .profile
            .sizes()
            .iter()
            .map(|n| n * self.domain_rank)
            .collect::<Vec<_>>();
        if sizes.contains(&0) {
            return Err(Error::ShapeMismatch("zero module has no algebra".into()));
        }
        AlgElement::new(BlockProfile::new(sizes)?, self.blocks.clone())
    }

    fn check_same_shape(&self, other: &OperatorMatrix) -> Result<()> {
        if self.profile != other.profile
            || self.domain_rank != other.domain_rank
            || self.codomain_rank != other.codomain_rank
        {
            return Err(Error::ShapeMismatch(format!(
                "{}->{} vs {}->{}",
                self.domain_rank, self.codomain_rank, other.domain_rank, other.codomain_rank
            )));
        }
        Ok(())
    }
}

pub fn op_apply(b: &OperatorMatrix, x: &ModuleVector) -> Result<ModuleVector> {
    b.apply(x)
}

pub fn op_adjoint(b: &OperatorMatrix) -> OperatorMatrix {
    b.adjoint()
}

/// `second ∘ first`; its matrix is `first · second`.
pub fn op_compose(first: &OperatorMatrix, second: &OperatorMatrix) -> Result<OperatorMatrix> {
    first.then(second)
}

/// `|t| = (t* t)^{1/2}` on the domain module.
pub fn abs_op(b: &OperatorMatrix, tol: &Tolerances) -> Result<OperatorMatrix> {
    let k = b.domain_rank();
    b.try_with_blocks(k, k, |m| {
        crate::matalg::psd_funcalc_matrix(&(m * m.adjoint()), crate::matalg::PsdFunction::Sqrt, tol)
    })
}
