use super::{ModuleVector, OperatorMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matalg::{eigen, BlockProfile, CMat};

/// Submodule of `A^k`, stored per block as a matrix whose rows form an
/// orthonormal basis of the block's row-space component in `ℂ^{k·nᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Submodule {
    profile: BlockProfile,
    rank: usize,
    bases: Vec<CMat>,
}

impl Submodule {
    /// Wraps row bases after checking shapes and orthonormality (to `1e-10`).
    pub fn new(profile: BlockProfile, rank: usize, bases: Vec<CMat>) -> Result<Self> {
        if bases.len() != profile.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} bases for {} blocks",
                bases.len(),
                profile.num_blocks()
            )));
        }
        for (i, (b, &n)) in bases.iter().zip(profile.sizes()).enumerate() {
            if b.ncols() != rank * n || b.nrows() > rank * n {
                return Err(Error::ShapeMismatch(format!(
                    "basis {i} is {}x{}, ambient dimension {}",
                    b.nrows(),
                    b.ncols(),
                    rank * n
                )));
            }
            let gram = b * b.adjoint();
            if (gram - CMat::identity(b.nrows(), b.nrows())).norm() > 1e-10 {
                return Err(Error::ShapeMismatch(format!(
                    "basis {i} is not orthonormal"
                )));
            }
        }
        Ok(Submodule {
            profile,
            rank,
            bases,
        })
    }

    /// Submodule generated by `vectors`; every row of every block of a generator
    /// lies in the block's subspace.
    pub fn generated_by(
        profile: &BlockProfile,
        rank: usize,
        vectors: &[ModuleVector],
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut bases = Vec::with_capacity(profile.num_blocks());
        for (i, &n) in profile.sizes().iter().enumerate() {
            let mut stacked = CMat::zeros(vectors.len() * n, rank * n);
            for (g, v) in vectors.iter().enumerate() {
                if v.profile() != profile || v.rank() != rank {
                    return Err(Error::ShapeMismatch("generator shape".into()));
                }
                stacked
                    .view_mut((g * n, 0), (n, rank * n))
                    .copy_from(&v.block_row(i));
            }
            bases.push(row_space_basis(&stacked, tol)?);
        }
        Ok(Submodule {
            profile: profile.clone(),
            rank,
            bases,
        })
    }

    pub fn whole(profile: &BlockProfile, rank: usize) -> Self {
        Submodule {
            profile: profile.clone(),
            rank,
            bases: profile
                .sizes()
                .iter()
                .map(|&n| CMat::identity(rank * n, rank * n))
                .collect(),
        }
    }

    pub fn zero(profile: &BlockProfile, rank: usize) -> Self {
        Submodule {
            profile: profile.clone(),
            rank,
            bases: profile
                .sizes()
                .iter()
                .map(|&n| CMat::zeros(0, rank * n))
                .collect(),
        }
    }

    pub fn bases(&self) -> &[CMat] {
        &self.bases
    }

    pub fn block_dimensions(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.nrows()).collect()
    }

    pub fn projection(&self) -> ProjectionOperator {
        let blocks = self.bases.iter().map(|q| q.adjoint() * q).collect();
        ProjectionOperator(
            OperatorMatrix::from_blocks(self.profile.clone(), self.rank, self.rank, blocks)
                .expect("basis shapes follow the profile"),
        )
    }
}

/// Orthonormal rows spanning the row space of `m`.
pub(crate) fn row_space_basis(m: &CMat, tol: &Tolerances) -> Result<CMat> {
    let s = eigen::svd(m)?;
    let cutoff = tol.rank_cutoff(s.largest());
    Ok(s.compact(cutoff).w.adjoint())
}

/// Orthogonal projection on `A^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionOperator(OperatorMatrix);

impl ProjectionOperator {
    /// Accepts `p` when `‖p - p*‖` and `‖p² - p‖` are at most `1e-8`.
    pub fn new(p: OperatorMatrix) -> Result<Self> {
        let (sa, idem) = Self::defects(&p)?;
        if sa > 1e-8 || idem > 1e-8 {
            return Err(Error::ShapeMismatch(format!(
                "not an orthogonal projection (‖P-P*‖={sa:e}, ‖P²-P‖={idem:e})"
            )));
        }
        Ok(ProjectionOperator(p))
    }

    /// `(‖p - p*‖, ‖p² - p‖)`
    pub fn defects(p: &OperatorMatrix) -> Result<(f64, f64)> {
        if !p.is_square() {
            return Err(Error::NotSquare {
                domain: p.domain_rank(),
                codomain: p.codomain_rank(),
            });
        }
        let sa = p.distance(&p.adjoint());
        let idem = p.then(p)?.distance(p);
        Ok((sa, idem))
    }

    pub fn identity(profile: &BlockProfile, rank: usize) -> Self {
        ProjectionOperator(OperatorMatrix::identity(profile, rank))
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_operator(self) -> OperatorMatrix {
        self.0
    }

    /// `I - P`
    pub fn complement(&self) -> ProjectionOperator {
        let id = OperatorMatrix::identity(self.0.profile(), self.0.domain_rank());
        ProjectionOperator(id.sub(&self.0).expect("same shape"))
    }

    pub fn rank_per_block(&self) -> Vec<usize> {
        self.0
            .blocks()
            .iter()
            .map(|b| (0..b.nrows()).map(|i| b[(i, i)].re).sum::<f64>().round() as usize)
            .collect()
    }
}

/// Projection onto the closed range of `b` (in the codomain).
pub fn range_projection(b: &OperatorMatrix, tol: &Tolerances) -> Result<ProjectionOperator> {
    let m = b.codomain_rank();
    let svds = b.compact_svds(tol)?;
    let blocks = svds.iter().map(|s| &s.w * s.w.adjoint()).collect();
    Ok(ProjectionOperator(OperatorMatrix::from_blocks(
        b.profile().clone(),
        m,
        m,
        blocks,
    )?))
}

/// Projection onto the kernel of `b` (in the domain).
pub fn kernel_projection(b: &OperatorMatrix, tol: &Tolerances) -> Result<ProjectionOperator> {
    let k = b.domain_rank();
    let svds = b.compact_svds(tol)?;
    let blocks = svds
        .iter()
        .map(|s| CMat::identity(s.u.nrows(), s.u.nrows()) - &s.u * s.u.adjoint())
        .collect();
    Ok(ProjectionOperator(OperatorMatrix::from_blocks(
        b.profile().clone(),
        k,
        k,
        blocks,
    )?))
}

/// `A^k = S ⊕ S^⊥`: the projections onto `S` and onto `S^⊥`.
pub fn decompose(rank: usize, s: &Submodule) -> Result<(ProjectionOperator, ProjectionOperator)> {
    if s.rank != rank {
        return Err(Error::ShapeMismatch(format!(
            "submodule of A^{} inside A^{rank}",
            s.rank
        )));
    }
    let p = s.projection();
    let q = p.complement();
    Ok((p, q))
}
