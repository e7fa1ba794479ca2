//! Cyclic Jacobi eigensolver for Hermitian matrices and the one-sided
//! (Hestenes) Jacobi SVD built on the same plane rotation.

use nalgebra::{Complex, DMatrix};

use super::CMat;
use crate::config::Tolerances;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Plane rotation `J` that diagonalizes the Hermitian 2×2 block
/// `[[app, apq], [conj(apq), aqq]]` via `J* A J`.
///
/// `J` is the identity except `J_pp = J_qq = c`, `J_pq = s·e`, `J_qp = -s·conj(e)`.
#[derive(Debug, Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    e: Complex<f64>,
}

impl Rotation {
    fn new(app: f64, aqq: f64, apq: Complex<f64>) -> Self {
        let g = apq.norm();
        let e = apq / g;
        let tau = (aqq - app) / (2.0 * g);
        let t = if tau.abs() > 1e150 {
            0.5 / tau
        } else if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Rotation { c, s: t * c, e }
    }

    /// `X ← X J` on columns `p`, `q`.
    fn apply_right(&self, x: &mut CMat, p: usize, q: usize) {
        let (c, s, e) = (self.c, self.s, self.e);
        for k in 0..x.nrows() {
            let xp = x[(k, p)];
            let xq = x[(k, q)];
            x[(k, p)] = xp * c - xq * e.conj() * s;
            x[(k, q)] = xp * e * s + xq * c;
        }
    }

    /// `X ← J* X` on rows `p`, `q`.
    fn apply_left_adjoint(&self, x: &mut CMat, p: usize, q: usize) {
        let (c, s, e) = (self.c, self.s, self.e);
        for k in 0..x.ncols() {
            let xp = x[(p, k)];
            let xq = x[(q, k)];
            x[(p, k)] = xp * c - xq * e * s;
            x[(q, k)] = xp * e.conj() * s + xq * c;
        }
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `‖h - h*‖` in Frobenius norm.
pub fn hermitian_defect(h: &CMat) -> f64 {
    (h - h.adjoint()).norm()
}

/// Eigen-decomposition `h = U diag(λ) U*` of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &CMat, tol: &Tolerances) -> Result<(Vec<f64>, CMat)> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.norm();
    let defect = hermitian_defect(h);
    if defect > tol.hermitian * (1.0 + scale) {
        return Err(Error::NotHermitian { residual: defect });
    }
    let n = h.nrows();
    let mut a = (h + h.adjoint()) * Complex::new(0.5, 0.0);
    let mut v = CMat::identity(n, n);
    let threshold = tol.eig_convergence * (1.0 + scale);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, apq);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
                a[(p, q)] = Complex::new(0.0, 0.0);
                a[(q, p)] = Complex::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Full singular value decomposition `m = U diag(σ) W*` with `σ` descending.
///
/// `u` is `rows × p` and `w` is `cols × p` with `p = min(rows, cols)`;
/// columns belonging to zero singular values may be zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub w: CMat,
}

/// Compact factors restricted to singular values above a cut-off.
#[derive(Debug, Clone)]
pub struct CompactSvd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub w: CMat,
}

impl CompactSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

impl Svd {
    pub fn compact(&self, cutoff: f64) -> CompactSvd {
        let r = self.sigma.iter().take_while(|&&s| s > cutoff).count();
        CompactSvd {
            u: self.u.columns(0, r).into_owned(),
            sigma: self.sigma[..r].to_vec(),
            w: self.w.columns(0, r).into_owned(),
        }
    }

    pub fn largest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }
}

pub fn svd(m: &CMat) -> Result<Svd> {
    if m.ncols() > m.nrows() {
        let s = hestenes(&m.adjoint())?;
        return Ok(Svd {
            u: s.w,
            sigma: s.sigma,
            w: s.u,
        });
    }
    hestenes(m)
}

fn hestenes(m: &CMat) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let floor = f64::EPSILON * m.norm_squared();
    let mut g = m.clone();
    let mut w = CMat::identity(cols, cols);

    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let gp = g.column(p);
                let gq = g.column(q);
                let alpha = gp.norm_squared();
                let beta = gq.norm_squared();
                let gamma = gp.dotc(&gq);
                let size = gamma.norm();
                if size <= floor || size <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut g, p, q);
                rot.apply_right(&mut w, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..cols).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = CMat::from_fn(rows, cols, |r, c| {
        let j = order[c];
        if norms[j] > 0.0 {
            g[(r, j)] / norms[j]
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let w = CMat::from_fn(cols, cols, |r, c| w[(r, order[c])]);
    Ok(Svd { u, sigma, w })
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // The Hestenes sweep only fails on non-finite input; Frobenius is a safe bound then.
    svd(m).map(|s| s.largest()).unwrap_or_else(|_| m.norm())
}

/// Diagonal matrix with real entries.
pub fn real_diagonal(values: &[f64]) -> CMat {
    DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            Complex::new(values[i], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}
