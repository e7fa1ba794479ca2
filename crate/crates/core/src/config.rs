use serde::{Deserialize, Serialize};

/// Environment variable that overrides the default identity tolerance.
pub const TOL_ENV_VAR: &str = "REGPOLAR_TOL";

/// Numerical thresholds consumed by the matrix backend and the report layer.
///
/// Relative tolerances are scaled by `1 + ‖h‖` of the matrix they are applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Identity residual tolerance (`--tol`).
    pub identity: f64,
    /// Relative rank cut-off for singular values and eigenvalues (`--rank-tol`).
    pub rank: f64,
    /// Minimum distance of an eigenvalue from 1 for `(1 - x)^{-1/2}`.
    pub defect_margin: f64,
    /// Relative off-diagonal stopping criterion for the Jacobi sweeps.
    pub eig_convergence: f64,
    /// Relative tolerance for `‖h - h*‖` when a Hermitian input is required.
    pub hermitian: f64,
    /// Growth threshold for graded operators: `sup ‖s_n‖ > τ` means unbounded,
    /// `inf σ_min < 1/τ` means the range is not uniformly closed.
    pub graded_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-8,
            rank: 1e-10,
            defect_margin: 1e-9,
            eig_convergence: 1e-12,
            hermitian: 1e-9,
            graded_threshold: 10.0,
        }
    }
}

impl Tolerances {
    /// Defaults, with the identity tolerance taken from [`TOL_ENV_VAR`] when it parses
    /// as a positive finite number.
    pub fn from_env() -> Self {
        let mut tol = Tolerances::default();
        if let Some(v) = std::env::var(TOL_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
        {
            tol.identity = v;
        }
        tol
    }

    /// Absolute rank cut-off for a matrix of norm `norm`.
    pub fn rank_cutoff(&self, norm: f64) -> f64 {
        self.rank * (1.0 + norm)
    }
}
