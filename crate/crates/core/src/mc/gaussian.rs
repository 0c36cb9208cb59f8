//! Bivariate Gaussian limits.

use serde::{Deserialize, Serialize};

use crate::arith::ArithTables;
use crate::error::{invalid, Result};
use crate::params::ExperimentParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovKind {
    /// `[[1, α], [α, 1]]`.
    PaperC,
    /// Exact covariance of `(P₁(s₀), P₁(s₀′))/𝔰̃`.
    EmpiricalCtilde,
    Custom,
}

/// Mean-zero bivariate normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub cov: [[f64; 2]; 2],
    pub kind: CovKind,
}

impl GaussianSpec {
    pub fn new(cov: [[f64; 2]; 2], kind: CovKind) -> Result<Self> {
        let [[a, b], [c, d]] = cov;
        if b != c {
            return Err(invalid("covariance must be symmetric"));
        }
        if !(a > 0.0 && d > 0.0 && a * d - b * b > 0.0) {
            return Err(invalid(format!(
                "covariance [[{a}, {b}], [{c}, {d}]] is not positive definite"
            )));
        }
        Ok(Self { cov, kind })
    }

    pub fn paper_c(alpha: f64) -> Result<Self> {
        Self::new([[1.0, alpha], [alpha, 1.0]], CovKind::PaperC)
    }

    /// `C̃`: entries `Σ_{p≤Y} p^{−2σ₀} cos(δ_{ij} log p) / Σ_{p≤Y} 1/p`
    /// with `δ_{ii} = 0`, `δ_{12} = |h − h′|`.
    pub fn ctilde(params: &ExperimentParams, tables: &ArithTables) -> Result<Self> {
        let e = 2.0 * params.sigma0;
        let norm = 2.0 * params.s_tilde_sq;
        let diag = tables.weighted_prime_sum(params.y, e, 0.0)? / norm;
        let off = tables.weighted_prime_sum(params.y, e, params.delta)? / norm;
        Self::new([[diag, off], [off, diag]], CovKind::EmpiricalCtilde)
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = cov`.
    pub fn cholesky(&self) -> [[f64; 2]; 2] {
        let [[a, b], [_, d]] = self.cov;
        let l11 = a.sqrt();
        let l21 = b / l11;
        let l22 = (d - l21 * l21).sqrt();
        [[l11, 0.0], [l21, l22]]
    }

    /// Variance of `⟨dir, Z⟩`.
    pub fn projected_variance(&self, dir: [f64; 2]) -> f64 {
        let [[a, b], [_, d]] = self.cov;
        a * dir[0] * dir[0] + 2.0 * b * dir[0] * dir[1] + d * dir[1] * dir[1]
    }

    /// Characteristic function `exp(−½ ξᵀ C ξ)`.
    pub fn char_fn(&self, xi: [f64; 2]) -> f64 {
        (-0.5 * self.projected_variance(xi)).exp()
    }

    pub fn correlation(&self) -> f64 {
        self.cov[0][1] / (self.cov[0][0] * self.cov[1][1]).sqrt()
    }
}
