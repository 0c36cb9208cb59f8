//! Riemann zeta near the critical line.
//!
//! All backends work in `f64`. Phases such as `t·log n` and `arg χ` are of
//! size `t log t`, so at height `t` the absolute error is at least of order
//! `ε·t·log t` (about 1e−6 at `t = 1e8`) whatever the backend; the stated
//! `target_abs_err` is met for `t ≤ 1e6`.

mod afe;
mod em;
mod gamma;
mod selberg;

pub use gamma::{ln_chi, ln_gamma, siegel_theta};
pub use selberg::{selberg_mean_value_check, SelbergCheck};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::ComplexNeumaier;

/// Values with `|ζ|` below this are treated as numerically zero.
pub const ZERO_GUARD: f64 = 1e-12;

/// Largest `|t|` accepted by the Euler–Maclaurin backend (cost is `O(|t|)`).
pub const EM_MAX_T: f64 = 1e7;

/// Largest `|t|` accepted by the approximate functional equation.
pub const AFE_MAX_T: f64 = 1e12;

/// Largest truncation length of the plain partial sum.
pub const TRUNC_MAX_LEN: u64 = 100_000_000;

/// Calibrated constant `c` in `|Σ_{n≤T} n^{-s} − ζ(s)| ≤ c·T^{-1/2}` for
/// `t ∈ [T, 2T]`, `σ ≥ 1/2`. The observed supremum is 1.042 at `σ = 1/2`,
/// `t = T` (dominated by the boundary term `T^{1−s}/(1−s)`), for
/// `T ∈ {1e3, 1e4, 1e5}`.
pub const TRUNCATION_CONSTANT: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMode {
    EulerMaclaurin,
    AfeSymmetric,
    TruncatedSum,
}

impl ZetaMode {
    pub fn name(self) -> &'static str {
        match self {
            ZetaMode::EulerMaclaurin => "euler_maclaurin",
            ZetaMode::AfeSymmetric => "afe_symmetric",
            ZetaMode::TruncatedSum => "truncated_sum",
        }
    }
}

impl std::str::FromStr for ZetaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            ZetaMode::EulerMaclaurin,
            ZetaMode::AfeSymmetric,
            ZetaMode::TruncatedSum,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown zeta backend {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaBackend {
    pub mode: ZetaMode,
    pub target_abs_err: f64,
    /// Length of the partial sum in `truncated_sum` mode.
    pub trunc_len: u64,
}

/// `log|ζ|` together with the near-zero flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaLog {
    pub log_abs: f64,
    pub near_zero: bool,
}

impl ZetaBackend {
    pub fn euler_maclaurin() -> Self {
        Self {
            mode: ZetaMode::EulerMaclaurin,
            target_abs_err: 1e-12,
            trunc_len: 0,
        }
    }

    pub fn afe() -> Self {
        Self {
            mode: ZetaMode::AfeSymmetric,
            target_abs_err: 1e-10,
            trunc_len: 0,
        }
    }

    /// `afe_symmetric` from its validity floor upward, Euler–Maclaurin below.
    pub fn auto(t_min: f64) -> Self {
        if t_min >= afe::MIN_T {
            Self::afe()
        } else {
            Self::euler_maclaurin()
        }
    }

    /// Plain partial sum `Σ_{n≤T} n^{-s}` of length `⌊T⌋`.
    pub fn truncated(t_cfg: f64) -> Self {
        let len = t_cfg.floor().max(1.0) as u64;
        Self {
            mode: ZetaMode::TruncatedSum,
            target_abs_err: TRUNCATION_CONSTANT / t_cfg.sqrt(),
            trunc_len: len,
        }
    }

    fn valid_range(&self) -> String {
        match self.mode {
            ZetaMode::EulerMaclaurin => {
                format!("0 < sigma <= 2, |t| <= {EM_MAX_T:e}, s != 1")
            }
            ZetaMode::AfeSymmetric => {
                format!("0 < sigma <= 2, {} <= |t| <= {AFE_MAX_T:e}", afe::MIN_T)
            }
            ZetaMode::TruncatedSum => {
                format!("0 < sigma <= 2, length <= {TRUNC_MAX_LEN}")
            }
        }
    }

    pub fn check(&self, sigma: f64, t: f64) -> Result<()> {
        let at = t.abs();
        let ok = sigma > 0.0
            && sigma <= 2.0
            && t.is_finite()
            && match self.mode {
                ZetaMode::EulerMaclaurin => at <= EM_MAX_T && !(sigma == 1.0 && t == 0.0),
                ZetaMode::AfeSymmetric => (afe::MIN_T..=AFE_MAX_T).contains(&at),
                ZetaMode::TruncatedSum => (1..=TRUNC_MAX_LEN).contains(&self.trunc_len),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::ZetaRange {
                mode: self.mode.name(),
                sigma,
                t,
                valid: self.valid_range(),
            })
        }
    }

    pub fn zeta(&self, sigma: f64, t: f64) -> Result<Complex64> {
        Ok(self.zeta_multi(&[sigma], t)?[0])
    }

    /// ζ at `σ + it` for several `σ` at one height.
    pub fn zeta_multi(&self, sigmas: &[f64], t: f64) -> Result<Vec<Complex64>> {
        for &sigma in sigmas {
            self.check(sigma, t)?;
        }
        if t < 0.0 {
            return Ok(self
                .zeta_multi(sigmas, -t)?
                .into_iter()
                .map(|z| z.conj())
                .collect());
        }
        Ok(match self.mode {
            ZetaMode::EulerMaclaurin => sigmas
                .iter()
                .map(|&sigma| em::zeta_em(Complex64::new(sigma, t)))
                .collect(),
            ZetaMode::AfeSymmetric => afe::zeta_afe_multi(sigmas, t),
            ZetaMode::TruncatedSum => sigmas
                .iter()
                .map(|&sigma| partial_sum(sigma, t, self.trunc_len))
                .collect(),
        })
    }

    pub fn log_abs_zeta(&self, sigma: f64, t: f64) -> Result<ZetaLog> {
        Ok(guarded_log(self.zeta(sigma, t)?))
    }
}

pub fn guarded_log(z: Complex64) -> ZetaLog {
    let r = z.norm();
    ZetaLog {
        log_abs: r.ln(),
        near_zero: !(r >= ZERO_GUARD),
    }
}

/// `zeta_eval(backend, σ, t)`.
pub fn zeta_eval(backend: &ZetaBackend, sigma: f64, t: f64) -> Result<Complex64> {
    backend.zeta(sigma, t)
}

pub fn log_abs_zeta(backend: &ZetaBackend, sigma: f64, t: f64) -> Result<ZetaLog> {
    backend.log_abs_zeta(sigma, t)
}

fn partial_sum(sigma: f64, t: f64, len: u64) -> Complex64 {
    let mut acc = ComplexNeumaier::new();
    for n in 1..=len {
        let l = (n as f64).ln();
        acc.add(Complex64::from_polar((-sigma * l).exp(), -t * l));
    }
    acc.value()
}
