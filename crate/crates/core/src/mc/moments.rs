//! Moments of `u·P₁(s₀) + u′·P₁(s₀′)`: Monte Carlo, exact, and Gaussian.

use num_complex::Complex64;
use serde::Serialize;

use super::{HasPrimeSums, P1Variant};
use crate::arith::ArithTables;
use crate::error::{invalid, Error, Result};
use crate::params::ExperimentParams;
use crate::sum::{ComplexNeumaier, Neumaier};

/// Largest prime-tuple expansion [`moment_oracle_exact`] will enumerate.
pub const ORACLE_TERM_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub std_err: f64,
    pub n: usize,
}

/// Where the P₁ pair comes from and how it is scaled.
#[derive(Clone, Copy, Debug)]
pub struct MomentSource {
    pub variant: P1Variant,
    pub s_tilde: f64,
}

/// Sample mean of `(u·A + u′·A′)^k`, `(A, A′)` the P₁ pair.
pub fn empirical_moment<S: HasPrimeSums>(
    samples: &[S],
    k: u32,
    u: f64,
    uprime: f64,
    which: MomentSource,
) -> Result<MomentEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("empirical_moment".into()));
    }
    let scale = match which.variant {
        P1Variant::Unscaled => 1.0,
        P1Variant::Scaled => 1.0 / which.s_tilde,
    };
    let n = samples.len() as f64;
    let mut sum = Neumaier::new();
    let mut sum2 = Neumaier::new();
    for s in samples {
        let [a, ap] = s.p1_pair();
        let x = ((u * a + uprime * ap) * scale).powi(k as i32);
        sum.add(x);
        sum2.add(x * x);
    }
    let mean = sum.value() / n;
    let var = (sum2.value() / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(MomentEstimate {
        mean,
        std_err: (var / n).sqrt(),
        n: samples.len(),
    })
}

/// `E[Z^{2k}]` for `Z ~ N(0, variance)`: `(2k)!/(k! 2^k) · variance^k`.
pub fn gaussian_moment(k: u32, variance: f64) -> f64 {
    let mut c = 1.0;
    for j in 1..=k {
        c *= (2 * j - 1) as f64;
    }
    c * variance.powi(k as i32)
}

/// Exact `τ`-average over `[T, 2T]` and its bookkeeping.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentOracle {
    pub k: u32,
    /// The exact average of `(u·P₁(s₀) + u′·P₁(s₀′))^k`.
    pub value: f64,
    /// Contribution of frequency-zero tuples.
    pub diagonal: f64,
    /// `value − diagonal`.
    pub off_diagonal: f64,
    /// Gaussian moment with variance `V(u,u′)` (0 for odd `k`).
    pub gaussian: f64,
    /// `diagonal − gaussian`, the correction from repeated primes.
    pub o_k: f64,
    /// `Y^{2k}/T`, the size of the off-diagonal error allowed.
    pub bound: f64,
    /// `V(u,u′) = ½ Σ_{p≤Y} |c_p|²`.
    pub variance: f64,
    pub terms: u128,
}

/// Expand `(u·P₁(s₀) + u′·P₁(s₀′))^k` over prime tuples and average every
/// `e^{iωτ}` over `τ ∈ [T, 2T]` in closed form.
///
/// Writing `u·P₁(s₀) + u′·P₁(s₀′) = ½ Σ_p (c_p p^{−iτ} + c̄_p p^{iτ})` with
/// `c_p = p^{−σ₀}(u p^{−ih} + u′ p^{−ih′})`, each of the `(2π(Y))^k` tuples
/// of signed primes contributes `2^{−k} Π coeff · avg e^{iωτ}`.
pub fn moment_oracle_exact(
    params: &ExperimentParams,
    tables: &ArithTables,
    k: u32,
    u: f64,
    uprime: f64,
) -> Result<MomentOracle> {
    let primes = tables.primes_upto(params.y);
    if params.y.floor() > tables.limit() as f64 {
        return Err(Error::BeyondSieve {
            what: "Y",
            value: params.y,
            limit: tables.limit(),
            required: params.y.floor() as u64,
        });
    }
    let atoms = 2 * primes.len() as u128;
    let terms = atoms.checked_pow(k).unwrap_or(u128::MAX);
    if terms > ORACLE_TERM_LIMIT {
        return Err(Error::ExpansionTooLarge {
            terms,
            limit: ORACLE_TERM_LIMIT,
        });
    }
    let cs: Vec<Complex64> = primes
        .iter()
        .map(|&p| {
            let l = (p as f64).ln();
            (-params.sigma0 * l).exp()
                * (u * Complex64::from_polar(1.0, -params.h * l)
                    + uprime * Complex64::from_polar(1.0, -params.hprime * l))
        })
        .collect();
    let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let variance = 0.5 * cs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let t = params.t;

    let mut total = ComplexNeumaier::new();
    let mut diag = ComplexNeumaier::new();
    if k == 0 {
        total.add(Complex64::new(1.0, 0.0));
        diag.add(Complex64::new(1.0, 0.0));
    } else {
        let mut net = vec![0i32; primes.len()];
        let mut walker = Walker {
            cs: &cs,
            logs: &logs,
            t,
            net: &mut net,
            nonzero: 0,
            total: &mut total,
            diag: &mut diag,
        };
        walker.go(k, Complex64::new(1.0, 0.0), 0.0);
    }
    let half_k = 0.5f64.powi(k as i32);
    let value = total.value().re * half_k;
    let diagonal = diag.value().re * half_k;
    let gaussian = if k % 2 == 0 {
        gaussian_moment(k / 2, variance)
    } else {
        0.0
    };
    Ok(MomentOracle {
        k,
        value,
        diagonal,
        off_diagonal: value - diagonal,
        gaussian,
        o_k: diagonal - gaussian,
        bound: params.y.powi(2 * k as i32) / t,
        variance,
        terms: if k == 0 { 1 } else { terms },
    })
}

struct Walker<'a> {
    cs: &'a [Complex64],
    logs: &'a [f64],
    t: f64,
    /// Net multiplicity of each prime in `ω`; the tuple is diagonal iff all vanish.
    net: &'a mut [i32],
    nonzero: usize,
    total: &'a mut ComplexNeumaier,
    diag: &'a mut ComplexNeumaier,
}

impl Walker<'_> {
    fn go(&mut self, left: u32, coeff: Complex64, omega: f64) {
        if left == 0 {
            if self.nonzero == 0 {
                self.total.add(coeff);
                self.diag.add(coeff);
            } else {
                // avg_{τ∈[T,2T]} e^{iωτ} = (e^{2iTω} − e^{iTω}) / (iωT)
                let avg = (Complex64::from_polar(1.0, 2.0 * self.t * omega)
                    - Complex64::from_polar(1.0, self.t * omega))
                    / Complex64::new(0.0, omega * self.t);
                self.total.add(coeff * avg);
            }
            return;
        }
        for j in 0..self.cs.len() {
            for sign in [1i32, -1] {
                // c_p p^{−iτ} has frequency −log p; its conjugate +log p.
                let (c, w) = if sign == 1 {
                    (self.cs[j], -self.logs[j])
                } else {
                    (self.cs[j].conj(), self.logs[j])
                };
                let before = self.net[j];
                let after = before + sign;
                let delta = isize::from(before == 0) - isize::from(after == 0);
                self.net[j] = after;
                self.nonzero = (self.nonzero as isize + delta) as usize;
                self.go(left - 1, coeff * c, omega + w);
                self.net[j] = before;
                self.nonzero = (self.nonzero as isize - delta) as usize;
            }
        }
    }
}

/// Diagonal moment by the multiset formula
/// `2^{−2j}(2j)! Σ_{|α|=j} Π |c_p|^{2α_p}/(α_p!)²`.
pub fn diagonal_by_multisets(params: &ExperimentParams, tables: &ArithTables, j: u32, u: f64, uprime: f64) -> Result<f64> {
    if params.y.floor() > tables.limit() as f64 {
        return Err(invalid("Y beyond the sieve"));
    }
    let weights: Vec<f64> = tables
        .primes_upto(params.y)
        .iter()
        .map(|&p| {
            let l = (p as f64).ln();
            ((-params.sigma0 * l).exp()
                * (u * Complex64::from_polar(1.0, -params.h * l)
                    + uprime * Complex64::from_polar(1.0, -params.hprime * l)))
            .norm_sqr()
        })
        .collect();
    fn rec(w: &[f64], from: usize, left: u32, acc: f64, out: &mut f64) {
        if left == 0 {
            *out += acc;
            return;
        }
        for i in from..w.len() {
            let mut a = acc;
            for m in 1..=left {
                a *= w[i] / (m * m) as f64;
                rec(w, i + 1, left - m, a, out);
            }
        }
    }
    let mut s = 0.0;
    rec(&weights, 0, j, 1.0, &mut s);
    let mut fact = 1.0;
    for i in 1..=2 * j {
        fact *= i as f64;
    }
    Ok(0.25f64.powi(j as i32) * fact * s)
}
