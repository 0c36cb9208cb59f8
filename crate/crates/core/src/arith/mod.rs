//! Sieves, multiplicative functions and prime sums.

mod cache;
mod sieve;

pub use cache::{load_cache, save_cache};
pub use sieve::segmented_primes;

use crate::error::{invalid, Error, Result};
use crate::sum::Neumaier;

/// Largest sieve limit accepted by [`build_tables`].
pub const SIEVE_CEILING: u64 = 100_000_000;

/// Above this limit only primes are stored; μ, Λ and Ω are then computed
/// by trial division on demand.
pub const DENSE_LIMIT: u64 = 10_000_000;

/// Sieved primes plus μ, Λ, Ω and largest prime factor up to `limit`.
#[derive(Clone)]
pub struct ArithTables {
    limit: u64,
    primes: Vec<u32>,
    dense: Option<Dense>,
}

#[derive(Clone)]
struct Dense {
    spf: Vec<u32>,
    mu: Vec<i8>,
    omega: Vec<u8>,
}

impl std::fmt::Debug for ArithTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArithTables")
            .field("limit", &self.limit)
            .field("primes", &self.primes.len())
            .field("dense", &self.dense.is_some())
            .finish()
    }
}

/// Sieve up to `limit`, which must lie in `[2, SIEVE_CEILING]`.
pub fn build_tables(limit: u64) -> Result<ArithTables> {
    check_limit(limit)?;
    if limit <= DENSE_LIMIT {
        let s = sieve::linear_sieve(limit as usize);
        Ok(ArithTables {
            limit,
            primes: s.primes,
            dense: Some(Dense {
                spf: s.spf,
                mu: s.mu,
                omega: s.omega,
            }),
        })
    } else {
        Ok(ArithTables {
            limit,
            primes: segmented_primes(limit),
            dense: None,
        })
    }
}

fn check_limit(limit: u64) -> Result<()> {
    if !(2..=SIEVE_CEILING).contains(&limit) {
        return Err(Error::SieveLimit {
            limit,
            ceiling: SIEVE_CEILING,
        });
    }
    Ok(())
}

impl ArithTables {
    pub fn build(limit: u64) -> Result<Self> {
        build_tables(limit)
    }

    /// Tables from a precomputed prime list (e.g. a cache file).
    pub(crate) fn from_primes(limit: u64, primes: Vec<u32>) -> Result<Self> {
        check_limit(limit)?;
        if limit <= DENSE_LIMIT {
            return build_tables(limit);
        }
        Ok(Self {
            limit,
            primes,
            dense: None,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `p ≤ x`.
    pub fn primes_upto(&self, x: f64) -> &[u32] {
        let k = self.primes.partition_point(|&p| p as f64 <= x);
        &self.primes[..k]
    }

    /// Primes `p` with `lo < p ≤ hi`.
    pub fn primes_between(&self, lo: f64, hi: f64) -> &[u32] {
        let a = self.primes.partition_point(|&p| p as f64 <= lo);
        let b = self.primes.partition_point(|&p| p as f64 <= hi);
        &self.primes[a..b.max(a)]
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// Prime factorization `[(p, e)]` with ascending `p`. Requires `1 ≤ n ≤ limit`.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit, "n = {n} outside [1, {}]", self.limit);
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        let mut m = n;
        if let Some(d) = &self.dense {
            while m > 1 {
                let p = d.spf[m as usize] as u64;
                push(p, &mut out);
                m /= p;
            }
            return out;
        }
        for &p in &self.primes {
            let p = p as u64;
            if p * p > m {
                break;
            }
            while m % p == 0 {
                push(p, &mut out);
                m /= p;
            }
        }
        if m > 1 {
            push(m, &mut out);
        }
        out
    }

    /// Möbius function.
    pub fn mu(&self, n: u64) -> i8 {
        if let Some(d) = &self.dense {
            assert!(n >= 1 && n <= self.limit);
            return d.mu[n as usize];
        }
        let f = self.factorize(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Number of prime factors counted with multiplicity.
    pub fn omega(&self, n: u64) -> u32 {
        if let Some(d) = &self.dense {
            assert!(n >= 1 && n <= self.limit);
            return d.omega[n as usize] as u32;
        }
        self.factorize(n).iter().map(|&(_, e)| e).sum()
    }

    /// Von Mangoldt function: `log p` if `n = p^k`, else 0.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        if n == 1 {
            return 0.0;
        }
        let f = self.factorize(n);
        if f.len() == 1 {
            (f[0].0 as f64).ln()
        } else {
            0.0
        }
    }

    /// Largest prime factor, with the convention `P(1) = 1`.
    pub fn largest_prime_factor(&self, n: u64) -> u64 {
        self.factorize(n).last().map_or(1, |&(p, _)| p)
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 2.0) {
            return Err(invalid(format!("prime sum needs x ≥ 2, got {x}")));
        }
        if x.floor() > self.limit as f64 {
            return Err(Error::BeyondSieve {
                what: "prime sum bound",
                value: x,
                limit: self.limit,
                required: x.floor() as u64,
            });
        }
        Ok(())
    }

    /// `Σ_{p≤x} 1/p`.
    pub fn mertens_sum(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self
            .primes_upto(x)
            .iter()
            .map(|&p| 1.0 / p as f64)
            .collect::<Neumaier>()
            .value())
    }

    /// `Σ_{p≤x} cos(delta·log p)/p`.
    pub fn cosine_prime_sum(&self, x: f64, delta: f64) -> Result<f64> {
        self.check_x(x)?;
        if !(delta >= 0.0) {
            return Err(invalid(format!("delta must be ≥ 0, got {delta}")));
        }
        Ok(self
            .primes_upto(x)
            .iter()
            .map(|&p| (delta * (p as f64).ln()).cos() / p as f64)
            .collect::<Neumaier>()
            .value())
    }

    /// `Σ_{p≤x} cos(delta·log p)·p^{-exponent}`.
    pub fn weighted_prime_sum(&self, x: f64, exponent: f64, delta: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self
            .primes_upto(x)
            .iter()
            .map(|&p| {
                let lp = (p as f64).ln();
                (delta * lp).cos() * (-exponent * lp).exp()
            })
            .collect::<Neumaier>()
            .value())
    }

    /// The indicator `a(n)` of the mollifier support.
    pub fn mollifier_coeff(&self, n: u64, shape: &MollifierShape) -> u8 {
        let mut low = 0u32;
        let mut high = 0u32;
        for (p, e) in self.factorize(n) {
            let p = p as f64;
            if p > shape.x {
                return 0;
            }
            if p <= shape.y {
                low += e;
            } else {
                high += e;
            }
        }
        u8::from(low as f64 <= shape.low_budget && high as f64 <= shape.high_budget)
    }
}

/// Support constraints of the mollifier coefficients `a(n)`.
///
/// Every prime factor must be `≤ x`; at most `low_budget` of them (with
/// multiplicity) may lie in `[2, y]` and at most `high_budget` in `(y, x]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierShape {
    pub x: f64,
    pub y: f64,
    pub low_budget: f64,
    pub high_budget: f64,
}
