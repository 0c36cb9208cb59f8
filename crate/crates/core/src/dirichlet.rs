//! Dirichlet polynomials `Σ c(n) n^{-s}` and the mollifier.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ArithTables;
use crate::error::{Error, Result};
use crate::parallel::Parallelism;
use crate::params::ExperimentParams;
use crate::sum::ComplexNeumaier;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyLabel {
    Mollifier,
    Vonmangoldt,
    PrimeFull,
    PrimeLow,
    PrimeHigh,
}

impl PolyLabel {
    pub const ALL: [PolyLabel; 5] = [
        PolyLabel::Mollifier,
        PolyLabel::Vonmangoldt,
        PolyLabel::PrimeFull,
        PolyLabel::PrimeLow,
        PolyLabel::PrimeHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolyLabel::Mollifier => "mollifier",
            PolyLabel::Vonmangoldt => "vonmangoldt",
            PolyLabel::PrimeFull => "prime_full",
            PolyLabel::PrimeLow => "prime_low",
            PolyLabel::PrimeHigh => "prime_high",
        }
    }
}

impl std::str::FromStr for PolyLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PolyLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown polynomial label {s:?}")))
    }
}

/// Sparse Dirichlet polynomial. Only nonzero coefficients are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPolynomial {
    pub label: PolyLabel,
    support: Vec<u64>,
    coeffs: Vec<f64>,
}

impl DirichletPolynomial {
    /// Polynomial from explicit `(n, c(n))` pairs; zero coefficients are dropped.
    pub fn from_terms(label: PolyLabel, terms: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut terms: Vec<(u64, f64)> = terms.into_iter().filter(|&(_, c)| c != 0.0).collect();
        terms.sort_by_key(|&(n, _)| n);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("duplicate support entries"));
        }
        if terms.first().is_some_and(|&(n, _)| n == 0) {
            return Err(Error::invalid("support must start at n = 1"));
        }
        let (support, coeffs) = terms.into_iter().unzip();
        Ok(Self {
            label,
            support,
            coeffs,
        })
    }

    /// Build one of the five labelled polynomials.
    ///
    /// The mollifier here is the sparse form with support `n ≤ L_M`, where
    /// `L_M` defaults to `X`; see [`Mollifier`] for the untruncated form.
    pub fn build(label: PolyLabel, params: &ExperimentParams, tables: &ArithTables) -> Result<Self> {
        let need = |what: &'static str, value: f64| -> Result<()> {
            if value.floor() > tables.limit() as f64 {
                Err(Error::BeyondSieve {
                    what,
                    value,
                    limit: tables.limit(),
                    required: value.floor() as u64,
                })
            } else {
                Ok(())
            }
        };
        let ones = |ps: &[u32]| ps.iter().map(|&p| (p as u64, 1.0)).collect::<Vec<_>>();
        let terms = match label {
            PolyLabel::Mollifier => {
                let l_m = params.l_m.unwrap_or(params.x.floor() as u64);
                need("L_M", l_m as f64)?;
                let shape = params.mollifier_shape();
                (1..=l_m)
                    .filter_map(|n| {
                        let mu = tables.mu(n);
                        (mu != 0 && tables.mollifier_coeff(n, &shape) == 1)
                            .then_some((n, mu as f64))
                    })
                    .collect()
            }
            PolyLabel::Vonmangoldt => {
                need("X", params.x)?;
                (2..=params.x.floor() as u64)
                    .filter_map(|n| {
                        let lam = tables.von_mangoldt(n);
                        (lam > 0.0).then(|| (n, lam / (n as f64).ln()))
                    })
                    .collect()
            }
            PolyLabel::PrimeFull => {
                need("X", params.x)?;
                ones(tables.primes_upto(params.x))
            }
            PolyLabel::PrimeLow => {
                need("Y", params.y)?;
                ones(tables.primes_upto(params.y))
            }
            PolyLabel::PrimeHigh => {
                need("X", params.x)?;
                ones(tables.primes_between(params.y, params.x))
            }
        };
        Self::from_terms(label, terms)
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `c(n)`, zero off the support.
    pub fn coeff(&self, n: u64) -> f64 {
        self.support
            .binary_search(&n)
            .map_or(0.0, |i| self.coeffs[i])
    }

    /// Precompute `log n` and `c(n) n^{-σ}` for evaluation along a vertical line.
    pub fn prepare(&self, sigma: f64) -> PreparedPoly {
        let logs: Vec<f64> = self.support.iter().map(|&n| (n as f64).ln()).collect();
        let amps = logs
            .iter()
            .zip(&self.coeffs)
            .map(|(&l, &c)| c * (-sigma * l).exp())
            .collect();
        PreparedPoly { sigma, logs, amps }
    }

    pub fn eval(&self, sigma: f64, t: f64) -> Complex64 {
        self.prepare(sigma).eval(t)
    }

    pub fn eval_real(&self, sigma: f64, t: f64) -> f64 {
        self.prepare(sigma).eval_real(t)
    }

    pub fn batch_eval(&self, sigma: f64, ts: &[f64], par: &Parallelism) -> Vec<Complex64> {
        self.prepare(sigma).batch_eval(ts, par)
    }

    /// CSV dump with header `n,c`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "n,c")?;
        for (n, c) in self.support.iter().zip(&self.coeffs) {
            writeln!(w, "{n},{c:.16e}")?;
        }
        Ok(())
    }
}

/// A polynomial specialised to a fixed `σ`.
#[derive(Clone, Debug)]
pub struct PreparedPoly {
    pub sigma: f64,
    logs: Vec<f64>,
    amps: Vec<f64>,
}

impl PreparedPoly {
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for (&l, &a) in self.logs.iter().zip(&self.amps) {
            let (s, c) = (t * l).sin_cos();
            acc.add_parts(a * c, -a * s);
        }
        acc.value()
    }

    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = crate::sum::Neumaier::new();
        for (&l, &a) in self.logs.iter().zip(&self.amps) {
            acc.add(a * (t * l).cos());
        }
        acc.value()
    }

    /// Evaluate at every `t`; output order matches input order.
    pub fn batch_eval(&self, ts: &[f64], par: &Parallelism) -> Vec<Complex64> {
        par.install(|| ts.par_iter().map(|&t| self.eval(t)).collect())
    }
}

/// The mollifier `M(s) = Σ μ(n) a(n) n^{-s}`.
///
/// `Full` sums over every admissible `n`. Since `μ(n) a(n)` vanishes off
/// squarefree `n`, this sum factors as `M_low · M_high` with
/// `M_low = Σ_{j ≤ B₁} (−1)^j e_j(p^{-s} : p ≤ Y)`, `e_j` the elementary
/// symmetric polynomials, and likewise for primes in `(Y, X]` with budget
/// `B₂`. `Truncated` is the sparse polynomial on `n ≤ L_M`.
#[derive(Clone, Debug)]
pub enum Mollifier {
    Full {
        low: Vec<u32>,
        high: Vec<u32>,
        low_budget: usize,
        high_budget: usize,
    },
    Truncated(DirichletPolynomial),
}

impl Mollifier {
    pub fn from_params(params: &ExperimentParams, tables: &ArithTables) -> Result<Self> {
        if params.l_m.is_some() {
            return Ok(Mollifier::Truncated(DirichletPolynomial::build(
                PolyLabel::Mollifier,
                params,
                tables,
            )?));
        }
        if params.x.floor() > tables.limit() as f64 {
            return Err(Error::BeyondSieve {
                what: "X",
                value: params.x,
                limit: tables.limit(),
                required: params.x.floor() as u64,
            });
        }
        let shape = params.mollifier_shape();
        Ok(Mollifier::Full {
            low: tables.primes_upto(shape.y).to_vec(),
            high: tables.primes_between(shape.y, shape.x).to_vec(),
            low_budget: shape.low_budget.floor() as usize,
            high_budget: shape.high_budget.floor() as usize,
        })
    }

    pub fn prepare(&self, sigma: f64) -> PreparedMollifier {
        match self {
            Mollifier::Full {
                low,
                high,
                low_budget,
                high_budget,
            } => {
                let side = |ps: &[u32], budget: usize| FactorSide {
                    logs: ps.iter().map(|&p| (p as f64).ln()).collect(),
                    amps: ps.iter().map(|&p| (p as f64).powf(-sigma)).collect(),
                    budget,
                };
                PreparedMollifier::Full(side(low, *low_budget), side(high, *high_budget))
            }
            Mollifier::Truncated(p) => PreparedMollifier::Truncated(p.prepare(sigma)),
        }
    }

    pub fn eval(&self, sigma: f64, t: f64) -> Complex64 {
        self.prepare(sigma).eval(t)
    }
}

#[derive(Clone, Debug)]
pub enum PreparedMollifier {
    Full(FactorSide, FactorSide),
    Truncated(PreparedPoly),
}

#[derive(Clone, Debug)]
pub struct FactorSide {
    logs: Vec<f64>,
    amps: Vec<f64>,
    budget: usize,
}

impl FactorSide {
    fn eval(&self, t: f64) -> Complex64 {
        let zs = self
            .logs
            .iter()
            .zip(&self.amps)
            .map(|(&l, &a)| -Complex64::from_polar(a, -t * l));
        if self.budget >= self.logs.len() {
            zs.fold(Complex64::new(1.0, 0.0), |acc, z| acc * (1.0 + z))
        } else {
            truncated_elementary_sum(zs, self.budget)
        }
    }
}

/// `Σ_{j ≤ budget} e_j(z)`.
fn truncated_elementary_sum(zs: impl Iterator<Item = Complex64>, budget: usize) -> Complex64 {
    let mut e = vec![Complex64::new(0.0, 0.0); budget + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for z in zs {
        for j in (1..=budget).rev() {
            let prev = e[j - 1];
            e[j] += prev * z;
        }
    }
    e.iter().sum()
}

impl PreparedMollifier {
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            PreparedMollifier::Full(lo, hi) => lo.eval(t) * hi.eval(t),
            PreparedMollifier::Truncated(p) => p.eval(t),
        }
    }
}
