//! Monte Carlo over `τ ~ U[T, 2T]` and the per-sample proposition chain.

mod gaussian;
mod moments;

pub use gaussian::{CovKind, GaussianSpec};
pub use moments::{
    diagonal_by_multisets, empirical_moment, gaussian_moment, moment_oracle_exact, MomentEstimate, MomentOracle,
    MomentSource, ORACLE_TERM_LIMIT,
};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::ArithTables;
use crate::dirichlet::{DirichletPolynomial, Mollifier, PolyLabel, PreparedMollifier, PreparedPoly};
use crate::error::{invalid, Error, Result};
use crate::params::ExperimentParams;
use crate::parallel::Parallelism;
use crate::zeta::{guarded_log, ZetaBackend};

/// Minimum number of unexcluded samples for [`zeta_mollifier_deviation`].
pub const MIN_DEVIATION_SAMPLES: usize = 1000;

/// Generator for sample `i`: stream `i` of the ChaCha8 key derived from `seed`.
pub fn sample_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// First uniform draw on `[0, 1)` of stream `i`.
pub fn uniform_at(seed: u64, i: u64) -> f64 {
    sample_rng(seed, i).random()
}

/// `τ_i = T + T·U_i` with `U_i = uniform_at(seed, i)`.
pub fn sample_tau_at(seed: u64, i: u64, t: f64) -> f64 {
    t + t * uniform_at(seed, i)
}

pub fn sample_tau(seed: u64, count: usize, t: f64) -> Vec<f64> {
    (0..count as u64).map(|i| sample_tau_at(seed, i, t)).collect()
}

/// Every random vector of the chain at one `τ`.
///
/// Scaled columns are divided by `𝔰` except `p1n`, which uses `𝔰̃`.
/// Primed fields are evaluated at `τ + h′`.
#[derive(Clone, Debug, Serialize)]
pub struct SampleChain {
    pub tau: f64,
    pub v: f64,
    pub vp: f64,
    pub wv: f64,
    pub wp: f64,
    pub xv: f64,
    pub xp: f64,
    pub yv: f64,
    pub yp: f64,
    pub pfull: f64,
    pub pfullp: f64,
    pub p1n: f64,
    pub p1np: f64,
    pub p1raw: f64,
    pub p1rawp: f64,
    pub p2raw: f64,
    pub p2rawp: f64,
    pub zm: Complex64,
    pub zmp: Complex64,
    /// Some `|ζ|` at this `τ` fell below the zero guard.
    pub excluded: bool,
    /// `|P₁(s₀)| ≤ log log T` and `|P₂(s₀)| ≤ log log log T`.
    pub good: bool,
    pub goodp: bool,
}

/// Prime sums only; enough for moments and tails.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimeSample {
    pub tau: f64,
    pub p1raw: f64,
    pub p1rawp: f64,
    pub p2raw: f64,
    pub p2rawp: f64,
}

/// Which P₁ pair a moment is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P1Variant {
    Unscaled,
    Scaled,
}

/// Which prime sum a tail fraction is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailWhich {
    P1,
    P2,
}

pub trait HasPrimeSums {
    fn p1_pair(&self) -> [f64; 2];
    fn p2_pair(&self) -> [f64; 2];
}

impl HasPrimeSums for SampleChain {
    fn p1_pair(&self) -> [f64; 2] {
        [self.p1raw, self.p1rawp]
    }
    fn p2_pair(&self) -> [f64; 2] {
        [self.p2raw, self.p2rawp]
    }
}

impl HasPrimeSums for PrimeSample {
    fn p1_pair(&self) -> [f64; 2] {
        [self.p1raw, self.p1rawp]
    }
    fn p2_pair(&self) -> [f64; 2] {
        [self.p2raw, self.p2rawp]
    }
}

/// Polynomials of the chain, prepared at `σ₀`.
#[derive(Clone, Debug)]
pub struct ChainPolys {
    pub mollifier: PreparedMollifier,
    pub vonmangoldt: PreparedPoly,
    pub prime_low: PreparedPoly,
    pub prime_high: PreparedPoly,
}

impl ChainPolys {
    pub fn build(params: &ExperimentParams, tables: &ArithTables) -> Result<Self> {
        let s = params.sigma0;
        let poly = |l| DirichletPolynomial::build(l, params, tables).map(|p| p.prepare(s));
        Ok(Self {
            mollifier: Mollifier::from_params(params, tables)?.prepare(s),
            vonmangoldt: poly(PolyLabel::Vonmangoldt)?,
            prime_low: poly(PolyLabel::PrimeLow)?,
            prime_high: poly(PolyLabel::PrimeHigh)?,
        })
    }

    /// Prime sums only (for the light sampler).
    pub fn primes_only(params: &ExperimentParams, tables: &ArithTables) -> Result<(PreparedPoly, PreparedPoly)> {
        let s = params.sigma0;
        Ok((
            DirichletPolynomial::build(PolyLabel::PrimeLow, params, tables)?.prepare(s),
            DirichletPolynomial::build(PolyLabel::PrimeHigh, params, tables)?.prepare(s),
        ))
    }
}

pub fn compute_chain(
    tau: f64,
    params: &ExperimentParams,
    polys: &ChainPolys,
    backend: &ZetaBackend,
) -> Result<SampleChain> {
    let t = tau + params.h;
    let tp = tau + params.hprime;
    let sigmas = [0.5, params.sigma0];
    let z = backend.zeta_multi(&sigmas, t)?;
    let zp = backend.zeta_multi(&sigmas, tp)?;
    let (lv, lw, lvp, lwp) = (guarded_log(z[0]), guarded_log(z[1]), guarded_log(zp[0]), guarded_log(zp[1]));
    let m = polys.mollifier.eval(t);
    let mp = polys.mollifier.eval(tp);
    if m == Complex64::new(0.0, 0.0) || mp == Complex64::new(0.0, 0.0) {
        return Err(Error::Numeric(format!("mollifier vanishes at tau = {tau}")));
    }
    let s = params.s_norm;
    let st = params.s_tilde;
    let p1raw = polys.prime_low.eval_real(t);
    let p1rawp = polys.prime_low.eval_real(tp);
    let p2raw = polys.prime_high.eval_real(t);
    let p2rawp = polys.prime_high.eval_real(tp);
    let good = |p1: f64, p2: f64| p1.abs() <= params.loglog_t && p2.abs() <= params.logloglog_t;
    Ok(SampleChain {
        tau,
        v: lv.log_abs / s,
        vp: lvp.log_abs / s,
        wv: lw.log_abs / s,
        wp: lwp.log_abs / s,
        xv: -m.norm().ln() / s,
        xp: -mp.norm().ln() / s,
        yv: polys.vonmangoldt.eval_real(t) / s,
        yp: polys.vonmangoldt.eval_real(tp) / s,
        pfull: (p1raw + p2raw) / s,
        pfullp: (p1rawp + p2rawp) / s,
        p1n: p1raw / st,
        p1np: p1rawp / st,
        p1raw,
        p1rawp,
        p2raw,
        p2rawp,
        zm: z[1] * m,
        zmp: zp[1] * mp,
        excluded: lv.near_zero || lw.near_zero || lvp.near_zero || lwp.near_zero,
        good: good(p1raw, p2raw),
        goodp: good(p1rawp, p2rawp),
    })
}

/// Chains for `τ_0 … τ_{n−1}`, in index order.
pub fn run_chains(
    params: &ExperimentParams,
    polys: &ChainPolys,
    backend: &ZetaBackend,
    seed: u64,
    n: usize,
    par: &Parallelism,
) -> Result<Vec<SampleChain>> {
    par.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|i| compute_chain(sample_tau_at(seed, i, params.t), params, polys, backend))
            .collect()
    })
}

/// Prime sums for `τ_0 … τ_{n−1}`, in index order.
pub fn run_prime_samples(
    params: &ExperimentParams,
    tables: &ArithTables,
    seed: u64,
    n: usize,
    par: &Parallelism,
) -> Result<Vec<PrimeSample>> {
    let (low, high) = ChainPolys::primes_only(params, tables)?;
    Ok(par.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let tau = sample_tau_at(seed, i, params.t);
                let t = tau + params.h;
                let tp = tau + params.hprime;
                PrimeSample {
                    tau,
                    p1raw: low.eval_real(t),
                    p1rawp: low.eval_real(tp),
                    p2raw: high.eval_real(t),
                    p2rawp: high.eval_real(tp),
                }
            })
            .collect()
    }))
}

/// Fraction of samples with `|P(s₀)| > threshold`.
pub fn tail_fraction<S: HasPrimeSums>(samples: &[S], which: TailWhich, threshold: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("tail_fraction".into()));
    }
    let hits = samples
        .iter()
        .filter(|s| {
            let v = match which {
                TailWhich::P1 => s.p1_pair()[0],
                TailWhich::P2 => s.p2_pair()[0],
            };
            v.abs() > threshold
        })
        .count();
    Ok(hits as f64 / samples.len() as f64)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MollifierDeviation {
    /// Mean of `|ζ(s₀)M(s₀) − 1|²`.
    pub mean: f64,
    /// Same at `s₀′`.
    pub mean_p: f64,
    pub used: usize,
    pub excluded: usize,
}

pub fn zeta_mollifier_deviation(samples: &[SampleChain]) -> Result<MollifierDeviation> {
    let kept: Vec<&SampleChain> = samples.iter().filter(|s| !s.excluded).collect();
    if kept.is_empty() {
        return Err(Error::EmptySamples(
            "no unexcluded samples for the mollifier deviation".into(),
        ));
    }
    if kept.len() < MIN_DEVIATION_SAMPLES {
        return Err(invalid(format!(
            "mollifier deviation needs at least {MIN_DEVIATION_SAMPLES} unexcluded samples, got {}",
            kept.len()
        )));
    }
    let n = kept.len() as f64;
    let mean = kept.iter().map(|s| (s.zm - 1.0).norm_sqr()).sum::<f64>() / n;
    let mean_p = kept.iter().map(|s| (s.zmp - 1.0).norm_sqr()).sum::<f64>() / n;
    Ok(MollifierDeviation {
        mean,
        mean_p,
        used: kept.len(),
        excluded: samples.len() - kept.len(),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChainSummary {
    pub n: usize,
    pub excluded: usize,
    pub exclusion_rate: f64,
    pub good_fraction: f64,
}

pub fn summarize(samples: &[SampleChain]) -> ChainSummary {
    let n = samples.len();
    let excluded = samples.iter().filter(|s| s.excluded).count();
    let good = samples.iter().filter(|s| s.good && s.goodp).count();
    ChainSummary {
        n,
        excluded,
        exclusion_rate: excluded as f64 / n.max(1) as f64,
        good_fraction: good as f64 / n.max(1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;
    use crate::params::{derive, Overrides};
    use std::sync::OnceLock;

    fn tables() -> &'static ArithTables {
        static T: OnceLock<ArithTables> = OnceLock::new();
        T.get_or_init(|| build_tables(100_000).unwrap())
    }

    #[test]
    fn tau_deterministic_and_in_range() {
        let a = sample_tau(42, 1000, 1e6);
        assert_eq!(a, sample_tau(42, 1000, 1e6));
        assert_ne!(a, sample_tau(43, 1000, 1e6));
        assert!(a.iter().all(|&x| (1e6..=2e6).contains(&x)));
        assert_eq!(sample_tau(42, 10, 1e6)[..], a[..10]);
    }

    #[test]
    fn tau_mean() {
        let t = 1e5;
        let n = 100_000;
        let a = sample_tau(3, n, t);
        let mean = a.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.5 * t).abs() <= 3.0 * (t / 12f64.sqrt()) / (n as f64).sqrt());
    }

    fn params(t: f64, ov: Overrides) -> ExperimentParams {
        derive(t, 1.0, 3.0, 0.5, 0.0, tables())
            .unwrap()
            .with_overrides(&ov, tables())
            .unwrap()
    }

    #[test]
    fn chain_identities() {
        let p = params(1e6, Overrides::default());
        let polys = ChainPolys::build(&p, tables()).unwrap();
        let par = Parallelism::with_workers(2).unwrap();
        let chains = run_chains(&p, &polys, &ZetaBackend::afe(), 5, 200, &par).unwrap();
        for c in &chains {
            let lhs = c.pfull * p.s_norm;
            let rhs = c.p1n * p.s_tilde + c.p2raw;
            assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
            let m = polys.mollifier.eval(c.tau + p.h);
            assert_eq!(c.xv, -m.norm().ln() / p.s_norm);
            assert_eq!(c.good, c.p1raw.abs() <= p.loglog_t && c.p2raw.abs() <= p.logloglog_t);
        }
        let seq = run_chains(&p, &polys, &ZetaBackend::afe(), 5, 200, &Parallelism::sequential()).unwrap();
        for (a, b) in chains.iter().zip(&seq) {
            assert_eq!(a.v.to_bits(), b.v.to_bits());
            assert_eq!(a.zm, b.zm);
        }
    }

    #[test]
    fn on_axis_mode_identifies_v_and_w() {
        let p = params(1e5, Overrides { w: Some(0.0), ..Default::default() });
        let polys = ChainPolys::build(&p, tables()).unwrap();
        let chains = run_chains(&p, &polys, &ZetaBackend::afe(), 9, 50, &Parallelism::sequential()).unwrap();
        for c in &chains {
            assert_eq!(c.v.to_bits(), c.wv.to_bits());
            assert_eq!(c.vp.to_bits(), c.wp.to_bits());
        }
    }

    #[test]
    fn deviation_with_trivial_mollifier_at_sigma_two() {
        // M ≡ 1 (L_M = 1) and σ₀ = 2: E|ζ(2+iτ) − 1|² = Σ_{n≥2} n^{−4} + O(1/T).
        let t = 1e5;
        let p0 = params(t, Overrides::default());
        let p = params(
            t,
            Overrides { w: Some(1.5 * p0.log_t), l_m: Some(1), ..Default::default() },
        );
        assert_eq!(p.sigma0, 2.0);
        let polys = ChainPolys::build(&p, tables()).unwrap();
        let chains = run_chains(&p, &polys, &ZetaBackend::afe(), 1, 20_000, &Parallelism::auto()).unwrap();
        let d = zeta_mollifier_deviation(&chains).unwrap();
        let want = std::f64::consts::PI.powi(4) / 90.0 - 1.0;
        assert!((want - 0.0823).abs() < 1e-4);
        let var: f64 = chains
            .iter()
            .map(|c| ((c.zm - 1.0).norm_sqr() - d.mean).powi(2))
            .sum::<f64>()
            / chains.len() as f64;
        let se = (var / chains.len() as f64).sqrt();
        assert!((d.mean - want).abs() < 4.0 * se + 1e-3, "{} vs {want} (se {se})", d.mean);
    }

    #[test]
    fn deviation_errors() {
        assert!(matches!(zeta_mollifier_deviation(&[]), Err(Error::EmptySamples(_))));
        let p = params(1e5, Overrides::default());
        let polys = ChainPolys::build(&p, tables()).unwrap();
        let few = run_chains(&p, &polys, &ZetaBackend::afe(), 1, 10, &Parallelism::sequential()).unwrap();
        assert!(zeta_mollifier_deviation(&few).is_err());
    }

    #[test]
    fn tail_fraction_at_zero_threshold() {
        let p = params(1e6, Overrides::default());
        let s = run_prime_samples(&p, tables(), 2, 500, &Parallelism::sequential()).unwrap();
        assert_eq!(tail_fraction(&s, TailWhich::P1, 0.0).unwrap(), 1.0);
        assert_eq!(tail_fraction(&s, TailWhich::P2, 0.0).unwrap(), 1.0);
        assert!(tail_fraction::<PrimeSample>(&[], TailWhich::P1, 0.0).is_err());
    }

    #[test]
    fn light_sampler_matches_chain() {
        let p = params(1e6, Overrides::default());
        let polys = ChainPolys::build(&p, tables()).unwrap();
        let chains = run_chains(&p, &polys, &ZetaBackend::afe(), 8, 30, &Parallelism::sequential()).unwrap();
        let light = run_prime_samples(&p, tables(), 8, 30, &Parallelism::sequential()).unwrap();
        for (c, l) in chains.iter().zip(&light) {
            assert_eq!(c.p1_pair(), l.p1_pair());
            assert_eq!(c.p2_pair(), l.p2_pair());
        }
    }
}
