//! The distance ladder from `log|ζ|` down to the Gaussian limit.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::ArithTables;
use crate::error::{invalid, Result};
use crate::mc::{run_chains, summarize, ChainPolys, GaussianSpec, SampleChain};
use crate::metrics::{kolmogorov_1d, quad::norm_cdf, DistanceReport, FamilyConfig, Source, TestFunctionFamily};
use crate::parallel::Parallelism;
use crate::params::{ExperimentParams, Overrides, ParamInputs};
use crate::zeta::ZetaBackend;

/// Fewest samples accepted by [`run_ladder`].
pub const MIN_LADDER_SAMPLES: usize = 1000;

pub const LINK_NAMES: [&str; 7] = [
    "V-W", "W-X", "X-Y", "Y-P", "P-P1", "P1-Ztilde", "Ztilde-Z",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub family: FamilyConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderResult {
    pub t: f64,
    pub n_samples: usize,
    /// Samples kept after dropping those near a zero of ζ.
    pub n_used: usize,
    pub links: [DistanceReport; 7],
    /// `V`-pair against `N(0, C)`.
    pub total: DistanceReport,
    /// Orders of the seven link bounds with implied constant 1.
    pub predicted_orders: [f64; 7],
    /// Kolmogorov distances of the two `P₁/𝔰̃` marginals from `Φ`.
    pub p1_kolmogorov: [f64; 2],
    pub good_fraction: f64,
    pub ctilde: GaussianSpec,
    pub family_size: usize,
}

impl LadderResult {
    pub fn link_estimates(&self) -> [f64; 7] {
        self.links.map(|r| r.estimate)
    }

    pub fn link_sum(&self) -> f64 {
        self.links.iter().map(|r| r.estimate).sum()
    }
}

/// `(log log log T)²/√ll`, `1/√ll`, `ll^{−80}`, `1/√ll`, `√lll/√ll`,
/// `1/√ll`, `1/ll` with `ll = log log T`, `lll = log log log T`.
pub fn predicted_orders(params: &ExperimentParams) -> [f64; 7] {
    let ll = params.loglog_t;
    let lll = params.logloglog_t;
    let r = 1.0 / ll.sqrt();
    [lll * lll * r, r, ll.powf(-80.0), r, lll.sqrt() * r, r, 1.0 / ll]
}

fn pairs(samples: &[&SampleChain], f: impl Fn(&SampleChain) -> [f64; 2] + Sync) -> Vec<[f64; 2]> {
    samples.par_iter().map(|s| f(s)).collect()
}

/// Distances along the chain on one shared sample of `τ` and one shared family.
///
/// Every source's expectations are computed once, so `total ≤ Σ links`
/// holds exactly.
pub fn run_ladder(
    params: &ExperimentParams,
    tables: &ArithTables,
    backend: &ZetaBackend,
    cfg: &LadderConfig,
    par: &Parallelism,
) -> Result<LadderResult> {
    let LadderConfig { n_samples, seed, family } = *cfg;
    if n_samples < MIN_LADDER_SAMPLES {
        return Err(invalid(format!(
            "ladder needs at least {MIN_LADDER_SAMPLES} samples, got {n_samples}"
        )));
    }
    let polys = ChainPolys::build(params, tables)?;
    let chains = run_chains(params, &polys, backend, seed, n_samples, par)?;
    let summary = summarize(&chains);
    let kept: Vec<&SampleChain> = chains.iter().filter(|s| !s.excluded).collect();
    if kept.len() < crate::metrics::MIN_DUDLEY_POINTS {
        return Err(crate::error::Error::EmptySamples(format!(
            "only {} samples away from zeros of zeta",
            kept.len()
        )));
    }
    let cols: Vec<Vec<[f64; 2]>> = par.install(|| {
        vec![
            pairs(&kept, |s| [s.v, s.vp]),
            pairs(&kept, |s| [s.wv, s.wp]),
            pairs(&kept, |s| [s.xv, s.xp]),
            pairs(&kept, |s| [s.yv, s.yp]),
            pairs(&kept, |s| [s.pfull, s.pfullp]),
            pairs(&kept, |s| [s.p1n, s.p1np]),
        ]
    });
    let ctilde = GaussianSpec::ctilde(params, tables)?;
    let c = GaussianSpec::paper_c(params.alpha)?;
    let mut sources: Vec<Source<'_>> = cols.iter().map(|c| Source::Samples(c)).collect();
    sources.push(Source::Gaussian(&ctilde));
    sources.push(Source::Gaussian(&c));
    let fam = TestFunctionFamily::for_sources(family, &sources)?;
    let exps = sources
        .iter()
        .map(|s| fam.expectations(s, par))
        .collect::<Result<Vec<_>>>()?;
    let links: [DistanceReport; 7] = std::array::from_fn(|i| fam.distance(&exps[i], &exps[i + 1]));
    let total = fam.distance(&exps[0], &exps[7]);
    let p1 = &cols[5];
    let marg = |j: usize| -> Result<f64> {
        let xs: Vec<f64> = p1.iter().map(|x| x[j]).collect();
        kolmogorov_1d(&xs, norm_cdf)
    };
    Ok(LadderResult {
        t: params.t,
        n_samples,
        n_used: kept.len(),
        links,
        total,
        predicted_orders: predicted_orders(params),
        p1_kolmogorov: [marg(0)?, marg(1)?],
        good_fraction: summary.good_fraction,
        ctilde,
        family_size: fam.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RatePoint {
    pub t: f64,
    pub n_samples: usize,
    pub total: f64,
    /// `(log log log T)²/√(log log T)`.
    pub rate: f64,
    pub ratio: f64,
    pub ladder: LadderResult,
}

/// Sieve limit covering every `T` of the ladder.
pub fn rate_curve_limit(t_list: &[f64], template: &ParamInputs, ov: &Overrides) -> u64 {
    t_list
        .iter()
        .map(|&t| ExperimentParams::required_limit_for(&ParamInputs { t, ..template.clone() }, ov))
        .max()
        .unwrap_or(2)
}

/// Total ladder distance and its ratio to the theorem's rate at each `T`.
pub fn rate_curve(
    t_list: &[f64],
    template: &ParamInputs,
    ov: &Overrides,
    tables: &ArithTables,
    cfg: &LadderConfig,
    par: &Parallelism,
) -> Result<Vec<RatePoint>> {
    if t_list.is_empty() {
        return Err(invalid("T list is empty"));
    }
    if t_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("T list must be strictly ascending"));
    }
    t_list
        .iter()
        .map(|&t| {
            let params = ExperimentParams::build(&ParamInputs { t, ..template.clone() }, ov, tables)?;
            let backend = ZetaBackend::auto(t);
            let ladder = run_ladder(&params, tables, &backend, cfg, par)?;
            let rate = params.rate();
            Ok(RatePoint {
                t,
                n_samples: cfg.n_samples,
                total: ladder.total.estimate,
                rate,
                ratio: ladder.total.estimate / rate,
                ladder,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
