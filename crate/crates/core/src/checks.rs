//! Numerical checks of the lemmas behind the chain, one verdict each.

use serde::Serialize;

use crate::arith::ArithTables;
use crate::error::Result;
use crate::mc::{
    empirical_moment, moment_oracle_exact, run_chains, run_prime_samples, tail_fraction,
    zeta_mollifier_deviation, ChainPolys, MomentSource, P1Variant, PrimeSample, SampleChain,
    TailWhich,
};
use crate::parallel::Parallelism;
use crate::params::{ExperimentParams, Overrides, ParamInputs};
use crate::zeta::{selberg_mean_value_check, ZetaBackend};

/// Prime cutoffs `Y` at which the covariance slope is read off.
pub const COVARIANCE_CUTOFFS: [f64; 3] = [1e5, 1e6, 1e7];
/// Heights of the mollifier-deviation trend.
pub const DEVIATION_HEIGHTS: [f64; 3] = [1e5, 1e6, 1e7];
/// Largest sample count used per height of the deviation trend.
pub const DEVIATION_SAMPLES: usize = 10_000;
/// `Y` used for the moment comparison.
pub const MOMENT_Y: f64 = 10.0;
pub const MOMENT_SHIFTS: [(f64, f64); 3] = [(1.0, 0.0), (1.0, 1.0), (1.0, -1.0)];
pub const SELBERG_PAIRS: [(u64, u64); 3] = [(1, 1), (2, 1), (3, 2)];
pub const SELBERG_SIGMA: f64 = 0.75;
pub const SELBERG_T: f64 = 1e3;

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct LemmaConfig {
    pub inputs: ParamInputs,
    pub overrides: Overrides,
    pub n_samples: usize,
    pub seed: u64,
}

/// `log T` at which the prime-sum cutoff `exp(log T/(K′ log log T))`
/// equals `y`.
pub fn log_height_for_y(y: f64, kprime: f64) -> f64 {
    let c = kprime * y.ln();
    let mut lt = 3.0 * c;
    // `lt ↦ c·log lt` contracts with factor `1/log lt` near the root.
    for _ in 0..200 {
        let next = c * lt.ln();
        if (next - lt).abs() <= 1e-15 * lt {
            return next;
        }
        lt = next;
    }
    lt
}

/// `Σ_{p≤Y} cos(δ log p)/p / log log T` for each `Y` with `T` the height
/// whose cutoff is `Y` and `δ = (log T)^{−α}`.
pub fn covariance_ratios(tables: &ArithTables, alpha: f64, kprime: f64, ys: &[f64]) -> Result<Vec<f64>> {
    ys.iter()
        .map(|&y| {
            let lt = log_height_for_y(y, kprime);
            Ok(tables.cosine_prime_sum(y, lt.powf(-alpha))? / lt.ln())
        })
        .collect()
}

/// Distances to `alpha` shrink strictly and the last ratio lies in `[0.3, 0.7]`.
pub fn covariance_ok(ratios: &[f64], alpha: f64) -> bool {
    let toward = ratios
        .windows(2)
        .all(|w| (w[1] - alpha).abs() < (w[0] - alpha).abs());
    let last = ratios.last().is_some_and(|r| (0.3..=0.7).contains(r));
    toward && last
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentRow {
    pub k: u32,
    pub u: f64,
    pub uprime: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub oracle: f64,
    pub gaussian: f64,
    pub o_k: f64,
    pub bound: f64,
}

impl MomentRow {
    /// Monte Carlo agrees with the exact average within 3 standard errors.
    pub fn empirical_ok(&self) -> bool {
        (self.empirical - self.oracle).abs() <= 3.0 * self.std_err
    }

    /// Even moments sit within `2|O_k| + Y^{2k}/T` of the Gaussian value.
    pub fn gaussian_ok(&self) -> bool {
        self.k % 2 == 1 || (self.oracle - self.gaussian).abs() <= 2.0 * self.o_k.abs() + self.bound
    }
}

pub fn moment_rows(
    params: &ExperimentParams,
    tables: &ArithTables,
    samples: &[PrimeSample],
    ks: &[u32],
    shifts: &[(f64, f64)],
) -> Result<Vec<MomentRow>> {
    let src = MomentSource {
        variant: P1Variant::Unscaled,
        s_tilde: params.s_tilde,
    };
    let mut rows = Vec::new();
    for &(u, up) in shifts {
        for &k in ks {
            let e = empirical_moment(samples, k, u, up, src)?;
            let o = moment_oracle_exact(params, tables, k, u, up)?;
            rows.push(MomentRow {
                k,
                u,
                uprime: up,
                empirical: e.mean,
                std_err: e.std_err,
                oracle: o.value,
                gaussian: o.gaussian,
                o_k: o.o_k,
                bound: o.bound,
            });
        }
    }
    Ok(rows)
}

/// `|log|M(s₀)⁻¹| − Re 𝒫(s₀)|` over good-event samples, in units of `𝔰`.
pub fn mollifier_gaps(samples: &[SampleChain]) -> Vec<f64> {
    samples
        .iter()
        .filter(|s| s.good && !s.excluded)
        .map(|s| (s.xv - s.yv).abs())
        .collect()
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Sieve limit needed by [`check_lemmas`].
pub fn lemma_sieve_limit(cfg: &LemmaConfig) -> u64 {
    let mut lim = *COVARIANCE_CUTOFFS.last().unwrap() as u64;
    lim = lim.max(ExperimentParams::required_limit_for(&cfg.inputs, &cfg.overrides));
    for t in DEVIATION_HEIGHTS {
        let inputs = ParamInputs { t, ..cfg.inputs.clone() };
        lim = lim.max(ExperimentParams::required_limit_for(&inputs, &cfg.overrides));
    }
    lim.max(MOMENT_Y as u64)
}

type Outcome = std::result::Result<(bool, String), String>;

fn verdict(name: &'static str, r: Outcome) -> LemmaCheck {
    match r {
        Ok((pass, detail)) => LemmaCheck { name, pass, detail },
        Err(e) => LemmaCheck {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs all seven checks in a fixed order.
pub fn check_lemmas(cfg: &LemmaConfig, tables: &ArithTables, par: &Parallelism) -> Vec<LemmaCheck> {
    let params = ExperimentParams::build(&cfg.inputs, &cfg.overrides, tables).map_err(|e| e.to_string());
    let chains = params.clone().and_then(|p| {
        let polys = ChainPolys::build(&p, tables).map_err(|e| e.to_string())?;
        run_chains(&p, &polys, &ZetaBackend::auto(p.t), cfg.seed, cfg.n_samples, par).map_err(|e| e.to_string())
    });
    let with_chains = |f: &dyn Fn(&ExperimentParams, &[SampleChain]) -> Result<(bool, String)>| -> Outcome {
        match (&params, &chains) {
            (Ok(p), Ok(c)) => f(p, c).map_err(|e| e.to_string()),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        }
    };
    let text = |r: Result<(bool, String)>| -> Outcome { r.map_err(|e| e.to_string()) };

    vec![
        verdict("covariance", text({
            covariance_ratios(tables, cfg.inputs.alpha, cfg.inputs.kprime, &COVARIANCE_CUTOFFS).map(|r| {
                (
                    covariance_ok(&r, cfg.inputs.alpha),
                    format!(
                        "ratios {:.4} {:.4} {:.4} at Y = 1e5 1e6 1e7, toward alpha = {}",
                        r[0], r[1], r[2], cfg.inputs.alpha
                    ),
                )
            })
        })),
        verdict("Pmoments", text(pmoments(cfg, tables, par))),
        verdict("largevaluesofP", {
            params.clone().and_then(|p| {
                let s = run_prime_samples(&p, tables, cfg.seed, cfg.n_samples, par).map_err(|e| e.to_string())?;
                let f1 = tail_fraction(&s, TailWhich::P1, p.loglog_t).map_err(|e| e.to_string())?;
                let f2 = tail_fraction(&s, TailWhich::P2, p.logloglog_t).map_err(|e| e.to_string())?;
                Ok((
                    f1 <= 0.01 && f2 <= 0.05,
                    format!("P1 tail {f1:.5} (<= 0.01), P2 tail {f2:.5} (<= 0.05)"),
                ))
            })
        }),
        verdict("zetaMestimate", text(zeta_m(cfg, tables, par))),
        verdict(
            "logM-1-reP",
            with_chains(&|p, c| {
                let gaps = mollifier_gaps(c);
                let good = c.iter().filter(|s| s.good).count() as f64 / c.len().max(1) as f64;
                let med = median(&gaps).unwrap_or(f64::INFINITY);
                Ok((
                    med <= 0.05 && good >= 0.9,
                    format!(
                        "median gap {:.3e}·s (<= 0.05·s, s = {:.4}), good fraction {good:.4} (>= 0.9)",
                        med, p.s_norm
                    ),
                ))
            }),
        ),
        verdict("selbergintegral", text({
            SELBERG_PAIRS
                .iter()
                .map(|&(h, k)| selberg_mean_value_check(h, k, SELBERG_SIGMA, SELBERG_T, 64).map(|c| c.rel_gap))
                .collect::<Result<Vec<f64>>>()
                .map(|g| {
                    (
                        g.iter().all(|&x| x <= 0.05),
                        format!(
                            "rel gaps {:.4} {:.4} {:.4} (<= 0.05) at sigma = {SELBERG_SIGMA}, T = {SELBERG_T}",
                            g[0], g[1], g[2]
                        ),
                    )
                })
        })),
        verdict(
            "offaxis",
            with_chains(&|p, c| {
                let kept: Vec<&SampleChain> = c.iter().filter(|s| !s.excluded).collect();
                let n = kept.len().max(1) as f64;
                let mean = kept.iter().map(|s| (s.v - s.wv).abs()).sum::<f64>() * p.s_norm / n;
                let scale = (p.sigma0 - 0.5) * p.log_t;
                Ok((
                    mean <= scale,
                    format!("E|log|zeta(1/2)| - log|zeta(sigma0)|| = {mean:.4} (<= (sigma0 - 1/2) log T = {scale:.4})"),
                ))
            }),
        ),
    ]
}

fn pmoments(cfg: &LemmaConfig, tables: &ArithTables, par: &Parallelism) -> Result<(bool, String)> {
    let ov = Overrides {
        y: Some(MOMENT_Y),
        ..cfg.overrides.clone()
    };
    let p = ExperimentParams::build(&cfg.inputs, &ov, tables)?;
    let s = run_prime_samples(&p, tables, cfg.seed, cfg.n_samples, par)?;
    let rows = moment_rows(&p, tables, &s, &[1, 2, 3, 4], &MOMENT_SHIFTS)?;
    let worst = rows
        .iter()
        .map(|r| (r.empirical - r.oracle).abs() / r.std_err.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.empirical_ok() && r.gaussian_ok());
    Ok((
        pass,
        format!("worst |empirical - oracle| = {worst:.2} standard errors over {} moments, Y = {MOMENT_Y}", rows.len()),
    ))
}

fn zeta_m(cfg: &LemmaConfig, tables: &ArithTables, par: &Parallelism) -> Result<(bool, String)> {
    let n = cfg.n_samples.min(DEVIATION_SAMPLES);
    let mut devs = Vec::new();
    for t in DEVIATION_HEIGHTS {
        let p = ExperimentParams::build(&ParamInputs { t, ..cfg.inputs.clone() }, &cfg.overrides, tables)?;
        let polys = ChainPolys::build(&p, tables)?;
        let c = run_chains(&p, &polys, &ZetaBackend::auto(t), cfg.seed, n, par)?;
        devs.push(zeta_mollifier_deviation(&c)?.mean);
    }
    Ok((
        devs.windows(2).all(|w| w[1] < w[0]),
        format!(
            "E|zeta M - 1|^2 = {:.4} {:.4} {:.4} at T = 1e5 1e6 1e7 (strictly decreasing)",
            devs[0], devs[1], devs[2]
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    #[test]
    fn median_cases() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn covariance_ok_logic() {
        assert!(covariance_ok(&[0.65, 0.6, 0.58], 0.5));
        assert!(covariance_ok(&[0.45, 0.48, 0.51], 0.5));
        assert!(!covariance_ok(&[0.65, 0.66, 0.58], 0.5));
        assert!(!covariance_ok(&[0.8, 0.75, 0.71], 0.5));
        assert!(!covariance_ok(&[0.55, 0.44, 0.48], 0.5));
    }

    #[test]
    fn height_for_cutoff_inverts_the_cutoff() {
        for (y, kp) in [(10.0, 3.0), (1e5, 3.0), (1e7, 2.5)] {
            let lt: f64 = log_height_for_y(y, kp);
            assert!(((lt / (kp * lt.ln())).exp() / y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_row_verdicts() {
        let row = MomentRow {
            k: 2,
            u: 1.0,
            uprime: 0.0,
            empirical: 1.02,
            std_err: 0.01,
            oracle: 1.0,
            gaussian: 0.9,
            o_k: 0.04,
            bound: 0.03,
        };
        assert!(row.empirical_ok());
        assert!(row.gaussian_ok());
        let far = MomentRow { gaussian: 0.8, ..row };
        assert!(!far.gaussian_ok());
        assert!(MomentRow { k: 3, ..far }.gaussian_ok());
    }

    #[test]
    fn seven_named_checks() {
        let cfg = LemmaConfig {
            inputs: ParamInputs {
                t: 1e4,
                ..Default::default()
            },
            overrides: Overrides::default(),
            n_samples: 2000,
            seed: 7,
        };
        let tables = build_tables(lemma_sieve_limit(&cfg)).unwrap();
        let out = check_lemmas(&cfg, &tables, &Parallelism::auto());
        let names: Vec<&str> = out.iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "covariance",
                "Pmoments",
                "largevaluesofP",
                "zetaMestimate",
                "logM-1-reP",
                "selbergintegral",
                "offaxis"
            ]
        );
        for c in &out {
            assert!(!c.detail.starts_with("error"), "{}: {}", c.name, c.detail);
        }
        let pass = |n: &str| out.iter().find(|c| c.name == n).unwrap().pass;
        assert!(pass("covariance"));
        assert!(pass("selbergintegral"));
        assert!(pass("Pmoments"));
        assert!(pass("offaxis"));
    }
}
