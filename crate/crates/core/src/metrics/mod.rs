//! Distances between bivariate distributions.

mod family;
pub mod quad;

pub use family::{DistanceReport, Expectations, FamilyConfig, Member, Source, TestFunctionFamily};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::mc::{sample_rng, GaussianSpec};
use crate::parallel::Parallelism;
use quad::{gauss_legendre, integrate, norm_cdf};

/// Fewest points accepted on an empirical side of [`dudley_estimate`].
pub const MIN_DUDLEY_POINTS: usize = 100;

/// Keeps Gaussian reference streams apart from the `τ` streams of the same seed.
const GAUSSIAN_SALT: u64 = 0x6a09_e667_f3bc_c909;

fn check_side(src: &Source<'_>) -> Result<()> {
    if let Source::Samples(xs) = src {
        if xs.len() < MIN_DUDLEY_POINTS {
            return Err(invalid(format!(
                "need at least {MIN_DUDLEY_POINTS} points per side, got {}",
                xs.len()
            )));
        }
        if xs.iter().any(|x| !x[0].is_finite() || !x[1].is_finite()) {
            return Err(invalid("sample contains non-finite coordinates"));
        }
    }
    Ok(())
}

/// Family lower bound on the Dudley distance between `a` and `b`.
pub fn dudley_estimate(
    a: &Source<'_>,
    b: &Source<'_>,
    family: &TestFunctionFamily,
    par: &Parallelism,
) -> Result<DistanceReport> {
    if family.is_empty() {
        return Err(invalid("test-function family is empty"));
    }
    check_side(a)?;
    check_side(b)?;
    let ea = family.expectations(a, par)?;
    let eb = family.expectations(b, par)?;
    Ok(family.distance(&ea, &eb))
}

/// [`dudley_estimate`] on the default family sized to both sources.
pub fn dudley_default(a: &Source<'_>, b: &Source<'_>, par: &Parallelism) -> Result<DistanceReport> {
    let family = TestFunctionFamily::for_sources(FamilyConfig::default(), &[*a, *b])?;
    dudley_estimate(a, b, &family, par)
}

/// `sup_x |F_n(x) − F(x)|`, checked on both sides of every jump.
pub fn kolmogorov_1d(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples("kolmogorov_1d".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        best = best.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierGap {
    pub bound: f64,
    pub inv_f: f64,
    pub max_char_gap: f64,
    pub mu_outside: f64,
    pub nu_outside: f64,
    pub grid_points: usize,
}

/// Grid `{k·step : |k·step| < F}`.
fn fourier_axis(f: f64, step: f64) -> Vec<f64> {
    let kmax = (f / step).ceil() as i64;
    (-kmax..=kmax)
        .map(|k| k as f64 * step)
        .filter(|x| x.abs() < f)
        .collect()
}

/// `1/F + (RF)²·max|μ̂ − ν̂| + μ(outside) + ν(outside)` with `μ` the empirical
/// measure of `samples`, `ν = N(0, spec)`, and "outside" the complement of
/// the open box `(−R, R)²`. The maximum runs over the grid `step·ℤ² ∩ (−F, F)²`.
pub fn fourier_gap_bound(
    samples: &[[f64; 2]],
    spec: &GaussianSpec,
    r: f64,
    f: f64,
    step: f64,
    par: &Parallelism,
) -> Result<FourierGap> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid(format!("grid step must be positive, got {step}")));
    }
    if !(r > 0.0 && f > 0.0) || !r.is_finite() || !f.is_finite() {
        return Err(invalid(format!("R and F must be positive, got R = {r}, F = {f}")));
    }
    if samples.is_empty() {
        return Err(Error::EmptySamples("fourier_gap_bound".into()));
    }
    let axis = fourier_axis(f, step);
    let grid: Vec<[f64; 2]> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| [a, b]))
        .collect();
    let n = samples.len() as f64;
    let max_char_gap = par.install(|| {
        grid.par_iter()
            .map(|xi| {
                let mut re = crate::sum::Neumaier::new();
                let mut im = crate::sum::Neumaier::new();
                for x in samples {
                    let (s, c) = (xi[0] * x[0] + xi[1] * x[1]).sin_cos();
                    re.add(c);
                    im.add(s);
                }
                (re.value() / n - spec.char_fn(*xi)).hypot(im.value() / n)
            })
            .reduce(|| 0.0, f64::max)
    });
    let inside = samples
        .iter()
        .filter(|x| x[0].abs() < r && x[1].abs() < r)
        .count();
    let mu_outside = 1.0 - inside as f64 / n;
    let nu_outside = gaussian_outside_box(spec, r);
    let inv_f = 1.0 / f;
    Ok(FourierGap {
        bound: inv_f + (r * f).powi(2) * max_char_gap + mu_outside + nu_outside,
        inv_f,
        max_char_gap,
        mu_outside,
        nu_outside,
        grid_points: grid.len(),
    })
}

/// `P(Z ∉ (−R, R)²)` by integrating the conditional law of the second
/// coordinate against the first.
pub fn gaussian_outside_box(spec: &GaussianSpec, r: f64) -> f64 {
    let [[a, b], [_, d]] = spec.cov;
    let sx = a.sqrt();
    let beta = b / a;
    let sc = (d - b * b / a).sqrt();
    let rule = gauss_legendre(20);
    let panels = ((2.0 * r / sx.min(sc)).ceil() as usize).clamp(8, 4096);
    let inside = integrate(
        |x| {
            let m = beta * x;
            let pdf = (-0.5 * (x / sx).powi(2)).exp() / (sx * (2.0 * std::f64::consts::PI).sqrt());
            pdf * (norm_cdf((r - m) / sc) - norm_cdf((-r - m) / sc))
        },
        -r,
        r,
        panels,
        &rule,
    );
    (1.0 - inside).max(0.0)
}

/// `count` draws `L·(g₁, g₂)` with `L` the Cholesky factor and `g` standard
/// normal from per-index streams.
pub fn gaussian_sample(spec: &GaussianSpec, seed: u64, count: usize, par: &Parallelism) -> Vec<[f64; 2]> {
    let l = spec.cholesky();
    par.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed ^ GAUSSIAN_SALT, i);
                let g1: f64 = StandardNormal.sample(&mut rng);
                let g2: f64 = StandardNormal.sample(&mut rng);
                [l[0][0] * g1, l[1][0] * g1 + l[1][1] * g2]
            })
            .collect()
    })
}

/// Dudley estimate between two Gaussians with every expectation analytic.
pub fn gaussian_pair_distance(
    a: &GaussianSpec,
    b: &GaussianSpec,
    family: Option<&TestFunctionFamily>,
    par: &Parallelism,
) -> Result<DistanceReport> {
    let (sa, sb) = (Source::Gaussian(a), Source::Gaussian(b));
    match family {
        Some(f) => dudley_estimate(&sa, &sb, f, par),
        None => dudley_default(&sa, &sb, par),
    }
}

#[cfg(test)]
mod tests;
