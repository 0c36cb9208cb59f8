//! Test functions with sup-norm ≤ 1 and Lipschitz constant ≤ 1.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::quad::{gauss_legendre, ramp_expectation};
use crate::error::{invalid, Result};
use crate::mc::GaussianSpec;
use crate::parallel::Parallelism;

/// A distribution on ℝ² seen through the family.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Samples(&'a [[f64; 2]]),
    Gaussian(&'a GaussianSpec),
}

/// Shape of the default family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyConfig {
    pub directions: usize,
    pub offsets: usize,
    pub hinge_grid: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            directions: 64,
            offsets: 129,
            hinge_grid: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Member {
    /// `sign · clip(⟨dir, x⟩ − offset, −1, 1)`.
    Ramp { dir: [f64; 2], offset: f64, sign: f64 },
    /// `clip(1 − |x − centre|, −1, 1)`.
    Hinge { centre: [f64; 2] },
}

impl Member {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match *self {
            Member::Ramp { dir, offset, sign } => {
                sign * (dir[0] * x[0] + dir[1] * x[1] - offset).clamp(-1.0, 1.0)
            }
            Member::Hinge { centre } => {
                (1.0 - (x[0] - centre[0]).hypot(x[1] - centre[1])).clamp(-1.0, 1.0)
            }
        }
    }
}

/// Half-plane ramps in both signs followed by radial hinges.
///
/// Ramp member `(j, i, sign)` has index `(j·B + i)·2 + sign`; hinge `h`
/// follows at `2·D·B + h`.
#[derive(Clone, Debug)]
pub struct TestFunctionFamily {
    directions: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    centres: Vec<[f64; 2]>,
    span: (f64, f64),
}

/// Expectations of the positive-sign members under one distribution.
#[derive(Clone, Debug)]
pub struct Expectations {
    ramps: Vec<f64>,
    hinges: Vec<f64>,
    pub n: usize,
}

impl TestFunctionFamily {
    pub fn new(directions: Vec<[f64; 2]>, offsets: Vec<f64>, centres: Vec<[f64; 2]>) -> Result<Self> {
        if directions.iter().any(|d| (d[0].hypot(d[1]) - 1.0).abs() > 1e-12) {
            return Err(invalid("ramp directions must be unit vectors"));
        }
        if (directions.is_empty() || offsets.is_empty()) && centres.is_empty() {
            return Err(invalid("test-function family is empty"));
        }
        let span = match offsets.as_slice() {
            [] => (0.0, 0.0),
            o => (o[0], o[o.len() - 1]),
        };
        Ok(Self {
            directions,
            offsets,
            centres,
            span,
        })
    }

    /// Directions `π·k/D`, offsets spanning every projection of every source
    /// widened by 1, hinge centres on a grid over the joint bounding box.
    /// Gaussians contribute ±4 standard deviations.
    pub fn for_sources(cfg: FamilyConfig, sources: &[Source<'_>]) -> Result<Self> {
        let d = cfg.directions;
        let directions: Vec<[f64; 2]> = (0..d)
            .map(|k| {
                let a = PI * (k as f64 / d as f64);
                [a.cos(), a.sin()]
            })
            .collect();
        let mut plo = f64::INFINITY;
        let mut phi = f64::NEG_INFINITY;
        let mut bx = [f64::INFINITY, f64::NEG_INFINITY];
        let mut by = [f64::INFINITY, f64::NEG_INFINITY];
        for src in sources {
            match src {
                Source::Samples(xs) => {
                    for x in xs.iter() {
                        bx = [bx[0].min(x[0]), bx[1].max(x[0])];
                        by = [by[0].min(x[1]), by[1].max(x[1])];
                    }
                    for dir in &directions {
                        for x in xs.iter() {
                            let p = dir[0] * x[0] + dir[1] * x[1];
                            plo = plo.min(p);
                            phi = phi.max(p);
                        }
                    }
                }
                Source::Gaussian(g) => {
                    let sx = 4.0 * g.cov[0][0].sqrt();
                    let sy = 4.0 * g.cov[1][1].sqrt();
                    bx = [bx[0].min(-sx), bx[1].max(sx)];
                    by = [by[0].min(-sy), by[1].max(sy)];
                    for dir in &directions {
                        let s = 4.0 * g.projected_variance(*dir).sqrt();
                        plo = plo.min(-s);
                        phi = phi.max(s);
                    }
                }
            }
        }
        if !plo.is_finite() || !phi.is_finite() {
            return Err(invalid("cannot size the family: no finite data"));
        }
        let (lo, hi) = (plo - 1.0, phi + 1.0);
        let b = cfg.offsets;
        let offsets = (0..b)
            .map(|i| {
                if b == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * (i as f64 / (b - 1) as f64)
                }
            })
            .collect();
        let g = cfg.hinge_grid;
        let mut centres = Vec::with_capacity(g * g);
        for i in 0..g {
            for j in 0..g {
                let fx = (i as f64 + 0.5) / g as f64;
                let fy = (j as f64 + 0.5) / g as f64;
                centres.push([bx[0] + (bx[1] - bx[0]) * fx, by[0] + (by[1] - by[0]) * fy]);
            }
        }
        let mut fam = Self::new(directions, offsets, centres)?;
        fam.span = (lo, hi);
        Ok(fam)
    }

    /// Doubles the direction and offset counts. For families from
    /// [`Self::for_sources`] every old member survives bit-for-bit.
    pub fn refined(&self) -> Self {
        let d = 2 * self.directions.len();
        let directions = (0..d)
            .map(|k| {
                let a = PI * (k as f64 / d as f64);
                [a.cos(), a.sin()]
            })
            .collect();
        let offsets = if self.offsets.len() < 2 {
            self.offsets.clone()
        } else {
            let (lo, hi) = self.span;
            let m = 2 * (self.offsets.len() - 1);
            (0..=m).map(|i| lo + (hi - lo) * (i as f64 / m as f64)).collect()
        };
        Self {
            directions,
            offsets,
            centres: self.centres.clone(),
            span: self.span,
        }
    }

    pub fn directions(&self) -> &[[f64; 2]] {
        &self.directions
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn centres(&self) -> &[[f64; 2]] {
        &self.centres
    }

    fn n_ramps(&self) -> usize {
        self.directions.len() * self.offsets.len()
    }

    pub fn len(&self) -> usize {
        2 * self.n_ramps() + self.centres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn member(&self, idx: usize) -> Member {
        let r = 2 * self.n_ramps();
        if idx < r {
            let base = idx / 2;
            let (j, i) = (base / self.offsets.len(), base % self.offsets.len());
            Member::Ramp {
                dir: self.directions[j],
                offset: self.offsets[i],
                sign: if idx % 2 == 0 { 1.0 } else { -1.0 },
            }
        } else {
            Member::Hinge {
                centre: self.centres[idx - r],
            }
        }
    }

    pub fn expectations(&self, src: &Source<'_>, par: &Parallelism) -> Result<Expectations> {
        match src {
            Source::Samples(xs) => {
                if xs.is_empty() {
                    return Err(crate::error::Error::EmptySamples("no points".into()));
                }
                Ok(self.sample_expectations(xs, par))
            }
            Source::Gaussian(g) => Ok(self.gaussian_expectations(g, par)),
        }
    }

    fn sample_expectations(&self, xs: &[[f64; 2]], par: &Parallelism) -> Expectations {
        let n = xs.len() as f64;
        let ramps: Vec<f64> = par.install(|| {
            self.directions
                .par_iter()
                .flat_map_iter(|dir| {
                    let mut p: Vec<f64> = xs.iter().map(|x| dir[0] * x[0] + dir[1] * x[1]).collect();
                    p.sort_by(f64::total_cmp);
                    let mut prefix = Vec::with_capacity(p.len() + 1);
                    let mut acc = crate::sum::Neumaier::new();
                    prefix.push(0.0);
                    for &v in &p {
                        acc.add(v);
                        prefix.push(acc.value());
                    }
                    self.offsets
                        .iter()
                        .map(|&b| {
                            // clip(p − b) is −1 below b − 1, +1 above b + 1, linear between.
                            let lo = p.partition_point(|&v| v < b - 1.0);
                            let hi = p.partition_point(|&v| v <= b + 1.0);
                            let mid = prefix[hi] - prefix[lo] - b * (hi - lo) as f64;
                            (-(lo as f64) + mid + (p.len() - hi) as f64) / n
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        });
        let hinges = par.install(|| {
            self.centres
                .par_iter()
                .map(|c| {
                    let m = Member::Hinge { centre: *c };
                    xs.iter().map(|&x| m.eval(x)).collect::<crate::sum::Neumaier>().value() / n
                })
                .collect()
        });
        Expectations {
            ramps,
            hinges,
            n: xs.len(),
        }
    }

    fn gaussian_expectations(&self, g: &GaussianSpec, par: &Parallelism) -> Expectations {
        let mut ramps = Vec::with_capacity(self.n_ramps());
        for dir in &self.directions {
            let sd = g.projected_variance(*dir).sqrt();
            ramps.extend(self.offsets.iter().map(|&b| ramp_expectation(b, sd)));
        }
        let hinges = par.install(|| {
            self.centres
                .par_iter()
                .map(|c| hinge_gaussian(*c, g))
                .collect()
        });
        Expectations {
            ramps,
            hinges,
            n: 0,
        }
    }
}

/// `E[clip(1 − |Z − c|, −1, 1)] = −1 + E[(2 − |Z − c|)₊]` for `Z ~ N(0, C)`,
/// in polar coordinates around `c`: Gauss–Legendre in `r ∈ [0, 2]`,
/// trapezoid (spectrally accurate for periodic integrands) in `θ`.
fn hinge_gaussian(c: [f64; 2], g: &GaussianSpec) -> f64 {
    let [[a, b], [_, d]] = g.cov;
    let det = a * d - b * b;
    let (ia, ib, id) = (d / det, -b / det, a / det);
    let norm = 1.0 / (2.0 * PI * det.sqrt());
    let min_sd = (0.5 * (a + d - ((a - d).powi(2) + 4.0 * b * b).sqrt())).sqrt();
    // Resolve the density on the scale of its smallest standard deviation.
    let scale = (2.0 / min_sd).max(1.0);
    let nr = ((8.0 * scale).ceil() as usize).clamp(16, 512);
    let nt = ((16.0 * scale).ceil() as usize).clamp(64, 2048);
    let panels = nr.div_ceil(16);
    let rule = gauss_legendre(16);
    let h = 2.0 / panels as f64;
    let dt = 2.0 * PI / nt as f64;
    let trig: Vec<(f64, f64)> = (0..nt).map(|k| (k as f64 * dt).sin_cos()).collect();
    let mut acc = crate::sum::Neumaier::new();
    for p in 0..panels {
        let mid = h * (p as f64 + 0.5);
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let r = mid + 0.5 * h * x;
            let mut ring = 0.0;
            for &(s, co) in &trig {
                let y0 = c[0] + r * co;
                let y1 = c[1] + r * s;
                let q = ia * y0 * y0 + 2.0 * ib * y0 * y1 + id * y1 * y1;
                ring += (-0.5 * q).exp();
            }
            acc.add(w * 0.5 * h * (2.0 - r) * r * ring * dt * norm);
        }
    }
    -1.0 + acc.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    /// `max_f |E_A f − E_B f|`, a lower bound on the Dudley distance.
    pub estimate: f64,
    pub argmax_member: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub family_size: usize,
}

impl TestFunctionFamily {
    /// Maximum over the family; ties go to the lowest member index.
    pub fn distance(&self, a: &Expectations, b: &Expectations) -> DistanceReport {
        let mut best = 0.0;
        let mut arg = 0usize;
        for (i, (x, y)) in a.ramps.iter().zip(&b.ramps).enumerate() {
            let d = (x - y).abs();
            if d > best {
                best = d;
                arg = 2 * i;
            }
        }
        let off = 2 * self.n_ramps();
        for (h, (x, y)) in a.hinges.iter().zip(&b.hinges).enumerate() {
            let d = (x - y).abs();
            if d > best {
                best = d;
                arg = off + h;
            }
        }
        DistanceReport {
            estimate: best,
            argmax_member: arg,
            n_a: a.n,
            n_b: b.n,
            family_size: self.len(),
        }
    }
}
