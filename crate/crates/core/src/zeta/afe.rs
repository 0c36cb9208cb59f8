//! Symmetric approximate functional equation with an exact remainder.
//!
//! With `N = ⌊√(t/2π)⌋`,
//! `ζ(s) = Σ_{n≤N} n^{-s} + χ(s) Σ_{n≤N} n^{s−1} + R(s)` where
//! `R(s) = Γ(1−s)/(2πi) ∫_L (−x)^{s−1} e^{−Nx} / (e^x − 1) dx`
//! and `L` is the line through `2πi(N + 1/2)` with direction `e^{iπ/4}`,
//! oriented upward. The integrand decays like a Gaussian along `L`, so the
//! trapezoid rule converges geometrically.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use super::gamma::{ln_chi, ln_gamma};
use crate::sum::ComplexNeumaier;

const STEP: f64 = 0.5;
const HALF_WIDTH: f64 = 25.0;

/// Smallest `t` at which the remainder quadrature meets 1e−11. Below it
/// (where `N ≤ 2`) the Gaussian window overlaps the region where
/// `e^{−Nx}` outgrows the rest of the integrand.
pub const MIN_T: f64 = 35.0;

/// ζ at `σ + it` for every `σ` in `sigmas`, sharing the phase table.
/// Requires `t ≥ MIN_T`.
pub fn zeta_afe_multi(sigmas: &[f64], t: f64) -> Vec<Complex64> {
    debug_assert!(t >= MIN_T);
    let n = (t / (2.0 * PI)).sqrt().floor() as usize;
    let mut heads = vec![ComplexNeumaier::new(); sigmas.len()];
    let mut tails = vec![ComplexNeumaier::new(); sigmas.len()];
    for k in 1..=n {
        let l = (k as f64).ln();
        let (sn, cs) = (t * l).sin_cos();
        for (j, &sigma) in sigmas.iter().enumerate() {
            let a = (-sigma * l).exp();
            let b = ((sigma - 1.0) * l).exp();
            heads[j].add_parts(a * cs, -a * sn);
            tails[j].add_parts(b * cs, b * sn);
        }
    }
    sigmas
        .iter()
        .enumerate()
        .map(|(j, &sigma)| {
            let s = Complex64::new(sigma, t);
            let chi = ln_chi(s).exp();
            heads[j].value() + chi * tails[j].value() + remainder(s, n)
        })
        .collect()
}

fn remainder(s: Complex64, n: usize) -> Complex64 {
    remainder_with(s, n, STEP, HALF_WIDTH)
}

fn remainder_with(s: Complex64, n: usize, step: f64, half_width: f64) -> Complex64 {
    let nf = n as f64;
    let dir = Complex64::from_polar(1.0, FRAC_PI_4);
    let centre = Complex64::new(0.0, 2.0 * PI * (nf + 0.5));
    let lg = ln_gamma(1.0 - s);
    let steps = (2.0 * half_width / step).round() as i64;
    let mut acc = ComplexNeumaier::new();
    for j in 0..=steps {
        let u = -half_width + step * j as f64;
        let x = centre + dir * u;
        let expo = lg + (s - 1.0) * (-x).ln() - nf * x;
        let denom = x.exp() - 1.0;
        acc.add(expo.exp() / denom);
    }
    acc.value() * dir * step / Complex64::new(0.0, 2.0 * PI)
}
