//! Gauss–Legendre rules and normal-distribution helpers.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence: p1 = P_n(z), p0 = P_{n−1}(z).
            let (mut p0, mut p1) = (0.0, 1.0);
            for k in 1..=n {
                let p2 = p0;
                p0 = p1;
                p1 = ((2 * k - 1) as f64 * z * p0 - (k - 1) as f64 * p2) / k as f64;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `∫_a^b f` by `panels` composite panels of the `n`-point rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = crate::sum::Neumaier::new();
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (x, w) in rule.0.iter().zip(&rule.1) {
            acc.add(w * f(c + 0.5 * h * x));
        }
    }
    acc.value() * 0.5 * h
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `E[clip(Z − b, −1, 1)]` for `Z ~ N(0, sd²)`.
pub fn ramp_expectation(b: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return (-b).clamp(-1.0, 1.0);
    }
    let lo = (b - 1.0) / sd;
    let hi = (b + 1.0) / sd;
    let below = norm_cdf(lo);
    let above = norm_cdf(-hi);
    let mid = norm_cdf(hi) - below;
    -below + above + sd * (norm_pdf(lo) - norm_pdf(hi)) - b * mid
}
