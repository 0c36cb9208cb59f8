//! Mean value of `(h/k)^{it} |ζ(σ+it)|²` over `[T, 2T]`.

use num_complex::Complex64;
use serde::Serialize;

use super::ZetaBackend;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SelbergCheck {
    pub lhs: Complex64,
    pub rhs: f64,
    pub rel_gap: f64,
    /// Estimated relative quadrature error of `lhs`.
    pub quad_err: f64,
    pub panels: usize,
}

/// Largest `T` accepted (the integrand needs `O(T log T)` evaluations).
pub const SELBERG_MAX_T: f64 = 1e4;

const REL_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 12;

/// Integrate `(h/k)^{it}|ζ(σ+it)|²` over `[T, 2T]` with adaptive 7–15
/// Gauss–Kronrod panels and compare with the mean-value main terms.
///
/// `quad_points` is a lower bound on the number of initial panels; the
/// panel width is also capped at `π / (2 log(2T·max(h,k)))`.
pub fn selberg_mean_value_check(
    h: u64,
    k: u64,
    sigma: f64,
    t: f64,
    quad_points: usize,
) -> Result<SelbergCheck> {
    if h == 0 || k == 0 {
        return Err(invalid("h and k must be positive"));
    }
    if !(sigma > 0.5 && sigma <= 1.0) {
        return Err(invalid(format!("sigma must lie in (1/2, 1], got {sigma}")));
    }
    if !(t >= h.max(k) as f64) || t > SELBERG_MAX_T {
        return Err(invalid(format!(
            "T = {t} must satisfy max(h, k) <= T <= {SELBERG_MAX_T:e}"
        )));
    }
    let backend = if t >= super::afe::MIN_T {
        ZetaBackend::afe()
    } else {
        ZetaBackend::euler_maclaurin()
    };
    let ratio_log = (h as f64 / k as f64).ln();
    let f = |x: f64| -> Result<Complex64> {
        let z = backend.zeta(sigma, x)?;
        Ok(Complex64::from_polar(z.norm_sqr(), x * ratio_log))
    };

    let width_cap = std::f64::consts::PI / (2.0 * (2.0 * t * h.max(k) as f64).ln());
    let panels = ((t / width_cap).ceil() as usize).max(quad_points).max(1);
    let w = t / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..panels {
        let a = t + w * i as f64;
        let (v, e) = adaptive(&f, a, a + w, 0)?;
        total += v;
        err += e;
    }
    let quad_err = err / total.norm();
    if !(quad_err <= 1e3 * REL_TOL) {
        return Err(Error::Quadrature {
            achieved: quad_err,
            target: REL_TOL,
        });
    }

    let g = gcd(h, k) as f64;
    let r = g * g / (h as f64 * k as f64);
    let em = ZetaBackend::euler_maclaurin();
    let z_a = em.zeta(2.0 * sigma, 0.0)?.re;
    let z_b = em.zeta(2.0 - 2.0 * sigma, 0.0)?.re;
    let two_pi = 2.0 * std::f64::consts::PI;
    let e = 2.0 - 2.0 * sigma;
    // ∫_T^{2T} (x/2π)^{1−2σ} dx
    let second = if e.abs() < 1e-12 {
        two_pi * 2f64.ln()
    } else {
        two_pi.powf(2.0 * sigma - 1.0) * ((2.0 * t).powf(e) - t.powf(e)) / e
    };
    let rhs = z_a * r.powf(sigma) * t + z_b * r.powf(1.0 - sigma) * second;
    Ok(SelbergCheck {
        lhs: total,
        rhs,
        rel_gap: (total - rhs).norm() / rhs.abs(),
        quad_err,
        panels,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights on the odd-indexed Kronrod nodes.
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        let x = GK_NODES[i];
        let v = if x == 0.0 {
            f(c)?
        } else {
            f(c - hw * x)? + f(c + hw * x)?
        };
        k += v * GK_WEIGHTS[i];
        if i % 2 == 1 {
            g += v * G_WEIGHTS[i / 2];
        }
    }
    Ok((k * hw, ((k - g) * hw).norm()))
}

fn adaptive<F>(f: &F, a: f64, b: f64, depth: u32) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (v, e) = gk15(f, a, b)?;
    if e <= REL_TOL * v.norm().max(1e-300) || depth >= MAX_DEPTH {
        return Ok((v, e));
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = adaptive(f, a, m, depth + 1)?;
    let (v2, e2) = adaptive(f, m, b, depth + 1)?;
    Ok((v1 + v2, e1 + e2))
}
