//! Complex log-Gamma and the functional-equation factor χ.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k} / (2k(2k−1))` for the Stirling series.
const STIRLING: [f64; 12] = [
    0.083333333333333333333,
    -0.0027777777777777777778,
    0.00079365079365079365079,
    -0.0005952380952380952381,
    0.00084175084175084175084,
    -0.0019175269175269175269,
    0.0064102564102564102564,
    -0.02955065359477124183,
    0.17964437236883057316,
    -1.3924322169059011164,
    13.402864044168391994,
    -156.84828462600201731,
];

const SHIFT_RADIUS: f64 = 15.0;

/// `log Γ(z)` for `Re z > 0` or `|Im z|` large, continuous in `z` away from
/// the negative real axis.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < SHIFT_RADIUS || z.re < 0.5 {
        shift += z.ln();
        z += 1.0;
    }
    let ln_2pi_half = 0.5 * (2.0 * PI).ln();
    let mut series = Complex64::new(0.0, 0.0);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for &c in &STIRLING {
        let term = pow * c;
        series += term;
        if term.norm() < 1e-17 * series.norm() {
            break;
        }
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + ln_2pi_half + series - shift
}

/// `log sin z`, stable for large `|Im z|`.
fn ln_sin(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im >= 0.0 {
        // sin z = e^{-iz} (e^{2iz} − 1) / (2i)
        -i * z + ((2.0 * i * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else {
        ln_sin(z.conj()).conj()
    }
}

/// `log χ(s)` with `χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s)`, so `ζ(s) = χ(s) ζ(1−s)`.
pub fn ln_chi(s: Complex64) -> Complex64 {
    s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_sin(s * (PI / 2.0)) + ln_gamma(1.0 - s)
}

/// Riemann–Siegel theta, `arg Γ(1/4 + it/2) − (t/2) log π`, continuous in `t`.
pub fn siegel_theta(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        assert!(ln_gamma(Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(ln_gamma(Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let half = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        let g = ln_gamma(Complex64::new(10.5, 0.0)).re;
        // Γ(10.5) = 1133278.3889487855...
        assert!((g - 1_133_278.388_948_785_5f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn complex_reference_values() {
        // 40-digit reference values.
        let a = ln_gamma(Complex64::new(0.25, 7.0));
        assert!((a.re + 10.562_953_339_040_002).abs() < 1e-13);
        assert!((a.im - 6.230_160_500_529_651).abs() < 1e-13);
        let b = ln_gamma(Complex64::new(3.0, -1e6));
        assert!((b.re + 1_570_760.869_079_968_5).abs() < 1e-8);
        assert!((b.im + 12_815_514.484_952_008).abs() < 1e-7);
    }

    #[test]
    fn recurrence() {
        for &(x, y) in &[(0.3, 2.0), (4.5, -30.0), (0.01, 0.01), (20.0, 1e4)] {
            let z = Complex64::new(x, y);
            let (a, b) = (ln_gamma(z + 1.0), ln_gamma(z));
            let d = (a - b - z.ln()).exp() - 1.0;
            let scale = a.norm().max(1.0);
            assert!(d.norm() < 1e-14 * scale, "z = {z}");
        }
    }

    #[test]
    fn chi_on_critical_line_is_unimodular() {
        for t in [0.0, 14.0, 1e3, 1e6, 1e8] {
            let c = ln_chi(Complex64::new(0.5, t));
            assert!(c.re.abs() < 1e-14 * c.norm().max(1.0), "t = {t}: {c}");
        }
    }

    #[test]
    fn chi_at_real_points() {
        // χ(1/2) = 1 and χ(−1) ζ(2) = ζ(−1) = −1/12.
        let c0 = ln_chi(Complex64::new(0.5, 0.0)).exp();
        assert!((c0 - 1.0).norm() < 1e-14);
        let cm1 = ln_chi(Complex64::new(-1.0, 0.0)).exp();
        assert!((cm1 * PI * PI / 6.0 + 1.0 / 12.0).norm() < 1e-14);
    }

    #[test]
    fn theta_asymptotic() {
        let t: f64 = 1e4;
        let approx = t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0 + 1.0 / (48.0 * t);
        assert!((siegel_theta(t) - approx).abs() < 1e-9);
    }
}
