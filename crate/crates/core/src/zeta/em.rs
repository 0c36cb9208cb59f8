//! Euler–Maclaurin summation for ζ.

use num_complex::Complex64;

use crate::sum::ComplexNeumaier;

/// `B_{2k} / (2k)!`.
const BERNOULLI_OVER_FACTORIAL: [f64; 20] = [
    0.083333333333333333333,
    -0.0013888888888888888889,
    0.000033068783068783068783,
    -8.2671957671957671958e-7,
    2.0876756987868098979e-8,
    -5.2841901386874931848e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.174868698558061873e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
    -5.7447906688722024453e-26,
    1.4551724756148649019e-27,
    -3.6859949406653101782e-29,
    9.336734257095044672e-31,
    -2.3650224157006299346e-32,
];

/// Ratio `|s + 2m| / (2πN)` that fixes the cut-off `N`; the tail terms then
/// shrink roughly like `0.3^{2k}`.
const RATIO: f64 = 0.3;

/// ζ(s) by Euler–Maclaurin with up to 20 correction terms. `s ≠ 1`.
pub fn zeta_em(s: Complex64) -> Complex64 {
    let m = BERNOULLI_OVER_FACTORIAL.len();
    let n = (((s + 2.0 * m as f64).norm() / (2.0 * std::f64::consts::PI * RATIO)).ceil() as u64)
        .max(20);
    let mut acc = ComplexNeumaier::new();
    for k in 1..n {
        let l = (k as f64).ln();
        acc.add(Complex64::from_polar((-s.re * l).exp(), -s.im * l));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = |e: Complex64| (e * ln_n).exp();
    let n_minus_s = n_pow(-s);
    acc.add(n_pow(1.0 - s) / (s - 1.0));
    acc.add(0.5 * n_minus_s);
    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut power = n_minus_s / nf;
    let inv_n2 = 1.0 / (nf * nf);
    for (k, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = rising * power * b;
        acc.add(term);
        if term.norm() < 1e-18 * acc.value().norm().max(1e-300) {
            break;
        }
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power *= inv_n2;
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel() {
        let z = zeta_em(Complex64::new(2.0, 0.0));
        assert!((z.re - PI * PI / 6.0).abs() < 1e-15);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn even_values() {
        let z4 = zeta_em(Complex64::new(4.0, 0.0)).re;
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-15);
        let z0 = zeta_em(Complex64::new(0.0, 0.0)).re;
        assert!((z0 + 0.5).abs() < 1e-14);
    }
}
