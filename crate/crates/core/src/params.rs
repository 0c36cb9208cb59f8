//! Experiment parameters and everything derived from them.

use serde::{Deserialize, Serialize};

use crate::arith::{ArithTables, MollifierShape};
use crate::error::{invalid, Result};

/// User-facing inputs from which [`ExperimentParams`] are derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamInputs {
    pub t: f64,
    pub k: f64,
    pub kprime: f64,
    pub alpha: f64,
    pub h: f64,
    pub c_const: f64,
}

impl Default for ParamInputs {
    fn default() -> Self {
        Self {
            t: 1e8,
            k: 1.0,
            kprime: 3.0,
            alpha: 0.5,
            h: 0.0,
            c_const: 1.0,
        }
    }
}

/// Optional replacements of derived quantities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub w: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    /// Truncate the mollifier to `n ≤ l_m`. Without it the mollifier runs
    /// over its full admissible support.
    pub l_m: Option<u64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub inputs: ParamInputs,
    pub overrides: Overrides,
    pub t: f64,
    pub k: f64,
    pub kprime: f64,
    pub alpha: f64,
    pub h: f64,
    pub hprime: f64,
    /// `|h − h′| = (log T)^{−α}`.
    pub delta: f64,
    pub log_t: f64,
    pub loglog_t: f64,
    pub logloglog_t: f64,
    pub w: f64,
    pub sigma0: f64,
    pub x: f64,
    pub y: f64,
    pub s_norm: f64,
    pub s_tilde: f64,
    /// `𝔰̃² = ½ Σ_{p≤Y} 1/p`, stored exactly.
    pub s_tilde_sq: f64,
    pub n_trunc: u32,
    pub c_const: f64,
    pub l_m: Option<u64>,
    /// False when any override is active or `K′ ≥ K`.
    pub canonical: bool,
}

/// Derive parameters with default `C_const`.
pub fn derive(
    t: f64,
    k: f64,
    kprime: f64,
    alpha: f64,
    h: f64,
    tables: &ArithTables,
) -> Result<ExperimentParams> {
    ExperimentParams::derive(
        &ParamInputs {
            t,
            k,
            kprime,
            alpha,
            h,
            c_const: 1.0,
        },
        tables,
    )
}

impl ExperimentParams {
    pub fn derive(inputs: &ParamInputs, tables: &ArithTables) -> Result<Self> {
        let ParamInputs {
            t,
            k,
            kprime,
            alpha,
            h,
            c_const,
        } = *inputs;
        let min_t = std::f64::consts::E.exp();
        if !(t > min_t) || !t.is_finite() {
            return Err(invalid(format!(
                "T = {t} too small: log log log T must be positive, so T > e^e ≈ {min_t:.6}"
            )));
        }
        if !(k > 0.0) {
            return Err(invalid(format!("K must be positive, got {k}")));
        }
        if !(kprime > 2.0) {
            return Err(invalid(format!(
                "K′ = {kprime} violates 2 < K′ < K"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !h.is_finite() {
            return Err(invalid(format!("h must be finite, got {h}")));
        }
        if !(c_const > 0.0) {
            return Err(invalid(format!("C_const must be positive, got {c_const}")));
        }
        let log_t = t.ln();
        let loglog_t = log_t.ln();
        let logloglog_t = loglog_t.ln();
        let x = (log_t / (kprime * logloglog_t)).exp();
        if !(x < t) {
            let need = (1.0 / kprime).exp().exp().exp();
            return Err(invalid(format!(
                "T = {t} too small: X = T^(1/(K′ log log log T)) must stay below T, which needs T > {need:.6}"
            )));
        }
        let y = (log_t / (kprime * loglog_t)).exp();
        if y < 2.0 {
            return Err(invalid(format!(
                "T = {t} too small: Y = {y} has no primes below it"
            )));
        }
        let w = k * logloglog_t * logloglog_t;
        let delta = log_t.powf(-alpha);
        let mut p = Self {
            inputs: inputs.clone(),
            overrides: Overrides::default(),
            t,
            k,
            kprime,
            alpha,
            h,
            hprime: h + delta,
            delta,
            log_t,
            loglog_t,
            logloglog_t,
            w,
            sigma0: 0.5 + w / log_t,
            x,
            y,
            s_norm: (0.5 * loglog_t).sqrt(),
            s_tilde: 0.0,
            s_tilde_sq: 0.0,
            n_trunc: (c_const * loglog_t).ceil() as u32 + 10,
            c_const,
            l_m: None,
            canonical: kprime < k,
        };
        p.set_s_tilde(tables)?;
        Ok(p)
    }

    /// Replace derived quantities. An empty override set is the identity.
    pub fn with_overrides(&self, ov: &Overrides, tables: &ArithTables) -> Result<Self> {
        if ov.is_empty() {
            return Ok(self.clone());
        }
        let mut p = self.clone();
        if let Some(w) = ov.w {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(invalid(format!("W override must be ≥ 0, got {w}")));
            }
            p.w = w;
            p.sigma0 = 0.5 + w / p.log_t;
        }
        if let Some(x) = ov.x {
            if !(x >= 2.0) || !x.is_finite() {
                return Err(invalid(format!("X override must be ≥ 2, got {x}")));
            }
            p.x = x;
        }
        if let Some(y) = ov.y {
            if !(y >= 2.0) || !y.is_finite() {
                return Err(invalid(format!("Y override must be ≥ 2, got {y}")));
            }
            p.y = y;
        }
        if p.y > p.x {
            return Err(invalid(format!("Y = {} exceeds X = {}", p.y, p.x)));
        }
        if let Some(l) = ov.l_m {
            if l == 0 {
                return Err(invalid("L_M override must be ≥ 1"));
            }
            p.l_m = Some(l);
        }
        p.set_s_tilde(tables)?;
        p.overrides = ov.clone();
        p.canonical = false;
        Ok(p)
    }

    /// `derive` followed by `with_overrides`.
    pub fn build(inputs: &ParamInputs, ov: &Overrides, tables: &ArithTables) -> Result<Self> {
        Self::derive(inputs, tables)?.with_overrides(ov, tables)
    }

    /// Smallest sieve limit that supports every polynomial and prime sum.
    pub fn required_limit(&self) -> u64 {
        let base = self.x.floor().max(self.y.floor()).max(2.0) as u64;
        base.max(self.l_m.unwrap_or(0))
    }

    /// Smallest sieve limit for `inputs` and `ov` before anything is derived.
    pub fn required_limit_for(inputs: &ParamInputs, ov: &Overrides) -> u64 {
        let log_t = inputs.t.ln();
        let loglog_t = log_t.ln();
        let x = ov
            .x
            .unwrap_or_else(|| (log_t / (inputs.kprime * loglog_t.ln())).exp());
        let y = ov.y.unwrap_or_else(|| (log_t / (inputs.kprime * loglog_t)).exp());
        let base = if x.is_finite() && y.is_finite() {
            x.max(y).floor().max(2.0) as u64
        } else {
            2
        };
        base.max(ov.l_m.unwrap_or(0))
    }

    pub fn mollifier_shape(&self) -> MollifierShape {
        MollifierShape {
            x: self.x,
            y: self.y,
            low_budget: 100.0 * self.loglog_t,
            high_budget: 100.0 * self.logloglog_t,
        }
    }

    /// `(log log log T)² / √(log log T)`, the rate of the main theorem.
    pub fn rate(&self) -> f64 {
        self.logloglog_t * self.logloglog_t / self.loglog_t.sqrt()
    }

    /// Symbol table as `(name, value)` rows.
    pub fn table(&self) -> Vec<(&'static str, String)> {
        let f = |v: f64| format!("{v:.16e}");
        vec![
            ("T", f(self.t)),
            ("K", f(self.k)),
            ("Kprime", f(self.kprime)),
            ("alpha", f(self.alpha)),
            ("h", f(self.h)),
            ("hprime", f(self.hprime)),
            ("delta", f(self.delta)),
            ("logT", f(self.log_t)),
            ("loglogT", f(self.loglog_t)),
            ("logloglogT", f(self.logloglog_t)),
            ("W", f(self.w)),
            ("sigma0", f(self.sigma0)),
            ("X", f(self.x)),
            ("Y", f(self.y)),
            ("s_norm", f(self.s_norm)),
            ("s_tilde", f(self.s_tilde)),
            ("s_tilde_sq", f(self.s_tilde_sq)),
            ("N_trunc", self.n_trunc.to_string()),
            ("C_const", f(self.c_const)),
            (
                "L_M",
                self.l_m.map_or_else(|| "full".to_string(), |l| l.to_string()),
            ),
            ("canonical", self.canonical.to_string()),
        ]
    }
}

impl ExperimentParams {
    fn set_s_tilde(&mut self, tables: &ArithTables) -> Result<()> {
        self.s_tilde_sq = tables.mertens_sum(self.y)? / 2.0;
        self.s_tilde = self.s_tilde_sq.sqrt();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn tables() -> &'static ArithTables {
        static T: OnceLock<ArithTables> = OnceLock::new();
        T.get_or_init(|| build_tables(2_000_000).unwrap())
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn desk_scale_example() {
        // Reference values from 30-digit arithmetic.
        let p = derive(1e8, 1.0, 3.0, 0.5, 0.0, tables()).unwrap();
        assert!(close(p.log_t, 18.420_680_743_952_365, 1e-14));
        assert!(close(p.loglog_t, 2.913_473_986_927_791_7, 1e-14));
        assert!(close(p.logloglog_t, 1.069_346_179_099_760_5, 1e-14));
        assert!(close(p.w, 1.143_501_250_755_257_2, 1e-13));
        assert!(close(p.sigma0, 0.562_077_035_406_559_4, 1e-14));
        assert!(close(p.delta, 0.232_995_300_892_328_04, 1e-14));
        assert!(close(p.y, 8.227_873_734_583_141, 1e-12));
        assert!(close(p.x, 311.699_157_996_059_97, 1e-12));
        assert_eq!(p.hprime - p.h, p.delta);
        assert!(p.n_trunc as f64 >= p.c_const * p.loglog_t);
        assert_eq!(p.n_trunc, 13);
        assert!(!p.canonical);
    }

    #[test]
    fn s_tilde_is_half_mertens_bitwise() {
        let t = tables();
        let p = derive(1e8, 1.0, 3.0, 0.5, 0.0, t).unwrap();
        assert_eq!(
            p.s_tilde_sq.to_bits(),
            (t.mertens_sum(p.y).unwrap() / 2.0).to_bits()
        );
    }

    #[test]
    fn overrides() {
        let t = tables();
        let p = derive(1e8, 1.0, 3.0, 0.5, 0.0, t).unwrap();
        assert_eq!(p.with_overrides(&Overrides::default(), t).unwrap(), p);

        let w0 = p
            .with_overrides(&Overrides { w: Some(0.0), ..Default::default() }, t)
            .unwrap();
        assert_eq!(w0.sigma0, 0.5);
        assert!(!w0.canonical);

        let w5 = p
            .with_overrides(&Overrides { w: Some(5.0), ..Default::default() }, t)
            .unwrap();
        assert!(close(w5.sigma0, 0.771_434_051_189_532_4, 1e-14));

        let xy = p
            .with_overrides(
                &Overrides { x: Some(1e6), y: Some(1e4), ..Default::default() },
                t,
            )
            .unwrap();
        assert_eq!(
            xy.s_tilde_sq.to_bits(),
            (t.mertens_sum(1e4).unwrap() / 2.0).to_bits()
        );

        let bad = p.with_overrides(
            &Overrides { x: Some(100.0), y: Some(1000.0), ..Default::default() },
            t,
        );
        assert!(bad.unwrap_err().to_string().contains("exceeds"));
    }

    #[test]
    fn rejections() {
        let t = tables();
        let e = derive(10.0, 1.0, 3.0, 0.5, 0.0, t).unwrap_err();
        assert!(e.to_string().contains("too small"));
        let e = derive(1e8, 1.0, 2.0, 0.5, 0.0, t).unwrap_err();
        assert!(e.to_string().contains("2 < K′ < K"));
        assert!(derive(1e8, 1.0, 3.0, 1.0, 0.0, t).is_err());
        assert!(derive(1e8, 1.0, 3.0, 0.0, 0.0, t).is_err());
    }

    #[test]
    fn canonical_when_kprime_below_k() {
        let p = derive(1e40, 10.0, 3.0, 0.5, 0.0, tables());
        // Y at T = 1e40 is far below the test sieve, X is not needed here.
        let p = p.unwrap();
        assert!(p.canonical);
        assert!(p.sigma0 < 1.0);
    }

    #[test]
    fn serde_round_trip_then_rederive_is_bitwise() {
        let t = tables();
        let p = derive(3.7e6, 1.0, 3.0, 0.5, 0.25, t).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: ExperimentParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let again = ExperimentParams::derive(&back.inputs, t).unwrap();
        assert_eq!(again, p);
    }

    proptest! {
        #[test]
        fn monotone_in_t(a in 5.0f64..40.0, b in 5.0f64..40.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let t = tables();
            let p = derive(10f64.powf(lo), 1.0, 3.0, 0.5, 0.0, t).unwrap();
            let q = derive(10f64.powf(hi), 1.0, 3.0, 0.5, 0.0, t).unwrap();
            prop_assert!(q.sigma0 - 0.5 < p.sigma0 - 0.5);
            prop_assert!(q.x > p.x);
            prop_assert!(q.y > p.y);
            prop_assert!(p.y < p.x && p.x < p.t && p.sigma0 > 0.5);
        }

        #[test]
        fn delta_matches_offsets(h in -1e3f64..1e3, lt in 5.0f64..30.0) {
            let p = derive(10f64.powf(lt), 1.0, 3.0, 0.5, h, tables()).unwrap();
            let d = (p.hprime - p.h - p.delta).abs();
            prop_assert!(d <= f64::EPSILON * p.hprime.abs().max(p.h.abs()).max(1.0));
        }
    }
}
