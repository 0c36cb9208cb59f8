use super::*;
use crate::mc::ChainPolys;
use crate::arith::build_tables;
use std::sync::OnceLock;

fn tables() -> &'static ArithTables {
    static T: OnceLock<ArithTables> = OnceLock::new();
    T.get_or_init(|| build_tables(100_000).unwrap())
}

fn cfg(n: usize, seed: u64) -> LadderConfig {
    LadderConfig {
        n_samples: n,
        seed,
        family: FamilyConfig {
            directions: 16,
            offsets: 33,
            hinge_grid: 8,
        },
    }
}

fn params(t: f64, ov: &Overrides) -> ExperimentParams {
    ExperimentParams::build(&ParamInputs { t, ..Default::default() }, ov, tables()).unwrap()
}

#[test]
fn ladder_is_bounded_and_telescopes() {
    let p = params(1e5, &Overrides::default());
    let r = run_ladder(&p, tables(), &ZetaBackend::afe(), &cfg(1000, 3), &Parallelism::auto()).unwrap();
    for d in r.link_estimates().iter().chain([&r.total.estimate]) {
        assert!((0.0..=2.0).contains(d));
    }
    assert!(r.total.estimate <= r.link_sum());
    assert_eq!(r.n_samples, 1000);
    assert!(r.n_used <= 1000 && r.n_used >= 990);
    assert_eq!(r.family_size, 16 * 33 * 2 + 64);
    // Both Gaussian sides are analytic.
    assert_eq!((r.links[6].n_a, r.links[6].n_b), (0, 0));
}

#[test]
fn zero_w_makes_the_first_link_vanish() {
    let ov = Overrides {
        w: Some(0.0),
        ..Default::default()
    };
    let p = params(1e5, &ov);
    assert_eq!(p.sigma0, 0.5);
    let r = run_ladder(&p, tables(), &ZetaBackend::afe(), &cfg(1000, 5), &Parallelism::auto()).unwrap();
    assert_eq!(r.links[0].estimate, 0.0);
}

#[test]
fn ladder_is_worker_count_invariant() {
    let p = params(1e5, &Overrides::default());
    let run = |w: usize| {
        let r = run_ladder(
            &p,
            tables(),
            &ZetaBackend::afe(),
            &cfg(1000, 9),
            &Parallelism::with_workers(w).unwrap(),
        )
        .unwrap();
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn predicted_orders_at_1e8() {
    let p = params(1e8, &Overrides::default());
    let o = predicted_orders(&p);
    let ll = (1e8f64).ln().ln();
    let lll = ll.ln();
    assert!((o[0] - lll * lll / ll.sqrt()).abs() < 1e-15);
    assert!((o[0] - p.rate()).abs() < 1e-15);
    assert!((o[2] - ll.powf(-80.0)).abs() < 1e-300);
    assert!((o[4] - (lll / ll).sqrt()).abs() < 1e-15);
    assert!((o[6] - 1.0 / ll).abs() < 1e-15);
    assert_eq!(o[1], o[3]);
    assert_eq!(o[1], o[5]);
}

#[test]
fn rejects_small_runs_and_bad_t_lists() {
    let p = params(1e5, &Overrides::default());
    let e = run_ladder(&p, tables(), &ZetaBackend::afe(), &cfg(999, 1), &Parallelism::sequential()).unwrap_err();
    assert!(e.is_validation());
    let inputs = ParamInputs::default();
    let ov = Overrides::default();
    let par = Parallelism::sequential();
    assert!(rate_curve(&[], &inputs, &ov, tables(), &cfg(1000, 1), &par).is_err());
    assert!(rate_curve(&[1e6, 1e5], &inputs, &ov, tables(), &cfg(1000, 1), &par).is_err());
}

#[test]
fn single_point_rate_curve() {
    let rows = rate_curve(
        &[1e5],
        &ParamInputs::default(),
        &Overrides::default(),
        tables(),
        &cfg(1000, 2),
        &Parallelism::auto(),
    )
    .unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r.total, r.ladder.total.estimate);
    assert!((r.ratio * r.rate - r.total).abs() < 1e-15);
}

#[test]
fn rate_curve_limit_covers_the_largest_t() {
    let inputs = ParamInputs::default();
    let ov = Overrides::default();
    let lim = rate_curve_limit(&[1e5, 1e8], &inputs, &ov);
    let p = params(1e8, &ov);
    assert!(lim >= p.required_limit());
}

/// At `T = 10⁸` the prime sum `P₁` runs over `p ≤ Y ≈ 8`, where
/// `cos(δ log p)` stays close to 1 and the correlation of `C̃` is about 0.96
/// against `α = 0.5`. The covariance perturbation is therefore not small at
/// this height.
#[test]
#[ignore = "C̃ and C differ by O(1) at T = 1e8; the bound is asymptotic"]
fn ctilde_is_close_to_c_at_1e8() {
    let p = params(1e8, &Overrides::default());
    let ct = GaussianSpec::ctilde(&p, tables()).unwrap();
    let c = GaussianSpec::paper_c(p.alpha).unwrap();
    let d = crate::metrics::gaussian_pair_distance(&ct, &c, None, &Parallelism::auto()).unwrap();
    assert!(d.estimate <= 0.02, "{}", d.estimate);
}

#[test]
fn required_limit_suffices_for_every_polynomial() {
    for t in [1e4, 1e5, 1e6, 1e7, 1e8] {
        let inputs = ParamInputs { t, ..Default::default() };
        let ov = Overrides::default();
        let tables = build_tables(ExperimentParams::required_limit_for(&inputs, &ov)).unwrap();
        let p = ExperimentParams::build(&inputs, &ov, &tables).unwrap();
        ChainPolys::build(&p, &tables).unwrap();
        GaussianSpec::ctilde(&p, &tables).unwrap();
    }
}
