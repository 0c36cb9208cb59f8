use super::*;
use crate::mc::CovKind;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seq() -> Parallelism {
    Parallelism::sequential()
}

fn cloud(seed: u64, n: usize, shift: [f64; 2], scale: f64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let b: f64 = rng.random::<f64>() * 2.0 - 1.0;
            [shift[0] + scale * a, shift[1] + scale * (a * 0.3 + b)]
        })
        .collect()
}

fn small() -> FamilyConfig {
    FamilyConfig {
        directions: 16,
        offsets: 33,
        hinge_grid: 6,
    }
}

#[test]
fn two_point_masses() {
    for d in [0.5, 1.0, 3.0] {
        let a = vec![[0.0, 0.0]; 100];
        let b = vec![[d, 0.0]; 100];
        let (sa, sb) = (Source::Samples(&a), Source::Samples(&b));
        let rep = dudley_default(&sa, &sb, &seq()).unwrap();
        assert!((rep.estimate - d.min(2.0)).abs() < 1e-9, "d = {d}: {}", rep.estimate);
        assert_eq!(rep.family_size, 64 * 129 * 2 + 256);
        assert_eq!((rep.n_a, rep.n_b), (100, 100));
        // The optimal member is a ramp along the first axis.
        match TestFunctionFamily::for_sources(FamilyConfig::default(), &[sa, sb])
            .unwrap()
            .member(rep.argmax_member)
        {
            Member::Ramp { dir, .. } => assert!(dir[1].abs() < 1e-12),
            m => panic!("unexpected argmax {m:?}"),
        }
    }
}

#[test]
fn identical_samples_are_at_distance_zero() {
    let a = cloud(1, 300, [0.0, 0.0], 1.0);
    let s = Source::Samples(&a);
    let rep = dudley_default(&s, &s, &seq()).unwrap();
    assert_eq!(rep.estimate, 0.0);
    assert_eq!(rep.argmax_member, 0);
}

#[test]
fn rejects_small_samples_and_empty_families() {
    let a = cloud(1, 99, [0.0, 0.0], 1.0);
    let b = cloud(2, 200, [0.0, 0.0], 1.0);
    let err = dudley_default(&Source::Samples(&a), &Source::Samples(&b), &seq()).unwrap_err();
    assert!(err.is_validation());
    assert!(TestFunctionFamily::new(vec![], vec![], vec![]).is_err());
    assert!(TestFunctionFamily::new(vec![[1.0, 1.0]], vec![0.0], vec![]).is_err());
}

#[test]
fn twenty_random_pairs_symmetry_refinement_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..20u64 {
        let shift = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
        let scale = 0.5 + rng.random::<f64>();
        let a = cloud(3 * case, 150, [0.0, 0.0], 1.0);
        let b = cloud(3 * case + 1, 170, shift, scale);
        let c = cloud(3 * case + 2, 130, [-shift[1], shift[0]], 1.0 / scale);
        let (sa, sb, sc) = (Source::Samples(&a), Source::Samples(&b), Source::Samples(&c));
        let fam = TestFunctionFamily::for_sources(small(), &[sa, sb, sc]).unwrap();
        let ab = dudley_estimate(&sa, &sb, &fam, &seq()).unwrap();
        let ba = dudley_estimate(&sb, &sa, &fam, &seq()).unwrap();
        assert_eq!(ab.estimate, ba.estimate);
        assert_eq!(ab.argmax_member, ba.argmax_member);
        assert!((0.0..=2.0).contains(&ab.estimate));

        let fine = fam.refined();
        let (d, b) = (fam.directions().len(), fam.offsets().len());
        assert_eq!(fine.len(), 2 * (2 * d) * (2 * b - 1) + fam.centres().len());
        let ab_fine = dudley_estimate(&sa, &sb, &fine, &seq()).unwrap();
        assert!(ab_fine.estimate >= ab.estimate, "case {case}");

        let ac = dudley_estimate(&sa, &sc, &fam, &seq()).unwrap();
        let bc = dudley_estimate(&sb, &sc, &fam, &seq()).unwrap();
        assert!(ac.estimate <= ab.estimate + bc.estimate + 1e-15);
    }
}

#[test]
fn refinement_keeps_every_member() {
    let a = cloud(5, 200, [0.3, -0.1], 1.5);
    let fam = TestFunctionFamily::for_sources(small(), &[Source::Samples(&a)]).unwrap();
    let fine = fam.refined();
    for d in fam.directions() {
        assert!(fine.directions().contains(d));
    }
    for o in fam.offsets() {
        assert!(fine.offsets().contains(o));
    }
}

#[test]
fn worker_count_does_not_change_the_estimate() {
    let a = cloud(7, 400, [0.0, 0.0], 1.0);
    let b = cloud(8, 400, [0.2, 0.0], 1.1);
    let (sa, sb) = (Source::Samples(&a), Source::Samples(&b));
    let one = dudley_default(&sa, &sb, &seq()).unwrap();
    let four = dudley_default(&sa, &sb, &Parallelism::with_workers(4).unwrap()).unwrap();
    assert_eq!(one, four);
}

#[test]
fn gaussian_ramp_expectations_match_a_large_sample() {
    let g = GaussianSpec::paper_c(0.5).unwrap();
    let xs = gaussian_sample(&g, 3, 400_000, &Parallelism::auto());
    let (sg, sx) = (Source::Gaussian(&g), Source::Samples(&xs));
    let fam = TestFunctionFamily::for_sources(small(), &[sg]).unwrap();
    let rep = dudley_estimate(&sg, &sx, &fam, &seq()).unwrap();
    // Each member has variance ≤ 1, so the max over ~1100 members sits a few
    // standard errors out.
    assert!(rep.estimate < 6.0 / (xs.len() as f64).sqrt(), "{}", rep.estimate);
}

#[test]
fn kolmogorov_cases() {
    let xs: Vec<f64> = cloud(11, 1000, [0.0, 0.0], 1.0).iter().map(|x| x[0]).collect();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let ecdf = |x: f64| sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64;
    assert!(kolmogorov_1d(&xs, ecdf).unwrap() <= 1.0 / 1000.0 + 1e-15);

    let zeros = vec![0.0; 50];
    assert!((kolmogorov_1d(&zeros, quad::norm_cdf).unwrap() - 0.5).abs() < 1e-15);

    // DKW: P(D > ε) ≤ 2 exp(−2nε²) = 2e−20 at n = 10⁵, ε = 0.01.
    let g = GaussianSpec::new([[1.0, 0.0], [0.0, 1.0]], CovKind::Custom).unwrap();
    let z: Vec<f64> = gaussian_sample(&g, 5, 100_000, &Parallelism::auto())
        .iter()
        .map(|x| x[1])
        .collect();
    assert!(kolmogorov_1d(&z, quad::norm_cdf).unwrap() <= 0.01);

    assert!(kolmogorov_1d(&[], quad::norm_cdf).is_err());
}

#[test]
fn kolmogorov_matches_brute_force() {
    let xs = [0.3, -1.0, 0.3, 2.0, 0.0];
    let f = |x: f64| 1.0 / (1.0 + (-x).exp());
    let n = xs.len() as f64;
    let mut brute: f64 = 0.0;
    for &x in &xs {
        let below = xs.iter().filter(|&&v| v < x).count() as f64 / n;
        let upto = xs.iter().filter(|&&v| v <= x).count() as f64 / n;
        brute = brute.max((f(x) - below).abs()).max((f(x) - upto).abs());
    }
    assert_eq!(kolmogorov_1d(&xs, f).unwrap(), brute);
}

#[test]
fn gaussian_sample_moments() {
    assert!(gaussian_sample(&GaussianSpec::paper_c(0.5).unwrap(), 1, 0, &seq()).is_empty());
    let n = 200_000;
    let id = GaussianSpec::new([[1.0, 0.0], [0.0, 1.0]], CovKind::Custom).unwrap();
    let xs = gaussian_sample(&id, 17, n, &Parallelism::auto());
    for c in 0..2 {
        let m = xs.iter().map(|x| x[c]).sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x[c] - m).powi(2)).sum::<f64>() / n as f64;
        assert!((v - 1.0).abs() < 3.0 / (n as f64).sqrt() * 2f64.sqrt(), "var {v}");
    }
    let c = GaussianSpec::paper_c(0.5).unwrap();
    let ys = gaussian_sample(&c, 17, n, &Parallelism::auto());
    let rho = ys.iter().map(|x| x[0] * x[1]).sum::<f64>() / n as f64;
    assert!((rho - 0.5).abs() < 3.0 / (n as f64).sqrt());
    let again = gaussian_sample(&c, 17, 1000, &seq());
    assert_eq!(&ys[..1000], &again[..]);
}

#[test]
fn gaussian_pair_perturbation_trend() {
    let id = GaussianSpec::new([[1.0, 0.0], [0.0, 1.0]], CovKind::Custom).unwrap();
    assert_eq!(gaussian_pair_distance(&id, &id, None, &seq()).unwrap().estimate, 0.0);
    let pert = |eps: f64| GaussianSpec::new([[1.0, eps], [eps, 1.0]], CovKind::Custom).unwrap();
    let d1 = gaussian_pair_distance(&pert(0.1), &id, None, &seq()).unwrap().estimate;
    let d2 = gaussian_pair_distance(&pert(0.05), &id, None, &seq()).unwrap().estimate;
    // A 1-Lipschitz f moves by at most W₁(N(0, C₁), N(0, C₂)) ≤ ‖√C₁ − √C₂‖_F.
    assert!(d1 > 0.0 && d1 <= 0.1, "{d1}");
    assert!(d2 > 0.0 && d2 <= 0.55 * d1, "{d2} vs {d1}");
}

#[test]
fn gaussian_outside_box_matches_product_form() {
    for (s1, s2, r) in [(1.0, 1.0, 1.0), (0.5, 2.0, 1.7), (1.0, 0.3, 0.2)] {
        let g = GaussianSpec::new([[s1 * s1, 0.0], [0.0, s2 * s2]], CovKind::Custom).unwrap();
        let p = |s: f64| 2.0 * quad::norm_cdf(r / s) - 1.0;
        let want = 1.0 - p(s1) * p(s2);
        assert!((gaussian_outside_box(&g, r) - want).abs() < 1e-12);
    }
}

#[test]
fn gaussian_outside_box_correlated_against_sample() {
    let g = GaussianSpec::paper_c(0.8).unwrap();
    let xs = gaussian_sample(&g, 2, 400_000, &Parallelism::auto());
    let r = 1.1;
    let frac = xs.iter().filter(|x| x[0].abs() >= r || x[1].abs() >= r).count() as f64 / xs.len() as f64;
    let want = gaussian_outside_box(&g, r);
    assert!((frac - want).abs() < 4.0 * (want * (1.0 - want) / xs.len() as f64).sqrt());
}

#[test]
fn fourier_gap_rejects_bad_step() {
    let g = GaussianSpec::paper_c(0.5).unwrap();
    let xs = gaussian_sample(&g, 1, 10, &seq());
    for step in [0.0, -0.1, f64::NAN] {
        assert!(fourier_gap_bound(&xs, &g, 1.0, 1.0, step, &seq()).unwrap_err().is_validation());
    }
}

#[test]
fn fourier_gap_on_own_sample_tends_to_tails() {
    let g = GaussianSpec::paper_c(0.5).unwrap();
    let xs = gaussian_sample(&g, 4, 100_000, &Parallelism::auto());
    let gap = fourier_gap_bound(&xs, &g, 2.0, 1.5, 0.25, &seq()).unwrap();
    assert!(gap.max_char_gap < 0.02);
    let floor = gap.inv_f + gap.mu_outside + gap.nu_outside;
    assert!(gap.bound - floor < 9.0 * 0.02);
    assert!((gap.mu_outside - gap.nu_outside).abs() < 0.01);
}

#[test]
fn fourier_grid_refinement_never_lowers_the_max() {
    let g = GaussianSpec::paper_c(0.3).unwrap();
    let xs = cloud(21, 500, [0.1, 0.0], 1.2);
    let mut prev = 0.0;
    for step in [0.8, 0.4, 0.2, 0.1] {
        let gap = fourier_gap_bound(&xs, &g, 2.0, 2.0, step, &seq()).unwrap();
        assert!(gap.max_char_gap >= prev);
        prev = gap.max_char_gap;
    }
}

#[test]
fn fourier_upper_bound_dominates_dudley_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20u64 {
        let alpha = rng.random::<f64>() * 1.6 - 0.8;
        let g = GaussianSpec::paper_c(alpha).unwrap();
        let shift = [rng.random::<f64>() * 0.6 - 0.3, rng.random::<f64>() * 0.6 - 0.3];
        let xs: Vec<[f64; 2]> = gaussian_sample(&g, case, 500, &seq())
            .iter()
            .map(|x| [x[0] + shift[0], x[1] + shift[1]])
            .collect();
        // Admissible: R·F ≥ 1 and the grid resolves frequencies at scale 1/R.
        let r = 1.5 + 2.0 * rng.random::<f64>();
        let f = 0.5 + 2.5 * rng.random::<f64>();
        let step = (0.5 / r).min(f / 4.0);
        let upper = fourier_gap_bound(&xs, &g, r, f, step, &seq()).unwrap().bound;
        let lower = dudley_estimate(
            &Source::Samples(&xs),
            &Source::Gaussian(&g),
            &TestFunctionFamily::for_sources(small(), &[Source::Samples(&xs), Source::Gaussian(&g)]).unwrap(),
            &seq(),
        )
        .unwrap()
        .estimate;
        assert!(upper >= lower, "case {case}: {upper} < {lower}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimate_is_bounded_and_symmetric(seed in 0u64..1000, dx in -3.0f64..3.0, sc in 0.2f64..3.0) {
        let a = cloud(seed, 120, [0.0, 0.0], 1.0);
        let b = cloud(seed + 1, 110, [dx, 0.0], sc);
        let (sa, sb) = (Source::Samples(&a), Source::Samples(&b));
        let fam = TestFunctionFamily::for_sources(small(), &[sa, sb]).unwrap();
        let ab = dudley_estimate(&sa, &sb, &fam, &seq()).unwrap();
        let ba = dudley_estimate(&sb, &sa, &fam, &seq()).unwrap();
        prop_assert!((0.0..=2.0).contains(&ab.estimate));
        prop_assert_eq!(ab.estimate, ba.estimate);
    }

    #[test]
    fn kolmogorov_in_unit_interval(xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
        let d = kolmogorov_1d(&xs, quad::norm_cdf).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
