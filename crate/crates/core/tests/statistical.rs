//! Seeded Monte Carlo checks against deterministic oracles.

use harmonic_descent::chain::{
    hit_probability_exact, hit_probability_mc, limit_formula, HittingQuery,
};
use harmonic_descent::composition::{first_block_counts, CompositionMethod, TruncatedJumps};
use harmonic_descent::numerics::{integrate, QuadratureSpec, RngStream};
use harmonic_descent::renewal::{
    chi_samples, hitting_via_overshoot, overshoot_mc, ChiDistribution, HarmonicLevyMeasure,
};
use harmonic_descent::stats::{chi_square_homogeneity, ks_distance, total_variation_to};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const REPS: usize = 100_000;

#[test]
fn mc_from_hundred_matches_dp() {
    let q = HittingQuery::new(100, 2).unwrap();
    let e = hit_probability_mc(q, REPS, 21).unwrap();
    assert!(e.z_score(hit_probability_exact(q)) <= 4.0, "{e:?}");
}

#[test]
fn mean_jump_matches_quadrature() {
    let eps = 1e-6;
    let jumps = TruncatedJumps::new(eps).unwrap();
    let mut rng = RngStream::new(17, 0);
    let xs: Vec<f64> = (0..REPS).map(|_| jumps.jump_size(&mut rng)).collect();
    assert!(xs.iter().all(|&x| x > eps));
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let nu = HarmonicLevyMeasure;
    let oracle = nu.truncated_first_moment(eps).unwrap() / nu.truncated_mass(eps).unwrap();
    assert!(
        (mean - oracle).abs() <= 4.0 * (var / n).sqrt(),
        "{mean} vs {oracle}"
    );
}

#[test]
fn chi_samples_match_law() {
    let chi = ChiDistribution::default();
    let xs = chi_samples(REPS, 33);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // E[χ] = ∫_0^∞ P(χ > y) dy, by quadrature of the closed-form tail
    let oracle = integrate(
        |y| chi.tail(y).unwrap(),
        0.0,
        f64::INFINITY,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!((oracle - chi.mean()).abs() < 1e-10);
    assert!((oracle - 0.7307630).abs() < 1e-7);
    assert!((mean - oracle).abs() <= 4.0 * (var / n).sqrt());

    let p1 = chi.tail(1.0).unwrap();
    let above = xs.iter().filter(|&&x| x > 1.0).count() as f64 / n;
    assert!((above - p1).abs() <= 4.0 * (p1 * (1.0 - p1) / n).sqrt());

    assert!(ks_distance(&xs, |y| chi.cdf(y).unwrap()) <= 0.01);
    assert_eq!(xs, chi_samples(REPS, 33));
}

#[test]
fn first_block_goodness_of_fit() {
    let n = 20;
    let kernel = first_block_counts(n, REPS, 1, CompositionMethod::Kernel).unwrap();
    let boxes = first_block_counts(
        n,
        REPS,
        2,
        CompositionMethod::BallsInBoxes { epsilon: 1e-6 },
    )
    .unwrap();
    let (stat, dof) = chi_square_homogeneity(&kernel[1..], &boxes[1..], 5.0);
    let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "chi2 = {stat}, dof = {dof}, p = {p}");

    // both against the exact first-step law 1/(i h_n)
    let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let exact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).map(|i| 1.0 / (i as f64 * h)))
        .collect();
    assert!(total_variation_to(&kernel, &exact) < 0.01);
    assert!(total_variation_to(&boxes, &exact) < 0.01);
}

#[test]
fn overshoot_approaches_chi() {
    let chi = ChiDistribution::default();
    let far = overshoot_mc(30.0, 1e-6, REPS, 5).unwrap();
    assert!(ks_distance(&far.samples, |y| chi.cdf(y).unwrap()) <= 0.015);
    let near = overshoot_mc(0.01, 1e-6, REPS, 5).unwrap();
    assert!(ks_distance(&near.samples, |y| chi.cdf(y).unwrap()) > 0.1);
}

#[test]
fn via_overshoot_large_n_near_limit() {
    let e = hitting_via_overshoot(100, 1, 1e-6, REPS, 8).unwrap();
    let dp = hit_probability_exact(HittingQuery::new(101, 2).unwrap());
    assert!(e.z_score(dp) <= 4.0);
    let e = hitting_via_overshoot(10_000, 1, 1e-6, REPS, 9).unwrap();
    assert!((e.estimate - limit_formula(1).unwrap()).abs() <= 0.02);
}
