use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graphs::ScalingTag;
use crate::model::{exact_summary, SpinConfiguration};

fn spins(v: &[i8]) -> SpinConfiguration {
    SpinConfiguration::new(v.to_vec()).unwrap()
}

fn single_edge() -> InteractionMatrix {
    InteractionMatrix::from_edges(2, [(0, 1, 1.0)], ScalingTag::Raw).unwrap()
}

/// A random weighted graph with roughly `density` of all pairs present.
fn random_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
) -> (InteractionMatrix, SpinConfiguration) {
    let mut edges = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            if rng.random::<f64>() < density {
                edges.push((i, k, rng.random_range(-0.6..1.0)));
            }
        }
    }
    let j = InteractionMatrix::from_edges(n, edges, ScalingTag::Raw).unwrap();
    let x = SpinConfiguration::new(
        (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect(),
    )
    .unwrap();
    (j, x)
}

#[test]
fn pseudolikelihood_zero_cases() {
    let half = 0.5f64.ln();
    let x = spins(&[1, -1, 1]);
    assert_relative_eq!(
        log_pseudolikelihood(&InteractionMatrix::zeros(3), &x, 1.3).unwrap(),
        half,
        epsilon = 1e-15
    );
    let j = InteractionMatrix::from_edges(3, [(0, 1, 1.0), (1, 2, 0.4)], ScalingTag::Raw).unwrap();
    assert_relative_eq!(
        log_pseudolikelihood(&j, &x, 0.0).unwrap(),
        half,
        epsilon = 1e-15
    );
    assert_relative_eq!(
        kl_to_model(&InteractionMatrix::zeros(3), &x, 2.0).unwrap(),
        2f64.ln(),
        epsilon = 1e-15
    );
}

#[test]
fn pseudolikelihood_single_edge() {
    // log sigma(2), both nodes contribute the same term
    let v = log_pseudolikelihood(&single_edge(), &spins(&[1, 1]), 1.0).unwrap();
    assert_relative_eq!(v, -0.12692801104297263, epsilon = 1e-14);
}

#[test]
fn kl_is_negated_pseudolikelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (j, x) = random_instance(&mut rng, 12, 0.3);
        let beta = rng.random_range(0.0..3.0);
        let sum = kl_to_model(&j, &x, beta).unwrap() + log_pseudolikelihood(&j, &x, beta).unwrap();
        assert!(sum.abs() < 1e-12);
    }
}

#[test]
fn dpd_closed_form_for_isolated_node() {
    let j = InteractionMatrix::zeros(1);
    assert_relative_eq!(
        dpd_objective(&j, &spins(&[1]), 0.7, 1.0).unwrap(),
        0.5,
        epsilon = 1e-15
    );
    assert!(matches!(
        dpd_objective(&j, &spins(&[1]), 0.7, 0.0),
        Err(Error::LambdaZero)
    ));
}

/// The direct transcription of the divergence, including the `N / lambda`
/// constant, used to check the cancellation-free rewrite.
fn dpd_literal(j: &InteractionMatrix, x: &SpinConfiguration, beta: f64, lambda: f64) -> f64 {
    let m = crate::model::local_fields(j, x).unwrap();
    let n = x.len() as f64;
    let mut total = 0.0;
    for (i, &mi) in m.iter().enumerate() {
        let p = (2.0 * beta * mi).exp() / (1.0 + (2.0 * beta * mi).exp());
        let y = (1.0 + x.get(i)) / 2.0;
        total += p.powf(1.0 + lambda) + (1.0 - p).powf(1.0 + lambda)
            - (1.0 + 1.0 / lambda) * (y * p.powf(lambda) + (1.0 - y) * (1.0 - p).powf(lambda));
    }
    (total + n / lambda) / n.powf(1.0 + lambda)
}

#[test]
fn dpd_rewrite_matches_literal_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let (j, x) = random_instance(&mut rng, 15, 0.3);
        let beta = rng.random_range(0.0..2.0);
        let lambda = rng.random_range(0.05..1.5);
        assert_relative_eq!(
            dpd_objective(&j, &x, beta, lambda).unwrap(),
            dpd_literal(&j, &x, beta, lambda),
            max_relative = 1e-9
        );
    }
}

#[test]
fn score_single_edge_value() {
    let s = score(&single_edge(), &spins(&[1, 1]), 1.0, 0.5).unwrap();
    let f = 0.5f64.cosh() / 1f64.cosh().powf(1.5);
    assert_relative_eq!(s, f * (1.0 - 1f64.tanh()), epsilon = 1e-15);
    assert_relative_eq!(s, 0.14024876094301159, epsilon = 1e-13);
}

#[test]
fn score_vanishes_without_couplings() {
    let x = spins(&[1, -1, 1, 1]);
    for &(b, l) in &[(0.0, 0.0), (1.0, 0.5), (4.0, 1.0)] {
        assert_eq!(score(&InteractionMatrix::zeros(4), &x, b, l).unwrap(), 0.0);
        let d = score_derivative_parts(&InteractionMatrix::zeros(4), &x, b, l).unwrap();
        assert_eq!((d.s1, d.s2), (0.0, 0.0));
    }
}

#[test]
fn derivative_parts_at_beta_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (j, x) = random_instance(&mut rng, 10, 0.4);
    let m = crate::model::local_fields(&j, &x).unwrap();
    let mean_sq = m.iter().map(|v| v * v).sum::<f64>() / 10.0;
    for &lambda in &[0.0, 0.3, 1.0] {
        let d = score_derivative_parts(&j, &x, 0.0, lambda).unwrap();
        assert_eq!(d.s1, 0.0);
        assert_relative_eq!(d.s2, -mean_sq, epsilon = 1e-14);
    }
}

#[test]
fn score_matches_finite_difference_of_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-6;
    for _ in 0..25 {
        let (j, x) = random_instance(&mut rng, 20, 0.25);
        let beta = rng.random_range(0.05..2.0);
        let lambda = rng.random_range(0.05..1.2);
        let n = 20.0f64;
        let fd = (dpd_objective(&j, &x, beta + h, lambda).unwrap()
            - dpd_objective(&j, &x, beta - h, lambda).unwrap())
            / (2.0 * h);
        let s = score(&j, &x, beta, lambda).unwrap();
        let prefactor = (2.0 * n).powf(lambda) / (1.0 + lambda);
        assert!(
            (s + prefactor * fd).abs() < 1e-5,
            "{s} vs {}",
            -prefactor * fd
        );
    }
}

#[test]
fn mpl_score_is_derivative_of_pseudolikelihood() {
    // At lambda = 0, S = d/dbeta [(1/N) log L].
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-6;
    for _ in 0..10 {
        let (j, x) = random_instance(&mut rng, 20, 0.25);
        let beta = rng.random_range(0.05..2.0);
        let fd = (log_pseudolikelihood(&j, &x, beta + h).unwrap()
            - log_pseudolikelihood(&j, &x, beta - h).unwrap())
            / (2.0 * h);
        assert!((score(&j, &x, beta, 0.0).unwrap() - fd).abs() < 1e-7);
    }
}

#[test]
fn derivative_parts_match_finite_difference_of_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = 1e-6;
    for _ in 0..25 {
        let (j, x) = random_instance(&mut rng, 20, 0.25);
        let beta = rng.random_range(0.05..2.0);
        let lambda = rng.random_range(0.0..1.2);
        let fd = (score(&j, &x, beta + h, lambda).unwrap()
            - score(&j, &x, beta - h, lambda).unwrap())
            / (2.0 * h);
        let d = score_derivative_parts(&j, &x, beta, lambda).unwrap();
        assert!((d.total() - fd).abs() < 1e-5);
        assert!(d.s2 <= 0.0);
        let data = ScoreData::new(&j, &x).unwrap();
        assert_relative_eq!(
            d.s2,
            data.score_derivative_s2_direct(beta, lambda),
            max_relative = 1e-12
        );
    }
}

#[test]
fn estimating_equation_is_unbiased_under_the_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let (j, _) = random_instance(&mut rng, 8, 0.4);
        for &beta in &[0.3, 1.1] {
            let table = exact_summary(&j, beta, true)
                .unwrap()
                .probabilities
                .unwrap();
            for &lambda in &[0.0, 0.5, 1.0] {
                let mean: f64 = table
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        p * score(
                            &j,
                            &SpinConfiguration::from_index(8, k as u64),
                            beta,
                            lambda,
                        )
                        .unwrap()
                    })
                    .sum();
                assert!(mean.abs() < 1e-10, "beta {beta} lambda {lambda}: {mean}");
            }
        }
    }
}

#[test]
fn aligned_pair_diverges() {
    for &lambda in &[0.0, 0.4, 1.0] {
        let out = estimate(
            &single_edge(),
            &spins(&[1, 1]),
            &EstimatorSettings::with_lambda(lambda),
        )
        .unwrap();
        assert_eq!(out.kind, OutcomeKind::RightDivergent);
        assert_eq!(out.beta_hat, 10.0);
    }
}

#[test]
fn anti_aligned_pair_sits_on_left_boundary() {
    for &lambda in &[0.0, 0.4, 1.0] {
        let out = estimate(
            &single_edge(),
            &spins(&[1, -1]),
            &EstimatorSettings::with_lambda(lambda),
        )
        .unwrap();
        assert_eq!(out.kind, OutcomeKind::LeftBoundary);
        assert_eq!(out.beta_hat, 0.0);
    }
}

#[test]
fn balanced_cycle_is_degenerate() {
    let j = InteractionMatrix::from_edges(
        4,
        [(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (0, 3, 0.5)],
        ScalingTag::Raw,
    )
    .unwrap();
    let out = estimate(&j, &spins(&[1, 1, -1, -1]), &EstimatorSettings::default()).unwrap();
    assert_eq!(out.kind, OutcomeKind::Degenerate);
    assert!(out.beta_hat.is_nan());
    assert!(!out.is_finite());
}

#[test]
fn settings_are_validated() {
    let j = single_edge();
    let x = spins(&[1, 1]);
    let bad = [
        EstimatorSettings {
            lambda: -0.1,
            ..Default::default()
        },
        EstimatorSettings {
            beta_min: 2.0,
            beta_max: 1.0,
            ..Default::default()
        },
        EstimatorSettings {
            grid_points: 1,
            ..Default::default()
        },
        EstimatorSettings {
            root_tol: 0.0,
            ..Default::default()
        },
    ];
    for s in &bad {
        assert!(matches!(estimate(&j, &x, s), Err(Error::InvalidSpec(_))));
    }
}

fn lattice_sample(m: usize, beta: f64, seed: u64) -> (InteractionMatrix, SpinConfiguration) {
    use crate::graphs::{build_ensemble, EnsembleKind, EnsembleSpec};
    use crate::sampler::{gibbs_sample, GibbsSettings};
    let j = build_ensemble(&EnsembleSpec::new(EnsembleKind::Lattice2d, m * m, 0)).unwrap();
    let x = gibbs_sample(
        &j,
        beta,
        1,
        &GibbsSettings {
            seed,
            ..Default::default()
        },
    )
    .unwrap()
    .pop()
    .unwrap();
    (j, x)
}

#[test]
fn interior_roots_are_local_minima_and_converged() {
    for seed in 0..8 {
        let (j, x) = lattice_sample(10, 1.5, seed);
        for &lambda in &[0.0, 0.3, 1.0] {
            let s = EstimatorSettings::with_lambda(lambda);
            let out = estimate(&j, &x, &s).unwrap();
            if out.kind != OutcomeKind::InteriorRoot {
                continue;
            }
            assert!(out.score_at_solution.abs() <= s.root_tol, "{out:?}");
            let data = ScoreData::new(&j, &x).unwrap();
            let here = objective(&data, out.beta_hat, lambda);
            for d in [-0.01, 0.01] {
                assert!(objective(&data, out.beta_hat + d, lambda) >= here);
            }
        }
    }
}

#[test]
fn lambda_grid_of_zero_is_the_mpl_estimate() {
    let (j, x) = lattice_sample(8, 1.0, 3);
    let single = estimate(&j, &x, &EstimatorSettings::default()).unwrap();
    let grid = estimate_lambda_grid(&j, &x, &[0.0], &EstimatorSettings::default()).unwrap();
    assert_eq!(grid, vec![(0.0, single)]);
}

#[test]
fn lambda_grid_order_does_not_move_estimates() {
    let lambdas: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let mut reversed = lambdas.clone();
    reversed.reverse();
    for seed in 0..5 {
        let (j, x) = lattice_sample(12, 1.2, seed);
        let forward =
            estimate_lambda_grid(&j, &x, &lambdas, &EstimatorSettings::default()).unwrap();
        let backward =
            estimate_lambda_grid(&j, &x, &reversed, &EstimatorSettings::default()).unwrap();
        for (a, b) in forward.iter().zip(backward.iter().rev()) {
            assert_eq!(a.0, b.0);
            assert_eq!(a.1.kind, b.1.kind);
            if a.1.kind == OutcomeKind::InteriorRoot {
                assert!((a.1.beta_hat - b.1.beta_hat).abs() <= 1e-8);
            }
        }
        for w in forward.windows(2) {
            if w[0].1.kind == OutcomeKind::InteriorRoot && w[1].1.kind == OutcomeKind::InteriorRoot
            {
                assert!((w[0].1.beta_hat - w[1].1.beta_hat).abs() < 0.5);
            }
        }
    }
}

#[test]
fn first_root_policy_returns_smallest_root() {
    let (j, x) = lattice_sample(10, 1.0, 1);
    let s = EstimatorSettings {
        root_policy: RootPolicy::FirstRoot,
        ..Default::default()
    };
    let a = estimate(&j, &x, &s).unwrap();
    let b = estimate(&j, &x, &EstimatorSettings::default()).unwrap();
    // the pseudolikelihood is concave, so both policies agree at lambda = 0
    assert_eq!(a, b);
}

#[test]
fn traced_solve_reports_every_evaluation() {
    let (j, x) = lattice_sample(6, 1.0, 2);
    let data = ScoreData::new(&j, &x).unwrap();
    let mut seen = Vec::new();
    let out = estimate_traced(&data, &EstimatorSettings::with_lambda(0.5), &mut |b| {
        seen.push(b)
    })
    .unwrap();
    assert!(seen.len() >= 512);
    if out.kind == OutcomeKind::InteriorRoot {
        assert!(seen.contains(&out.beta_hat));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_is_bounded(beta in 0.0f64..5.0, t in -20.0f64..20.0, lambda in 0.0f64..2.0) {
        let f = dpd_weight(beta, t, lambda);
        prop_assert!(f > 0.0);
        prop_assert!(f <= 2f64.powf(lambda));
    }

    #[test]
    fn s2_never_positive(seed in 0u64..1000, beta in 0.0f64..4.0, lambda in 0.0f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (j, x) = random_instance(&mut rng, 9, 0.4);
        prop_assert!(score_derivative_parts(&j, &x, beta, lambda).unwrap().s2 <= 0.0);
    }

    #[test]
    fn score_is_odd_under_global_flip(seed in 0u64..1000, beta in 0.0f64..3.0, lambda in 0.0f64..1.5) {
        // m flips sign with x, so every summand is unchanged
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (j, x) = random_instance(&mut rng, 9, 0.4);
        let a = score(&j, &x, beta, lambda).unwrap();
        let b = score(&j, &x.negated(), beta, lambda).unwrap();
        prop_assert!((a - b).abs() < 1e-13);
    }
}
