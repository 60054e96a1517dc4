//! The analytic-vs-Monte-Carlo cross-validation suite behind `rgg1d xcheck`.
//!
//! Every comparison pits a closed-form value against an independent seeded
//! simulation and reports the z score; the suite fails when any |z| exceeds 4
//! (two-sided false-alarm ~ 6e-5 per comparison; with ~17 comparisons the
//! Bonferroni-style family false-alarm stays around 1e-3) or when any exact
//! invariant is violated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rgg1d::analytic;
use rgg1d::montecarlo::{
    self, estimate, estimate_sequential, graph_stats, sample_positions, sample_values, Statistic,
};
use rgg1d::recursions;
use rgg1d::{ModelParams, Result};

pub const Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct Comparison {
    pub name: String,
    pub exact: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct InvariantCheck {
    pub name: String,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct XcheckReport {
    pub seed: u64,
    pub samples: u64,
    pub comparisons: Vec<Comparison>,
    pub invariants: Vec<InvariantCheck>,
    pub max_abs_z: f64,
    pub all_pass: bool,
}

fn derived(seed: u64, salt: u64) -> u64 {
    // splitmix-style spread so every suite entry owns an independent stream
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn compare(name: &str, exact: f64, mean: f64, stderr: f64) -> Comparison {
    let z = if stderr > 0.0 {
        (mean - exact) / stderr
    } else if mean == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Comparison {
        name: name.to_string(),
        exact,
        mc_mean: mean,
        mc_stderr: stderr,
        z,
        pass: z.abs() <= Z_THRESHOLD,
    }
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs the full suite. Deterministic given `(seed, samples)`.
pub fn run(seed: u64, samples: u64) -> Result<XcheckReport> {
    let mut comparisons = Vec::new();
    let mut invariants = Vec::new();
    let mut salt = 0u64;
    let mut next_seed = || {
        salt += 1;
        derived(seed, salt)
    };

    // --- connectivity, exponential model ---
    for (n, lambda, r) in [(2u64, 1.0, 1.0), (5, 1.0, 1.0), (20, 0.7, 0.9)] {
        let exact = analytic::connectivity_prob(n, lambda, r)?;
        let params = ModelParams::exponential(n, lambda, r)?;
        let est = estimate(
            &params,
            Statistic::Connectivity,
            samples,
            next_seed(),
            false,
        )?;
        comparisons.push(compare(
            &format!("connectivity n={n} lambda={lambda} r={r}"),
            exact,
            est.mean,
            est.stderr,
        ));
    }

    // --- connectivity, double exponential model ---
    for n in [2u64, 5] {
        let exact = analytic::double_exp_connectivity_prob(n, 1.0, 1.0)?;
        let params = ModelParams::double_exponential(n, 1.0, 1.0)?;
        let est = estimate(
            &params,
            Statistic::Connectivity,
            samples,
            next_seed(),
            false,
        )?;
        comparisons.push(compare(
            &format!("double_exp_connectivity n={n}"),
            exact,
            est.mean,
            est.stderr,
        ));
    }

    // --- origin bridge: U ~ Exp(k lambda), V ~ Exp((n-k) lambda) ---
    {
        let (n, k, lambda, r) = (3u64, 1u64, 1.0, 1.0);
        let exact = analytic::origin_bridge_prob(n, k, lambda, r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(next_seed());
        let mut hits = 0u64;
        for _ in 0..samples {
            let u = -(1.0 - rng.gen::<f64>()).ln() / (k as f64 * lambda);
            let v = -(1.0 - rng.gen::<f64>()).ln() / ((n - k) as f64 * lambda);
            if u + v <= r {
                hits += 1;
            }
        }
        let p = hits as f64 / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        comparisons.push(compare("origin_bridge n=3 k=1", exact, p, se));
    }

    // --- hole moments ---
    for (n, which) in [(3u64, "count"), (50, "count"), (50, "length")] {
        let params = ModelParams::exponential(n, 1.0, 1.0)?;
        let (exact, stat) = match which {
            "count" => (
                analytic::hole_count_moments(n, 1.0, 1.0)?.mean,
                Statistic::NumHoles,
            ),
            _ => (
                analytic::hole_length_moments(n, 1.0, 1.0)?.mean,
                Statistic::TotalHoleLength,
            ),
        };
        let est = estimate(&params, stat, samples, next_seed(), false)?;
        comparisons.push(compare(
            &format!("hole_{which}_mean n={n}"),
            exact,
            est.mean,
            est.stderr,
        ));
    }

    // --- transforms as expectations ---
    {
        let (n, lambda, r) = (12u64, 1.0, 0.8);
        let params = ModelParams::exponential(n, lambda, r)?;
        let theta = 0.5;
        let exact = analytic::hole_length_mgf(n, lambda, r, theta)?;
        let values = sample_values(
            &params,
            Statistic::TotalHoleLength,
            samples,
            next_seed(),
            false,
        )?;
        let transformed: Vec<f64> = values.iter().map(|h| (theta * h).exp()).collect();
        let (mean, se) = mean_se(&transformed);
        comparisons.push(compare("hole_length_mgf theta=0.5 n=12", exact, mean, se));

        let theta = std::f64::consts::LN_2;
        let exact = analytic::hole_count_mgf(n, lambda, r, theta)?;
        let values = sample_values(&params, Statistic::NumHoles, samples, next_seed(), false)?;
        let transformed: Vec<f64> = values.iter().map(|c| (theta * c).exp()).collect();
        let (mean, se) = mean_se(&transformed);
        comparisons.push(compare("hole_count_mgf theta=ln2 n=12", exact, mean, se));
    }

    // --- component count mean ---
    {
        let n = 50u64;
        let pmf = recursions::component_pmf(n, 1.0, 1.0)?;
        let params = ModelParams::exponential(n, 1.0, 1.0)?;
        let est = estimate(
            &params,
            Statistic::NumComponents,
            samples,
            next_seed(),
            false,
        )?;
        comparisons.push(compare(
            "component_count_mean n=50",
            pmf.mean(),
            est.mean,
            est.stderr,
        ));
    }

    // --- isolated node count mean (size-1 components) ---
    {
        let (n, lambda, r) = (20u64, 1.0, 0.5);
        let pmf = recursions::size_m_component_pmf(n, 1, lambda, r)?;
        let params = ModelParams::exponential(n, lambda, r)?;
        let est = estimate(
            &params,
            Statistic::SizeMComponentCount(1),
            samples,
            next_seed(),
            false,
        )?;
        comparisons.push(compare(
            "isolated_count_mean n=20 r=0.5",
            pmf.mean(),
            est.mean,
            est.stderr,
        ));
    }

    // --- redundant node mean, conditioned on connectivity ---
    {
        let (n, lambda, r) = (10u64, 1.0, 2.0);
        let pmf = recursions::redundant_pmf(n, lambda, r)?;
        let params = ModelParams::exponential(n, lambda, r)?;
        let est = estimate(
            &params,
            Statistic::RedundantCount,
            samples,
            next_seed(),
            true,
        )?;
        comparisons.push(compare(
            "redundant_mean n=10 r=2 | connected",
            pmf.mean(),
            est.mean,
            est.stderr,
        ));
    }

    // --- crossing probability, conditioned on connectivity ---
    {
        let (n, j, i, lambda, r) = (5u64, 1u64, 3u64, 1.0, 1.0);
        let exact = recursions::last_in_range_prob(n, j, i, lambda, r)?;
        let params = ModelParams::exponential(n, lambda, r)?;
        let mc_seed = next_seed();
        let mut hits = 0u64;
        let mut accepted = 0u64;
        let mut index = 0u64;
        let mut rng = ChaCha8Rng::seed_from_u64(mc_seed);
        while accepted < samples {
            index += 1;
            if index > samples * 100 {
                break;
            }
            let pos = sample_positions(&params, &mut rng)?;
            if pos.windows(2).any(|w| w[1] - w[0] > r) {
                continue;
            }
            accepted += 1;
            let reach = pos[(j - 1) as usize] + r;
            if pos[(i - 1) as usize] <= reach && reach < pos[i as usize] {
                hits += 1;
            }
        }
        let p = hits as f64 / accepted as f64;
        let se = (p * (1.0 - p) / accepted as f64).sqrt();
        comparisons.push(compare(
            "last_in_range n=5 j=1 i=3 | connected",
            exact,
            p,
            se,
        ));
    }

    // --- spacing mean (independent-spacings law) ---
    {
        let (n, i) = (10u64, 3u64);
        let params = ModelParams::exponential(n, 1.0, 1.0)?;
        let est = estimate(&params, Statistic::Spacing(i), samples, next_seed(), false)?;
        comparisons.push(compare(
            "spacing_mean n=10 i=3",
            1.0 / (n - i) as f64,
            est.mean,
            est.stderr,
        ));
    }

    // --- G* largest retained position ---
    {
        let (n, parent) = (100u64, 158u64);
        let params = ModelParams::gstar_with_parent(n, 1.0, 1.0, parent)?;
        let exact: f64 = (0..n).map(|i| 1.0 / (parent - i) as f64).sum();
        let est = estimate(&params, Statistic::MaxPosition, samples, next_seed(), false)?;
        comparisons.push(compare(
            "gstar_max_position n=100 N=158",
            exact,
            est.mean,
            est.stderr,
        ));
    }

    // --- exact invariants ---
    {
        let mut theta_sum = 0.0;
        for s in 0..=60 {
            theta_sum += recursions::tail_node_count_prob(s, 1.0, 1.0, 1e-13)?;
        }
        invariants.push(InvariantCheck {
            name: "tail_node_count normalization (60 terms)".into(),
            deviation: (theta_sum - 1.0).abs(),
            pass: (theta_sum - 1.0).abs() < 1e-10,
        });
    }
    {
        let (n, lambda, r) = (8u64, 1.0, 1.2);
        let mut worst: f64 = 0.0;
        for j in 1..=n - 2 {
            let mut sum = recursions::span_within_range_prob(n, j, lambda, r)?;
            for i in j + 1..n {
                sum += recursions::last_in_range_prob(n, j, i, lambda, r)?;
            }
            worst = worst.max((sum - 1.0).abs());
        }
        invariants.push(InvariantCheck {
            name: "crossing partition n=8".into(),
            deviation: worst,
            pass: worst < 1e-9,
        });
    }
    {
        let n = 100u64;
        let pmf = recursions::component_pmf(n, 1.0, 1.0)?;
        let sum_dev = (pmf.total() - 1.0).abs();
        let conn_dev = (pmf.prob(1) - analytic::connectivity_prob(n, 1.0, 1.0)?).abs();
        let mean_dev = (pmf.mean() - 1.0 - analytic::hole_count_moments(n, 1.0, 1.0)?.mean).abs();
        invariants.push(InvariantCheck {
            name: "component pmf normalization n=100".into(),
            deviation: sum_dev,
            pass: sum_dev < 1e-10,
        });
        invariants.push(InvariantCheck {
            name: "component pmf k=1 equals connectivity product".into(),
            deviation: conn_dev,
            pass: conn_dev < 1e-12,
        });
        invariants.push(InvariantCheck {
            name: "component mean = 1 + hole count mean".into(),
            deviation: mean_dev,
            pass: mean_dev < 1e-9,
        });
    }
    {
        let pmf = recursions::size_m_component_pmf(30, 3, 1.0, 0.5)?;
        let dev = (pmf.total() - 1.0).abs();
        invariants.push(InvariantCheck {
            name: "size-3 pmf normalization n=30".into(),
            deviation: dev,
            pass: dev < 1e-10,
        });
    }
    {
        let pmf = recursions::redundant_pmf(10, 1.0, 2.0)?;
        let dev = (pmf.total() - 1.0).abs();
        invariants.push(InvariantCheck {
            name: "redundant pmf normalization n=10".into(),
            deviation: dev,
            pass: dev < 1e-10,
        });
    }
    {
        let limit = recursions::component_pmf_limit(1.0, 1.0, 1e-10)?;
        let exact = recursions::component_pmf(2000, 1.0, 1.0)?;
        let tv = limit.tv_distance(&exact);
        invariants.push(InvariantCheck {
            name: "component limit vs exact n=2000 (TV)".into(),
            deviation: tv,
            pass: tv < 1e-6,
        });
    }
    {
        // per-sample identities on simulated configurations
        let params = ModelParams::exponential(30, 1.0, 1.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(next_seed());
        let mut ok = true;
        for _ in 0..2_000 {
            let pos = sample_positions(&params, &mut rng)?;
            let stats = graph_stats(&pos, params.r)?;
            ok &= stats.num_holes == stats.num_components - 1;
            ok &= stats.connected == (stats.total_hole_length == 0.0);
            ok &= stats.connected == (stats.conn_distance <= params.r);
            ok &= stats.largest_nn_distance <= stats.conn_distance;
            ok &= stats.component_sizes.iter().sum::<u64>() == params.n;
            ok &= stats.connected == stats.redundant_count.is_some();
        }
        invariants.push(InvariantCheck {
            name: "per-sample identities (2000 configs, n=30)".into(),
            deviation: if ok { 0.0 } else { 1.0 },
            pass: ok,
        });
    }
    {
        let params = ModelParams::exponential(25, 1.0, 1.0)?;
        let det_seed = next_seed();
        let a = estimate(&params, Statistic::Connectivity, 20_000, det_seed, false)?;
        let b = estimate(&params, Statistic::Connectivity, 20_000, det_seed, false)?;
        let c = estimate_sequential(&params, Statistic::Connectivity, 20_000, det_seed, false)?;
        let ok = a == b && a == c;
        invariants.push(InvariantCheck {
            name: "estimate determinism (repeat + sequential)".into(),
            deviation: if ok { 0.0 } else { 1.0 },
            pass: ok,
        });
    }
    {
        // two G* constructions, two-sample z on connectivity
        let params = ModelParams::gstar_with_parent(100, 1.0, 0.055, 158)?;
        let m = samples.min(100_000);
        let mut hits = [0u64; 2];
        for (slot, construction) in [
            montecarlo::GStarConstruction::Spacings,
            montecarlo::GStarConstruction::SortedParent,
        ]
        .into_iter()
        .enumerate()
        {
            let mut rng = ChaCha8Rng::seed_from_u64(next_seed());
            for _ in 0..m {
                let pos = montecarlo::sample_positions_with(&params, construction, &mut rng)?;
                if pos.windows(2).all(|w| w[1] - w[0] <= params.r) {
                    hits[slot] += 1;
                }
            }
        }
        let p0 = hits[0] as f64 / m as f64;
        let p1 = hits[1] as f64 / m as f64;
        let se = (p0 * (1.0 - p0) / m as f64 + p1 * (1.0 - p1) / m as f64).sqrt();
        let z = if se > 0.0 { (p0 - p1) / se } else { 0.0 };
        comparisons.push(Comparison {
            name: "gstar construction equivalence (two-sample)".into(),
            exact: p1,
            mc_mean: p0,
            mc_stderr: se,
            z,
            pass: z.abs() <= Z_THRESHOLD,
        });
    }

    let max_abs_z = comparisons
        .iter()
        .map(|c| c.z.abs())
        .fold(0.0_f64, f64::max);
    let all_pass = comparisons.iter().all(|c| c.pass) && invariants.iter().all(|inv| inv.pass);
    Ok(XcheckReport {
        seed,
        samples,
        comparisons,
        invariants,
        max_abs_z,
        all_pass,
    })
}
