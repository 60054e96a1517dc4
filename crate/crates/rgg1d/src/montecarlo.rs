//! Seeded samplers for the placement models, per-configuration graph
//! statistics, and reproducible estimators with standard errors.
//!
//! Determinism contract: every sample index owns an independent ChaCha stream
//! derived from `(seed, index)`, work is split into fixed-size chunks, and
//! chunk partials are combined in index order. Parallel and sequential runs
//! therefore produce bit-identical results, whatever the worker count.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};

/// Degrees at or above this value land in the overflow bucket by default.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Fixed chunk size of the sample-index partition (never depends on the
/// worker count; changing it would change nothing but cache behavior).
const CHUNK_SIZE: u64 = 1024;

/// Rejection cap per sample index under connectivity conditioning.
const MAX_ATTEMPTS_PER_SAMPLE: u64 = 100_000;

/// Per-configuration statistics of one sampled arrangement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub connected: bool,
    pub num_components: u64,
    pub component_sizes: Vec<u64>,
    pub num_holes: u64,
    pub total_hole_length: f64,
    /// X_(n) - X_(1).
    pub span: f64,
    /// Smallest cutoff that connects the sample; the maximum spacing in 1-D.
    pub conn_distance: f64,
    /// Largest distance from a node to its nearest neighbor.
    pub largest_nn_distance: f64,
    /// Count of nodes by degree; the last slot is the overflow bucket.
    pub degree_histogram: Vec<u64>,
    /// Same, restricted to nodes at position > r.
    pub degree_histogram_beyond_r: Vec<u64>,
    /// Greedy relay-chain redundancy count; `None` when disconnected.
    pub redundant_count: Option<u64>,
}

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub statistic: String,
    pub mean: f64,
    pub stderr: f64,
    pub num_samples: u64,
    /// Total configurations drawn (equals `num_samples` unless conditioning).
    pub attempts: u64,
    pub seed: u64,
}

/// How G* vertex sets are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GStarConstruction {
    /// Minimum of N exponentials plus independent spacings; O(n), the default.
    Spacings,
    /// Draw all N parent points, sort, keep the lowest n.
    SortedParent,
}

/// Per-sample statistic to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    /// Indicator that the graph is connected.
    Connectivity,
    NumComponents,
    NumHoles,
    TotalHoleLength,
    Span,
    /// `lambda * span - ln n`, the extreme-value normalization.
    NormalizedSpan,
    ConnDistance,
    LargestNnDistance,
    /// Requires connectivity conditioning.
    RedundantCount,
    /// Number of nodes of exactly this degree at position > r.
    DegreeCountBeyondR(u32),
    /// Number of components of exactly this size.
    SizeMComponentCount(u64),
    /// Value of the i-th spacing (1-based).
    Spacing(u64),
    MeanPosition,
    MaxPosition,
}

impl Statistic {
    pub fn is_indicator(&self) -> bool {
        matches!(self, Statistic::Connectivity)
    }

    pub fn requires_conditioning(&self) -> bool {
        matches!(self, Statistic::RedundantCount)
    }

    fn validate(&self, params: &ModelParams) -> Result<()> {
        if let Statistic::Spacing(i) = self {
            if !(*i >= 1 && *i < params.n) {
                return Err(Error::IndexOutOfRange {
                    what: format!("spacing index must satisfy 1 <= i <= n-1, got i={i}"),
                });
            }
        }
        Ok(())
    }

    /// Evaluates the statistic on one sorted configuration.
    fn evaluate(&self, positions: &[f64], params: &ModelParams) -> f64 {
        let r = params.r;
        match self {
            Statistic::Connectivity => {
                if connected(positions, r) {
                    1.0
                } else {
                    0.0
                }
            }
            Statistic::NumComponents => (count_breaks(positions, r) + 1) as f64,
            Statistic::NumHoles => count_breaks(positions, r) as f64,
            Statistic::TotalHoleLength => positions
                .windows(2)
                .map(|w| (w[1] - w[0] - r).max(0.0))
                .sum(),
            Statistic::Span => positions.last().unwrap() - positions.first().unwrap(),
            Statistic::NormalizedSpan => {
                let span = positions.last().unwrap() - positions.first().unwrap();
                params.lambda * span - (params.n as f64).ln()
            }
            Statistic::ConnDistance => max_spacing(positions),
            Statistic::LargestNnDistance => largest_nn_distance(positions),
            Statistic::RedundantCount => {
                (positions.len() as u64 - relay_chain_length(positions, r)) as f64
            }
            Statistic::DegreeCountBeyondR(k) => degree_count_beyond_r(positions, r, *k) as f64,
            Statistic::SizeMComponentCount(m) => {
                let mut count = 0u64;
                let mut run = 1u64;
                for w in positions.windows(2) {
                    if w[1] - w[0] > r {
                        if run == *m {
                            count += 1;
                        }
                        run = 1;
                    } else {
                        run += 1;
                    }
                }
                if run == *m {
                    count += 1;
                }
                count as f64
            }
            Statistic::Spacing(i) => positions[*i as usize] - positions[*i as usize - 1],
            Statistic::MeanPosition => positions.iter().sum::<f64>() / positions.len() as f64,
            Statistic::MaxPosition => *positions.last().unwrap(),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Connectivity => write!(f, "connectivity"),
            Statistic::NumComponents => write!(f, "num_components"),
            Statistic::NumHoles => write!(f, "num_holes"),
            Statistic::TotalHoleLength => write!(f, "total_hole_length"),
            Statistic::Span => write!(f, "span"),
            Statistic::NormalizedSpan => write!(f, "normalized_span"),
            Statistic::ConnDistance => write!(f, "conn_distance"),
            Statistic::LargestNnDistance => write!(f, "largest_nn_distance"),
            Statistic::RedundantCount => write!(f, "redundant_count"),
            Statistic::DegreeCountBeyondR(k) => write!(f, "degree_count_beyond_r:{k}"),
            Statistic::SizeMComponentCount(m) => write!(f, "size_m_count:{m}"),
            Statistic::Spacing(i) => write!(f, "spacing:{i}"),
            Statistic::MeanPosition => write!(f, "mean_position"),
            Statistic::MaxPosition => write!(f, "max_position"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let parse_arg = |what: &str| -> Result<u64> {
            arg.ok_or_else(|| Error::Domain(format!("statistic {head} needs :{what}")))?
                .parse()
                .map_err(|_| Error::Domain(format!("invalid {what} in statistic {s}")))
        };
        let stat = match head {
            "connectivity" => Statistic::Connectivity,
            "num_components" => Statistic::NumComponents,
            "num_holes" => Statistic::NumHoles,
            "total_hole_length" => Statistic::TotalHoleLength,
            "span" => Statistic::Span,
            "normalized_span" => Statistic::NormalizedSpan,
            "conn_distance" => Statistic::ConnDistance,
            "largest_nn_distance" => Statistic::LargestNnDistance,
            "redundant_count" => Statistic::RedundantCount,
            "degree_count_beyond_r" => Statistic::DegreeCountBeyondR(parse_arg("degree")? as u32),
            "size_m_count" => Statistic::SizeMComponentCount(parse_arg("size")?),
            "spacing" => Statistic::Spacing(parse_arg("index")?),
            "mean_position" => Statistic::MeanPosition,
            "max_position" => Statistic::MaxPosition,
            _ => return Err(Error::Domain(format!("unknown statistic: {s}"))),
        };
        Ok(stat)
    }
}

/// The ChaCha stream owned by one `(seed, sample index)` pair.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn exp_draw(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    // gen() is in [0, 1), so the argument of ln stays in (0, 1]
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

fn laplace_draw(rng: &mut ChaCha8Rng, lambda: f64) -> f64 {
    let u: f64 = rng.gen();
    if u < 0.5 {
        (2.0 * u).max(f64::MIN_POSITIVE).ln() / lambda
    } else {
        -(2.0 * (1.0 - u)).ln() / lambda
    }
}

/// Draws one sorted configuration of `params.n` positions.
pub fn sample_positions(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    sample_positions_with(params, GStarConstruction::Spacings, rng)
}

/// Draws one sorted configuration with an explicit G* construction.
///
/// The two G* constructions agree in distribution; `Spacings` avoids the
/// parent sort and is the default everywhere else.
pub fn sample_positions_with(
    params: &ModelParams,
    construction: GStarConstruction,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let params = params.validated()?;
    let mut buf = Vec::new();
    fill_positions(&params, construction, rng, &mut buf);
    Ok(buf)
}

/// Inverse-CDF sampling into a reusable buffer; `buf` comes back sorted.
fn fill_positions(
    params: &ModelParams,
    construction: GStarConstruction,
    rng: &mut ChaCha8Rng,
    buf: &mut Vec<f64>,
) {
    let n = params.n as usize;
    let lambda = params.lambda;
    buf.clear();
    match params.variant {
        Variant::Exponential => {
            buf.extend((0..n).map(|_| exp_draw(rng, lambda)));
            buf.sort_unstable_by(f64::total_cmp);
        }
        Variant::DoubleExponential => {
            buf.extend((0..n).map(|_| laplace_draw(rng, lambda)));
            buf.sort_unstable_by(f64::total_cmp);
        }
        Variant::Truncated => {
            let p = params.truncation_mass().expect("validated truncated model");
            buf.extend((0..n).map(|_| {
                let u: f64 = rng.gen();
                -(1.0 - u * p).ln() / lambda
            }));
            buf.sort_unstable_by(f64::total_cmp);
        }
        Variant::GStar => {
            let parent = params.parent_n.expect("validated gstar model");
            match construction {
                GStarConstruction::Spacings => {
                    let mut x = exp_draw(rng, parent as f64 * lambda);
                    buf.push(x);
                    for i in 1..n as u64 {
                        x += exp_draw(rng, (parent - i) as f64 * lambda);
                        buf.push(x);
                    }
                }
                GStarConstruction::SortedParent => {
                    buf.extend((0..parent).map(|_| exp_draw(rng, lambda)));
                    buf.sort_unstable_by(f64::total_cmp);
                    buf.truncate(n);
                }
            }
        }
    }
}

fn connected(positions: &[f64], r: f64) -> bool {
    positions.windows(2).all(|w| w[1] - w[0] <= r)
}

fn max_spacing(positions: &[f64]) -> f64 {
    positions
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max)
}

fn count_breaks(positions: &[f64], r: f64) -> u64 {
    positions.windows(2).filter(|w| w[1] - w[0] > r).count() as u64
}

fn largest_nn_distance(positions: &[f64]) -> f64 {
    let n = positions.len();
    if n < 2 {
        return 0.0;
    }
    let mut best = 0.0_f64;
    for i in 0..n {
        let left = if i > 0 {
            positions[i] - positions[i - 1]
        } else {
            f64::INFINITY
        };
        let right = if i + 1 < n {
            positions[i + 1] - positions[i]
        } else {
            f64::INFINITY
        };
        best = best.max(left.min(right));
    }
    best
}

/// Length of the greedy relay chain: from the leftmost node repeatedly hop to
/// the furthest node within range `r`. Assumes the configuration is connected.
fn relay_chain_length(positions: &[f64], r: f64) -> u64 {
    let n = positions.len();
    let mut current = 0usize;
    let mut len = 1u64;
    while current + 1 < n {
        let reach = positions[current] + r;
        let next = positions.partition_point(|&x| x <= reach) - 1;
        debug_assert!(next > current, "relay chain called on disconnected sample");
        if next <= current {
            break;
        }
        current = next;
        len += 1;
    }
    len
}

/// Count of nodes at position > r with degree exactly `k`, via a sliding
/// window (degrees are counted, never enumerated).
fn degree_count_beyond_r(positions: &[f64], r: f64, k: u32) -> u64 {
    let n = positions.len();
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut count = 0u64;
    for i in 0..n {
        while positions[i] - positions[lo] > r {
            lo += 1;
        }
        if hi < i {
            hi = i;
        }
        while hi + 1 < n && positions[hi + 1] - positions[i] <= r {
            hi += 1;
        }
        if positions[i] > r && (hi - lo) as u32 == k {
            count += 1;
        }
    }
    count
}

/// Full per-configuration statistics with the default degree cap.
pub fn graph_stats(positions: &[f64], r: f64) -> Result<SampleStats> {
    graph_stats_with_cap(positions, r, DEFAULT_DEGREE_CAP)
}

/// Full per-configuration statistics; degrees >= `degree_cap` land in the
/// final overflow bucket.
pub fn graph_stats_with_cap(positions: &[f64], r: f64, degree_cap: usize) -> Result<SampleStats> {
    if positions.is_empty() {
        return Err(Error::Domain("empty position vector".into()));
    }
    debug_assert!(positions.windows(2).all(|w| w[0] <= w[1]));
    let n = positions.len();

    let mut component_sizes = Vec::new();
    let mut run = 1u64;
    let mut total_hole_length = 0.0;
    for w in positions.windows(2) {
        let gap = w[1] - w[0];
        if gap > r {
            component_sizes.push(run);
            run = 1;
            total_hole_length += gap - r;
        } else {
            run += 1;
        }
    }
    component_sizes.push(run);
    let num_components = component_sizes.len() as u64;
    let num_holes = num_components - 1;
    let is_connected = num_components == 1;

    let mut degree_histogram = vec![0u64; degree_cap + 1];
    let mut degree_histogram_beyond_r = vec![0u64; degree_cap + 1];
    let mut lo = 0usize;
    let mut hi = 0usize;
    for i in 0..n {
        while positions[i] - positions[lo] > r {
            lo += 1;
        }
        if hi < i {
            hi = i;
        }
        while hi + 1 < n && positions[hi + 1] - positions[i] <= r {
            hi += 1;
        }
        let degree = (hi - lo).min(degree_cap);
        degree_histogram[degree] += 1;
        if positions[i] > r {
            degree_histogram_beyond_r[degree] += 1;
        }
    }

    Ok(SampleStats {
        connected: is_connected,
        num_components,
        component_sizes,
        num_holes,
        total_hole_length,
        span: positions[n - 1] - positions[0],
        conn_distance: max_spacing(positions),
        largest_nn_distance: largest_nn_distance(positions),
        degree_histogram,
        degree_histogram_beyond_r,
        redundant_count: if is_connected {
            Some(n as u64 - relay_chain_length(positions, r))
        } else {
            None
        },
    })
}

#[derive(Clone, Copy, Default)]
struct Accum {
    sum: f64,
    sumsq: f64,
    count: u64,
    attempts: u64,
}

/// Maps `f` over chunk indices, in parallel when the feature is enabled.
/// Output order is always chunk order.
fn map_chunks<T: Send>(n_chunks: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n_chunks).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(f).collect()
    }
}

fn map_chunks_serial<T>(n_chunks: u64, f: impl Fn(u64) -> T) -> Vec<T> {
    (0..n_chunks).map(f).collect()
}

/// Draws the configuration for one sample index, retrying under conditioning.
/// Returns the sorted positions in `buf` plus the number of attempts used.
fn draw_sample(
    params: &ModelParams,
    condition_on_connected: bool,
    seed: u64,
    index: u64,
    buf: &mut Vec<f64>,
) -> Result<u64> {
    let mut rng = sample_rng(seed, index);
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        fill_positions(params, GStarConstruction::Spacings, &mut rng, buf);
        if !condition_on_connected || connected(buf, params.r) {
            return Ok(attempts);
        }
        if attempts >= MAX_ATTEMPTS_PER_SAMPLE {
            return Err(Error::LowAcceptanceRate {
                attempts,
                accepted: 0,
                required: 1,
            });
        }
    }
}

fn chunk_accum(
    params: &ModelParams,
    statistic: Statistic,
    condition: bool,
    seed: u64,
    num_samples: u64,
    chunk: u64,
) -> Result<Accum> {
    let start = chunk * CHUNK_SIZE;
    let end = (start + CHUNK_SIZE).min(num_samples);
    let mut acc = Accum::default();
    let mut buf = Vec::with_capacity(params.n as usize);
    for index in start..end {
        acc.attempts += draw_sample(params, condition, seed, index, &mut buf)?;
        let value = statistic.evaluate(&buf, params);
        acc.sum += value;
        acc.sumsq += value * value;
        acc.count += 1;
    }
    Ok(acc)
}

fn finalize(
    statistic: Statistic,
    seed: u64,
    num_samples: u64,
    chunks: Vec<Result<Accum>>,
) -> Result<EstimateResult> {
    let mut total = Accum::default();
    for chunk in chunks {
        let chunk = chunk?;
        total.sum += chunk.sum;
        total.sumsq += chunk.sumsq;
        total.count += chunk.count;
        total.attempts += chunk.attempts;
    }
    let n = total.count as f64;
    let mean = total.sum / n;
    let stderr = if statistic.is_indicator() {
        (mean * (1.0 - mean) / n).max(0.0).sqrt()
    } else if total.count >= 2 {
        let var = ((total.sumsq - total.sum * total.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EstimateResult {
        statistic: statistic.to_string(),
        mean,
        stderr,
        num_samples,
        attempts: total.attempts,
        seed,
    })
}

fn estimate_impl(
    params: &ModelParams,
    statistic: Statistic,
    num_samples: u64,
    seed: u64,
    condition_on_connected: bool,
    serial: bool,
) -> Result<EstimateResult> {
    let params = params.validated()?;
    statistic.validate(&params)?;
    if num_samples < 1 {
        return Err(Error::Domain("num_samples must be >= 1".into()));
    }
    if statistic.requires_conditioning() && !condition_on_connected {
        return Err(Error::Domain(format!(
            "statistic {statistic} is only defined conditional on connectivity"
        )));
    }
    let n_chunks = num_samples.div_ceil(CHUNK_SIZE);
    let run = |chunk: u64| {
        chunk_accum(
            &params,
            statistic,
            condition_on_connected,
            seed,
            num_samples,
            chunk,
        )
    };
    let chunks = if serial {
        map_chunks_serial(n_chunks, run)
    } else {
        map_chunks(n_chunks, run)
    };
    finalize(statistic, seed, num_samples, chunks)
}

/// Estimates a statistic over `num_samples` independent configurations.
///
/// Under `condition_on_connected`, accept-reject keeps exactly `num_samples`
/// accepted configurations and reports total attempts; a sample index that
/// exhausts its rejection budget aborts with acceptance diagnostics.
pub fn estimate(
    params: &ModelParams,
    statistic: Statistic,
    num_samples: u64,
    seed: u64,
    condition_on_connected: bool,
) -> Result<EstimateResult> {
    estimate_impl(
        params,
        statistic,
        num_samples,
        seed,
        condition_on_connected,
        false,
    )
}

/// Single-threaded twin of [`estimate`]; bit-identical results.
pub fn estimate_sequential(
    params: &ModelParams,
    statistic: Statistic,
    num_samples: u64,
    seed: u64,
    condition_on_connected: bool,
) -> Result<EstimateResult> {
    estimate_impl(
        params,
        statistic,
        num_samples,
        seed,
        condition_on_connected,
        true,
    )
}

/// Per-sample statistic values in sample-index order (for histograms,
/// goodness-of-fit tests, and coverage checks).
pub fn sample_values(
    params: &ModelParams,
    statistic: Statistic,
    num_samples: u64,
    seed: u64,
    condition_on_connected: bool,
) -> Result<Vec<f64>> {
    let params = params.validated()?;
    statistic.validate(&params)?;
    if num_samples < 1 {
        return Err(Error::Domain("num_samples must be >= 1".into()));
    }
    if statistic.requires_conditioning() && !condition_on_connected {
        return Err(Error::Domain(format!(
            "statistic {statistic} is only defined conditional on connectivity"
        )));
    }
    let n_chunks = num_samples.div_ceil(CHUNK_SIZE);
    let chunks = map_chunks(n_chunks, |chunk| -> Result<Vec<f64>> {
        let start = chunk * CHUNK_SIZE;
        let end = (start + CHUNK_SIZE).min(num_samples);
        let mut out = Vec::with_capacity((end - start) as usize);
        let mut buf = Vec::with_capacity(params.n as usize);
        for index in start..end {
            draw_sample(&params, condition_on_connected, seed, index, &mut buf)?;
            out.push(statistic.evaluate(&buf, &params));
        }
        Ok(out)
    });
    let mut values = Vec::with_capacity(num_samples as usize);
    for chunk in chunks {
        values.extend(chunk?);
    }
    Ok(values)
}

/// Estimates the probability of an arbitrary event of the sorted configuration.
/// Used by the experiment drivers for predicates that are not plain statistics.
pub(crate) fn estimate_event(
    params: &ModelParams,
    num_samples: u64,
    seed: u64,
    event: impl Fn(&[f64]) -> bool + Sync + Send,
) -> Result<(f64, f64)> {
    let params = params.validated()?;
    let n_chunks = num_samples.div_ceil(CHUNK_SIZE);
    let chunks = map_chunks(n_chunks, |chunk| {
        let start = chunk * CHUNK_SIZE;
        let end = (start + CHUNK_SIZE).min(num_samples);
        let mut hits = 0u64;
        let mut buf = Vec::with_capacity(params.n as usize);
        for index in start..end {
            let mut rng = sample_rng(seed, index);
            fill_positions(&params, GStarConstruction::Spacings, &mut rng, &mut buf);
            if event(&buf) {
                hits += 1;
            }
        }
        hits
    });
    let hits: u64 = chunks.into_iter().sum();
    let p = hits as f64 / num_samples as f64;
    let se = (p * (1.0 - p) / num_samples as f64).max(0.0).sqrt();
    Ok((p, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_params(n: u64) -> ModelParams {
        ModelParams::exponential(n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn graph_stats_hand_cases() {
        let s = graph_stats(&[0.0, 0.5, 2.0], 1.0).unwrap();
        assert_eq!(s.component_sizes, vec![2, 1]);
        assert_eq!(s.num_holes, 1);
        assert_relative_eq!(s.total_hole_length, 0.5);
        assert_relative_eq!(s.conn_distance, 1.5);
        assert_relative_eq!(s.largest_nn_distance, 1.5);
        assert_relative_eq!(s.span, 2.0);
        assert!(!s.connected);
        assert_eq!(s.redundant_count, None);

        let s = graph_stats(&[0.0, 0.4, 0.8], 0.5).unwrap();
        assert!(s.connected);
        assert_relative_eq!(s.largest_nn_distance, 0.4);
        assert_relative_eq!(s.conn_distance, 0.4);
        assert_eq!(s.degree_histogram[1], 2);
        assert_eq!(s.degree_histogram[2], 1);
        assert_eq!(s.redundant_count, Some(0));

        let s = graph_stats(&[3.0], 1.0).unwrap();
        assert!(s.connected);
        assert_eq!(s.num_components, 1);
        assert_relative_eq!(s.span, 0.0);
        assert_eq!(s.degree_histogram[0], 1);
        assert_eq!(s.redundant_count, Some(0));

        assert!(graph_stats(&[], 1.0).is_err());
    }

    #[test]
    fn relay_chain_counts_redundant_nodes() {
        // 0 -- 0.9 -- 1.0 -- 1.8: chain hops 0 -> 1.0 -> 1.8, node 0.9 redundant
        let s = graph_stats(&[0.0, 0.9, 1.0, 1.8], 1.0).unwrap();
        assert_eq!(s.redundant_count, Some(1));
    }

    #[test]
    fn degree_overflow_bucket() {
        let positions: Vec<f64> = (0..10).map(|i| i as f64 * 1e-3).collect();
        let s = graph_stats_with_cap(&positions, 1.0, 4).unwrap();
        // all nodes have degree 9, capped into the overflow bucket
        assert_eq!(s.degree_histogram[4], 10);
    }

    #[test]
    fn truncated_positions_stay_in_support() {
        let params = ModelParams::truncated(200, 1.0, 0.5, 1.0).unwrap();
        let mut rng = sample_rng(7, 0);
        for _ in 0..50 {
            let pos = sample_positions(&params, &mut rng).unwrap();
            assert!(pos.iter().all(|&x| (0.0..1.0).contains(&x)));
        }
    }

    #[test]
    fn exponential_positions_have_the_right_mean() {
        let params = ModelParams::exponential(100_000, 2.0, 1.0).unwrap();
        let est = estimate(&params, Statistic::MeanPosition, 64, 11, false).unwrap();
        // per-configuration mean of 1e5 exponentials concentrates hard at 0.5
        assert!((est.mean - 0.5).abs() < 4.0 * est.stderr.max(1e-4));
    }

    #[test]
    fn estimate_matches_exact_connectivity() {
        let params = exp_params(5);
        let est = estimate(&params, Statistic::Connectivity, 200_000, 42, false).unwrap();
        let exact = crate::analytic::connectivity_prob(5, 1.0, 1.0).unwrap();
        assert!(
            (est.mean - exact).abs() < 4.0 * est.stderr,
            "mean={}, exact={exact}, se={}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let params = exp_params(40);
        for &(stat, cond) in &[
            (Statistic::Connectivity, false),
            (Statistic::TotalHoleLength, false),
            (Statistic::RedundantCount, true),
        ] {
            let a = estimate(&params, stat, 10_000, 3, cond).unwrap();
            let b = estimate_sequential(&params, stat, 10_000, 3, cond).unwrap();
            assert_eq!(a, b, "stat {stat} diverged");
            let c = estimate(&params, stat, 10_000, 3, cond).unwrap();
            assert_eq!(a, c, "stat {stat} not reproducible");
        }
    }

    #[test]
    fn conditioning_reports_attempts() {
        let params = exp_params(10);
        let est = estimate(&params, Statistic::RedundantCount, 2_000, 5, true).unwrap();
        assert!(est.attempts > est.num_samples);
        assert!(est.mean >= 0.0);
    }

    #[test]
    fn spacing_statistic_checks_range() {
        let params = exp_params(10);
        assert!(estimate(&params, Statistic::Spacing(10), 10, 1, false).is_err());
        assert!(estimate(&params, Statistic::Spacing(0), 10, 1, false).is_err());
        let est = estimate(&params, Statistic::Spacing(3), 50_000, 9, false).unwrap();
        // Spacing 3 of 10 nodes has mean 1/((10-3) * 1) = 1/7
        assert!((est.mean - 1.0 / 7.0).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn redundant_requires_conditioning() {
        let params = exp_params(10);
        assert!(estimate(&params, Statistic::RedundantCount, 10, 1, false).is_err());
    }

    #[test]
    fn single_node_span_is_degenerate() {
        let params = exp_params(1);
        let est = estimate(&params, Statistic::Span, 1_000, 2, false).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn hopeless_conditioning_reports_acceptance_rate() {
        // P(connected) ~ 6e-83 at these parameters; the rejection budget runs out
        let params = ModelParams::exponential(50, 1.0, 0.01).unwrap();
        let err = estimate(&params, Statistic::RedundantCount, 4, 1, true).unwrap_err();
        assert!(matches!(err, crate::Error::LowAcceptanceRate { .. }));
    }

    #[test]
    fn gstar_constructions_agree_statistically() {
        // cutoff chosen so P(connected) ~ 0.5, where a distributional
        // difference between the constructions would be most visible
        let params = ModelParams::gstar_with_parent(100, 1.0, 0.055, 158).unwrap();
        let samples = 20_000u64;
        let mut hits = [0u64; 2];
        for (slot, construction) in [GStarConstruction::Spacings, GStarConstruction::SortedParent]
            .into_iter()
            .enumerate()
        {
            for index in 0..samples {
                let mut rng = sample_rng(1000 + slot as u64, index);
                let pos = sample_positions_with(&params, construction, &mut rng).unwrap();
                if connected(&pos, params.r) {
                    hits[slot] += 1;
                }
            }
        }
        let p = [
            hits[0] as f64 / samples as f64,
            hits[1] as f64 / samples as f64,
        ];
        let se =
            (p[0] * (1.0 - p[0]) / samples as f64 + p[1] * (1.0 - p[1]) / samples as f64).sqrt();
        let z = (p[0] - p[1]) / se;
        assert!(z.abs() < 4.0, "constructions diverge: p={p:?}, z={z}");
    }

    #[test]
    fn gstar_largest_position_mean_matches_order_statistic() {
        let params = ModelParams::gstar_with_parent(100, 1.0, 1.0, 158).unwrap();
        let est = estimate(&params, Statistic::MaxPosition, 40_000, 21, false).unwrap();
        let exact: f64 = (0..100u64).map(|i| 1.0 / (158 - i) as f64).sum();
        assert!(
            (est.mean - exact).abs() < 4.0 * est.stderr,
            "mean={}, exact={exact}",
            est.mean
        );
    }

    #[test]
    fn statistic_labels_round_trip() {
        for stat in [
            Statistic::Connectivity,
            Statistic::NumHoles,
            Statistic::NormalizedSpan,
            Statistic::DegreeCountBeyondR(3),
            Statistic::SizeMComponentCount(2),
            Statistic::Spacing(4),
        ] {
            let parsed: Statistic = stat.to_string().parse().unwrap();
            assert_eq!(parsed, stat);
        }
        assert!("nope".parse::<Statistic>().is_err());
        assert!("spacing".parse::<Statistic>().is_err());
        assert!("spacing:x".parse::<Statistic>().is_err());
    }
}
