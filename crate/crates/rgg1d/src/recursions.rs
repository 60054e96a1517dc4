//! Dynamic-programming evaluation of the component-count pmf, the size-m
//! component pmf, their large-n limits, and the redundant-node pmf of a
//! connectivity-conditioned network.

use std::fmt;

use serde::Serialize;

use crate::analytic::connectivity_prob_limit;
use crate::error::{Error, Result};
use crate::model::spacing_within_prob;
use crate::numeric::{clamp_probability, CLAMP_TOLERANCE};

/// Which distribution a [`Pmf`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfLabel {
    /// Number of connected components.
    ComponentCount,
    /// Number of components of a fixed size m.
    SizeMComponents,
    /// Number of redundant nodes, conditioned on connectivity.
    Redundant,
    /// Limiting number of nodes after the first component.
    TailNodeCount,
}

impl fmt::Display for PmfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PmfLabel::ComponentCount => "component_count",
            PmfLabel::SizeMComponents => "size_m_components",
            PmfLabel::Redundant => "redundant",
            PmfLabel::TailNodeCount => "tail_node_count",
        };
        f.write_str(s)
    }
}

/// A probability mass function over an integer support.
///
/// Finite-n pmfs sum to 1 up to rounding; limit pmfs sum to 1 up to their
/// truncation tail bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    label: PmfLabel,
    support: Vec<u64>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(label: PmfLabel, support: Vec<u64>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::Consistency(
                "pmf support and probability lengths differ".into(),
            ));
        }
        for (&k, &p) in support.iter().zip(&probs) {
            if p < -CLAMP_TOLERANCE || p.is_nan() {
                return Err(Error::Consistency(format!(
                    "pmf entry at {k} is negative: {p}"
                )));
            }
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Pmf {
            label,
            support,
            probs,
        })
    }

    /// Empirical pmf from a vector of per-sample counts.
    pub fn from_counts(label: PmfLabel, counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Domain("empty count vector".into()));
        }
        let max = *counts.iter().max().unwrap();
        let mut hist = vec![0u64; max as usize + 1];
        for &c in counts {
            hist[c as usize] += 1;
        }
        let total = counts.len() as f64;
        Pmf::new(
            label,
            (0..=max).collect(),
            hist.into_iter().map(|h| h as f64 / total).collect(),
        )
    }

    pub fn label(&self) -> PmfLabel {
        self.label
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability assigned to `k` (0 when outside the stored support).
    pub fn prob(&self, k: u64) -> f64 {
        self.support
            .iter()
            .position(|&s| s == k)
            .map_or(0.0, |idx| self.probs[idx])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&k, &p)| k as f64 * p)
            .sum()
    }

    /// Total variation distance, aligning the two supports.
    pub fn tv_distance(&self, other: &Pmf) -> f64 {
        let hi = self
            .support
            .iter()
            .chain(other.support.iter())
            .copied()
            .max()
            .unwrap_or(0);
        let lo = self
            .support
            .iter()
            .chain(other.support.iter())
            .copied()
            .min()
            .unwrap_or(0);
        0.5 * (lo..=hi)
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .sum::<f64>()
    }
}

/// Distribution of the number of connected components of the `n`-node
/// exponential RGG, via the backward recursion
/// `psi(j,k) = zeta_j psi(j+1,k) + (1-zeta_j) psi(j+1,k-1)`
/// over one O(n) row per step.
pub fn component_pmf(n: u64, lambda: f64, r: f64) -> Result<Pmf> {
    check_rate_cutoff(lambda, r)?;
    if n < 1 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    let nn = n as usize;
    // prev[k] = psi_n(j+1, k); at j = n the single node forms one component.
    let mut prev = vec![0.0_f64; nn + 2];
    prev[1] = 1.0;
    let mut next = vec![0.0_f64; nn + 2];
    for j in (1..n).rev() {
        let z = spacing_within_prob(n, lambda, r, j);
        let kmax = (n - j + 1) as usize;
        next[0] = 0.0;
        for k in 1..=kmax {
            next[k] = z * prev[k] + (1.0 - z) * prev[k - 1];
        }
        next[kmax + 1..].fill(0.0);
        std::mem::swap(&mut prev, &mut next);
    }
    Pmf::new(
        PmfLabel::ComponentCount,
        (1..=n).collect(),
        (1..=nn).map(|k| prev[k]).collect(),
    )
}

/// Number of terms needed so the geometric tail of the tail-node-count series
/// stays below `tol`.
fn tail_cutoff(beta: f64, tol: f64) -> u64 {
    let q = (-beta).exp();
    // sum_{s > S} theta_s <= e^{-beta(S+1)} / (1 - q)
    let s = ((1.0 / (tol * (1.0 - q))).ln() / beta).ceil();
    (s.max(1.0)) as u64
}

/// theta_s for s = 0..=S plus the tail bound, computed incrementally:
/// theta_0 = P_c, theta_s = theta_{s-1} e^{-beta} / (1 - e^{-s beta}).
fn tail_node_count_series(lambda: f64, r: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    check_rate_cutoff(lambda, r)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tol must be > 0, got {tol}")));
    }
    let beta = lambda * r;
    let limit = connectivity_prob_limit(lambda, r, (tol * 1e-2).min(1e-12))?;
    let cutoff = tail_cutoff(beta, tol);
    let q = (-beta).exp();
    let mut thetas = Vec::with_capacity(cutoff as usize + 1);
    thetas.push(limit.value);
    for s in 1..=cutoff {
        let prev = *thetas.last().unwrap();
        thetas.push(prev * q / (1.0 - (-(s as f64) * beta).exp()));
    }
    let tail_bound = (-beta * (cutoff + 1) as f64).exp() / (1.0 - q);
    Ok((thetas, tail_bound))
}

/// Limiting probability that exactly `s` nodes trail the first component.
///
/// `theta_s = P_c e^{-lambda r s} / prod_{i=1}^{s} (1 - e^{-i lambda r})`;
/// the denominator runs to `s` (not `s-1`), which is what makes the series
/// sum to 1. `theta_0 = P_c` is the connected case.
pub fn tail_node_count_prob(s: u64, lambda: f64, r: f64, tol: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tol must be > 0, got {tol}")));
    }
    let beta = lambda * r;
    let limit = connectivity_prob_limit(lambda, r, tol.min(1e-12))?;
    let mut theta = limit.value;
    for i in 1..=s {
        theta *= (-beta).exp() / (1.0 - (-(i as f64) * beta).exp());
    }
    clamp_probability(theta, "tail_node_count_prob")
}

/// The full tail-node-count distribution, truncated once its geometric tail
/// bound falls below `tol`.
pub fn tail_node_count_pmf(lambda: f64, r: f64, tol: f64) -> Result<Pmf> {
    let (thetas, _) = tail_node_count_series(lambda, r, tol)?;
    Pmf::new(
        PmfLabel::TailNodeCount,
        (0..thetas.len() as u64).collect(),
        thetas,
    )
}

/// Limiting distribution of the number of components:
/// `psi(1,k) = sum_{s=k-1}^{inf} theta_s psi_s(1,k-1)` with
/// `psi_0(1,0) = 1` (so `psi(1,1) = theta_0 = P_c`).
pub fn component_pmf_limit(lambda: f64, r: f64, tol: f64) -> Result<Pmf> {
    let (thetas, _) = tail_node_count_series(lambda, r, tol)?;
    let cutoff = thetas.len() - 1;
    // exact component pmfs of the s-node networks for s = 1..=cutoff
    let mut tail_pmfs = Vec::with_capacity(cutoff + 1);
    tail_pmfs.push(None);
    for s in 1..=cutoff {
        tail_pmfs.push(Some(component_pmf(s as u64, lambda, r)?));
    }
    let mut probs = Vec::with_capacity(cutoff + 1);
    for k in 1..=(cutoff as u64 + 1) {
        let mut p = 0.0;
        if k == 1 {
            p += thetas[0];
        }
        for s in (k.max(2) - 1)..=(cutoff as u64) {
            if let Some(pmf) = &tail_pmfs[s as usize] {
                if k >= 2 {
                    p += thetas[s as usize] * pmf.prob(k - 1);
                }
            }
        }
        probs.push(p);
    }
    Pmf::new(
        PmfLabel::ComponentCount,
        (1..=(cutoff as u64 + 1)).collect(),
        probs,
    )
}

/// Distribution of the number of size-`m` components among the `n` ordered
/// nodes, by conditioning on where the run of connected spacings first breaks.
///
/// The per-cell run factors are O(1) through prefix products of the spacing
/// probabilities plus a backward-accumulated sum over break positions. When
/// the prefix products underflow (extremely fragmented regimes) a direct
/// log-space evaluation takes over.
pub fn size_m_component_pmf(n: u64, m: u64, lambda: f64, r: f64) -> Result<Pmf> {
    check_rate_cutoff(lambda, r)?;
    if n < 1 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    if m < 1 || m > n {
        return Err(Error::IndexOutOfRange {
            what: format!("component size must satisfy 1 <= m <= n, got m={m}, n={n}"),
        });
    }
    let kmax = (n / m) as usize;
    if r == 0.0 {
        // every node is isolated
        let mut probs = vec![0.0; kmax + 1];
        if m == 1 {
            probs[kmax] = 1.0; // kmax == n
        } else {
            probs[0] = 1.0;
        }
        return Pmf::new(
            PmfLabel::SizeMComponents,
            (0..=kmax as u64).collect(),
            probs,
        );
    }

    let nn = n as usize;
    let zeta: Vec<f64> = (1..n)
        .map(|i| spacing_within_prob(n, lambda, r, i))
        .collect();
    // prefix[x] = prod_{t=1}^{x} zeta_t, prefix[0] = 1
    let mut prefix = Vec::with_capacity(nn);
    prefix.push(1.0_f64);
    for &z in &zeta {
        prefix.push(prefix.last().unwrap() * z);
    }

    let probs = if prefix[nn - 1] >= 1e-300 {
        size_m_rows_fast(nn, m as usize, kmax, &zeta, &prefix)
    } else {
        size_m_rows_direct(nn, m as usize, kmax, &zeta)
    };
    let probs = probs
        .into_iter()
        .map(|p| clamp_probability(p, "size_m_component_pmf"))
        .collect::<Result<Vec<_>>>()?;
    Pmf::new(
        PmfLabel::SizeMComponents,
        (0..=kmax as u64).collect(),
        probs,
    )
}

/// Fast path: P(i,k) in O(1) amortized using
/// `T[k] = sum_{j>i} prefix[j-2] (1 - zeta_{j-1}) P(j,k)`.
fn size_m_rows_fast(n: usize, m: usize, kmax: usize, zeta: &[f64], prefix: &[f64]) -> Vec<f64> {
    let w = |j: usize| prefix[j - 2] * (1.0 - zeta[j - 2]); // weight of break before node j
    let mut acc = vec![0.0_f64; kmax + 1];
    // ring buffer of the last m rows: rows[i % m]
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; kmax + 1]; m];
    let mut current = vec![0.0_f64; kmax + 1];
    for i in (1..=n).rev() {
        let rem = n - i + 1;
        for k in (0..=kmax).rev() {
            current[k] = if m * k > rem {
                0.0
            } else if rem < m {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                let mut s = acc[k];
                if i + m <= n {
                    let sized = &rows[(i + m) % m];
                    s -= w(i + m) * sized[k];
                    if k >= 1 {
                        s += w(i + m) * sized[k - 1];
                    }
                }
                let mut p = s / prefix[i - 1];
                // no break at all: nodes i..n form one component of size rem
                let all_within = prefix[n - 1] / prefix[i - 1];
                if (rem == m && k == 1) || (rem != m && k == 0) {
                    p += all_within;
                }
                p
            };
        }
        if i >= 2 {
            let wi = w(i);
            for k in 0..=kmax {
                acc[k] += wi * current[k];
            }
        }
        rows[i % m].copy_from_slice(&current);
    }
    rows[1 % m].clone()
}

/// Direct path: every run factor evaluated explicitly (log space safe).
fn size_m_rows_direct(n: usize, m: usize, kmax: usize, zeta: &[f64]) -> Vec<f64> {
    // table[i][k], i = 1..=n
    let mut table = vec![vec![0.0_f64; kmax + 1]; n + 1];
    for i in (1..=n).rev() {
        let rem = n - i + 1;
        for k in 0..=kmax {
            table[i][k] = if m * k > rem {
                0.0
            } else if rem < m {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                let mut total = 0.0;
                // run of spacings within r from i, first break before node j
                let mut log_run = 0.0_f64;
                for j in i + 1..=n {
                    // log_run = sum of ln(zeta_t), t = i..j-2 (1-based spacings)
                    if j > i + 1 {
                        log_run += zeta[j - 3].ln();
                    }
                    let p_run = log_run.exp() * (1.0 - zeta[j - 2]);
                    let size = j - i;
                    if size == m {
                        if k >= 1 {
                            total += p_run * table[j][k - 1];
                        }
                    } else {
                        total += p_run * table[j][k];
                    }
                }
                let log_all: f64 = (i..n).map(|t| zeta[t - 1].ln()).sum();
                let all_within = log_all.exp();
                if (rem == m && k == 1) || (rem != m && k == 0) {
                    total += all_within;
                }
                total
            };
        }
    }
    table[1].clone()
}

/// Limiting distribution of the number of size-`m` components:
/// `P_m(k) = sum_{s >= mk} theta_s P_m^s(1,k)` with `P_m^0(1,0) = 1`.
pub fn size_m_component_pmf_limit(m: u64, lambda: f64, r: f64, tol: f64) -> Result<Pmf> {
    if m < 1 {
        return Err(Error::IndexOutOfRange {
            what: format!("component size must be >= 1, got {m}"),
        });
    }
    let (thetas, _) = tail_node_count_series(lambda, r, tol)?;
    let cutoff = thetas.len() as u64 - 1;
    let kmax = cutoff / m;
    // exact size-m pmfs of the s-node tails; s < m contributes only to k = 0
    let mut tail_pmfs: Vec<Option<Pmf>> = Vec::with_capacity(cutoff as usize + 1);
    for s in 0..=cutoff {
        if s >= m {
            tail_pmfs.push(Some(size_m_component_pmf(s, m, lambda, r)?));
        } else {
            tail_pmfs.push(None);
        }
    }
    let mut probs = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut p = 0.0;
        for s in (m * k)..=cutoff {
            p += thetas[s as usize]
                * match &tail_pmfs[s as usize] {
                    Some(pmf) => pmf.prob(k),
                    None => {
                        if k == 0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                };
        }
        probs.push(p);
    }
    Pmf::new(PmfLabel::SizeMComponents, (0..=kmax).collect(), probs)
}

/// Partial-fraction coefficients of a hypoexponential density with distinct
/// rates: `C_h = prod_{m != h} r_m / (r_m - r_h)`.
fn hypoexp_coefficients(rates: &[f64]) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(rates.len());
    for (h, &rh) in rates.iter().enumerate() {
        let mut c = 1.0_f64;
        for (m, &rm) in rates.iter().enumerate() {
            if m != h {
                c *= rm / (rm - rh);
            }
        }
        coeffs.push(c);
    }
    coeffs
}

/// CDF at `x` of the sum of independent exponentials with the given distinct
/// rates: `sum_h C_h (1 - e^{-r_h x})`.
fn hypoexp_cdf(rates: &[f64], x: f64) -> f64 {
    let coeffs = hypoexp_coefficients(rates);
    rates
        .iter()
        .zip(&coeffs)
        .map(|(&rh, &ch)| ch * -(-rh * x).exp_m1())
        .sum()
}

/// Probability, given a connected network, that the `i`-th ordered node is the
/// last one within range of the `j`-th:
/// `P(X_(i) <= X_(j) + r < X_(i+1) | connected)` for `1 <= j < i <= n-1`.
///
/// The gap `X_(i) - X_(j)` is hypoexponential with rates `(n-h) lambda`,
/// `h = j..i-1` (all distinct); the value integrates its density against the
/// exceedance of the next spacing and divides by the probability that the
/// spacings involved are all within `r`.
///
/// Numerically reliable while `i - j` stays within a few tens; the
/// partial-fraction coefficients grow combinatorially beyond that.
pub fn last_in_range_prob(n: u64, j: u64, i: u64, lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !(j >= 1 && j < i && i <= n.saturating_sub(1)) {
        return Err(Error::IndexOutOfRange {
            what: format!("last-in-range needs 1 <= j < i <= n-1, got j={j}, i={i}, n={n}"),
        });
    }
    if r == 0.0 {
        return Err(Error::Domain(
            "conditioning on connectivity is a null event at r = 0".into(),
        ));
    }
    let rates: Vec<f64> = (j..i).map(|h| (n - h) as f64 * lambda).collect();
    let coeffs = hypoexp_coefficients(&rates);
    let rate_i = (n - i) as f64 * lambda;
    let mut numerator = 0.0_f64;
    for (&rh, &ch) in rates.iter().zip(&coeffs) {
        let diff = rh - rate_i;
        numerator += ch * (rh * -(-diff * r).exp_m1() / diff - -(-rh * r).exp_m1());
    }
    numerator *= (-rate_i * r).exp();
    let denom: f64 = (j..=i)
        .map(|t| spacing_within_prob(n, lambda, r, t))
        .product();
    clamp_probability(numerator / denom, "last_in_range_prob")
}

/// Probability, given a connected network, that every node from `j` to `n`
/// lies within range of node `j`: `P(X_(n) - X_(j) <= r | connected)`.
pub fn span_within_range_prob(n: u64, j: u64, lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !(j >= 1 && j <= n.saturating_sub(1)) {
        return Err(Error::IndexOutOfRange {
            what: format!("span-within-range needs 1 <= j <= n-1, got j={j}, n={n}"),
        });
    }
    if r == 0.0 {
        return Err(Error::Domain(
            "conditioning on connectivity is a null event at r = 0".into(),
        ));
    }
    let rates: Vec<f64> = (j..n).map(|h| (n - h) as f64 * lambda).collect();
    let numerator = hypoexp_cdf(&rates, r);
    let denom: f64 = (j..n)
        .map(|t| spacing_within_prob(n, lambda, r, t))
        .product();
    clamp_probability(numerator / denom, "span_within_range_prob")
}

/// Distribution, conditioned on connectivity, of the number of redundant
/// nodes: nodes skipped by the relay chain that hops from each node to the
/// last node within its range.
///
/// Consecutive hops share a spacing: the hop ending at node `i` reveals that
/// the next spacing exceeds the leftover reach `r - (X_(i) - X_(prev))`.
/// Chaining the per-hop probabilities as if the hops were independent skews
/// the distribution (at n=10, lambda=1, r=2 the skew is ~0.06 in total
/// variation), so the evaluation here carries that leftover reach through a
/// transfer-operator DP: by memorylessness the constrained spacing splits
/// into the deficit plus a fresh exponential, and each hop becomes an
/// integral against a hypoexponential density, evaluated on a spectral grid.
///
/// Numerically reliable while `n` stays within a few tens, like the other
/// hypoexponential-based quantities.
pub fn redundant_pmf(n: u64, lambda: f64, r: f64) -> Result<Pmf> {
    check_rate_cutoff(lambda, r)?;
    if n < 2 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    if r == 0.0 {
        return Err(Error::Domain(
            "conditioning on connectivity is a null event at r = 0".into(),
        ));
    }
    let nn = n as usize;
    if n == 2 {
        return Pmf::new(PmfLabel::Redundant, vec![0], vec![1.0]);
    }

    // spacing s has rate (n-s) lambda, s = 1..n-1 (index 0 unused)
    let rate = |s: usize| (nn - s) as f64 * lambda;
    // partial-fraction coefficients of the hop-sum densities, per (i, t):
    // sum of spacings i..t-1 (untruncated; the memoryless reformulation
    // never needs the truncated ones)
    let coeffs: Vec<Vec<Vec<f64>>> = (0..nn)
        .map(|i| {
            (0..=nn)
                .map(|t| {
                    if i >= 1 && i < t && t <= nn {
                        let rates: Vec<f64> = (i..t).map(rate).collect();
                        hypoexp_coefficients(&rates)
                    } else {
                        Vec::new()
                    }
                })
                .collect()
        })
        .collect();
    let hop_pdf = |i: usize, t: usize, x: f64| -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        (i..t)
            .zip(&coeffs[i][t])
            .map(|(s, &c)| c * rate(s) * (-rate(s) * x).exp())
            .sum()
    };
    let hop_cdf = |i: usize, t: usize, x: f64| -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        (i..t)
            .zip(&coeffs[i][t])
            .map(|(s, &c)| c * -(-rate(s) * x).exp_m1())
            .sum()
    };

    let grid = SpectralGrid::new(r);
    // state[i] = mass density over the deficit w at chain node i, with the
    // pending constraint (next spacing > w) already folded in
    let mut prob_given_hops = vec![0.0_f64; nn - 1];

    // hop 1 leaves the start node with zero deficit
    prob_given_hops[nn - 2] = hop_cdf(1, nn, r); // chain (1, n): n-2 redundant
    let mut state: Vec<Option<Vec<f64>>> = vec![None; nn];
    for (t, slot) in state.iter_mut().enumerate().skip(2) {
        let values = grid
            .nodes
            .iter()
            .map(|&w| hop_pdf(1, t, r - w) * (-rate(t) * w).exp())
            .collect();
        *slot = Some(values);
    }

    // after hop h the chain sits at a node in h+1 ..= n-1
    for h in 1..=nn - 2 {
        // absorb: the next hop jumps from node i straight past node n
        for (i, entry) in state.iter().enumerate().skip(h + 1) {
            if let Some(values) = entry {
                let k = nn - h - 2;
                prob_given_hops[k] += grid.integrate(values, r, |w| hop_cdf(i, nn, r - w));
            }
        }
        if h == nn - 2 {
            break;
        }
        // advance one hop
        let mut next: Vec<Option<Vec<f64>>> = vec![None; nn];
        for (t, target) in next.iter_mut().enumerate().skip(h + 2) {
            let mut values = vec![0.0_f64; grid.nodes.len()];
            for (i, entry) in state.iter().enumerate().skip(h + 1).take(t - h - 1) {
                if let Some(source) = entry {
                    for (slot, &w_new) in grid.nodes.iter().enumerate() {
                        let integral =
                            grid.integrate(source, r - w_new, |w| hop_pdf(i, t, r - w - w_new));
                        values[slot] += integral * (-rate(t) * w_new).exp();
                    }
                }
            }
            *target = Some(values);
        }
        state = next;
    }

    let total_conn: f64 = (1..nn).map(|s| -(-rate(s) * r).exp_m1()).product();
    let probs = prob_given_hops
        .iter()
        .map(|&p| clamp_probability(p / total_conn, "redundant_pmf"))
        .collect::<Result<Vec<_>>>()?;
    Pmf::new(PmfLabel::Redundant, (0..=(n - 2)).collect(), probs)
}

/// Chebyshev collocation nodes on [0, r] with barycentric interpolation and
/// Gauss-Legendre quadrature against stored state values. The DP integrands
/// are analytic, so both converge spectrally.
struct SpectralGrid {
    nodes: Vec<f64>,
    bary: Vec<f64>,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

const GRID_POINTS: usize = 48;

impl SpectralGrid {
    fn new(r: f64) -> Self {
        let m = GRID_POINTS - 1;
        let nodes = (0..GRID_POINTS)
            .map(|j| 0.5 * r * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos()))
            .collect();
        let bary = (0..GRID_POINTS)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == m {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        let (gl_nodes, gl_weights) = gauss_legendre(GRID_POINTS);
        SpectralGrid {
            nodes,
            bary,
            gl_nodes,
            gl_weights,
        }
    }

    fn eval(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&node, &weight), &value) in self.nodes.iter().zip(&self.bary).zip(values) {
            let diff = x - node;
            if diff.abs() < 1e-14 {
                return value;
            }
            let term = weight / diff;
            num += term * value;
            den += term;
        }
        num / den
    }

    /// `int_0^upper values(w) * f(w) dw` by Gauss-Legendre on [0, upper].
    fn integrate(&self, values: &[f64], upper: f64, f: impl Fn(f64) -> f64) -> f64 {
        if upper <= 0.0 {
            return 0.0;
        }
        let half = 0.5 * upper;
        self.gl_nodes
            .iter()
            .zip(&self.gl_weights)
            .map(|(&x, &w)| {
                let point = half * (x + 1.0);
                w * half * self.eval(values, point) * f(point)
            })
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for k in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x)
            let mut p0 = 1.0_f64;
            let mut p1 = x;
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[order - 1 - k] = x;
        weights[k] = w;
        weights[order - 1 - k] = w;
    }
    (nodes, weights)
}

fn check_rate_cutoff(lambda: f64, r: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidRate { got: lambda });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidCutoff { got: r });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{connectivity_prob, hole_count_moments};
    use approx::assert_relative_eq;

    #[test]
    fn component_pmf_two_nodes() {
        let pmf = component_pmf(2, 1.0, 1.0).unwrap();
        assert_eq!(pmf.support(), &[1, 2]);
        assert_relative_eq!(pmf.prob(1), 0.6321205588285577, max_relative = 1e-14);
        assert_relative_eq!(pmf.prob(2), 0.36787944117144233, max_relative = 1e-14);
    }

    #[test]
    fn component_pmf_connected_entry_matches_product() {
        for &(n, lambda, r) in &[(5u64, 1.0, 1.0), (50, 0.5, 0.8), (200, 1.0, 1.0)] {
            let pmf = component_pmf(n, lambda, r).unwrap();
            let pc = connectivity_prob(n, lambda, r).unwrap();
            assert!((pmf.prob(1) - pc).abs() < 1e-12);
            assert!((pmf.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn component_mean_is_one_plus_hole_count_mean() {
        for &(n, lambda, r) in &[(10u64, 1.0, 1.0), (80, 0.7, 0.6)] {
            let pmf = component_pmf(n, lambda, r).unwrap();
            let holes = hole_count_moments(n, lambda, r).unwrap();
            assert!((pmf.mean() - (1.0 + holes.mean)).abs() < 1e-9);
        }
    }

    #[test]
    fn component_pmf_zero_cutoff_is_all_isolated() {
        let pmf = component_pmf(6, 1.0, 0.0).unwrap();
        assert_eq!(pmf.prob(6), 1.0);
        assert_eq!(pmf.prob(1), 0.0);
    }

    #[test]
    fn tail_node_count_values() {
        // s = 0 is the connected case
        assert_relative_eq!(
            tail_node_count_prob(0, 1.0, 1.0, 1e-12).unwrap(),
            0.5044286547259664,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            tail_node_count_prob(1, 1.0, 1.0, 1e-12).unwrap(),
            0.2935657273279424,
            max_relative = 1e-11
        );
    }

    #[test]
    fn tail_node_count_normalizes() {
        let mut sum = 0.0;
        for s in 0..=60 {
            sum += tail_node_count_prob(s, 1.0, 1.0, 1e-13).unwrap();
        }
        assert!((sum - 1.0).abs() < 1e-10, "sum = {sum}");
        let pmf = tail_node_count_pmf(1.0, 1.0, 1e-10).unwrap();
        assert!((pmf.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn component_limit_matches_large_n_exact() {
        let limit = component_pmf_limit(1.0, 1.0, 1e-10).unwrap();
        assert!((limit.prob(1) - 0.5044286547259664).abs() < 1e-10);
        assert!((limit.total() - 1.0).abs() < 1e-9);
        let exact = component_pmf(2000, 1.0, 1.0).unwrap();
        assert!(limit.tv_distance(&exact) < 1e-6);
    }

    #[test]
    fn size_m_hand_cases() {
        let pmf = size_m_component_pmf(2, 1, 1.0, 1.0).unwrap();
        assert_relative_eq!(pmf.prob(0), 0.6321205588285577, max_relative = 1e-13);
        assert_eq!(pmf.prob(1), 0.0);
        assert_relative_eq!(pmf.prob(2), 0.36787944117144233, max_relative = 1e-13);

        let pmf = size_m_component_pmf(2, 2, 1.0, 1.0).unwrap();
        assert_relative_eq!(pmf.prob(0), 0.36787944117144233, max_relative = 1e-13);
        assert_relative_eq!(pmf.prob(1), 0.6321205588285577, max_relative = 1e-13);
    }

    #[test]
    fn size_m_sums_to_one_and_respects_capacity() {
        for &(n, m) in &[(7u64, 1u64), (7, 2), (7, 3), (20, 2), (37, 5), (64, 1)] {
            let pmf = size_m_component_pmf(n, m, 1.0, 0.5).unwrap();
            assert!(
                (pmf.total() - 1.0).abs() < 1e-10,
                "n={n}, m={m}, total={}",
                pmf.total()
            );
            for (&k, &p) in pmf.support().iter().zip(pmf.probs()) {
                if m * k > n {
                    assert_eq!(p, 0.0);
                }
            }
        }
    }

    #[test]
    fn size_m_zero_cutoff() {
        let pmf = size_m_component_pmf(5, 1, 1.0, 0.0).unwrap();
        assert_eq!(pmf.prob(5), 1.0);
        let pmf = size_m_component_pmf(5, 2, 1.0, 0.0).unwrap();
        assert_eq!(pmf.prob(0), 1.0);
    }

    #[test]
    fn size_m_rejects_bad_size() {
        assert!(size_m_component_pmf(5, 0, 1.0, 1.0).is_err());
        assert!(size_m_component_pmf(5, 6, 1.0, 1.0).is_err());
    }

    #[test]
    fn size_m_limit_isolated_nodes() {
        // m=1 limit vs the exact pmf at n = 2000
        let limit = size_m_component_pmf_limit(1, 1.0, 1.0, 1e-10).unwrap();
        let exact = size_m_component_pmf(2000, 1, 1.0, 1.0).unwrap();
        assert!(limit.tv_distance(&exact) < 1e-4);
        assert!((limit.total() - 1.0).abs() < 1e-9);

        // isolated nodes vanish for large lambda*r; at r=3 the value is
        // 0.95021 (a lone trailing node still occurs with prob ~ e^{-3}),
        // within 0.01 of 1 only from r ~ 5 on.
        let p0_r3 = size_m_component_pmf_limit(1, 1.0, 3.0, 1e-10)
            .unwrap()
            .prob(0);
        assert_relative_eq!(p0_r3, 0.9502126402392864, max_relative = 1e-9);
        let p0_r5 = size_m_component_pmf_limit(1, 1.0, 5.0, 1e-10)
            .unwrap()
            .prob(0);
        assert!((p0_r5 - 1.0).abs() < 0.01);
    }

    #[test]
    fn size_m_limit_pairs_match_large_n_exact() {
        let limit = size_m_component_pmf_limit(2, 1.0, 1.0, 1e-10).unwrap();
        let exact = size_m_component_pmf(2000, 2, 1.0, 1.0).unwrap();
        assert!(limit.tv_distance(&exact) < 1e-4);
        assert!((limit.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn last_in_range_matches_independent_evaluation() {
        // 50-digit quadrature of the defining integral gives 1/(1+e).
        assert_relative_eq!(
            last_in_range_prob(3, 1, 2, 1.0, 1.0).unwrap(),
            0.2689414213699951,
            max_relative = 1e-12
        );
        assert!(last_in_range_prob(3, 2, 2, 1.0, 1.0).is_err());
        assert!(last_in_range_prob(3, 1, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn two_node_span_is_certain_given_connectivity() {
        assert_relative_eq!(span_within_range_prob(2, 1, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn crossing_partition_sums_to_one() {
        for &(n, lambda, r) in &[(4u64, 1.0, 1.0), (8, 1.0, 1.2), (12, 0.6, 1.5)] {
            for j in 1..=n - 2 {
                let mut sum = span_within_range_prob(n, j, lambda, r).unwrap();
                for i in j + 1..n {
                    sum += last_in_range_prob(n, j, i, lambda, r).unwrap();
                }
                assert!(
                    (sum - 1.0).abs() < 1e-9,
                    "partition failed: n={n}, j={j}, sum={sum}"
                );
            }
        }
    }

    #[test]
    fn redundant_pmf_small_cases() {
        let pmf = redundant_pmf(2, 1.0, 1.0).unwrap();
        assert_eq!(pmf.prob(0), 1.0);

        let pmf = redundant_pmf(3, 1.0, 1.0).unwrap();
        let expected_one = span_within_range_prob(3, 1, 1.0, 1.0).unwrap();
        assert_relative_eq!(pmf.prob(1), expected_one, max_relative = 1e-12);
        assert_relative_eq!(pmf.prob(0), 1.0 - expected_one, max_relative = 1e-9);
    }

    #[test]
    fn redundant_pmf_normalizes() {
        for &(n, lambda, r) in &[(3u64, 1.0, 1.0), (10, 1.0, 2.0), (14, 0.8, 1.5)] {
            let pmf = redundant_pmf(n, lambda, r).unwrap();
            assert!(
                (pmf.total() - 1.0).abs() < 1e-10,
                "n={n}, total={}",
                pmf.total()
            );
        }
    }

    #[test]
    fn redundant_rejects_null_conditioning() {
        assert!(redundant_pmf(5, 1.0, 0.0).is_err());
    }

    #[test]
    fn tv_distance_is_a_metric_on_simple_cases() {
        let a = Pmf::new(PmfLabel::ComponentCount, vec![1, 2], vec![0.7, 0.3]).unwrap();
        let b = Pmf::new(PmfLabel::ComponentCount, vec![1, 2, 3], vec![0.5, 0.3, 0.2]).unwrap();
        assert_relative_eq!(a.tv_distance(&b), 0.2, max_relative = 1e-14);
        assert_eq!(a.tv_distance(&a), 0.0);
    }
}
