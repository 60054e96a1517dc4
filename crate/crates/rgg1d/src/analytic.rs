//! Closed-form probabilities, moments, transforms, and their large-n limits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{clamp_probability, ln_one_minus_exp_neg};

/// Mean and variance of a nonnegative network statistic (hole length or count).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoleMoments {
    /// Expected value (length for hole length, dimensionless for hole count).
    pub mean: f64,
    /// Variance (length^2 respectively dimensionless).
    pub variance: f64,
}

/// A truncated-series limit together with a guaranteed truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitValue {
    pub value: f64,
    /// Upper bound on the truncation error of the underlying series.
    pub tail_bound: f64,
    pub terms_used: u64,
}

/// Probability that the `n`-node exponential RGG is connected:
/// `prod_{i=1}^{n-1} (1 - e^{-i lambda r})`, evaluated in log space.
///
/// Returns 1 for `n = 1` and 0 for `r = 0, n >= 2` (a legitimate value).
pub fn connectivity_prob(n: u64, lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if n < 1 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    if n == 1 {
        return Ok(1.0);
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let beta = lambda * r;
    let mut log_sum = 0.0_f64;
    for i in 1..n {
        let x = i as f64 * beta;
        if x > 745.0 {
            // remaining factors are 1 to machine precision
            break;
        }
        log_sum += ln_one_minus_exp_neg(x);
    }
    clamp_probability(log_sum.exp(), "connectivity_prob")
}

/// Large-n limit of the connectivity probability:
/// `exp(-sum_{j>=1} e^{-j lambda r} / (j (1 - e^{-j lambda r})))`.
///
/// The series is truncated once its geometric tail bound drops below `tol`;
/// the bound achieved is recorded in the result. Always strictly inside (0, 1).
pub fn connectivity_prob_limit(lambda: f64, r: f64, tol: f64) -> Result<LimitValue> {
    check_rate_cutoff(lambda, r)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tol must be > 0, got {tol}")));
    }
    let beta = lambda * r;
    if beta == 0.0 {
        return Err(Error::Domain(
            "limit is 0, series diverges at lambda * r = 0".into(),
        ));
    }
    let q = (-beta).exp();
    let mut sum = 0.0_f64;
    let mut term;
    let mut j = 0u64;
    let tail_bound = loop {
        j += 1;
        let e = (-(j as f64) * beta).exp();
        term = e / (j as f64 * (1.0 - e));
        sum += term;
        // terms decay at least geometrically with ratio q
        let bound = term * q / (1.0 - q);
        if term / (1.0 - q) < tol || term == 0.0 {
            break bound;
        }
    };
    Ok(LimitValue {
        value: (-sum).exp(),
        tail_bound,
        terms_used: j,
    })
}

/// Probability that the two nodes closest to the origin on either side of it
/// bridge the gap, given `k` of `n` double-exponential nodes are positive:
/// the minima are independent exponentials with rates `k lambda` and
/// `(n-k) lambda`, and this is `P(U + V <= r)` for their sum.
pub fn origin_bridge_prob(n: u64, k: u64, lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !(k >= 1 && k <= n.saturating_sub(1)) {
        return Err(Error::IndexOutOfRange {
            what: format!("bridge needs 1 <= k <= n-1, got k={k}, n={n}"),
        });
    }
    let kf = k as f64;
    let nk = (n - k) as f64;
    let p = if 2 * k == n {
        let x = kf * lambda * r;
        1.0 - (-x).exp() * (1.0 + x)
    } else {
        1.0 + (kf * (-nk * lambda * r).exp() - nk * (-kf * lambda * r).exp())
            / (n as f64 - 2.0 * kf)
    };
    clamp_probability(p, "origin_bridge_prob")
}

/// Connectivity probability of the double-exponential (Laplace) RGG.
///
/// Conditions on the number of nodes on each side of the origin: both halves
/// must be connected and the innermost pair must bridge the origin. The
/// half-counts are Binomial(n, 1/2); the all-on-one-side term contributes
/// `P^c_n / 2^{n-1}`.
pub fn double_exp_connectivity_prob(n: u64, lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if n < 1 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    if n == 1 {
        return Ok(1.0);
    }
    // connectivity probabilities for all half sizes, P^c_0 := 1
    let mut conn = Vec::with_capacity(n as usize + 1);
    conn.push(1.0);
    for m in 1..=n {
        conn.push(connectivity_prob(m, lambda, r)?);
    }
    // binomial weights C(n,k)/2^n via a log-space recurrence
    let mut log_w = -(n as f64) * std::f64::consts::LN_2;
    let mut total = 0.0_f64;
    for k in 1..n {
        log_w += ((n - k + 1) as f64).ln() - (k as f64).ln();
        let bridge = origin_bridge_prob(n, k, lambda, r)?;
        total += log_w.exp() * bridge * conn[k as usize] * conn[(n - k) as usize];
    }
    total += conn[n as usize] * (0.5_f64).powi(n as i32 - 1);
    clamp_probability(total, "double_exp_connectivity_prob")
}

/// Mean and variance of the total uncovered length between consecutive nodes:
/// `mean = sum_{k=1}^{n-1} e^{-k lambda r} / (k lambda)`,
/// `variance = sum_{k=1}^{n-1} e^{-k lambda r}(2 - e^{-k lambda r}) / (k lambda)^2`.
///
/// Each gap excess `max(Y - r, 0)` has second moment `2 e^{-rho r} / rho^2`
/// (memorylessness), giving the `(2 - e^{-rho r})` variance factor; the same
/// value falls out of the second cumulant of [`hole_length_mgf`] at zero, and
/// the simulator confirms it.
pub fn hole_length_moments(n: u64, lambda: f64, r: f64) -> Result<HoleMoments> {
    check_rate_cutoff(lambda, r)?;
    let mut mean = 0.0;
    let mut variance = 0.0;
    for k in 1..n {
        let e = (-(k as f64) * lambda * r).exp();
        let rate = k as f64 * lambda;
        mean += e / rate;
        variance += e * (2.0 - e) / (rate * rate);
    }
    Ok(HoleMoments { mean, variance })
}

/// Mean and variance of the number of uncovered gaps:
/// `mean = e^{-lambda r}(1 - e^{-(n-1) lambda r}) / (1 - e^{-lambda r})`,
/// `variance = sum_{j=1}^{n-1} e^{-j lambda r}(1 - e^{-j lambda r})`.
pub fn hole_count_moments(n: u64, lambda: f64, r: f64) -> Result<HoleMoments> {
    check_rate_cutoff(lambda, r)?;
    if n < 2 {
        return Ok(HoleMoments {
            mean: 0.0,
            variance: 0.0,
        });
    }
    let beta = lambda * r;
    let mean = if beta == 0.0 {
        (n - 1) as f64
    } else {
        (-beta).exp() * (-(-((n - 1) as f64) * beta).exp_m1()) / -(-beta).exp_m1()
    };
    let variance = (1..n)
        .map(|j| {
            let e = (-(j as f64) * beta).exp();
            e * (1.0 - e)
        })
        .sum();
    Ok(HoleMoments { mean, variance })
}

/// Moment generating function of the total hole length,
/// `E[e^{theta H}] = prod_{i=1}^{n-1} (1 + theta e^{-i lambda r} / (i lambda - theta))`,
/// valid for `theta < lambda`.
pub fn hole_length_mgf(n: u64, lambda: f64, r: f64, theta: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !(theta.is_finite() && theta < lambda) {
        return Err(Error::Domain(format!(
            "hole length transform needs theta < lambda, got theta={theta}, lambda={lambda}"
        )));
    }
    let mut prod = 1.0_f64;
    for i in 1..n {
        let rate = i as f64 * lambda;
        prod *= 1.0 + theta * (-rate * r).exp() / (rate - theta);
    }
    Ok(prod)
}

/// Moment generating function of the hole count,
/// `E[e^{theta NH}] = prod_{i=1}^{n-1} (1 - e^{-i lambda r}(1 - e^{theta}))`.
///
/// Every factor must be positive; the binding factor is `i = 1`.
pub fn hole_count_mgf(n: u64, lambda: f64, r: f64, theta: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    if !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite, got {theta}")));
    }
    let one_minus_etheta = -theta.exp_m1();
    let mut prod = 1.0_f64;
    for i in 1..n {
        let factor = 1.0 - (-(i as f64) * lambda * r).exp() * one_minus_etheta;
        if factor <= 0.0 {
            return Err(Error::Domain(format!(
                "hole count transform undefined: factor at i={i} is {factor}"
            )));
        }
        prod *= factor;
    }
    Ok(prod)
}

/// Limiting expected number of degree-k nodes beyond position `r`:
/// `1 / (e^{lambda r} - e^{-lambda r})`, independent of k.
pub fn degree_count_limit(lambda: f64, r: f64) -> Result<f64> {
    check_rate_cutoff(lambda, r)?;
    let beta = lambda * r;
    if beta == 0.0 {
        return Err(Error::Domain(
            "degree count limit diverges at lambda * r = 0".into(),
        ));
    }
    Ok(1.0 / (beta.exp() - (-beta).exp()))
}

/// CDF of the standard Gumbel distribution, `exp(-e^{-x})`.
pub fn standard_gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Quantile of the standard Gumbel distribution, `-ln(-ln p)` for `p in (0,1)`.
pub fn standard_gumbel_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile needs p in (0,1), got {p}")));
    }
    Ok(-(-p.ln()).ln())
}

/// Equal-tail asymptotic confidence interval for the span `X_(n) - X_(1)`:
/// `lambda (span) - ln n` converges to a standard Gumbel, so the
/// `100(1-alpha)%` interval is
/// `[(ln n + q_{alpha/2}) / lambda, (ln n + q_{1-alpha/2}) / lambda]`.
pub fn span_confidence_interval(n: u64, lambda: f64, alpha: f64) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::InvalidNodeCount { got: n });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidRate { got: lambda });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let ln_n = (n as f64).ln();
    let low = (ln_n + standard_gumbel_quantile(alpha / 2.0)?) / lambda;
    let high = (ln_n + standard_gumbel_quantile(1.0 - alpha / 2.0)?) / lambda;
    Ok((low, high))
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
