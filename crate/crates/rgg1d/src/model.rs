//! Node-placement models and the independent-spacings structure they share.
//!
//! For `n` i.i.d. exponential(lambda) points, the gaps between consecutive
//! ordered points are independent exponentials with rates
//! `(n-1)*lambda, (n-2)*lambda, ..., lambda`. Everything else in this crate
//! (connectivity products, component recursions, the fast G* sampler) is built
//! on that fact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric;

/// Node-placement family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// i.i.d. exponential(lambda) on (0, inf).
    Exponential,
    /// i.i.d. double exponential (Laplace) with density `lambda/2 * e^{-lambda|x|}`.
    DoubleExponential,
    /// Exponential restricted and renormalized to (0, T).
    Truncated,
    /// First `n` order statistics of `N` i.i.d. exponential(lambda) points.
    GStar,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Exponential => "exponential",
            Variant::DoubleExponential => "double_exponential",
            Variant::Truncated => "truncated",
            Variant::GStar => "gstar",
        }
    }
}

/// Validated parameters of a placement model plus the cutoff range `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub variant: Variant,
    /// Number of nodes in the graph.
    pub n: u64,
    /// Rate of the exponential placement (1/length).
    pub lambda: f64,
    /// Cutoff range: nodes at distance <= r are adjacent.
    pub r: f64,
    /// Truncation point, `Truncated` only (also used to derive the default
    /// parent count of a `GStar` model).
    pub t: Option<f64>,
    /// Parent sample size, `GStar` only. Defaults to `floor(n / p)` with
    /// `p = 1 - e^{-lambda T}` when constructed from a truncation point.
    pub parent_n: Option<u64>,
}

impl ModelParams {
    pub fn exponential(n: u64, lambda: f64, r: f64) -> Result<Self> {
        ModelParams {
            variant: Variant::Exponential,
            n,
            lambda,
            r,
            t: None,
            parent_n: None,
        }
        .validated()
    }

    pub fn double_exponential(n: u64, lambda: f64, r: f64) -> Result<Self> {
        ModelParams {
            variant: Variant::DoubleExponential,
            n,
            lambda,
            r,
            t: None,
            parent_n: None,
        }
        .validated()
    }

    pub fn truncated(n: u64, lambda: f64, r: f64, t: f64) -> Result<Self> {
        ModelParams {
            variant: Variant::Truncated,
            n,
            lambda,
            r,
            t: Some(t),
            parent_n: None,
        }
        .validated()
    }

    /// G* with the default parent count `N = floor(n / p)`, `p = 1 - e^{-lambda t}`.
    pub fn gstar(n: u64, lambda: f64, r: f64, t: f64) -> Result<Self> {
        ModelParams {
            variant: Variant::GStar,
            n,
            lambda,
            r,
            t: Some(t),
            parent_n: None,
        }
        .validated()
    }

    /// G* with an explicit parent count.
    pub fn gstar_with_parent(n: u64, lambda: f64, r: f64, parent_n: u64) -> Result<Self> {
        ModelParams {
            variant: Variant::GStar,
            n,
            lambda,
            r,
            t: None,
            parent_n: Some(parent_n),
        }
        .validated()
    }

    /// The G* companion of a truncated model: same `n`, `lambda`, `r`, with
    /// `N = floor(n / p)`.
    pub fn gstar_companion(&self) -> Result<Self> {
        let t = self
            .t
            .ok_or_else(|| Error::Domain("gstar companion requires a truncation point".into()))?;
        ModelParams::gstar(self.n, self.lambda, self.r, t)
    }

    /// Checks every invariant and normalizes the G* default parent count.
    ///
    /// Each violated constraint is reported with a distinct error naming the
    /// offending field.
    pub fn validated(mut self) -> Result<Self> {
        if self.n < 1 {
            return Err(Error::InvalidNodeCount { got: self.n });
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidRate { got: self.lambda });
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidCutoff { got: self.r });
        }
        if matches!(self.variant, Variant::Truncated) || self.t.is_some() {
            let t = self.t.ok_or(Error::InvalidTruncation { got: f64::NAN })?;
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidTruncation { got: t });
            }
        }
        if matches!(self.variant, Variant::GStar) {
            let parent = match self.parent_n {
                Some(parent) => parent,
                None => {
                    let t = self.t.ok_or(Error::InvalidTruncation { got: f64::NAN })?;
                    let p = -(-self.lambda * t).exp_m1();
                    (self.n as f64 / p).floor() as u64
                }
            };
            if parent < self.n {
                return Err(Error::InvalidParentCount {
                    got: parent,
                    n: self.n,
                });
            }
            self.parent_n = Some(parent);
        }
        Ok(self)
    }

    /// Fraction of the untruncated exponential mass inside (0, T).
    pub fn truncation_mass(&self) -> Option<f64> {
        self.t.map(|t| -(-self.lambda * t).exp_m1())
    }
}

/// Rates of the inter-node spacings of an `n`-node exponential arrangement:
/// `(n-1)*lambda, (n-2)*lambda, ..., lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRates {
    rates: Vec<f64>,
}

impl SpacingRates {
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// Spacing rates for `n` exponential(lambda) points; requires `n >= 2`.
pub fn spacing_rates(n: u64, lambda: f64) -> Result<SpacingRates> {
    if n < 2 {
        return Err(Error::NoSpacings { got: n });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidRate { got: lambda });
    }
    let rates = (1..n).map(|i| (n - i) as f64 * lambda).collect();
    Ok(SpacingRates { rates })
}

/// P(spacing i <= r) in an `n`-node arrangement: `1 - e^{-lambda (n-i) r}`.
///
/// Spacings are 1-based, `1 <= i <= n-1`.
pub(crate) fn spacing_within_prob(n: u64, lambda: f64, r: f64, i: u64) -> f64 {
    debug_assert!(i >= 1 && i < n);
    -(-lambda * (n - i) as f64 * r).exp_m1()
}

/// Probability that, scanning spacings from index `i`, the first one to exceed
/// `r` is spacing `j-1`:
/// `P(Y_i <= r, ..., Y_{j-2} <= r, Y_{j-1} > r)` for `1 <= i < j <= n`.
///
/// For `j = i+1` this is `P(Y_i > r)`. Evaluated in log space when any factor
/// underflows.
pub fn spacing_run_prob(n: u64, lambda: f64, r: f64, i: u64, j: u64) -> Result<f64> {
    if !(i >= 1 && i < j && j <= n) {
        return Err(Error::IndexOutOfRange {
            what: format!("spacing run needs 1 <= i < j <= n, got i={i}, j={j}, n={n}"),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidRate { got: lambda });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidCutoff { got: r });
    }
    let within = (i..j.saturating_sub(1)).map(|k| spacing_within_prob(n, lambda, r, k));
    let exceed = std::iter::once((-lambda * (n - (j - 1)) as f64 * r).exp());
    let p = numeric::stable_product(within.chain(exceed));
    numeric::clamp_probability(p, "spacing_run_prob")
}
