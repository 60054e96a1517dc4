//! Exact probabilities, distributions, moments, and asymptotic limits for
//! one-dimensional random geometric graphs with exponential, double-exponential,
//! and truncated-exponential node placement, cross-validated against a seeded
//! Monte Carlo simulator.
//!
//! A one-dimensional RGG places `n` random points on the line and joins every
//! pair at distance at most `r`. With exponential placement the gaps between
//! consecutive ordered nodes are independent exponentials, which makes
//! connectivity, component counts, coverage holes, redundancy, and their
//! `n -> infinity` limits exactly computable. The [`analytic`] and
//! [`recursions`] modules evaluate those closed forms and recursions; the
//! [`montecarlo`] module provides the seeded, reproducible simulator used as an
//! oracle for every analytic claim; [`experiments`] drives the asymptotic
//! demonstrations (thresholds, strong laws, extreme-value fits).
//!
//! Monte Carlo sampling is data-parallel. With the default `parallel` feature
//! the work is spread over a rayon pool; without it everything runs on one
//! thread. Results are bit-identical either way: every sample index owns its
//! own counter-derived random stream and partial results are combined in a
//! fixed order.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod recursions;

mod numeric;

pub use error::{Error, Result};
pub use model::{ModelParams, SpacingRates, Variant};
