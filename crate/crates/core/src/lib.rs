//! Identity tests for high-dimensional covariance matrices.
//!
//! Tests `H0: Σ = I` against `H1: Σ ≠ I` when the dimension `p` grows with
//! the sample size `n`. Two statistics are built on the mean-centred sample
//! covariance `S_n`, so they tolerate unknown means and non-Gaussian entries
//! with excess kurtosis `Δ`:
//!
//! - the corrected likelihood-ratio statistic
//!   `L_n = tr(S)/p − log|S|/p − 1` (requires `p < n`), and
//! - the Ledoit–Wolf-type statistic
//!   `W_n = tr(S − I)²/p − p/(n−1)·(tr S/p)² − ((1+Δ)(n−2)(n−1) − 2)/(n(n−1)²)`
//!   (valid for any `p/n`).
//!
//! Their legacy counterparts are kept for comparison.
//!
//! Crate layout:
//!
//! - [`covstats`]: estimators `S_n`, `B_n`, `𝔖_n` and the four statistics.
//! - [`asymptotics`]: null laws, standardisation, p-values, decisions.
//! - [`rmt`]: Marchenko–Pastur numerics and a contour-quadrature oracle for
//!   the closed-form means and variances.
//! - [`datagen`]: seeded synthesis of the simulation designs.
//! - [`harness`]: replicated Monte Carlo size/power experiments and export.
//! - [`normal`]: standard normal and Kolmogorov–Smirnov helpers.

pub mod asymptotics;
pub mod covstats;
pub mod datagen;
mod error;
pub mod harness;
pub mod normal;
pub mod rmt;

pub use asymptotics::{run_test, NullLaw, TestContext, TestReport};
pub use covstats::{
    CovarianceEstimate, DataMatrix, EstimatorKind, StatisticKind, StatisticValue,
};
pub use datagen::{CovarianceKind, CovarianceSpec, EntryDistribution, RngStream};
pub use error::{Error, Result};
pub use harness::{DeltaPolicy, ExperimentConfig, ExperimentResult};
