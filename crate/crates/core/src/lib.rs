//! Tail-index estimation with the p-power generalization of the Hill estimator.
//!
//! For a sample with a regularly varying upper tail, `Q(1 - s) = s^{-γ} ℓ(s)`,
//! the statistic
//!
//! ```text
//! S_n(p) = (1/k) Σ_{i=1..k} ( log X_{n+1-i,n} / X_{n-k,n} )^p
//! ```
//!
//! converges to `γ^p Γ(p+1)`, so `γ̂ = (S_n(p) / Γ(p+1))^{1/p}` estimates γ.
//! `p = 1` is the classical Hill estimator.
//!
//! The crate is organised as:
//!
//! - [`tail_math`]: log-gamma, normal distribution utilities and the closed-form
//!   limit moments and variances.
//! - [`estimators`]: order statistics, `S_n(p)`, `γ̂`, Wald intervals, k-sweeps and
//!   the large-p schedule `p = ln(k) / α`.
//! - [`models`]: synthetic quantile models, counter-based random streams,
//!   inverse-transform sampling and quadrature oracles for `m_p(v)`.
//! - [`montecarlo`]: deterministic replication harness (mean/MSE tables) and the
//!   limit-theorem verification suites.
//! - [`cli_io`]: loss-file ingestion and the command implementations behind the
//!   `hillp` binary.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod estimators;
pub mod models;
pub mod montecarlo;
pub mod tail_math;

pub use error::{Result, TailError};
pub use estimators::{
    confidence_interval, gamma_hat, k_sweep, large_p_estimate, log_spacings, make_sample, s_n,
    ConfidenceInterval, EstimatorConfig, HillPlotSeries, HillPoint, LargePSchedule, Sample,
    TailEstimate,
};
pub use models::{QuantileModel, RandomStream};
