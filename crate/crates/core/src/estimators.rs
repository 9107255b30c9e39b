//! Order statistics, the power-mean statistic `S_n(p)`, and the estimator built on it.

use crate::error::{Result, TailError};
use crate::tail_math::{log_gamma_unchecked, moment_excess, normal_quantile};

/// Observations sorted ascending, so `values()[i]` is the order statistic `X_{i+1,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Sorts `raw` into order statistics. Needs at least two finite values.
    pub fn new(mut raw: Vec<f64>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(TailError::Size {
                needed: 2,
                got: raw.len(),
            });
        }
        if let Some(bad) = raw.iter().find(|x| !x.is_finite()) {
            return Err(TailError::Data(format!("non-finite observation {bad}")));
        }
        raw.sort_unstable_by(f64::total_cmp);
        Ok(Self { values: raw })
    }

    /// Caller guarantees ascending order, finiteness and `len >= 2`.
    pub(crate) fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `X_{i,n}` with the 1-based index used in the order-statistic notation.
    pub fn order_statistic(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|j| self.values.get(j).copied())
    }

    /// Largest observation.
    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The threshold `X_{n-k,n}` used with `k` upper order statistics.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(TailError::Range(format!(
                "k = {k} must satisfy 1 <= k <= n - 1 = {}",
                n - 1
            )));
        }
        Ok(self.values[n - k - 1])
    }
}

/// Convenience wrapper around [`Sample::new`] for borrowed data.
pub fn make_sample(raw: &[f64]) -> Result<Sample> {
    Sample::new(raw.to_vec())
}

/// Power `p` and number of upper order statistics `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub p: f64,
    pub k: usize,
}

impl EstimatorConfig {
    pub fn new(p: f64, k: usize) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(TailError::Domain(format!(
                "p must be a positive finite real, got {p}"
            )));
        }
        if k == 0 {
            return Err(TailError::Range("k must be at least 1".into()));
        }
        Ok(Self { p, k })
    }
}

/// Wald interval around a point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub p: f64,
    pub k: usize,
    /// `S_n(p)`
    pub s_value: f64,
    pub gamma_hat: f64,
    pub ci: Option<ConfidenceInterval>,
}

impl TailEstimate {
    /// `1/γ̂`, absent when `γ̂ = 0`.
    pub fn inv_gamma_hat(&self) -> Option<f64> {
        (self.gamma_hat > 0.0).then(|| 1.0 / self.gamma_hat)
    }
}

/// `[ln(X_{n+1-i,n} / X_{n-k,n}) for i = 1..k]`, largest observation first.
pub fn log_spacings(sample: &Sample, k: usize) -> Result<Vec<f64>> {
    let threshold = sample.threshold(k)?;
    if !(threshold > 0.0) {
        return Err(TailError::Positivity { k, threshold });
    }
    let n = sample.len();
    Ok(sample.values[n - k..]
        .iter()
        .rev()
        .map(|&x| (x / threshold).ln())
        .collect())
}

fn power_mean(spacings: &[f64], p: f64) -> f64 {
    let total: f64 = if p == 1.0 {
        spacings.iter().sum()
    } else {
        // 0^p = 0 for ties with the threshold
        spacings
            .iter()
            .map(|&y| if y > 0.0 { y.powf(p) } else { 0.0 })
            .sum()
    };
    total / spacings.len() as f64
}

/// `S_n(p) = (1/k) Σ (ln X_{n+1-i,n} / X_{n-k,n})^p`.
pub fn s_n(sample: &Sample, config: EstimatorConfig) -> Result<f64> {
    let spacings = log_spacings(sample, config.k)?;
    Ok(power_mean(&spacings, config.p))
}

/// `(s / Γ(p+1))^{1/p}`; exactly `s` when `p = 1`.
pub(crate) fn normalize(s_value: f64, p: f64) -> f64 {
    if p == 1.0 {
        s_value
    } else if s_value > 0.0 {
        ((s_value.ln() - log_gamma_unchecked(p + 1.0)) / p).exp()
    } else {
        0.0
    }
}

/// Point estimate `γ̂ = (S_n(p) / Γ(p+1))^{1/p}`.
pub fn gamma_hat(sample: &Sample, config: EstimatorConfig) -> Result<TailEstimate> {
    let s_value = s_n(sample, config)?;
    Ok(TailEstimate {
        p: config.p,
        k: config.k,
        s_value,
        gamma_hat: normalize(s_value, config.p),
        ci: None,
    })
}

/// Point estimate plus the Wald interval
/// `γ̂ ∓ z_{(1+level)/2} · √(delta_variance(γ̂, p)) / (p √k)`.
///
/// The lower bound is not clamped at zero.
pub fn confidence_interval(
    sample: &Sample,
    config: EstimatorConfig,
    level: f64,
) -> Result<TailEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(TailError::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let mut estimate = gamma_hat(sample, config)?;
    let z = normal_quantile(0.5 * (1.0 + level))?;
    let g = estimate.gamma_hat;
    // plug-in delta_variance(γ̂, p); written out so that γ̂ = 0 gives a zero-width interval
    let sd = (g * g * moment_excess(config.p)).sqrt();
    let half_width = z * sd / (config.p * (config.k as f64).sqrt());
    estimate.ci = Some(ConfidenceInterval {
        lower: g - half_width,
        upper: g + half_width,
        level,
    });
    Ok(estimate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillPoint {
    pub k: usize,
    pub gamma_hat: f64,
    pub inv_gamma_hat: Option<f64>,
}

/// Estimates along a range of `k` at fixed `p`, for Hill-type plots.
#[derive(Debug, Clone, PartialEq)]
pub struct HillPlotSeries {
    pub p: f64,
    pub points: Vec<HillPoint>,
}

/// One estimate per `k` in `k_min..=k_max`, ascending.
pub fn k_sweep(sample: &Sample, p: f64, k_min: usize, k_max: usize) -> Result<HillPlotSeries> {
    if k_min == 0 || k_min > k_max || k_max >= sample.len() {
        return Err(TailError::Range(format!(
            "k range [{k_min}, {k_max}] must satisfy 1 <= k_min <= k_max <= n - 1 = {}",
            sample.len() - 1
        )));
    }
    EstimatorConfig::new(p, k_min)?;
    let points = (k_min..=k_max)
        .map(|k| {
            let est = gamma_hat(sample, EstimatorConfig { p, k })?;
            Ok(HillPoint {
                k,
                gamma_hat: est.gamma_hat,
                inv_gamma_hat: est.inv_gamma_hat(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HillPlotSeries { p, points })
}

/// Growing power `p(k) = ln(k) / α`, with `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargePSchedule {
    alpha: f64,
}

impl LargePSchedule {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(TailError::Domain(format!(
                "large-p schedule needs alpha > 1 for consistency, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p_for(&self, k: usize) -> f64 {
        (k as f64).ln() / self.alpha
    }
}

/// [`gamma_hat`] with `p = ln(k) / α`.
pub fn large_p_estimate(
    sample: &Sample,
    k: usize,
    schedule: LargePSchedule,
) -> Result<TailEstimate> {
    if k < 2 {
        return Err(TailError::Range(format!(
            "large-p estimate needs k >= 2, got {k}"
        )));
    }
    gamma_hat(sample, EstimatorConfig::new(schedule.p_for(k), k)?)
}
