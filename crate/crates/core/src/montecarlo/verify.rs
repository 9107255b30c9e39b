//! Empirical checks of the limit theorems for `S_n(p)` and `γ̂`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::ks::ks_distance;
use crate::error::{Result, TailError};
use crate::estimators::{large_p_estimate, log_spacings, LargePSchedule};
use crate::models::{draw_upper_order_statistics, m_bound_check, QuantileModel, RandomStream};
use crate::tail_math::{
    limit_moment, limit_variance, log_gamma_unchecked, moment_excess, normal_cdf,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lln,
    Clt,
    Mbound,
    Largep,
}

impl FromStr for Suite {
    type Err = TailError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lln" => Ok(Self::Lln),
            "clt" => Ok(Self::Clt),
            "mbound" => Ok(Self::Mbound),
            "largep" => Ok(Self::Largep),
            other => Err(TailError::Domain(format!("unknown suite '{other}'"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Lln => "lln",
            Self::Clt => "clt",
            Self::Mbound => "mbound",
            Self::Largep => "largep",
        };
        f.write_str(name)
    }
}

/// Named statistics, the subset of them that is checked (`statistic <= threshold`),
/// and the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub statistics: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            statistics: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            pass: true,
        }
    }

    /// Informational statistic, not checked.
    pub fn record(&mut self, name: impl Into<String>, value: f64) {
        self.statistics.insert(name.into(), value);
    }

    /// Checked statistic; fails the report unless `value <= threshold`.
    pub fn check(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        let name = name.into();
        self.statistics.insert(name.clone(), value);
        self.thresholds.insert(name, threshold);
        self.pass = self.recompute_pass();
    }

    fn recompute_pass(&self) -> bool {
        self.thresholds
            .iter()
            .all(|(name, &t)| self.statistics.get(name).is_some_and(|&v| v <= t))
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.get(name).copied()
    }

    /// Names of checked statistics that exceed their threshold.
    pub fn failures(&self) -> Vec<&str> {
        self.thresholds
            .iter()
            .filter(|(name, &t)| !self.statistics.get(*name).is_some_and(|&v| v <= t))
            .map(|(name, _)| name.as_str())
            .collect()
    }

    /// Folds `other` in with every key prefixed by `prefix/`.
    pub fn merge(&mut self, prefix: &str, other: VerificationReport) {
        for (name, value) in other.statistics {
            self.statistics.insert(format!("{prefix}/{name}"), value);
        }
        for (name, value) in other.thresholds {
            self.thresholds.insert(format!("{prefix}/{name}"), value);
        }
        self.pass = self.recompute_pass();
    }
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Power mean of `-ln(U_{i,n} / U_{k+1,n})`, `i = 1..k`, over `n` uniforms, compared with `Γ(p+1)`.
///
/// Threshold on the relative error: `max(0.02, 2·SE)` with
/// `SE = √(Γ(2p+1)/Γ(p+1)² − 1) / √k`.
pub fn lln_uniform_check(
    p: f64,
    n: usize,
    k: usize,
    stream: &mut RandomStream,
) -> Result<VerificationReport> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(TailError::Domain(format!("p must be positive, got {p}")));
    }
    if k == 0 || k >= n {
        return Err(TailError::Range(format!(
            "need 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let mut u: Vec<f64> = (0..n).map(|_| stream.open01()).collect();
    let (smaller, &mut threshold, _) = u.select_nth_unstable_by(k, f64::total_cmp);
    let ln_t = threshold.ln();
    let statistic = smaller
        .iter()
        .map(|&x| (ln_t - x.ln()).powf(p))
        .sum::<f64>()
        / k as f64;
    let limit = log_gamma_unchecked(p + 1.0).exp();
    let rel_se = moment_excess(p).sqrt() / (k as f64).sqrt();

    let mut report = VerificationReport::new(Suite::Lln);
    report.record("statistic", statistic);
    report.record("limit", limit);
    report.record("relative_se", rel_se);
    report.check(
        "relative_error",
        (statistic - limit).abs() / limit,
        f64::max(0.02, 2.0 * rel_se),
    );
    Ok(report)
}

/// Distribution of `T = Σ_i [(log spacing_i)^p − m_p] / (√k σ_p)` over `reps` samples,
/// compared with the standard normal.
///
/// Checks: KS distance ≤ 0.05, `|Var T − 1| ≤ 0.1`, `|mean T| ≤ 3/√reps`.
pub fn clt_check(
    model: &QuantileModel,
    n: usize,
    k: usize,
    p: f64,
    reps: usize,
    stream: &RandomStream,
) -> Result<VerificationReport> {
    if reps < 2 {
        return Err(TailError::Domain(
            "clt check needs at least 2 replications".into(),
        ));
    }
    let gamma = model.gamma();
    let m_p = limit_moment(gamma, p)?;
    let sigma_p = limit_variance(gamma, p)?.sqrt();
    let norm = (k as f64).sqrt() * sigma_p;
    let draws: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|j| {
            let top = draw_upper_order_statistics(model, n, k + 1, &mut stream.child(j as u64))?;
            let spacings = log_spacings(&top, k)?;
            Ok(spacings.iter().map(|&y| y.powf(p) - m_p).sum::<f64>() / norm)
        })
        .collect::<Result<_>>()?;
    let (mean, variance) = mean_and_variance(&draws);

    let mut report = VerificationReport::new(Suite::Clt);
    report.record("empirical_mean", mean);
    report.record("empirical_variance", variance);
    report.check("ks_distance", ks_distance(&draws, normal_cdf)?, 0.05);
    report.check("variance_deviation", (variance - 1.0).abs(), 0.1);
    report.check("mean_abs", mean.abs(), 3.0 / (reps as f64).sqrt());
    Ok(report)
}

/// Large-p estimator with `p = ln(k)/α` over `reps` samples.
///
/// Checks `|mean γ̂ − γ|/γ ≤ 0.10`; for `α > 2` also the KS distance (≤ 0.08) of
/// `√k · p · (γ̂/γ − 1) / √(Γ(2p+1)/Γ(p+1)² − 1)` from the standard normal, which is
/// the deterministically centred and normed statistic `(√k m_p/σ_p) p ((S/m_p)^{1/p} − 1)`.
pub fn large_p_check(
    model: &QuantileModel,
    k: usize,
    n: usize,
    alpha: f64,
    reps: usize,
    stream: &RandomStream,
) -> Result<VerificationReport> {
    let schedule = LargePSchedule::new(alpha)?;
    let p = schedule.p_for(k);
    if p < 1.0 {
        return Err(TailError::Domain(format!(
            "k = {k} gives p = {p} < 1 at alpha = {alpha}"
        )));
    }
    if reps < 2 {
        return Err(TailError::Domain(
            "large-p check needs at least 2 replications".into(),
        ));
    }
    let gamma = model.gamma();
    let estimates: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|j| {
            let top = draw_upper_order_statistics(model, n, k + 1, &mut stream.child(j as u64))?;
            Ok(large_p_estimate(&top, k, schedule)?.gamma_hat)
        })
        .collect::<Result<_>>()?;
    let (mean, variance) = mean_and_variance(&estimates);

    let mut report = VerificationReport::new(Suite::Largep);
    report.record("p", p);
    report.record("empirical_mean", mean);
    report.record("empirical_variance", variance);
    report.check("mean_relative_error", (mean - gamma).abs() / gamma, 0.10);
    if alpha > 2.0 {
        let scale = (k as f64).sqrt() * p / moment_excess(p).sqrt();
        let z: Vec<f64> = estimates
            .iter()
            .map(|g| scale * (g / gamma - 1.0))
            .collect();
        report.check("ks_distance", ks_distance(&z, normal_cdf)?, 0.08);
    }
    Ok(report)
}

/// Hall-class bound check on `δ ∈ {0.5, 1}`, `v ∈ {1e-4, 1e-3, 1e-2}`, `p ∈ {1, 2, 5}`
/// (or the given `p` list), with `γ = c = 1`.
pub fn mbound_suite(p_list: &[f64]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(Suite::Mbound);
    for delta in [0.5, 1.0] {
        let model = QuantileModel::hall(1.0, 1.0, delta)?;
        let bound = m_bound_check(&model, p_list, &[1e-4, 1e-3, 1e-2])?;
        for cell in bound.grid {
            let key = format!("delta={delta}/v={:e}/p={}", cell.v, cell.p);
            report.record(format!("{key}/rhs"), cell.rhs);
            report.check(format!("{key}/gap"), cell.lhs, cell.rhs + cell.quad_error);
        }
    }
    Ok(report)
}

/// Optional overrides of the default suite configurations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOptions {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub reps: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub alpha: Option<f64>,
}

/// Runs a suite with its default configuration (adjusted by `options`):
///
/// - `lln`: `n = 10⁶`, `k = 10⁵`, `p ∈ {1, 2, 5}`.
/// - `clt`: strict Pareto(1) with `n = 10⁴`, `k = 100`, `p ∈ {1, 2}`, and
///   Hall(γ=1, c=1, δ=1) with `n = 10⁵`, `k = 100`, `p = 1`; 2000 replications each.
/// - `mbound`: see [`mbound_suite`].
/// - `largep`: strict Pareto with γ ∈ {1, 2}, `n = 10⁵`, `k = 10⁴`, `α = 3`, 500 replications.
pub fn run_suite(suite: Suite, seed: u64, options: &SuiteOptions) -> Result<VerificationReport> {
    let root = RandomStream::new(seed);
    let mut report = VerificationReport::new(suite);
    match suite {
        Suite::Lln => {
            let ps = options.p.clone().unwrap_or_else(|| vec![1.0, 2.0, 5.0]);
            let (n, k) = (options.n.unwrap_or(1_000_000), options.k.unwrap_or(100_000));
            for (i, &p) in ps.iter().enumerate() {
                let sub = lln_uniform_check(p, n, k, &mut root.child(i as u64))?;
                report.merge(&format!("p={p}"), sub);
            }
        }
        Suite::Clt => {
            let reps = options.reps.unwrap_or(2000);
            let pareto = QuantileModel::strict_pareto(1.0)?;
            let hall = QuantileModel::hall(1.0, 1.0, 1.0)?;
            let mut runs: Vec<(QuantileModel, usize, f64)> = Vec::new();
            for &p in options.p.as_deref().unwrap_or(&[1.0, 2.0]) {
                runs.push((pareto, options.n.unwrap_or(10_000), p));
            }
            runs.push((hall, options.n.unwrap_or(100_000), 1.0));
            let k = options.k.unwrap_or(100);
            for (i, (model, n, p)) in runs.into_iter().enumerate() {
                let sub = clt_check(&model, n, k, p, reps, &root.child(i as u64))?;
                report.merge(&format!("{model}/n={n}/k={k}/p={p}"), sub);
            }
        }
        Suite::Mbound => {
            let ps = options.p.clone().unwrap_or_else(|| vec![1.0, 2.0, 5.0]);
            report = mbound_suite(&ps)?;
        }
        Suite::Largep => {
            let (n, k) = (options.n.unwrap_or(100_000), options.k.unwrap_or(10_000));
            let reps = options.reps.unwrap_or(500);
            let alpha = options.alpha.unwrap_or(3.0);
            for (i, gamma) in [1.0, 2.0].into_iter().enumerate() {
                let model = QuantileModel::strict_pareto(gamma)?;
                let sub = large_p_check(&model, k, n, alpha, reps, &root.child(i as u64))?;
                report.merge(&format!("{model}/alpha={alpha}"), sub);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_bookkeeping() {
        let mut r = VerificationReport::new(Suite::Clt);
        r.record("info", 100.0);
        assert!(r.pass);
        r.check("a", 0.01, 0.05);
        assert!(r.pass);
        let mut other = VerificationReport::new(Suite::Clt);
        other.check("b", 0.2, 0.1);
        r.merge("sub", other);
        assert!(!r.pass);
        assert_eq!(r.failures(), vec!["sub/b"]);
        assert_eq!(r.statistic("sub/b"), Some(0.2));
        r.check("nan", f64::NAN, 1.0);
        assert_eq!(r.failures().len(), 2);
    }

    #[test]
    fn suite_names() {
        for s in [Suite::Lln, Suite::Clt, Suite::Mbound, Suite::Largep] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        let json = serde_json::to_string(&VerificationReport::new(Suite::Largep)).unwrap();
        assert!(json.contains("\"suite\":\"largep\""));
    }

    #[test]
    fn lln_small() {
        let r = lln_uniform_check(1.0, 100_000, 10_000, &mut RandomStream::new(1)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(lln_uniform_check(1.0, 10, 10, &mut RandomStream::new(1)).is_err());
    }

    #[test]
    fn clt_mean_centered_for_strict_pareto() {
        let model = QuantileModel::strict_pareto(1.0).unwrap();
        let r = clt_check(&model, 10_000, 100, 1.0, 1000, &RandomStream::new(21)).unwrap();
        assert!(r.statistic("mean_abs").unwrap() <= 3.0 / 1000f64.sqrt());
    }

    #[test]
    fn large_p_domain() {
        let model = QuantileModel::strict_pareto(1.0).unwrap();
        let s = RandomStream::new(1);
        assert!(matches!(
            large_p_check(&model, 10_000, 100_000, 1.0, 10, &s),
            Err(TailError::Domain(_))
        ));
        // ln(20)/3 < 1
        assert!(matches!(
            large_p_check(&model, 20, 1000, 3.0, 10, &s),
            Err(TailError::Domain(_))
        ));
    }
}
