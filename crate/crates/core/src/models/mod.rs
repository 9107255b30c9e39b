//! Synthetic Pareto-type quantile models and sampling from them.
//!
//! Every model is given by its upper quantile `Q(1 - s) = s^{-γ} ℓ(s)`:
//!
//! | variant            | `Q(1 - s)`, `s ≤ 0.1`      | `Q(1 - s)`, `s ≥ 0.1`         |
//! |--------------------|----------------------------|-------------------------------|
//! | `StrictPareto`     | `s^{-γ}`                   | `s^{-γ}`                      |
//! | `ExpParetoMix`     | `s^{-γ}`                   | `(10^γ / ln 10) ln(1/s)`      |
//! | `ExpParetoLogMix`  | `s^{-γ} (ln(1/s))³`        | `10^γ (ln 10)² ln(1/s)`       |
//! | `Hall`             | `s^{-γ} (c + s^δ)`         | `s^{-γ} (c + s^δ)`            |
//!
//! The mixture constants make both branches agree at `s = 0.1`.

mod oracle;
pub mod quadrature;
mod stream;

use std::f64::consts::LN_10;
use std::fmt;
use std::str::FromStr;

pub use oracle::{m_bound_check, y_moment, BoundCell, BoundCheckReport, OracleResult, HALL_K1, V0};
pub use stream::RandomStream;

use crate::error::{Result, TailError};
use crate::estimators::Sample;

const BRANCH_POINT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileModel {
    StrictPareto {
        gamma: f64,
    },
    /// Exponential body, strict Pareto tail above the 90% quantile.
    ExpParetoMix {
        gamma: f64,
    },
    /// Exponential body, Pareto tail with a `(ln(1/s))³` slowly varying factor.
    ExpParetoLogMix {
        gamma: f64,
    },
    /// `ℓ(s) = c + s^δ`, second-order scale `a(s) = s^δ`.
    Hall {
        gamma: f64,
        c: f64,
        delta: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(TailError::ModelSpec(format!(
            "{name} must be a positive finite real, got {v}"
        )))
    }
}

impl QuantileModel {
    pub fn strict_pareto(gamma: f64) -> Result<Self> {
        Ok(Self::StrictPareto {
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn exp_pareto(gamma: f64) -> Result<Self> {
        Ok(Self::ExpParetoMix {
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn exp_pareto_log(gamma: f64) -> Result<Self> {
        Ok(Self::ExpParetoLogMix {
            gamma: positive("gamma", gamma)?,
        })
    }

    pub fn hall(gamma: f64, c: f64, delta: f64) -> Result<Self> {
        Ok(Self::Hall {
            gamma: positive("gamma", gamma)?,
            c: positive("c", c)?,
            delta: positive("delta", delta)?,
        })
    }

    /// Tail index γ.
    pub fn gamma(&self) -> f64 {
        match *self {
            Self::StrictPareto { gamma }
            | Self::ExpParetoMix { gamma }
            | Self::ExpParetoLogMix { gamma }
            | Self::Hall { gamma, .. } => gamma,
        }
    }

    /// `Q(1 - s)` for `s ∈ (0, 1)`.
    pub fn quantile(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(TailError::Domain(format!(
                "quantile needs s in (0, 1), got {s}"
            )));
        }
        Ok(self.quantile_unchecked(s))
    }

    fn quantile_unchecked(&self, s: f64) -> f64 {
        match *self {
            Self::StrictPareto { gamma } => s.powf(-gamma),
            Self::ExpParetoMix { gamma } | Self::ExpParetoLogMix { gamma } => {
                if s <= BRANCH_POINT {
                    self.pareto_branch(s)
                } else {
                    exponential_branch(self, gamma, s)
                }
            }
            Self::Hall { gamma, c, delta } => s.powf(-gamma) * (c + s.powf(delta)),
        }
    }

    fn pareto_branch(&self, s: f64) -> f64 {
        match *self {
            Self::ExpParetoLogMix { gamma } => s.powf(-gamma) * (-s.ln()).powi(3),
            _ => s.powf(-self.gamma()),
        }
    }

    /// `ln Q(1 - s)` given `ln s`; stays finite where `s` itself underflows.
    pub(crate) fn ln_quantile(&self, ln_s: f64) -> f64 {
        let gamma = self.gamma();
        match *self {
            Self::StrictPareto { .. } => -gamma * ln_s,
            Self::ExpParetoMix { .. } => {
                if ln_s <= BRANCH_POINT.ln() {
                    -gamma * ln_s
                } else {
                    gamma * LN_10 - LN_10.ln() + (-ln_s).ln()
                }
            }
            Self::ExpParetoLogMix { .. } => {
                if ln_s <= BRANCH_POINT.ln() {
                    -gamma * ln_s + 3.0 * (-ln_s).ln()
                } else {
                    gamma * LN_10 + 2.0 * LN_10.ln() + (-ln_s).ln()
                }
            }
            Self::Hall { c, delta, .. } => -gamma * ln_s + (c + (delta * ln_s).exp()).ln(),
        }
    }

    /// Inverse-transform image of uniforms: `X = Q(1 - S)`.
    ///
    /// Uniforms must lie in `(0, 1)`.
    pub fn sample_from_uniforms(&self, uniforms: &[f64]) -> Result<Sample> {
        let values = uniforms
            .iter()
            .map(|&u| self.quantile(u))
            .collect::<Result<Vec<_>>>()?;
        Sample::new(values)
    }

    /// `Y(v) = ln(Q(1 - u v) / Q(1 - v))` for a given uniform `u`, with `Y(0) = -γ ln u`.
    pub fn y_from_uniform(&self, v: f64, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&v) {
            return Err(TailError::Domain(format!(
                "Y(v) needs v in [0, 1), got {v}"
            )));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(TailError::Domain(format!(
                "uniform draw must lie in (0, 1), got {u}"
            )));
        }
        Ok(self.y_unchecked(v, u.ln()))
    }

    /// `Y(v)` from `ln u`; `v` in `[0, 1)`.
    pub(crate) fn y_unchecked(&self, v: f64, ln_u: f64) -> f64 {
        if v == 0.0 || matches!(self, Self::StrictPareto { .. }) {
            return -self.gamma() * ln_u;
        }
        let ln_v = v.ln();
        // nonincreasing Q(1 - ·) makes this nonnegative up to rounding
        (self.ln_quantile(ln_u + ln_v) - self.ln_quantile(ln_v)).max(0.0)
    }

    /// Short family name used in specification strings.
    pub fn family(&self) -> &'static str {
        match self {
            Self::StrictPareto { .. } => "strict-pareto",
            Self::ExpParetoMix { .. } => "exp-pareto",
            Self::ExpParetoLogMix { .. } => "exp-pareto-log",
            Self::Hall { .. } => "hall",
        }
    }
}

fn exponential_branch(model: &QuantileModel, gamma: f64, s: f64) -> f64 {
    let scale = match model {
        QuantileModel::ExpParetoLogMix { .. } => 10f64.powf(gamma) * LN_10 * LN_10,
        _ => 10f64.powf(gamma) / LN_10,
    };
    scale * (-s.ln())
}

impl fmt::Display for QuantileModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Hall { gamma, c, delta } => write!(f, "hall:gamma={gamma},c={c},delta={delta}"),
            _ => write!(f, "{}:gamma={}", self.family(), self.gamma()),
        }
    }
}

impl FromStr for QuantileModel {
    type Err = TailError;

    /// Parses `family:key=value,...`, case-insensitively, e.g.
    /// `hall:gamma=1.0,c=1.0,delta=0.5`. Hall's `c` defaults to 1.
    fn from_str(spec: &str) -> Result<Self> {
        let lowered = spec.trim().to_ascii_lowercase();
        let (family, params) = lowered.split_once(':').unwrap_or((lowered.as_str(), ""));
        let mut gamma = None;
        let mut c = None;
        let mut delta = None;
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| TailError::ModelSpec(format!("expected key=value, got '{pair}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| TailError::ModelSpec(format!("cannot parse '{value}' as a number")))?;
            let slot = match (family.trim(), key.trim()) {
                (_, "gamma") => &mut gamma,
                ("hall", "c") => &mut c,
                ("hall", "delta") => &mut delta,
                (fam, key) => {
                    return Err(TailError::ModelSpec(format!(
                        "unknown parameter '{key}' for '{fam}'"
                    )))
                }
            };
            if slot.replace(value).is_some() {
                return Err(TailError::ModelSpec(format!(
                    "parameter '{}' given twice",
                    key.trim()
                )));
            }
        }
        let gamma = gamma.ok_or_else(|| TailError::ModelSpec("missing gamma".into()))?;
        match family.trim() {
            "strict-pareto" => Self::strict_pareto(gamma),
            "exp-pareto" => Self::exp_pareto(gamma),
            "exp-pareto-log" => Self::exp_pareto_log(gamma),
            "hall" => {
                let delta = delta.ok_or_else(|| TailError::ModelSpec("hall needs delta".into()))?;
                Self::hall(gamma, c.unwrap_or(1.0), delta)
            }
            other => Err(TailError::ModelSpec(format!(
                "unknown model family '{other}'"
            ))),
        }
    }
}

/// `n` iid draws from `model`, as a sorted sample.
pub fn draw_sample(model: &QuantileModel, n: usize, stream: &mut RandomStream) -> Result<Sample> {
    if n < 2 {
        return Err(TailError::Size { needed: 2, got: n });
    }
    let mut values: Vec<f64> = (0..n)
        .map(|_| model.quantile_unchecked(stream.open01()))
        .collect();
    values.sort_unstable_by(f64::total_cmp);
    Ok(Sample::from_sorted(values))
}

/// The `m` largest of `n` iid draws, exactly in distribution, in `O(m)` work.
///
/// Uses the uniform spacings representation: the `m` smallest of `n` uniforms are
/// `Γ_i / Γ_{n+1}`, `i = 1..m`, where `Γ_i` are partial sums of standard
/// exponentials and `Γ_{n+1} = Γ_m + Gamma(n + 1 - m)`. The returned sample holds
/// `X_{n-m+1,n} ≤ … ≤ X_{n,n}`, so estimators applied to it with `k ≤ m - 1`
/// agree with the full sample.
pub fn draw_upper_order_statistics(
    model: &QuantileModel,
    n: usize,
    m: usize,
    stream: &mut RandomStream,
) -> Result<Sample> {
    if m < 2 || m > n {
        return Err(TailError::Range(format!(
            "need 2 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let mut partial = Vec::with_capacity(m);
    let mut acc = 0.0;
    for _ in 0..m {
        acc += stream.exp1();
        partial.push(acc);
    }
    let total = acc + stream.gamma((n + 1 - m) as f64);
    let ln_total = total.ln();
    let values: Vec<f64> = partial
        .iter()
        .rev()
        .map(|&g| model.ln_quantile(g.ln() - ln_total).exp())
        .collect();
    Ok(Sample::from_sorted(values))
}

/// One draw of `Y(v)`.
pub fn draw_y(model: &QuantileModel, v: f64, stream: &mut RandomStream) -> Result<f64> {
    model.y_from_uniform(v, stream.open01())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models(gamma: f64) -> Vec<QuantileModel> {
        vec![
            QuantileModel::strict_pareto(gamma).unwrap(),
            QuantileModel::exp_pareto(gamma).unwrap(),
            QuantileModel::exp_pareto_log(gamma).unwrap(),
            QuantileModel::hall(gamma, 1.0, 0.5).unwrap(),
        ]
    }

    #[test]
    fn quantile_examples() {
        let sp = QuantileModel::strict_pareto(2.0).unwrap();
        assert!((sp.quantile(0.01).unwrap() - 1e4).abs() < 1e-8);
        let mix = QuantileModel::exp_pareto(1.0).unwrap();
        assert!((mix.quantile(0.1).unwrap() - 10.0).abs() < 1e-12);
        assert!((exponential_branch(&mix, 1.0, 0.1) - 10.0).abs() < 1e-12);
        assert!((mix.quantile(0.5).unwrap() - 3.010_300).abs() < 1e-6);
        for s in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(sp.quantile(s), Err(TailError::Domain(_))));
        }
    }

    #[test]
    fn mixture_branches_agree() {
        for gamma in [0.5, 1.0, 2.0] {
            for model in [
                QuantileModel::exp_pareto(gamma).unwrap(),
                QuantileModel::exp_pareto_log(gamma).unwrap(),
            ] {
                let left = model.pareto_branch(BRANCH_POINT);
                let right = exponential_branch(&model, gamma, BRANCH_POINT);
                assert!(
                    (left - right).abs() <= 1e-10 * left,
                    "{model}: {left} vs {right}"
                );
            }
        }
    }

    #[test]
    fn quantile_nonincreasing() {
        for gamma in [0.5, 1.0, 2.0] {
            for model in models(gamma) {
                let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 1001.0).collect();
                for w in grid.windows(2) {
                    let (a, b) = (model.quantile(w[0]).unwrap(), model.quantile(w[1]).unwrap());
                    assert!(a >= b, "{model} at s = {}", w[0]);
                }
            }
        }
    }

    #[test]
    fn ln_quantile_matches_quantile() {
        for model in models(1.3) {
            for s in [1e-6, 0.01, 0.0999, 0.1, 0.2, 0.7, 0.99] {
                let direct = model.quantile(s).unwrap().ln();
                assert!(
                    (model.ln_quantile(s.ln()) - direct).abs() < 1e-12,
                    "{model} s = {s}"
                );
            }
        }
    }

    #[test]
    fn parse_specs() {
        let m: QuantileModel = "strict-pareto:gamma=1.0".parse().unwrap();
        assert_eq!(m, QuantileModel::StrictPareto { gamma: 1.0 });
        let m: QuantileModel = "EXP-Pareto:Gamma=2".parse().unwrap();
        assert_eq!(m, QuantileModel::ExpParetoMix { gamma: 2.0 });
        let m: QuantileModel = "exp-pareto-log:gamma=1.0".parse().unwrap();
        assert_eq!(m, QuantileModel::ExpParetoLogMix { gamma: 1.0 });
        let m: QuantileModel = "hall:gamma=1.0,c=1.0,delta=0.5".parse().unwrap();
        assert_eq!(
            m,
            QuantileModel::Hall {
                gamma: 1.0,
                c: 1.0,
                delta: 0.5
            }
        );
        let m: QuantileModel = "hall:gamma=1, delta=2".parse().unwrap();
        assert_eq!(
            m,
            QuantileModel::Hall {
                gamma: 1.0,
                c: 1.0,
                delta: 2.0
            }
        );
        assert_eq!(m.to_string().parse::<QuantileModel>().unwrap(), m);

        for bad in [
            "pareto:gamma=1",
            "strict-pareto",
            "strict-pareto:gamma=-1",
            "strict-pareto:gamma=abc",
            "strict-pareto:gamma=1,delta=1",
            "hall:gamma=1",
            "hall:gamma=1,delta=0",
            "hall:gamma=1,gamma=2,delta=1",
            "strict-pareto:gamma",
        ] {
            assert!(
                matches!(bad.parse::<QuantileModel>(), Err(TailError::ModelSpec(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn sample_from_injected_uniforms() {
        let sp = QuantileModel::strict_pareto(1.0).unwrap();
        let s = sp.sample_from_uniforms(&[0.25, 0.5]).unwrap();
        assert_eq!(s.values(), &[2.0, 4.0]);
        assert!(sp.sample_from_uniforms(&[0.0, 0.5]).is_err());
    }

    #[test]
    fn draw_sample_deterministic() {
        let model = QuantileModel::hall(1.0, 1.0, 0.5).unwrap();
        let a = draw_sample(&model, 500, &mut RandomStream::new(11).child(0)).unwrap();
        let b = draw_sample(&model, 500, &mut RandomStream::new(11).child(0)).unwrap();
        assert_eq!(a, b);
        let c = draw_sample(&model, 500, &mut RandomStream::new(11).child(1)).unwrap();
        assert_ne!(a, c);
        assert!(draw_sample(&model, 1, &mut RandomStream::new(1)).is_err());
    }

    #[test]
    fn empirical_ninetieth_percentile() {
        let model = QuantileModel::strict_pareto(1.0).unwrap();
        let s = draw_sample(&model, 1_000_000, &mut RandomStream::new(3)).unwrap();
        let q90 = s.values()[899_999];
        assert!((q90 - 10.0).abs() < 0.2, "q90 = {q90}");
    }

    #[test]
    fn upper_order_statistics_match_full_sample_in_distribution() {
        // threshold X_{n-k,n} of strict Pareto(1) has median ≈ n/k; compare the two samplers
        let model = QuantileModel::strict_pareto(1.0).unwrap();
        let (n, k, reps) = (2000, 20, 4000);
        let root = RandomStream::new(8);
        let mut full: Vec<f64> = (0..reps)
            .map(|j| {
                draw_sample(&model, n, &mut root.child(j))
                    .unwrap()
                    .threshold(k)
                    .unwrap()
            })
            .collect();
        let fast_root = RandomStream::new(9);
        let mut fast: Vec<f64> = (0..reps)
            .map(|j| {
                let s =
                    draw_upper_order_statistics(&model, n, k + 1, &mut fast_root.child(j)).unwrap();
                assert_eq!(s.len(), k + 1);
                s.threshold(k).unwrap()
            })
            .collect();
        full.sort_by(f64::total_cmp);
        fast.sort_by(f64::total_cmp);
        // two-sample KS distance; 99.9% critical value ≈ 1.95·√(2/reps) ≈ 0.044
        let mut d: f64 = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < full.len() && j < fast.len() {
            if full[i] <= fast[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / reps as f64 - j as f64 / reps as f64).abs());
        }
        assert!(d < 0.044, "two-sample KS = {d}");
        assert!(draw_upper_order_statistics(&model, 10, 11, &mut RandomStream::new(1)).is_err());
        assert!(draw_upper_order_statistics(&model, 10, 1, &mut RandomStream::new(1)).is_err());
    }

    #[test]
    fn y_examples() {
        let sp = QuantileModel::strict_pareto(1.7).unwrap();
        for v in [0.0, 0.01, 0.5] {
            assert_eq!(
                sp.y_from_uniform(v, 0.5).unwrap(),
                1.7 * std::f64::consts::LN_2
            );
        }
        let sp2 = QuantileModel::strict_pareto(2.0).unwrap();
        assert!((sp2.y_from_uniform(0.0, (-1f64).exp()).unwrap() - 2.0).abs() < 1e-15);
        let hall = QuantileModel::hall(1.0, 1.0, 1.0).unwrap();
        let y = hall.y_from_uniform(0.01, 0.5).unwrap();
        let oracle = (2.0 * 1.005 / 1.01f64).ln();
        assert!((y - oracle).abs() < 1e-14);
        assert!((y - 0.688_184).abs() < 1e-6);
        assert!(matches!(
            hall.y_from_uniform(1.0, 0.5),
            Err(TailError::Domain(_))
        ));
        assert!(matches!(
            hall.y_from_uniform(-0.1, 0.5),
            Err(TailError::Domain(_))
        ));
    }

    #[test]
    fn draw_y_nonnegative() {
        let mut stream = RandomStream::new(17);
        for model in models(0.8) {
            for v in [0.0, 1e-4, 0.05, 0.3, 0.9] {
                for _ in 0..2000 {
                    assert!(draw_y(&model, v, &mut stream).unwrap() >= 0.0);
                }
            }
        }
    }
}
