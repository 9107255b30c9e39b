//! Quadrature oracles for the moments of `Y(v)` and the Hall-class bound check.
//!
//! `m_p(v) = ∫_0^1 Y_u(v)^p du` is evaluated after `u = e^{-t}`:
//! `∫_0^∞ y(t)^p e^{-t} dt` with `y(t) = ln Q(1 - e^{-t} v) - ln Q(1 - v)`.

use super::quadrature::{integrate_half_line, Tolerance};
use super::QuantileModel;
use crate::error::{Result, TailError};
use crate::tail_math::{limit_moment, log_gamma_unchecked};

/// Upper end of the `v` range for the bound check.
pub const V0: f64 = 0.01;

/// `sup_u |ℓ(uv) - ℓ(v)| / a(v)` for `ℓ(v) = c + v^δ`, `a(v) = v^δ`: `sup_u (1 - u^δ) = 1`.
pub const HALL_K1: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub p: f64,
    pub v: f64,
    /// `E Y(v)^p`
    pub m_pv: f64,
    /// `sqrt(Var Y(v)^p)`, clamped at zero
    pub sigma_pv: f64,
    /// estimated absolute error of `m_pv`
    pub quad_error: f64,
    /// estimated absolute error of `E Y(v)^{2p}`
    pub second_moment_error: f64,
}

fn moment(model: &QuantileModel, power: f64, v: f64) -> Result<(f64, f64)> {
    let ln_v = v.ln();
    let base = model.ln_quantile(ln_v);
    let r = integrate_half_line(
        |t: f64| {
            let y = (model.ln_quantile(ln_v - t) - base).max(0.0);
            if y == 0.0 {
                0.0
            } else {
                (power * y.ln() - t).exp()
            }
        },
        Tolerance::default(),
    )?;
    Ok((r.value, r.error))
}

/// `m_p(v)` and `σ_p(v)` by adaptive quadrature.
pub fn y_moment(model: &QuantileModel, p: f64, v: f64) -> Result<OracleResult> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(TailError::Domain(format!("p must be positive, got {p}")));
    }
    if !(v > 0.0 && v < 1.0) {
        return Err(TailError::Domain(format!(
            "y_moment needs v in (0, 1), got {v}"
        )));
    }
    let (m_pv, quad_error) = moment(model, p, v)?;
    let (second, second_moment_error) = moment(model, 2.0 * p, v)?;
    Ok(OracleResult {
        p,
        v,
        m_pv,
        sigma_pv: (second - m_pv * m_pv).max(0.0).sqrt(),
        quad_error,
        second_moment_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCell {
    pub v: f64,
    pub p: f64,
    /// `|m_p(v) - m_p|`
    pub lhs: f64,
    /// `2 K₁ (a(v)/ℓ(v)) γ^{p-1} Γ(p+1)`
    pub rhs: f64,
    pub quad_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckReport {
    pub model: QuantileModel,
    pub k1: f64,
    pub grid: Vec<BoundCell>,
}

impl BoundCheckReport {
    pub fn all_pass(&self) -> bool {
        self.grid.iter().all(|c| c.pass)
    }
}

/// Checks `|m_p(v) - m_p| ≤ 2 K₁ (a(v)/ℓ(v)) γ^{p-1} Γ(p+1)` on a `(v, p)` grid
/// for a Hall model, with `K₁ = 1` and `v ∈ (0, V0]`.
pub fn m_bound_check(
    model: &QuantileModel,
    p_list: &[f64],
    v_list: &[f64],
) -> Result<BoundCheckReport> {
    let QuantileModel::Hall { gamma, c, delta } = *model else {
        return Err(TailError::UnsupportedModel(format!(
            "bound check needs a Hall model, got {}",
            model.family()
        )));
    };
    let mut grid = Vec::with_capacity(p_list.len() * v_list.len());
    for &v in v_list {
        if !(v > 0.0 && v <= V0) {
            return Err(TailError::Domain(format!(
                "bound check needs v in (0, {V0}], got {v}"
            )));
        }
        for &p in p_list {
            let oracle = y_moment(model, p, v)?;
            let lhs = (oracle.m_pv - limit_moment(gamma, p)?).abs();
            let a = v.powf(delta);
            let rhs = 2.0
                * HALL_K1
                * (a / (c + a))
                * ((p - 1.0) * gamma.ln() + log_gamma_unchecked(p + 1.0)).exp();
            grid.push(BoundCell {
                v,
                p,
                lhs,
                rhs,
                quad_error: oracle.quad_error,
                pass: lhs <= rhs + oracle.quad_error,
            });
        }
    }
    Ok(BoundCheckReport {
        model: *model,
        k1: HALL_K1,
        grid,
    })
}
