//! Deterministic Monte Carlo harness.
//!
//! Replication `j` draws from the stream at path `[j]` under the master seed, so
//! results do not depend on how replications are scheduled across threads.
//! Per-replication results are collected in replication order and reduced
//! sequentially, which keeps aggregates bit-identical for any thread count.

mod ks;
mod verify;

use rayon::prelude::*;

pub use ks::ks_distance;
pub use verify::{
    clt_check, large_p_check, lln_uniform_check, mbound_suite, run_suite, Suite, SuiteOptions,
    VerificationReport,
};

use crate::error::{Result, TailError};
use crate::estimators::{gamma_hat, EstimatorConfig};
use crate::models::{draw_sample, QuantileModel, RandomStream};

/// A `(p, k)` grid evaluated over `reps` independent samples of size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub model: QuantileModel,
    pub n: usize,
    pub reps: usize,
    pub p_grid: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(TailError::Domain("reps must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(TailError::Size {
                needed: 2,
                got: self.n,
            });
        }
        if self.p_grid.is_empty() || self.k_grid.is_empty() {
            return Err(TailError::Domain("p and k grids must be nonempty".into()));
        }
        for &p in &self.p_grid {
            EstimatorConfig::new(p, 1)?;
        }
        for &k in &self.k_grid {
            if k == 0 || k >= self.n {
                return Err(TailError::Range(format!(
                    "k = {k} must satisfy 1 <= k <= n - 1 = {}",
                    self.n - 1
                )));
            }
        }
        Ok(())
    }

    /// Cells in output order: p-major, k as given.
    pub fn cells(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.p_grid
            .iter()
            .flat_map(move |&p| self.k_grid.iter().map(move |&k| (p, k)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStat {
    pub p: f64,
    pub k: usize,
    pub mean: f64,
    /// mean of `(γ̂ - γ_true)²`
    pub mse: f64,
    /// Monte Carlo standard error of `mean`
    pub se_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableResult {
    pub spec: ExperimentSpec,
    pub gamma_true: f64,
    /// One entry per cell, in [`ExperimentSpec::cells`] order.
    pub cells: Vec<CellStat>,
}

impl TableResult {
    pub fn cell(&self, p: f64, k: usize) -> Option<&CellStat> {
        self.cells.iter().find(|c| c.p == p && c.k == k)
    }
}

/// `γ̂` for every replication (outer, by replication id) and cell (inner).
pub fn replicate_estimates(spec: &ExperimentSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let root = RandomStream::new(spec.master_seed);
    let cells: Vec<(f64, usize)> = spec.cells().collect();
    (0..spec.reps)
        .into_par_iter()
        .map(|j| {
            let wrap = |e: TailError| TailError::Replication {
                replication: j,
                source: Box::new(e),
            };
            let sample =
                draw_sample(&spec.model, spec.n, &mut root.child(j as u64)).map_err(wrap)?;
            cells
                .iter()
                .map(|&(p, k)| {
                    Ok(gamma_hat(&sample, EstimatorConfig { p, k })
                        .map_err(wrap)?
                        .gamma_hat)
                })
                .collect()
        })
        .collect()
}

/// Mean, MSE against `gamma_true` and standard error of the mean for each cell.
pub fn run_table(spec: &ExperimentSpec, gamma_true: f64) -> Result<TableResult> {
    if (gamma_true - spec.model.gamma()).abs() > 1e-12 * gamma_true.abs() {
        return Err(TailError::Domain(format!(
            "gamma_true = {gamma_true} does not match the model's gamma = {}",
            spec.model.gamma()
        )));
    }
    let estimates = replicate_estimates(spec)?;
    let cells = spec
        .cells()
        .enumerate()
        .map(|(c, (p, k))| {
            // Welford, in replication order
            let (mut mean, mut m2, mut sq_err) = (0.0, 0.0, 0.0);
            for (j, row) in estimates.iter().enumerate() {
                let x = row[c];
                let delta = x - mean;
                mean += delta / (j + 1) as f64;
                m2 += delta * (x - mean);
                sq_err += (x - gamma_true) * (x - gamma_true);
            }
            let reps = estimates.len() as f64;
            let se_mean = if estimates.len() > 1 {
                (m2 / (reps - 1.0) / reps).sqrt()
            } else {
                0.0
            };
            CellStat {
                p,
                k,
                mean,
                mse: sq_err / reps,
                se_mean,
            }
        })
        .collect();
    Ok(TableResult {
        spec: spec.clone(),
        gamma_true,
        cells,
    })
}
