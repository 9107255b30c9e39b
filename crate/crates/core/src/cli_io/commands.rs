use std::fmt::Write as _;

use serde::Serialize;

use super::args::{Cli, Command, EstimateArgs, HillplotArgs, TableArgs, VerifyArgs};
use super::{fmt6, load_losses, write_atomic, CliError, HILLPLOT_HEADER, TABLE_HEADER};
use crate::estimators::{confidence_interval, gamma_hat, k_sweep, EstimatorConfig};
use crate::models::QuantileModel;
use crate::montecarlo::{run_suite, run_table, ExperimentSpec, Suite, SuiteOptions};

/// JSON object printed by `hillp estimate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateOutput {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub s_n: f64,
    pub gamma_hat: f64,
    pub inv_gamma_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_level: Option<f64>,
}

/// Dispatches a parsed command line; returns what should go to standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Table(a) => cmd_table(a),
        Command::Hillplot(a) => cmd_hillplot(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<String, CliError> {
    let data = load_losses(&args.input, args.column, args.header)?;
    let config = EstimatorConfig::new(args.p, args.k)?;
    let est = match args.ci {
        Some(level) => confidence_interval(&data.values, config, level)?,
        None => gamma_hat(&data.values, config)?,
    };
    let out = EstimateOutput {
        n: data.values.len(),
        p: est.p,
        k: est.k,
        s_n: est.s_value,
        gamma_hat: est.gamma_hat,
        inv_gamma_hat: est.inv_gamma_hat(),
        ci_lower: est.ci.map(|c| c.lower),
        ci_upper: est.ci.map(|c| c.upper),
        ci_level: est.ci.map(|c| c.level),
    };
    let mut json = serde_json::to_string(&out).expect("estimate output serializes");
    json.push('\n');
    Ok(json)
}

pub fn cmd_table(args: &TableArgs) -> Result<String, CliError> {
    let model: QuantileModel = args.model.parse()?;
    if let Some(&k) = args.k.iter().find(|&&k| k >= args.n) {
        return Err(CliError::Usage(format!(
            "k = {k} must be smaller than n = {}",
            args.n
        )));
    }
    let mut k_grid = args.k.clone();
    k_grid.sort_unstable();
    let spec = ExperimentSpec {
        model,
        n: args.n,
        reps: args.reps,
        p_grid: args.p.clone(),
        k_grid,
        master_seed: args.seed,
    };
    let table = run_table(&spec, model.gamma())?;
    let mut csv = String::from(TABLE_HEADER);
    csv.push('\n');
    for c in &table.cells {
        writeln!(
            csv,
            "{},{},{},{},{}",
            fmt6(c.p),
            c.k,
            fmt6(c.mean),
            fmt6(c.mse),
            fmt6(c.se_mean)
        )
        .expect("writing to a String");
    }
    write_atomic(&args.out, csv.as_bytes())?;
    Ok(String::new())
}

pub fn cmd_hillplot(args: &HillplotArgs) -> Result<String, CliError> {
    let data = load_losses(&args.input, args.column, args.header)?;
    let mut csv = String::from(HILLPLOT_HEADER);
    csv.push('\n');
    for &p in &args.p {
        let series = k_sweep(&data.values, p, args.kmin, args.kmax)?;
        for pt in &series.points {
            let inv = pt.inv_gamma_hat.map(fmt6).unwrap_or_default();
            writeln!(csv, "{},{},{},{}", fmt6(p), pt.k, fmt6(pt.gamma_hat), inv)
                .expect("writing to a String");
        }
    }
    write_atomic(&args.out, csv.as_bytes())?;
    Ok(String::new())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<String, CliError> {
    let suite: Suite = args.suite.parse()?;
    let options = SuiteOptions {
        n: args.n,
        k: args.k,
        reps: args.reps,
        p: args.p.clone(),
        alpha: args.alpha,
    };
    let report = run_suite(suite, args.seed, &options)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_atomic(&args.out, json.as_bytes())?;
    if report.pass {
        Ok(format!("suite {suite}: pass\n"))
    } else {
        Err(CliError::VerificationFailed(
            report.failures().into_iter().map(String::from).collect(),
        ))
    }
}
