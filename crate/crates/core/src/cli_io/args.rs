use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "hillp",
    version,
    about = "p-power Hill-type tail-index estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the tail index of a loss file at one (p, k).
    Estimate(EstimateArgs),
    /// Monte Carlo mean/MSE table over a (p, k) grid.
    Table(TableArgs),
    /// Estimates against k for one or more p, as plot-ready CSV.
    Hillplot(HillplotArgs),
    /// Run a limit-theorem verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// 0-indexed column
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    #[arg(long, action = ArgAction::Set, default_value_t = false)]
    pub header: bool,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: usize,
    /// Confidence level in (0, 1)
    #[arg(long)]
    pub ci: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// e.g. `strict-pareto:gamma=1.0` or `hall:gamma=1.0,c=1.0,delta=0.5`
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct HillplotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    #[arg(long, action = ArgAction::Set, default_value_t = false)]
    pub header: bool,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long)]
    pub kmin: usize,
    #[arg(long)]
    pub kmax: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// lln, clt, mbound or largep
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub alpha: Option<f64>,
}
