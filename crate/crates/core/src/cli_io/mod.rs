//! Loss-file ingestion, output formatting, and the `hillp` subcommands.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 verification failure.

mod args;
mod commands;

use std::fs::File;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

pub use args::{Cli, Command, EstimateArgs, HillplotArgs, TableArgs, VerifyArgs};
pub use commands::{cmd_estimate, cmd_hillplot, cmd_table, cmd_verify, run, EstimateOutput};

use crate::error::TailError;
use crate::estimators::Sample;

pub const TABLE_HEADER: &str = "p,k,mean,mse,se_mean";
pub const HILLPLOT_HEADER: &str = "p,k,gamma_hat,inv_gamma_hat";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("verification failed: {}", .0.join(", "))]
    VerificationFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::VerificationFailed(_) => 3,
        }
    }
}

impl From<TailError> for CliError {
    fn from(e: TailError) -> Self {
        match e {
            TailError::Domain(_)
            | TailError::Range(_)
            | TailError::ModelSpec(_)
            | TailError::UnsupportedModel(_) => Self::Usage(e.to_string()),
            TailError::Size { .. }
            | TailError::Data(_)
            | TailError::Positivity { .. }
            | TailError::Numeric { .. }
            | TailError::Replication { .. } => Self::Data(e.to_string()),
        }
    }
}

/// Parsed loss file.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDataset {
    pub source_path: String,
    pub values: Sample,
    /// Rows that failed to parse, lacked the column, or held a non-finite value.
    pub n_dropped: usize,
}

/// Reads the 0-indexed `column` of a comma-separated file.
///
/// The first row is skipped when `has_header`. Blank lines are not records.
/// Zero and negative values are kept; positivity is only required of the
/// threshold at estimation time.
pub fn load_losses(path: &Path, column: usize, has_header: bool) -> Result<LossDataset, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    let mut n_dropped = 0;
    for (row, record) in reader.records().enumerate() {
        if has_header && row == 0 {
            continue;
        }
        let value = record
            .ok()
            .and_then(|r| r.get(column).and_then(|field| field.parse::<f64>().ok()))
            .filter(|v| v.is_finite());
        match value {
            Some(v) => values.push(v),
            None => n_dropped += 1,
        }
    }
    if values.len() < 2 {
        return Err(CliError::Data(format!(
            "{} has {} valid value(s) in column {column}; at least 2 are needed",
            path.display(),
            values.len()
        )));
    }
    Ok(LossDataset {
        source_path: path.display().to_string(),
        values: Sample::new(values)?,
        n_dropped,
    })
}

/// Fixed 6-decimal rendering; exact ties round half to even.
pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Writes `contents` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err =
        |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_plain_column() {
        let f = file_with("1.0\n2.5\n3.0");
        let d = load_losses(f.path(), 0, false).unwrap();
        assert_eq!(d.values.values(), &[1.0, 2.5, 3.0]);
        assert_eq!(d.n_dropped, 0);
    }

    #[test]
    fn load_with_header_and_junk() {
        let f = file_with("loss\n1.0\nx\n2.0");
        let d = load_losses(f.path(), 0, true).unwrap();
        assert_eq!(d.values.values(), &[1.0, 2.0]);
        assert_eq!(d.n_dropped, 1);
    }

    #[test]
    fn load_second_column() {
        let f = file_with("a,b\n1,10\n2,20");
        let d = load_losses(f.path(), 1, true).unwrap();
        assert_eq!(d.values.values(), &[10.0, 20.0]);
    }

    #[test]
    fn non_finite_and_short_rows_dropped() {
        let f = file_with("1,5\n2,inf\n3\n4,NaN\n5,-2\n6,0\n");
        let d = load_losses(f.path(), 1, false).unwrap();
        assert_eq!(d.values.values(), &[-2.0, 0.0, 5.0]);
        assert_eq!(d.n_dropped, 3);
    }

    #[test]
    fn load_errors() {
        let f = file_with("1.0\nabc\n");
        assert!(matches!(
            load_losses(f.path(), 0, false),
            Err(CliError::Data(_))
        ));
        let missing = Path::new("/nonexistent/definitely/missing.csv");
        assert!(matches!(
            load_losses(missing, 0, false),
            Err(CliError::Data(_))
        ));
    }

    #[test]
    fn six_decimals_half_even() {
        assert_eq!(fmt6(1.0), "1.000000");
        assert_eq!(fmt6(std::f64::consts::LN_2), "0.693147");
        // j/128 has exactly seven decimals ending in 5: exact ties
        assert_eq!(fmt6(1.0 / 128.0), "0.007812");
        assert_eq!(fmt6(3.0 / 128.0), "0.023438");
        assert_eq!(fmt6(-1.0 / 128.0), "-0.007812");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(TailError::Range("x".into())).exit_code(), 1);
        assert_eq!(
            CliError::from(TailError::Positivity {
                k: 1,
                threshold: -1.0
            })
            .exit_code(),
            2
        );
        assert_eq!(CliError::VerificationFailed(vec![]).exit_code(), 3);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
