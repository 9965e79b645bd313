//! Reading and writing event logs.

mod csv;
mod json;

use std::path::Path;

use thiserror::Error;

use crate::log::{EventLog, LogError};
use crate::time::TimestampParseError;

pub use self::csv::{import_csv, CsvSpec, ObjectColumn};
pub use self::json::{export_json, import_json};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{context}: {source}")]
    Timestamp {
        context: String,
        source: TimestampParseError,
    },
    #[error("column `{0}` not found in CSV header")]
    ColumnMissing(String),
    #[error("object `{object}` appears with types `{first}` and `{second}`")]
    TypeConflict {
        object: String,
        first: String,
        second: String,
    },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Reads a log, choosing the format by file extension.
///
/// `.jsonocel` and `.json` are OCEL JSON; `.csv` needs a [`CsvSpec`].
pub fn load_log(path: &Path, csv_spec: Option<&CsvSpec>) -> Result<EventLog, IoError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase();
    let read = || {
        std::fs::read(path).map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    match ext.as_str() {
        "jsonocel" | "json" => import_json(&read()?),
        "csv" => {
            let spec = csv_spec.ok_or_else(|| {
                IoError::Unsupported("CSV input requires a CSV spec naming its columns".into())
            })?;
            import_csv(&read()?, spec)
        }
        "xmlocel" | "xml" => Err(IoError::Unsupported(
            "OCEL XML is not supported; convert the log to OCEL JSON or CSV".into(),
        )),
        other => Err(IoError::Unsupported(format!(
            "unrecognized log extension `{other}` (expected .jsonocel, .json or .csv)"
        ))),
    }
}
