//! Dataset ingestion and report serialization.

pub mod arff;
pub mod csv;
pub mod report;
pub mod values;

use std::path::{Path, PathBuf};

use crate::data::{Dataset, DatasetSchema};
use crate::error::{Error, Result};

pub use arff::{parse_arff, parse_arff_bytes, parse_arff_with, write_arff, ClassSelector};
pub use csv::{parse_csv, parse_csv_bytes, write_csv};
pub use report::{
    read_model_state, read_report, write_bounds, write_comparison, write_model_state, write_report,
    write_sweep, Format, WriteOptions,
};

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_ENV: &str = "CRWM_OUT_DIR";

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves a relative output path against `$CRWM_OUT_DIR` when set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Where a CSV stream's schema comes from.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// An ARFF file whose header declares the attributes (its data section
    /// may be empty).
    pub schema: DatasetSchema,
    pub has_header: bool,
}

/// Loads a dataset by extension: `.csv` requires `csv`, anything else is
/// read as ARFF. Parse errors are prefixed with the file path.
pub fn load_dataset(
    path: &Path,
    class: &ClassSelector,
    csv: Option<&CsvOptions>,
) -> Result<Dataset> {
    let bytes = read_file(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        let opts =
            csv.ok_or_else(|| Error::config("CSV input needs a schema (--schema header.arff)"))?;
        parse_csv_bytes(&bytes, &opts.schema, opts.has_header)
    } else {
        parse_arff_bytes(&bytes, class)
    };
    parsed.map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Reads the schema declared by an ARFF header.
pub fn load_schema(path: &Path, class: &ClassSelector) -> Result<DatasetSchema> {
    Ok(load_dataset(path, class, None)?.schema)
}
