//! Test-case sources. A [`DataSourceHandle`] hides whether rows come from a
//! CSV file or a MySQL table; [`read_cases`] turns either into the same
//! list of [`TestCaseData`].

mod file;
mod mysql;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{DataSourceChoice, DatabaseSettings, TestConfig};
use crate::model::TestCaseData;

pub use file::open_file_source;
pub use mysql::open_db_source;

pub const CASE_ID_COLUMN: &str = "case_id";
pub const EXPECTED_COLUMN: &str = "expected";

#[derive(Debug, Error)]
pub enum DataSourceError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("file is empty: {0}")]
    EmptyFile(PathBuf),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("missing mandatory column {0:?}")]
    MissingMandatoryColumn(&'static str),
    #[error("row {0} has the wrong number of cells")]
    RowArityMismatch(usize),
    #[error("duplicate case id {0:?}")]
    DuplicateCaseId(String),
    #[error("FILE data source chosen but no file path given")]
    MissingFilePath,
    #[error("database settings missing from config")]
    MissingDatabaseSettings,
    #[error("connection refused: {0}")]
    ConnectionRefused(String),
    #[error("authentication failed: {0}")]
    AuthFailed(String),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error("database error: {0}")]
    Database(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("I/O error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    File,
    Database,
}

#[derive(Debug, Clone)]
enum Origin {
    File(PathBuf),
    Database(DatabaseSettings),
}

/// An opened, read-only case source.
#[derive(Debug, Clone)]
pub struct DataSourceHandle {
    kind: SourceKind,
    origin: Origin,
    column_names: Vec<String>,
}

impl DataSourceHandle {
    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    /// File path or `host:port/db.table`.
    pub fn origin(&self) -> String {
        match &self.origin {
            Origin::File(p) => p.display().to_string(),
            Origin::Database(db) => format!("{}/{}.{}", db.db_url, db.db_name, db.table_name),
        }
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

/// Checks header invariants and returns the positions of `case_id` and
/// `expected`.
fn validate_columns(columns: &[String]) -> Result<(usize, usize), DataSourceError> {
    let mut seen = HashSet::new();
    for c in columns {
        if !seen.insert(c.as_str()) {
            return Err(DataSourceError::DuplicateColumn(c.clone()));
        }
    }
    let pos = |name: &'static str| {
        columns
            .iter()
            .position(|c| c == name)
            .ok_or(DataSourceError::MissingMandatoryColumn(name))
    };
    Ok((pos(CASE_ID_COLUMN)?, pos(EXPECTED_COLUMN)?))
}

/// Builds case records from raw rows. `first_row_number` is the 1-based
/// number reported for the first data row in arity errors.
fn rows_to_cases(
    columns: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
    first_row_number: usize,
) -> Result<Vec<TestCaseData>, DataSourceError> {
    let (id_pos, expected_pos) = validate_columns(columns)?;
    let mut ids = HashSet::new();
    let mut cases = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != columns.len() {
            return Err(DataSourceError::RowArityMismatch(first_row_number + i));
        }
        let mut case_id = String::new();
        let mut expected = String::new();
        let mut fields = Vec::with_capacity(columns.len().saturating_sub(2));
        for (pos, (name, cell)) in columns.iter().zip(row).enumerate() {
            if pos == id_pos {
                case_id = cell;
            } else if pos == expected_pos {
                expected = cell;
            } else {
                fields.push((name.clone(), cell));
            }
        }
        if !ids.insert(case_id.clone()) {
            return Err(DataSourceError::DuplicateCaseId(case_id));
        }
        cases.push(TestCaseData {
            case_id,
            fields,
            expected,
        });
    }
    Ok(cases)
}

/// Reads every data row, in source order.
pub fn read_cases(handle: &DataSourceHandle) -> Result<Vec<TestCaseData>, DataSourceError> {
    match &handle.origin {
        Origin::File(path) => {
            let (columns, rows) = file::read_table(path)?;
            rows_to_cases(&columns, rows, 2)
        }
        Origin::Database(db) => {
            let (columns, rows) = mysql::read_table(db)?;
            rows_to_cases(&columns, rows, 1)
        }
    }
}

/// Opens the source chosen by the configuration.
pub fn select_source(
    config: &TestConfig,
    file_path: Option<&Path>,
) -> Result<DataSourceHandle, DataSourceError> {
    match config.data_source_choice {
        DataSourceChoice::File => {
            open_file_source(file_path.ok_or(DataSourceError::MissingFilePath)?)
        }
        DataSourceChoice::Database => open_db_source(config),
    }
}
