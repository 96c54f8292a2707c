use std::fs::File;
use std::io::{ErrorKind, Read};
use std::path::Path;

use super::{validate_columns, DataSourceError, DataSourceHandle, Origin, SourceKind};

/// Opens an RFC 4180 CSV file whose first record is the header row.
pub fn open_file_source(path: impl AsRef<Path>) -> Result<DataSourceHandle, DataSourceError> {
    let path = path.as_ref();
    let columns = read_header(path)?;
    validate_columns(&columns)?;
    Ok(DataSourceHandle {
        kind: SourceKind::File,
        origin: Origin::File(path.to_path_buf()),
        column_names: columns,
    })
}

fn open(path: &Path) -> Result<Vec<u8>, DataSourceError> {
    let mut file = File::open(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => DataSourceError::FileNotFound(path.to_path_buf()),
        _ => DataSourceError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(|e| DataSourceError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    if buf.starts_with(b"\xEF\xBB\xBF") {
        buf.drain(..3);
    }
    if buf.iter().all(|b| b.is_ascii_whitespace()) {
        return Err(DataSourceError::EmptyFile(path.to_path_buf()));
    }
    Ok(buf)
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(bytes)
}

fn header_of(rdr: &mut csv::Reader<&[u8]>) -> Result<Vec<String>, DataSourceError> {
    let headers = rdr
        .headers()
        .map_err(|e| DataSourceError::Csv(e.to_string()))?;
    Ok(headers.iter().map(|h| h.trim().to_string()).collect())
}

fn read_header(path: &Path) -> Result<Vec<String>, DataSourceError> {
    let bytes = open(path)?;
    header_of(&mut reader(&bytes))
}

/// Header plus raw data rows, cells verbatim.
pub(super) fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), DataSourceError> {
    let bytes = open(path)?;
    let mut rdr = reader(&bytes);
    let columns = header_of(&mut rdr)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| DataSourceError::Csv(e.to_string()))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok((columns, rows))
}
