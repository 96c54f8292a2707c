use std::time::Duration;

use mysql::prelude::Queryable;
use mysql::{Conn, OptsBuilder, Value};

use super::{validate_columns, DataSourceError, DataSourceHandle, Origin, SourceKind};
use crate::config::{is_identifier, DatabaseSettings, TestConfig};

const MYSQL_DEFAULT_PORT: u16 = 3306;
const ER_ACCESS_DENIED: u16 = 1045;
const ER_DBACCESS_DENIED: u16 = 1044;
const ER_BAD_DB: u16 = 1049;
const ER_NO_SUCH_TABLE: u16 = 1146;

/// Opens the table named in the configuration and records its columns.
pub fn open_db_source(config: &TestConfig) -> Result<DataSourceHandle, DataSourceError> {
    let db = config
        .database
        .clone()
        .ok_or(DataSourceError::MissingDatabaseSettings)?;
    let (columns, _) = read_table(&db)?;
    validate_columns(&columns)?;
    Ok(DataSourceHandle {
        kind: SourceKind::Database,
        origin: Origin::Database(db),
        column_names: columns,
    })
}

fn split_endpoint(endpoint: &str) -> (String, u16) {
    // bracketed IPv6 or plain host, optional :port
    let endpoint = endpoint.trim();
    if let Some(rest) = endpoint.strip_prefix('[') {
        if let Some((host, tail)) = rest.split_once(']') {
            let port = tail
                .strip_prefix(':')
                .and_then(|p| p.parse().ok())
                .unwrap_or(MYSQL_DEFAULT_PORT);
            return (host.to_string(), port);
        }
    }
    match endpoint.rsplit_once(':') {
        Some((host, port)) if !host.contains(':') => (
            host.to_string(),
            port.parse().unwrap_or(MYSQL_DEFAULT_PORT),
        ),
        _ => (endpoint.to_string(), MYSQL_DEFAULT_PORT),
    }
}

fn connect(db: &DatabaseSettings) -> Result<Conn, DataSourceError> {
    let (host, port) = split_endpoint(&db.db_url);
    let opts = OptsBuilder::new()
        .ip_or_hostname(Some(host))
        .tcp_port(port)
        .user(Some(db.db_user.clone()))
        .pass(Some(db.db_pass.clone()))
        .db_name(Some(db.db_name.clone()))
        .prefer_socket(false)
        .max_allowed_packet(Some(16 * 1024 * 1024))
        .tcp_connect_timeout(Some(Duration::from_secs(10)))
        .read_timeout(Some(Duration::from_secs(30)))
        .write_timeout(Some(Duration::from_secs(30)));
    Conn::new(opts).map_err(|e| map_error(e, db))
}

fn map_error(err: mysql::Error, db: &DatabaseSettings) -> DataSourceError {
    match err {
        mysql::Error::MySqlError(e) => match e.code {
            ER_ACCESS_DENIED | ER_DBACCESS_DENIED => DataSourceError::AuthFailed(e.message),
            ER_NO_SUCH_TABLE => DataSourceError::UnknownTable(db.table_name.clone()),
            ER_BAD_DB => DataSourceError::Database(e.message),
            _ => DataSourceError::Database(format!("{} ({})", e.message, e.code)),
        },
        mysql::Error::IoError(e) => DataSourceError::ConnectionRefused(e.to_string()),
        mysql::Error::DriverError(e) => DataSourceError::ConnectionRefused(e.to_string()),
        other => DataSourceError::Database(other.to_string()),
    }
}

fn cell_text(value: Value) -> String {
    match value {
        Value::NULL => String::new(),
        Value::Bytes(b) => String::from_utf8_lossy(&b).into_owned(),
        other => other.as_sql(true).trim_matches('\'').to_string(),
    }
}

/// Runs `SELECT * FROM <table>` and returns column names and text cells.
pub(super) fn read_table(
    db: &DatabaseSettings,
) -> Result<(Vec<String>, Vec<Vec<String>>), DataSourceError> {
    if !is_identifier(&db.table_name) {
        return Err(DataSourceError::UnknownTable(db.table_name.clone()));
    }
    let mut conn = connect(db)?;
    let query = format!("SELECT * FROM `{}`", db.table_name);
    let mut result = conn.query_iter(query).map_err(|e| map_error(e, db))?;
    let columns: Vec<String> = result
        .columns()
        .as_ref()
        .iter()
        .map(|c| c.name_str().into_owned())
        .collect();
    let mut rows = Vec::new();
    if let Some(set) = result.iter() {
        for row in set {
            let row = row.map_err(|e| map_error(e, db))?;
            rows.push(row.unwrap().into_iter().map(cell_text).collect());
        }
    }
    drop(result);
    drop(conn);
    Ok((columns, rows))
}
