//! Run configuration read from a line-oriented `KEY=VALUE` document.
//!
//! ```text
//! # login suite against the local portal
//! AUT_URL=http://portal.local/login
//! BROWSER_CHOICE=chrome
//! WEBDRIVER_URL=http://127.0.0.1:4444
//! DATA_SOURCE=DATABASE
//! MYSQL_URL=127.0.0.1:3306
//! MYSQL_DATABASE=portal
//! MYSQL_USER=qa
//! MYSQL_PASS=secret
//! TABLE_NAME=login_cases
//! ```
//!
//! `REQUEST_TIMEOUT` (e.g. `30s`) and the locator keys `USER_ID`,
//! `PASSWORD_ID`, `SUBMIT_BUTTON` are optional.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;
use url::Url;

use crate::model::{Locator, LocatorConstants};

pub const DEFAULT_REQUEST_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected KEY=VALUE")]
    MalformedLine { line: usize },
    #[error("missing mandatory key {0}")]
    MissingKey(&'static str),
    #[error("{0} is not an absolute http(s) URL")]
    InvalidUrl(&'static str),
    #[error("{key}: unknown value {value:?}")]
    UnknownEnumToken { key: &'static str, value: String },
    #[error("TABLE_NAME {0:?} is not a valid identifier")]
    InvalidTableName(String),
    #[error("{key}: {message}")]
    InvalidValue { key: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BrowserChoice {
    Chrome,
    Firefox,
    Mock,
}

impl BrowserChoice {
    pub fn token(self) -> &'static str {
        match self {
            BrowserChoice::Chrome => "chrome",
            BrowserChoice::Firefox => "firefox",
            BrowserChoice::Mock => "mock",
        }
    }
}

impl FromStr for BrowserChoice {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "chrome" => Ok(BrowserChoice::Chrome),
            "firefox" => Ok(BrowserChoice::Firefox),
            "mock" => Ok(BrowserChoice::Mock),
            _ => Err(()),
        }
    }
}

impl fmt::Display for BrowserChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataSourceChoice {
    File,
    Database,
}

impl DataSourceChoice {
    pub fn token(self) -> &'static str {
        match self {
            DataSourceChoice::File => "FILE",
            DataSourceChoice::Database => "DATABASE",
        }
    }
}

/// Connection settings for the database-backed case source.
#[derive(Clone, PartialEq, Eq)]
pub struct DatabaseSettings {
    pub db_url: String,
    pub db_name: String,
    pub db_user: String,
    pub db_pass: String,
    pub table_name: String,
}

impl fmt::Debug for DatabaseSettings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DatabaseSettings")
            .field("db_url", &self.db_url)
            .field("db_name", &self.db_name)
            .field("db_user", &self.db_user)
            .field("db_pass", &"***")
            .field("table_name", &self.table_name)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestConfig {
    pub aut_url: Url,
    pub browser_choice: BrowserChoice,
    pub webdriver_url: Url,
    pub data_source_choice: DataSourceChoice,
    /// Present whenever `data_source_choice` is `Database`; may also be
    /// present for file runs when the document carries a full set.
    pub database: Option<DatabaseSettings>,
    pub request_timeout: Duration,
    pub locators: LocatorConstants,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "AUT_URL",
    "BROWSER_CHOICE",
    "WEBDRIVER_URL",
    "DATA_SOURCE",
    "MYSQL_DATABASE",
    "MYSQL_USER",
    "MYSQL_PASS",
    "TABLE_NAME",
    "MYSQL_URL",
    "REQUEST_TIMEOUT",
    "USER_ID",
    "PASSWORD_ID",
    "SUBMIT_BUTTON",
];

const DB_KEYS: [&str; 5] = [
    "MYSQL_URL",
    "MYSQL_DATABASE",
    "MYSQL_USER",
    "MYSQL_PASS",
    "TABLE_NAME",
];

/// Parses a configuration document, logging any warnings.
pub fn parse_config(text: &str) -> Result<TestConfig, ConfigError> {
    let (config, warnings) = parse_config_with_warnings(text)?;
    for w in &warnings {
        log::warn!("config {w}");
    }
    Ok(config)
}

pub fn parse_config_with_warnings(
    text: &str,
) -> Result<(TestConfig, Vec<ConfigWarning>), ConfigError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut warnings = Vec::new();
    let mut entries: Vec<(&'static str, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::MalformedLine { line: line_no });
        };
        let key = key.trim();
        let value = value.trim();
        match KNOWN_KEYS.iter().find(|k| **k == key) {
            Some(k) => {
                if let Some(slot) = entries.iter_mut().find(|(e, _)| e == k) {
                    warnings.push(ConfigWarning {
                        line: line_no,
                        message: format!("{key} repeated; last value wins"),
                    });
                    slot.1 = value.to_string();
                } else {
                    entries.push((k, value.to_string()));
                }
            }
            None => warnings.push(ConfigWarning {
                line: line_no,
                message: format!("unknown key {key:?} ignored"),
            }),
        }
    }

    let get = |key: &'static str| -> Option<&str> {
        entries
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    };
    let require = |key: &'static str| get(key).ok_or(ConfigError::MissingKey(key));

    let aut_url = parse_http_url("AUT_URL", require("AUT_URL")?)?;
    let browser_token = require("BROWSER_CHOICE")?;
    let browser_choice =
        browser_token
            .parse()
            .map_err(|_| ConfigError::UnknownEnumToken {
                key: "BROWSER_CHOICE",
                value: browser_token.to_string(),
            })?;
    let webdriver_url = parse_http_url("WEBDRIVER_URL", require("WEBDRIVER_URL")?)?;
    let data_source_choice = match require("DATA_SOURCE")? {
        "FILE" => DataSourceChoice::File,
        "DATABASE" => DataSourceChoice::Database,
        other => {
            return Err(ConfigError::UnknownEnumToken {
                key: "DATA_SOURCE",
                value: other.to_string(),
            })
        }
    };

    let database = match data_source_choice {
        DataSourceChoice::Database => {
            for key in DB_KEYS {
                require(key)?;
            }
            Some(database_settings(&get)?)
        }
        DataSourceChoice::File => {
            let present = DB_KEYS.iter().filter(|k| get(k).is_some()).count();
            if present == DB_KEYS.len() {
                Some(database_settings(&get)?)
            } else {
                if present > 0 {
                    warnings.push(ConfigWarning {
                        line: 0,
                        message: "incomplete database settings ignored for a FILE run".into(),
                    });
                }
                None
            }
        }
    };

    let request_timeout = match get("REQUEST_TIMEOUT") {
        Some(v) => {
            let d = humantime::parse_duration(v).map_err(|e| ConfigError::InvalidValue {
                key: "REQUEST_TIMEOUT",
                message: e.to_string(),
            })?;
            if d.is_zero() {
                return Err(ConfigError::InvalidValue {
                    key: "REQUEST_TIMEOUT",
                    message: "must be positive".into(),
                });
            }
            d
        }
        None => DEFAULT_REQUEST_TIMEOUT,
    };

    let mut locators = LocatorConstants::default();
    for (key, slot) in [
        ("USER_ID", &mut locators.user_field),
        ("PASSWORD_ID", &mut locators.password_field),
        ("SUBMIT_BUTTON", &mut locators.submit_button),
    ] {
        if let Some(v) = get(key) {
            *slot = Locator::parse(v).map_err(|e| ConfigError::InvalidValue {
                key,
                message: e.to_string(),
            })?;
        }
    }

    Ok((
        TestConfig {
            aut_url,
            browser_choice,
            webdriver_url,
            data_source_choice,
            database,
            request_timeout,
            locators,
        },
        warnings,
    ))
}

fn database_settings<'a>(
    get: &impl Fn(&'static str) -> Option<&'a str>,
) -> Result<DatabaseSettings, ConfigError> {
    let table_name = get("TABLE_NAME").unwrap_or_default().to_string();
    if !is_identifier(&table_name) {
        return Err(ConfigError::InvalidTableName(table_name));
    }
    Ok(DatabaseSettings {
        db_url: get("MYSQL_URL").unwrap_or_default().to_string(),
        db_name: get("MYSQL_DATABASE").unwrap_or_default().to_string(),
        db_user: get("MYSQL_USER").unwrap_or_default().to_string(),
        db_pass: get("MYSQL_PASS").unwrap_or_default().to_string(),
        table_name,
    })
}

fn parse_http_url(key: &'static str, value: &str) -> Result<Url, ConfigError> {
    match Url::parse(value) {
        Ok(u) if matches!(u.scheme(), "http" | "https") && u.has_host() => Ok(u),
        _ => Err(ConfigError::InvalidUrl(key)),
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TestConfig {
    /// Serializes back to the `KEY=VALUE` form accepted by [`parse_config`].
    pub fn to_config_string(&self) -> String {
        self.render(false)
    }

    /// Same as [`TestConfig::to_config_string`] with the password replaced by `***`.
    pub fn redacted(&self) -> String {
        self.render(true)
    }

    fn render(&self, redact: bool) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &str| {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        };
        put("AUT_URL", self.aut_url.as_str());
        put("BROWSER_CHOICE", self.browser_choice.token());
        put("WEBDRIVER_URL", self.webdriver_url.as_str());
        put("DATA_SOURCE", self.data_source_choice.token());
        if let Some(db) = &self.database {
            put("MYSQL_URL", &db.db_url);
            put("MYSQL_DATABASE", &db.db_name);
            put("MYSQL_USER", &db.db_user);
            put("MYSQL_PASS", if redact { "***" } else { &db.db_pass });
            put("TABLE_NAME", &db.table_name);
        }
        put(
            "REQUEST_TIMEOUT",
            &humantime::format_duration(self.request_timeout).to_string(),
        );
        put("USER_ID", &self.locators.user_field.to_string());
        put("PASSWORD_ID", &self.locators.password_field.to_string());
        put("SUBMIT_BUTTON", &self.locators.submit_button.to_string());
        out
    }
}
