#![allow(dead_code)]

use std::path::{Path, PathBuf};

use hybrid_taf::mock::mysql::{MySqlStub, MySqlStubConfig, StubTable};
use hybrid_taf::mock::{default_login_spec, start_mock, MockWebDriver};
use url::Url;

pub const DB_NAME: &str = "taf";
pub const DB_USER: &str = "qa";
pub const DB_PASS: &str = "hunter2";
pub const DB_TABLE: &str = "login_cases";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

/// Credentials the portal accepts.
pub fn accounts() -> Vec<(String, String)> {
    read_csv(&fixture("accounts.csv"))
        .1
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect()
}

pub fn portal() -> MockWebDriver {
    start_mock(default_login_spec(accounts())).unwrap()
}

pub fn file_config(webdriver: &Url) -> String {
    format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\nWEBDRIVER_URL={webdriver}\nDATA_SOURCE=FILE\n"
    )
}

pub fn db_config(webdriver: &Url, db_endpoint: &str, password: &str, table: &str) -> String {
    format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\nWEBDRIVER_URL={webdriver}\nDATA_SOURCE=DATABASE\n\
         MYSQL_URL={db_endpoint}\nMYSQL_DATABASE={DB_NAME}\nMYSQL_USER={DB_USER}\nMYSQL_PASS={password}\nTABLE_NAME={table}\n"
    )
}

pub fn table_from_csv(path: &Path) -> StubTable {
    let (header, rows) = read_csv(path);
    let mut table = StubTable::new(header);
    for row in rows {
        table.push_row(row);
    }
    table
}

/// A MySQL stub serving `login_cases` from the given CSV fixture.
pub fn db_stub(csv: &str) -> MySqlStub {
    let config = MySqlStubConfig::new(DB_NAME, DB_USER, DB_PASS)
        .with_table(DB_TABLE, table_from_csv(&fixture(csv)));
    MySqlStub::start(config, "127.0.0.1:0").unwrap()
}

/// A loopback URL nothing is listening on.
pub fn dead_endpoint() -> Url {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    Url::parse(&format!("http://{addr}")).unwrap()
}

pub mod report_check;

/// A sealed report whose run carries the reference figures: 180
/// operations, 220 steps and nine minutes of test time.
pub fn reference_report_html() -> String {
    use hybrid_taf::model::RunResult;
    use hybrid_taf::report::{start_log_report, EnvironmentInfo};
    use hybrid_taf::OperationTally;

    let run = RunResult {
        cases: Vec::new(),
        total_steps: 220,
        total_duration_ms: 9 * 60 * 1000,
        tally: OperationTally {
            clicks: 20,
            browsers_opened: 20,
            inputs: 40,
            browsers_closed: 20,
            validations: 20,
            screenshots: 20,
            fields_cleared: 40,
        },
        environment: EnvironmentInfo::unknown(),
        aborted: None,
    };
    let mut report = start_log_report("reference", "reference figures").unwrap();
    report.end_log().unwrap();
    report.render_html(&run).unwrap()
}

pub mod props;
