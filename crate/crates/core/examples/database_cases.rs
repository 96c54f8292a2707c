//! Reads login rows over the MySQL protocol from the bundled stub server.

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::{read_cases, select_source};
use hybrid_taf::mock::mysql::{MySqlStub, MySqlStubConfig, StubTable};

fn main() {
    let mut table = StubTable::new(["case_id", "username", "password", "expected"]);
    table.push_row(["DB1", "student", "password123", "PASS"]);
    table.push_row(["DB2", "student", "guess", "FAIL"]);
    let stub = MySqlStub::start(
        MySqlStubConfig::new("taf", "qa", "hunter2").with_table("login_cases", table),
        "127.0.0.1:0",
    )
    .expect("bind stub");

    let config = parse_config(&format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\n\
         WEBDRIVER_URL=http://127.0.0.1:4444\nDATA_SOURCE=DATABASE\n\
         MYSQL_URL={}\nMYSQL_DATABASE=taf\nMYSQL_USER=qa\nMYSQL_PASS=hunter2\n\
         TABLE_NAME=login_cases\n",
        stub.endpoint()
    ))
    .unwrap();

    let source = select_source(&config, None).expect("connect");
    println!("origin: {}", source.origin());
    for case in read_cases(&source).unwrap() {
        println!("{} {:?}", case.case_id, case.fields);
    }
    println!("queries seen by the server: {:?}", stub.queries());
}
