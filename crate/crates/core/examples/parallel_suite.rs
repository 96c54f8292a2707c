//! Runs the same suite sequentially and on four workers, then shows the
//! results agree.

use std::path::Path;

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::open_file_source;
use hybrid_taf::engine::{run_suite_with, RunOptions};
use hybrid_taf::mock::{default_login_spec, start_mock};
use hybrid_taf::report::NullSink;
use hybrid_taf::Status;

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let accounts = [
        ("adebayo", "Ife#2019"),
        ("chioma", "Oau!pass1"),
        ("tunde", "s3cure-Key"),
        ("ngozi", "Mat-8841"),
        ("kunle", "Pa55word"),
    ];
    let mock = start_mock(default_login_spec(accounts)).unwrap();
    let config = parse_config(&format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\nWEBDRIVER_URL={}\nDATA_SOURCE=FILE\n",
        mock.url()
    ))
    .unwrap();
    let source = open_file_source(fixtures.join("login_cases_22.csv")).unwrap();

    let mut statuses = Vec::new();
    for parallelism in [1, 4] {
        let run = run_suite_with(&config, &source, &config.locators, &mut NullSink, RunOptions { parallelism })
            .unwrap();
        println!(
            "parallelism {parallelism}: {} cases, tally {}, {} ms",
            run.cases.len(),
            run.tally.total(),
            run.total_duration_ms
        );
        statuses.push(run.cases.iter().map(|c| c.status).collect::<Vec<Status>>());
    }
    println!("same statuses in the same order: {}", statuses[0] == statuses[1]);
}
