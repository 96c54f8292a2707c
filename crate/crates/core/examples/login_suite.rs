//! Runs the bundled 20-case login suite against the mock endpoint and
//! writes an HTML report. Pass a path to choose where it goes.

use std::path::Path;

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::open_file_source;
use hybrid_taf::engine::run_suite;
use hybrid_taf::mock::{default_login_spec, start_mock};
use hybrid_taf::report::start_log_report;

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let accounts: Vec<(String, String)> = csv::Reader::from_path(fixtures.join("accounts.csv"))
        .unwrap()
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    let mock = start_mock(default_login_spec(accounts)).unwrap();

    let config = parse_config(&format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\nWEBDRIVER_URL={}\nDATA_SOURCE=FILE\n",
        mock.url()
    ))
    .unwrap();
    let source = open_file_source(fixtures.join("login_cases.csv")).unwrap();
    let mut report = start_log_report("login", "portal login suite").unwrap();
    let run = run_suite(&config, &source, &config.locators, &mut report).unwrap();

    for case in &run.cases {
        println!("{:<6} {:<8} {}", case.case_id, case.status.as_str(), case.description);
    }
    let t = &run.tally;
    println!(
        "\nclicks={} opened={} inputs={} closed={} validations={} screenshots={} cleared={} total={}",
        t.clicks, t.browsers_opened, t.inputs, t.browsers_closed, t.validations,
        t.screenshots, t.fields_cleared, t.total()
    );
    println!("{} steps in {} ms", run.total_steps, run.total_duration_ms);

    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("login_suite.html").display().to_string());
    std::fs::write(&out, report.render_html(&run).unwrap()).unwrap();
    println!("report: {out}");
}
