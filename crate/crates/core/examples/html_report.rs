//! Logs a small failing run into a report, renders it, and reads the
//! embedded JSON data back out of the HTML.

use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::open_file_source;
use hybrid_taf::engine::run_suite;
use hybrid_taf::mock::{default_login_spec, start_mock};
use hybrid_taf::report::{extract_run_data, start_log_report};

fn main() {
    let mock = start_mock(default_login_spec([("student", "password123")])).unwrap();
    let config = parse_config(&format!(
        "AUT_URL=http://portal.test/login\nBROWSER_CHOICE=mock\nWEBDRIVER_URL={}\nDATA_SOURCE=FILE\n",
        mock.url()
    ))
    .unwrap();

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cases.csv");
    std::fs::write(
        &csv,
        "case_id,username,password,expected\n\
         R1,student,password123,PASS\n\
         R2,student,oops,FAIL\n\
         R3,student,oops,PASS\n",
    )
    .unwrap();

    let mut report = start_log_report("demo", "two passes and one mismatch").unwrap();
    let run = run_suite(&config, &open_file_source(&csv).unwrap(), &config.locators, &mut report).unwrap();
    let html = report.render_html(&run).unwrap();
    println!("rendered {} bytes", html.len());

    let data = extract_run_data(&html).unwrap();
    let s = &data.summary;
    println!(
        "passed {}% failed {}% skipped {}% fatal {}%",
        s.passed_pct, s.failed_pct, s.skipped_pct, s.fatal_pct
    );
    for case in &data.cases {
        let shots = case.steps.iter().filter(|st| st.screenshot).count();
        println!("{} {} ({} screenshot(s))", case.id, case.status, shots);
    }
    println!("operations: {}", data.tally_total);
}
