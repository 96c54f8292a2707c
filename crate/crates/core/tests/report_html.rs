mod common;

use common::report_check::check_report;
use hybrid_taf::config::parse_config;
use hybrid_taf::datasource::open_file_source;
use hybrid_taf::engine::run_suite;
use hybrid_taf::model::RunResult;
use hybrid_taf::report::{extract_run_data, start_log_report, RunData};

fn run_with_report(webdriver: &url::Url, csv: &std::path::Path) -> (String, RunResult) {
    let cfg = parse_config(&common::file_config(webdriver)).unwrap();
    let mut report = start_log_report("login", "portal login suite").unwrap();
    let run = run_suite(&cfg, &open_file_source(csv).unwrap(), &cfg.locators, &mut report).unwrap();
    assert!(report.is_sealed());
    (report.render_html(&run).unwrap(), run)
}

#[test]
fn passing_suite_report_meets_contract() {
    let mock = common::portal();
    let (html, run) = run_with_report(&mock.url(), &common::fixture("login_cases.csv"));
    let problems = check_report(&html, &run);
    assert!(problems.is_empty(), "{problems:#?}");
    let data = extract_run_data(&html).unwrap();
    assert_eq!(data.tally_total, 180);
    assert_eq!(data.summary.passed_pct.to_string(), "100.00");
}

#[test]
fn failures_and_hostile_text_are_rendered_safely() {
    let mock = common::portal();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cases.csv");
    std::fs::write(
        &csv,
        "case_id,username,password,expected\n\
         \"<script>alert(1)</script>\",adebayo,Ife#2019,PASS\n\
         TC&2,\"</script><img src=http://x>\",pw,PASS\n\
         TC3,adebayo,Ife#2019,FAIL\n",
    )
    .unwrap();
    let (html, run) = run_with_report(&mock.url(), &csv);
    let problems = check_report(&html, &run);
    assert!(problems.is_empty(), "{problems:#?}");
    let data = extract_run_data(&html).unwrap();
    assert_eq!(data.cases[0].id, "<script>alert(1)</script>");
    assert_eq!(data.cases[1].steps[2].value.as_deref(), Some("</script><img src=http://x>"));
    assert_eq!(data.summary.failed_pct.to_string(), "66.67");
    assert_eq!(data.summary.passed_pct.to_string(), "33.33");
}

#[test]
fn aborted_run_report_meets_contract() {
    let (html, run) = run_with_report(&common::dead_endpoint(), &common::fixture("login_cases.csv"));
    assert!(run.aborted.is_some());
    let problems = check_report(&html, &run);
    assert!(problems.is_empty(), "{problems:#?}");
    let data = extract_run_data(&html).unwrap();
    assert_eq!(data.aborted, run.aborted);
    assert_eq!(data.summary.skipped_pct.to_string(), "95.00");
    assert_eq!(data.summary.fatal_pct.to_string(), "5.00");
}

fn strip_timing(mut data: RunData) -> RunData {
    data.generated_at.clear();
    data.summary.total_time_ms = 0;
    for case in &mut data.cases {
        case.duration_ms = 0;
        for step in &mut case.steps {
            step.started_at.clear();
            step.duration_ms = 0;
            // session ids are assigned per mock instance
            if step.keyword == "OPEN_BROWSER" || step.keyword == "CLOSE_BROWSER" {
                step.message.clear();
            }
        }
    }
    data
}

#[test]
fn repeated_runs_differ_only_in_timing() {
    let a = common::portal();
    let b = common::portal();
    let (ha, _) = run_with_report(&a.url(), &common::fixture("login_cases.csv"));
    let (hb, _) = run_with_report(&b.url(), &common::fixture("login_cases.csv"));
    let da = strip_timing(extract_run_data(&ha).unwrap());
    let db = strip_timing(extract_run_data(&hb).unwrap());
    assert_eq!(da, db);
}
