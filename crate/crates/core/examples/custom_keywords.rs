//! Runs a hand-written keyword script instead of an expanded login row,
//! printing each step as it is logged.

use hybrid_taf::engine::{run_case_steps, DriverSettings};
use hybrid_taf::mock::{default_login_spec, start_mock};
use hybrid_taf::model::{RunResult, StepResult, TestCaseResult};
use hybrid_taf::report::{ReportError, ReportSink};
use hybrid_taf::{KeywordStep, Locator};

struct Printer;

impl ReportSink for Printer {
    fn start_case(&mut self, case_id: &str, description: &str) -> Result<(), ReportError> {
        println!("== {case_id}: {description}");
        Ok(())
    }
    fn log_step(&mut self, r: &StepResult) -> Result<(), ReportError> {
        println!("  {:<8} {} {}", r.status.as_str(), r.step, r.message);
        Ok(())
    }
    fn end_case(&mut self, r: &TestCaseResult) -> Result<(), ReportError> {
        println!("== {} ({} ms)", r.status, r.duration_ms);
        Ok(())
    }
    fn finalize(&mut self, _: &RunResult) -> Result<(), ReportError> {
        Ok(())
    }
}

fn main() {
    let mock = start_mock(default_login_spec([("student", "password123")])).unwrap();
    let settings = DriverSettings::new(mock.url(), "mock");
    let id = |s: &str| Locator::id(s).unwrap();

    let script = [
        KeywordStep::open_browser(),
        KeywordStep::navigate("http://portal.test/login"),
        KeywordStep::input(id("username"), "student"),
        KeywordStep::input(id("password"), "password123"),
        KeywordStep::click(id("submit")),
        KeywordStep::validate("PASS"),
        KeywordStep::click(id("logout")),
        KeywordStep::close_browser(),
    ];
    let outcome = run_case_steps("S1", "login then a missing logout link", &script, &settings, &mut Printer)
        .unwrap();
    println!("case status: {}", outcome.result.status);
}
