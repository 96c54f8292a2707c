//! Run logging and the single-file HTML report.
//!
//! A [`ReportSink`] receives events from the keyword engine in strict
//! `start_case -> log_step* -> end_case` order. [`HtmlReport`] is the
//! sink that accumulates them and renders the final document.

mod dashboard;
mod env;
mod html;

use thiserror::Error;

use crate::model::{RunResult, StepResult, TestCaseResult};

pub use dashboard::{compute_dashboard, format_duration_ms, split_percentages, DashboardSummary};
pub use env::{collect_environment, EnvironmentInfo};
pub use html::{default_report_name, extract_run_data, RunData, RunDataCase, RunDataStep};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report name must not be empty")]
    InvalidName,
    #[error("out-of-order report call: {0}")]
    SequencingError(String),
    #[error("report is not sealed; call end_log first")]
    UnsealedSink,
    #[error("report document has no run-data island")]
    MissingRunData,
    #[error("run-data island is malformed: {0}")]
    MalformedRunData(String),
    #[error("report I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// Consumer of engine events.
pub trait ReportSink {
    fn start_case(&mut self, case_id: &str, description: &str) -> Result<(), ReportError>;
    fn log_step(&mut self, result: &StepResult) -> Result<(), ReportError>;
    fn end_case(&mut self, result: &TestCaseResult) -> Result<(), ReportError>;
    fn finalize(&mut self, run: &RunResult) -> Result<(), ReportError>;
}

impl<S: ReportSink + ?Sized> ReportSink for &mut S {
    fn start_case(&mut self, case_id: &str, description: &str) -> Result<(), ReportError> {
        (**self).start_case(case_id, description)
    }
    fn log_step(&mut self, result: &StepResult) -> Result<(), ReportError> {
        (**self).log_step(result)
    }
    fn end_case(&mut self, result: &TestCaseResult) -> Result<(), ReportError> {
        (**self).end_case(result)
    }
    fn finalize(&mut self, run: &RunResult) -> Result<(), ReportError> {
        (**self).finalize(run)
    }
}

/// A sink that drops everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl ReportSink for NullSink {
    fn start_case(&mut self, _: &str, _: &str) -> Result<(), ReportError> {
        Ok(())
    }
    fn log_step(&mut self, _: &StepResult) -> Result<(), ReportError> {
        Ok(())
    }
    fn end_case(&mut self, _: &TestCaseResult) -> Result<(), ReportError> {
        Ok(())
    }
    fn finalize(&mut self, _: &RunResult) -> Result<(), ReportError> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LoggedCase {
    pub case_id: String,
    pub description: String,
    pub steps: Vec<StepResult>,
    pub result: Option<TestCaseResult>,
}

/// Accumulating sink behind the HTML report.
#[derive(Debug, Clone)]
pub struct HtmlReport {
    test_name: String,
    description: String,
    cases: Vec<LoggedCase>,
    open: bool,
    sealed: bool,
}

/// Creates an empty report.
pub fn start_log_report(test_name: &str, description: &str) -> Result<HtmlReport, ReportError> {
    if test_name.trim().is_empty() {
        return Err(ReportError::InvalidName);
    }
    Ok(HtmlReport {
        test_name: test_name.to_string(),
        description: description.to_string(),
        cases: Vec::new(),
        open: false,
        sealed: false,
    })
}

impl HtmlReport {
    pub fn test_name(&self) -> &str {
        &self.test_name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn case_count(&self) -> usize {
        self.cases.len()
    }

    /// Number of logged step entries across all cases.
    pub fn entry_count(&self) -> usize {
        self.cases.iter().map(|c| c.steps.len()).sum()
    }

    /// Seals the log. Sealing twice is allowed.
    pub fn end_log(&mut self) -> Result<(), ReportError> {
        if self.open {
            return Err(ReportError::SequencingError(
                "end_log while a case is still open".into(),
            ));
        }
        self.sealed = true;
        Ok(())
    }

    fn check_unsealed(&self, call: &str) -> Result<(), ReportError> {
        if self.sealed {
            return Err(ReportError::SequencingError(format!("{call} after end_log")));
        }
        Ok(())
    }

    /// Renders the self-contained HTML document.
    pub fn render_html(&self, run: &RunResult) -> Result<String, ReportError> {
        if !self.sealed {
            return Err(ReportError::UnsealedSink);
        }
        Ok(html::render(self, run))
    }

    pub(crate) fn logged_cases(&self) -> &[LoggedCase] {
        &self.cases
    }
}

impl ReportSink for HtmlReport {
    fn start_case(&mut self, case_id: &str, description: &str) -> Result<(), ReportError> {
        self.check_unsealed("start_case")?;
        if self.open {
            return Err(ReportError::SequencingError(
                "start_case while another case is open".into(),
            ));
        }
        self.cases.push(LoggedCase {
            case_id: case_id.to_string(),
            description: description.to_string(),
            steps: Vec::new(),
            result: None,
        });
        self.open = true;
        Ok(())
    }

    fn log_step(&mut self, result: &StepResult) -> Result<(), ReportError> {
        self.check_unsealed("log_step")?;
        if !self.open {
            return Err(ReportError::SequencingError("log_step before start_case".into()));
        }
        self.cases
            .last_mut()
            .expect("open case exists")
            .steps
            .push(result.clone());
        Ok(())
    }

    fn end_case(&mut self, result: &TestCaseResult) -> Result<(), ReportError> {
        self.check_unsealed("end_case")?;
        let case = match self.cases.last_mut() {
            Some(c) if self.open => c,
            _ => return Err(ReportError::SequencingError("end_case before start_case".into())),
        };
        if case.case_id != result.case_id {
            return Err(ReportError::SequencingError(format!(
                "end_case for {:?} while {:?} is open",
                result.case_id, case.case_id
            )));
        }
        case.result = Some(result.clone());
        self.open = false;
        Ok(())
    }

    fn finalize(&mut self, _run: &RunResult) -> Result<(), ReportError> {
        self.end_log()
    }
}

/// Shorthand for `sink.log_step(result)`.
pub fn log_step(sink: &mut dyn ReportSink, result: &StepResult) -> Result<(), ReportError> {
    sink.log_step(result)
}

/// Shorthand for `sink.end_log()`.
pub fn end_log(sink: &mut HtmlReport) -> Result<(), ReportError> {
    sink.end_log()
}

/// Shorthand for `sink.render_html(run)`.
pub fn render_html(sink: &HtmlReport, run: &RunResult) -> Result<String, ReportError> {
    sink.render_html(run)
}
