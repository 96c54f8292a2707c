//! Keyword-driven execution: rows become keyword steps, steps become
//! WebDriver commands, results flow to a [`ReportSink`](crate::report::ReportSink).

mod executor;
mod expand;
mod suite;

use thiserror::Error;

use crate::datasource::DataSourceError;
use crate::report::ReportError;

pub use executor::{execute_step, BrowserContext, DriverSettings, OUTCOME_MARKER_ID};
pub use expand::{case_description, expand_login_case, ExpandError, DESCRIPTION_FIELD};
pub use suite::{
    count_operations, run_case_steps, run_suite, run_suite_with, run_test_case, CaseOutcome,
    RunOptions,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    DataSource(#[from] DataSourceError),
    #[error("case {case_id}: {source}")]
    Expand {
        case_id: String,
        #[source]
        source: ExpandError,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
}
