//! Hybrid keyword-driven and data-driven web test automation.
//!
//! Test rows come from a CSV file or a MySQL table ([`datasource`]), each
//! row is expanded into a fixed keyword sequence ([`engine`]), keywords are
//! executed over the W3C WebDriver protocol ([`webdriver`]), and results
//! are rendered as a self-contained HTML report ([`report`]) from which
//! [`metrics`] computes ASP, PTE and TTP. [`mock`] provides a WebDriver
//! endpoint and a MySQL server for hermetic runs.

pub mod cli;
pub mod config;
pub mod datasource;
pub mod decimal;
pub mod engine;
pub mod metrics;
pub mod mock;
pub mod model;
pub mod report;
pub mod webdriver;

pub use config::{parse_config, TestConfig};
pub use decimal::Centi;
pub use engine::{run_suite, run_suite_with, RunOptions};
pub use model::{
    Keyword, KeywordStep, Locator, LocatorConstants, OperationTally, RunResult, Status,
    StepResult, TestCaseData, TestCaseResult,
};
