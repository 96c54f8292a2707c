//! Shared domain types: locators, keyword steps, test-case rows and the
//! result records produced by a run.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::EnvironmentInfo;

/// Outcome of a step or a test case.
///
/// The derived ordering is the severity order used when folding step
/// statuses into a case status: `Skipped < Passed < Failed < Fatal`.
/// `Skipped` sorts lowest so it never dominates an executed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Skipped,
    Passed,
    Failed,
    /// The session or the infrastructure behind it broke.
    Fatal,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Passed => "PASSED",
            Status::Failed => "FAILED",
            Status::Skipped => "SKIPPED",
            Status::Fatal => "FATAL",
        }
    }

    /// Folds step statuses into a case status.
    ///
    /// Skipped steps do not participate; a case with no executed step is
    /// `Skipped`.
    pub fn fold<I: IntoIterator<Item = Status>>(statuses: I) -> Status {
        statuses
            .into_iter()
            .filter(|s| *s != Status::Skipped)
            .max()
            .unwrap_or(Status::Skipped)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LocatorStrategy {
    Id,
    Css,
    Xpath,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocatorError {
    #[error("locator selector is empty")]
    EmptySelector,
}

/// A `(strategy, selector)` pair identifying a page element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Locator {
    strategy: LocatorStrategy,
    selector: String,
}

impl Locator {
    pub fn new(strategy: LocatorStrategy, selector: impl Into<String>) -> Result<Self, LocatorError> {
        let selector = selector.into();
        if selector.is_empty() {
            return Err(LocatorError::EmptySelector);
        }
        Ok(Self { strategy, selector })
    }

    pub fn id(selector: impl Into<String>) -> Result<Self, LocatorError> {
        Self::new(LocatorStrategy::Id, selector)
    }

    pub fn css(selector: impl Into<String>) -> Result<Self, LocatorError> {
        Self::new(LocatorStrategy::Css, selector)
    }

    pub fn xpath(selector: impl Into<String>) -> Result<Self, LocatorError> {
        Self::new(LocatorStrategy::Xpath, selector)
    }

    /// Parses `id:x`, `css:x`, `xpath:x`, or a bare string (treated as an id).
    pub fn parse(text: &str) -> Result<Self, LocatorError> {
        let (strategy, selector) = match text.split_once(':') {
            Some(("id", rest)) => (LocatorStrategy::Id, rest),
            Some(("css", rest)) => (LocatorStrategy::Css, rest),
            Some(("xpath", rest)) => (LocatorStrategy::Xpath, rest),
            _ => (LocatorStrategy::Id, text),
        };
        Self::new(strategy, selector)
    }

    pub fn strategy(&self) -> LocatorStrategy {
        self.strategy
    }

    pub fn selector(&self) -> &str {
        &self.selector
    }
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.strategy {
            LocatorStrategy::Id => "id",
            LocatorStrategy::Css => "css",
            LocatorStrategy::Xpath => "xpath",
        };
        write!(f, "{prefix}:{}", self.selector)
    }
}

/// Locators of the login form elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocatorConstants {
    pub user_field: Locator,
    pub password_field: Locator,
    pub submit_button: Locator,
}

impl Default for LocatorConstants {
    fn default() -> Self {
        Self {
            user_field: Locator::id("username").unwrap(),
            password_field: Locator::id("password").unwrap(),
            submit_button: Locator::id("submit").unwrap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Keyword {
    OpenBrowser,
    Navigate,
    Input,
    Click,
    Clear,
    Validate,
    Screenshot,
    CloseBrowser,
}

impl Keyword {
    pub const ALL: [Keyword; 8] = [
        Keyword::OpenBrowser,
        Keyword::Navigate,
        Keyword::Input,
        Keyword::Click,
        Keyword::Clear,
        Keyword::Validate,
        Keyword::Screenshot,
        Keyword::CloseBrowser,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::OpenBrowser => "OPEN_BROWSER",
            Keyword::Navigate => "NAVIGATE",
            Keyword::Input => "INPUT",
            Keyword::Click => "CLICK",
            Keyword::Clear => "CLEAR",
            Keyword::Validate => "VALIDATE",
            Keyword::Screenshot => "SCREENSHOT",
            Keyword::CloseBrowser => "CLOSE_BROWSER",
        }
    }

    fn needs_locator(self) -> bool {
        matches!(self, Keyword::Input | Keyword::Click | Keyword::Clear)
    }

    fn needs_value(self) -> bool {
        matches!(self, Keyword::Navigate | Keyword::Validate | Keyword::Input)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("{0} requires a locator")]
    MissingLocator(Keyword),
    #[error("{0} requires a value")]
    MissingValue(Keyword),
    #[error("{0} takes no locator")]
    UnexpectedLocator(Keyword),
    #[error("{0} takes no value")]
    UnexpectedValue(Keyword),
}

/// One keyword instruction. Construction enforces the keyword arity table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordStep {
    keyword: Keyword,
    locator: Option<Locator>,
    value: Option<String>,
}

impl KeywordStep {
    pub fn new(
        keyword: Keyword,
        locator: Option<Locator>,
        value: Option<String>,
    ) -> Result<Self, StepError> {
        match (keyword.needs_locator(), &locator) {
            (true, None) => return Err(StepError::MissingLocator(keyword)),
            (false, Some(_)) => return Err(StepError::UnexpectedLocator(keyword)),
            _ => {}
        }
        match (keyword.needs_value(), &value) {
            (true, None) => return Err(StepError::MissingValue(keyword)),
            (false, Some(_)) => return Err(StepError::UnexpectedValue(keyword)),
            _ => {}
        }
        Ok(Self {
            keyword,
            locator,
            value,
        })
    }

    pub fn open_browser() -> Self {
        Self::bare(Keyword::OpenBrowser)
    }

    pub fn close_browser() -> Self {
        Self::bare(Keyword::CloseBrowser)
    }

    pub fn screenshot() -> Self {
        Self::bare(Keyword::Screenshot)
    }

    pub fn navigate(url: impl Into<String>) -> Self {
        Self {
            keyword: Keyword::Navigate,
            locator: None,
            value: Some(url.into()),
        }
    }

    pub fn input(locator: Locator, text: impl Into<String>) -> Self {
        Self {
            keyword: Keyword::Input,
            locator: Some(locator),
            value: Some(text.into()),
        }
    }

    pub fn click(locator: Locator) -> Self {
        Self {
            keyword: Keyword::Click,
            locator: Some(locator),
            value: None,
        }
    }

    pub fn clear(locator: Locator) -> Self {
        Self {
            keyword: Keyword::Clear,
            locator: Some(locator),
            value: None,
        }
    }

    pub fn validate(expected: impl Into<String>) -> Self {
        Self {
            keyword: Keyword::Validate,
            locator: None,
            value: Some(expected.into()),
        }
    }

    fn bare(keyword: Keyword) -> Self {
        Self {
            keyword,
            locator: None,
            value: None,
        }
    }

    pub fn keyword(&self) -> Keyword {
        self.keyword
    }

    pub fn locator(&self) -> Option<&Locator> {
        self.locator.as_ref()
    }

    pub fn value(&self) -> Option<&str> {
        self.value.as_deref()
    }
}

impl fmt::Display for KeywordStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword)?;
        if let Some(locator) = &self.locator {
            write!(f, " [{locator}]")?;
        }
        if let Some(value) = &self.value {
            write!(f, " \"{value}\"")?;
        }
        Ok(())
    }
}

/// One data-driven test case row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseData {
    pub case_id: String,
    /// Remaining columns, in source column order.
    pub fields: Vec<(String, String)>,
    pub expected: String,
}

impl TestCaseData {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

/// Counts of the seven scripted operation categories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationTally {
    pub clicks: u64,
    pub browsers_opened: u64,
    pub inputs: u64,
    pub browsers_closed: u64,
    pub validations: u64,
    pub screenshots: u64,
    pub fields_cleared: u64,
}

impl OperationTally {
    pub fn total(&self) -> u64 {
        self.clicks
            + self.browsers_opened
            + self.inputs
            + self.browsers_closed
            + self.validations
            + self.screenshots
            + self.fields_cleared
    }

    /// Counts one executed keyword. `Navigate` has no category.
    pub fn record(&mut self, keyword: Keyword) {
        match keyword {
            Keyword::Click => self.clicks += 1,
            Keyword::OpenBrowser => self.browsers_opened += 1,
            Keyword::Input => self.inputs += 1,
            Keyword::CloseBrowser => self.browsers_closed += 1,
            Keyword::Validate => self.validations += 1,
            Keyword::Screenshot => self.screenshots += 1,
            Keyword::Clear => self.fields_cleared += 1,
            Keyword::Navigate => {}
        }
    }

    pub fn merge(&mut self, other: &OperationTally) {
        self.clicks += other.clicks;
        self.browsers_opened += other.browsers_opened;
        self.inputs += other.inputs;
        self.browsers_closed += other.browsers_closed;
        self.validations += other.validations;
        self.screenshots += other.screenshots;
        self.fields_cleared += other.fields_cleared;
    }

    /// Rows in presentation order, labelled.
    pub fn rows(&self) -> [(&'static str, u64); 7] {
        [
            ("Buttons clicked", self.clicks),
            ("Browsers opened", self.browsers_opened),
            ("Values typed", self.inputs),
            ("Browsers closed", self.browsers_closed),
            ("Outcomes validated", self.validations),
            ("Screenshots taken", self.screenshots),
            ("Fields cleared", self.fields_cleared),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub step: KeywordStep,
    pub status: Status,
    pub message: String,
    /// Base64 PNG.
    pub screenshot: Option<String>,
    pub started_at: chrono::DateTime<chrono::Utc>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseResult {
    pub case_id: String,
    pub description: String,
    pub steps: Vec<StepResult>,
    pub status: Status,
    pub duration_ms: u64,
}

impl TestCaseResult {
    /// A case that never started because the run aborted.
    pub fn skipped(case_id: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            case_id: case_id.into(),
            description: description.into(),
            steps: Vec::new(),
            status: Status::Skipped,
            duration_ms: 0,
        }
    }

    pub fn executed_steps(&self) -> impl Iterator<Item = &StepResult> {
        self.steps.iter().filter(|s| s.status != Status::Skipped)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub cases: Vec<TestCaseResult>,
    pub total_steps: u64,
    pub total_duration_ms: u64,
    pub tally: OperationTally,
    pub environment: EnvironmentInfo,
    /// Set when the run stopped early because the WebDriver endpoint
    /// became unreachable.
    pub aborted: Option<String>,
}

impl RunResult {
    pub fn count(&self, status: Status) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.status == Status::Passed)
    }
}
