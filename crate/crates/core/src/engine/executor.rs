use std::time::{Duration, Instant};

use chrono::Utc;
use url::Url;

use crate::config::TestConfig;
use crate::model::{Keyword, KeywordStep, Locator, Status, StepResult};
use crate::report::{ReportError, ReportSink};
use crate::webdriver::{self, Session, WebDriverError};

/// Id of the element whose text VALIDATE compares against.
pub const OUTCOME_MARKER_ID: &str = "result";

/// Where and how sessions are opened.
#[derive(Debug, Clone)]
pub struct DriverSettings {
    pub endpoint: Url,
    pub browser: String,
    pub request_timeout: Duration,
    pub outcome_marker: Locator,
}

impl DriverSettings {
    pub fn new(endpoint: Url, browser: impl Into<String>) -> Self {
        Self {
            endpoint,
            browser: browser.into(),
            request_timeout: crate::config::DEFAULT_REQUEST_TIMEOUT,
            outcome_marker: Locator::id(OUTCOME_MARKER_ID).expect("non-empty"),
        }
    }

    pub fn from_config(config: &TestConfig) -> Self {
        Self {
            request_timeout: config.request_timeout,
            ..Self::new(config.webdriver_url.clone(), config.browser_choice.token())
        }
    }
}

/// The browser a case is driving, if any.
#[derive(Debug)]
pub struct BrowserContext {
    settings: DriverSettings,
    session: Option<Session>,
    /// Set once any command failed because the endpoint was unreachable.
    endpoint_down: bool,
}

impl BrowserContext {
    pub fn new(settings: DriverSettings) -> Self {
        Self {
            settings,
            session: None,
            endpoint_down: false,
        }
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn endpoint_down(&self) -> bool {
        self.endpoint_down
    }

    fn live_session(&self) -> Result<&Session, WebDriverError> {
        match &self.session {
            Some(s) if s.is_open() => Ok(s),
            _ => Err(WebDriverError::NoSuchSession),
        }
    }

    /// Deletes any open session without recording a step.
    pub fn teardown(&mut self) {
        if let Some(session) = self.session.take() {
            let _ = session.delete();
        }
    }

    fn dispatch(&mut self, step: &KeywordStep) -> Result<Outcome, WebDriverError> {
        let locator = || step.locator().expect("arity checked at construction");
        let value = || step.value().expect("arity checked at construction");
        match step.keyword() {
            Keyword::OpenBrowser => {
                if self.session.as_ref().is_some_and(Session::is_open) {
                    return Ok(Outcome::failed("a browser session is already open"));
                }
                let s = &self.settings;
                let session =
                    webdriver::new_session_with_timeout(&s.endpoint, &s.browser, s.request_timeout)?;
                let msg = format!("opened {} session {}", session.browser(), session.id());
                self.session = Some(session);
                Ok(Outcome::passed(msg))
            }
            Keyword::Navigate => {
                self.live_session()?.navigate(value())?;
                Ok(Outcome::passed(format!("navigated to {}", value())))
            }
            Keyword::Input => {
                self.live_session()?.find_element(locator())?.send_keys(value())?;
                Ok(Outcome::passed(format!("typed {} characters into {}", value().chars().count(), locator())))
            }
            Keyword::Click => {
                self.live_session()?.find_element(locator())?.click()?;
                Ok(Outcome::passed(format!("clicked {}", locator())))
            }
            Keyword::Clear => {
                self.live_session()?.find_element(locator())?.clear()?;
                Ok(Outcome::passed(format!("cleared {}", locator())))
            }
            Keyword::Validate => {
                let marker = self.settings.outcome_marker.clone();
                let actual = self.live_session()?.find_element(&marker)?.text()?;
                if actual == value() {
                    Ok(Outcome::passed(format!("outcome {actual:?} matches")))
                } else {
                    Ok(Outcome::failed(format!(
                        "expected outcome {:?}, page shows {actual:?}",
                        value()
                    )))
                }
            }
            Keyword::Screenshot => {
                let png = self.live_session()?.take_screenshot()?;
                Ok(Outcome {
                    status: Status::Passed,
                    message: "screenshot captured".into(),
                    screenshot: Some(png),
                })
            }
            Keyword::CloseBrowser => match self.session.take() {
                Some(session) => {
                    let was_open = session.is_open();
                    session.delete()?;
                    Ok(Outcome::passed(if was_open {
                        format!("closed session {}", session.id())
                    } else {
                        format!("session {} was already gone", session.id())
                    }))
                }
                None => Ok(Outcome::passed("no browser open")),
            },
        }
    }
}

struct Outcome {
    status: Status,
    message: String,
    screenshot: Option<String>,
}

impl Outcome {
    fn passed(message: impl Into<String>) -> Self {
        Self {
            status: Status::Passed,
            message: message.into(),
            screenshot: None,
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        Self {
            status: Status::Failed,
            message: message.into(),
            screenshot: None,
        }
    }
}

/// Runs one keyword against the context and forwards the result to the
/// reporter. Test-level problems are encoded in the returned status; the
/// only error is a reporter failure.
pub fn execute_step(
    ctx: &mut BrowserContext,
    step: &KeywordStep,
    reporter: &mut dyn ReportSink,
) -> Result<StepResult, ReportError> {
    let started_at = Utc::now();
    let clock = Instant::now();
    let mut outcome = match ctx.dispatch(step) {
        Ok(o) => o,
        Err(e) => {
            if matches!(e, WebDriverError::ConnectionRefused(_)) {
                ctx.endpoint_down = true;
            }
            Outcome {
                status: if e.is_fatal() { Status::Fatal } else { Status::Failed },
                message: e.to_string(),
                screenshot: None,
            }
        }
    };
    if matches!(outcome.status, Status::Failed | Status::Fatal) && outcome.screenshot.is_none() {
        if let Some(session) = ctx.session.as_ref().filter(|s| s.is_open()) {
            match session.take_screenshot() {
                Ok(png) => outcome.screenshot = Some(png),
                Err(e) => log::warn!("failure screenshot not captured: {e}"),
            }
        }
    }
    let result = StepResult {
        step: step.clone(),
        status: outcome.status,
        message: outcome.message,
        screenshot: outcome.screenshot,
        started_at,
        duration_ms: clock.elapsed().as_millis() as u64,
    };
    reporter.log_step(&result)?;
    Ok(result)
}
