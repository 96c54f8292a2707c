//! Minimal W3C WebDriver client.
//!
//! Covers the commands the keyword engine needs: session creation and
//! deletion, navigation, element lookup, click, send keys, clear, element
//! text and screenshots. Every call is a blocking HTTP/1.1 request with a
//! JSON body; responses use the `{"value": ...}` envelope.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;
use url::Url;

use crate::config::DEFAULT_REQUEST_TIMEOUT;
use crate::model::{Locator, LocatorStrategy};

/// Key of an element reference inside a W3C response.
pub const ELEMENT_KEY: &str = "element-6066-11e4-a52e-4f735466cecf";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WebDriverError {
    #[error("connection refused: {0}")]
    ConnectionRefused(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("session not created: {0}")]
    SessionNotCreated(String),
    #[error("no such session")]
    NoSuchSession,
    #[error("no such element: {0}")]
    NoSuchElement(String),
    #[error("stale element reference")]
    StaleElement,
    #[error("element not interactable: {0}")]
    ElementNotInteractable(String),
    #[error("invalid URL {0:?}")]
    InvalidUrl(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("{code}: {message}")]
    Remote { code: String, message: String },
}

impl WebDriverError {
    /// True when the session or the endpoint itself is broken, as opposed
    /// to a problem with one element or one page.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            WebDriverError::ConnectionRefused(_)
                | WebDriverError::Timeout(_)
                | WebDriverError::SessionNotCreated(_)
                | WebDriverError::NoSuchSession
                | WebDriverError::Protocol(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, WebDriverError>;

#[derive(Debug)]
struct Transport {
    agent: ureq::Agent,
    endpoint: Url,
}

impl Transport {
    fn new(endpoint: Url, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .max_idle_connections(0)
            .build()
            .into();
        Self { agent, endpoint }
    }

    fn url(&self, path: &str) -> String {
        let base = self.endpoint.as_str().trim_end_matches('/');
        format!("{base}{path}")
    }

    fn send(&self, method: Method, path: &str, body: Option<Value>) -> Result<Value> {
        let url = self.url(path);
        log::debug!("{method} {url}");
        let response = match (method, body) {
            (Method::Get, _) => self.agent.get(&url).call(),
            (Method::Delete, _) => self.agent.delete(&url).call(),
            (Method::Post, body) => self
                .agent
                .post(&url)
                .send_json(body.unwrap_or_else(|| json!({}))),
        };
        let mut response = response.map_err(transport_error)?;
        let status = response.status().as_u16();
        let body: Value = response
            .body_mut()
            .read_json()
            .map_err(|e| match e {
                ureq::Error::Timeout(t) => WebDriverError::Timeout(t.to_string()),
                other => WebDriverError::Protocol(format!("unreadable response body: {other}")),
            })?;
        let Some(value) = body.get("value") else {
            return Err(WebDriverError::Protocol(format!(
                "response without a value field (HTTP {status})"
            )));
        };
        if (200..300).contains(&status) {
            return Ok(value.clone());
        }
        let code = value
            .get("error")
            .and_then(Value::as_str)
            .ok_or_else(|| WebDriverError::Protocol(format!("HTTP {status} without error code")))?;
        let message = value
            .get("message")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        Err(WebDriverError::Remote {
            code: code.to_string(),
            message,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Method {
    Get,
    Post,
    Delete,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Get => "GET",
            Method::Post => "POST",
            Method::Delete => "DELETE",
        })
    }
}

fn transport_error(err: ureq::Error) -> WebDriverError {
    match err {
        ureq::Error::Timeout(t) => WebDriverError::Timeout(t.to_string()),
        ureq::Error::Io(e) => WebDriverError::ConnectionRefused(e.to_string()),
        ureq::Error::ConnectionFailed | ureq::Error::HostNotFound => {
            WebDriverError::ConnectionRefused(err.to_string())
        }
        other => WebDriverError::Protocol(other.to_string()),
    }
}

/// Maps a remote error to the local error for a session-scoped command.
fn classify(err: WebDriverError, locator: Option<&Locator>) -> WebDriverError {
    match err {
        WebDriverError::Remote { code, message } => match code.as_str() {
            "invalid session id" => WebDriverError::NoSuchSession,
            "no such element" => WebDriverError::NoSuchElement(
                locator.map(ToString::to_string).unwrap_or(message),
            ),
            "stale element reference" => WebDriverError::StaleElement,
            "element not interactable" => WebDriverError::ElementNotInteractable(message),
            "timeout" | "script timeout" => WebDriverError::Timeout(message),
            _ => WebDriverError::Remote { code, message },
        },
        other => other,
    }
}

#[derive(Debug)]
struct SessionInner {
    transport: Transport,
    id: String,
    browser: String,
    open: AtomicBool,
}

/// An open browser session. Cloning shares the same remote session.
#[derive(Debug, Clone)]
pub struct Session {
    inner: Arc<SessionInner>,
}

/// Reference to an element within a session.
#[derive(Debug, Clone)]
pub struct Element {
    session: Session,
    id: String,
}

/// Capabilities document naming the browser.
pub fn capabilities(browser: &str) -> Value {
    json!({
        "capabilities": {
            "alwaysMatch": { "browserName": browser }
        }
    })
}

/// Maps a locator onto the W3C `using`/`value` pair.
pub fn locator_body(locator: &Locator) -> Value {
    let (using, value) = match locator.strategy() {
        LocatorStrategy::Id => ("css selector", format!("#{}", locator.selector())),
        LocatorStrategy::Css => ("css selector", locator.selector().to_string()),
        LocatorStrategy::Xpath => ("xpath", locator.selector().to_string()),
    };
    json!({ "using": using, "value": value })
}

/// `POST /session`.
pub fn new_session(endpoint: &Url, browser: &str) -> Result<Session> {
    new_session_with_timeout(endpoint, browser, DEFAULT_REQUEST_TIMEOUT)
}

pub fn new_session_with_timeout(endpoint: &Url, browser: &str, timeout: Duration) -> Result<Session> {
    let transport = Transport::new(endpoint.clone(), timeout);
    let value = transport
        .send(Method::Post, "/session", Some(capabilities(browser)))
        .map_err(|e| match e {
            WebDriverError::Remote { message, code } => {
                WebDriverError::SessionNotCreated(format!("{code}: {message}"))
            }
            other => other,
        })?;
    let id = value
        .get("sessionId")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| WebDriverError::Protocol("new session response lacks sessionId".into()))?;
    Ok(Session {
        inner: Arc::new(SessionInner {
            transport,
            id: id.to_string(),
            browser: browser.to_string(),
            open: AtomicBool::new(true),
        }),
    })
}

impl Session {
    pub fn id(&self) -> &str {
        &self.inner.id
    }

    pub fn browser(&self) -> &str {
        &self.inner.browser
    }

    pub fn endpoint(&self) -> &Url {
        &self.inner.transport.endpoint
    }

    pub fn is_open(&self) -> bool {
        self.inner.open.load(Ordering::SeqCst)
    }

    fn command(&self, method: Method, path: &str, body: Option<Value>, locator: Option<&Locator>) -> Result<Value> {
        if !self.is_open() {
            return Err(WebDriverError::NoSuchSession);
        }
        let path = format!("/session/{}{path}", self.inner.id);
        let result = self
            .inner
            .transport
            .send(method, &path, body)
            .map_err(|e| classify(e, locator));
        if let Err(WebDriverError::NoSuchSession) = result {
            self.inner.open.store(false, Ordering::SeqCst);
        }
        result
    }

    /// `POST /session/{id}/url`. The URL is validated locally first.
    pub fn navigate(&self, url: &str) -> Result<()> {
        if !self.is_open() {
            return Err(WebDriverError::NoSuchSession);
        }
        match Url::parse(url) {
            Ok(u) if u.has_host() || u.scheme() == "about" || u.scheme() == "data" => {}
            _ => return Err(WebDriverError::InvalidUrl(url.to_string())),
        }
        self.command(Method::Post, "/url", Some(json!({ "url": url })), None)?;
        Ok(())
    }

    /// `POST /session/{id}/element`, returning the first match.
    pub fn find_element(&self, locator: &Locator) -> Result<Element> {
        let value = self.command(Method::Post, "/element", Some(locator_body(locator)), Some(locator))?;
        let id = value
            .get(ELEMENT_KEY)
            .and_then(Value::as_str)
            .ok_or_else(|| WebDriverError::Protocol("element response lacks a reference".into()))?;
        Ok(Element {
            session: self.clone(),
            id: id.to_string(),
        })
    }

    /// `GET /session/{id}/screenshot`, base64 PNG.
    pub fn take_screenshot(&self) -> Result<String> {
        let value = self.command(Method::Get, "/screenshot", None, None)?;
        value
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| WebDriverError::Protocol("screenshot is not a string".into()))
    }

    /// `DELETE /session/{id}`. Closing an already closed handle is a no-op,
    /// and a remote that is already gone only produces a warning.
    pub fn delete(&self) -> Result<()> {
        if !self.inner.open.swap(false, Ordering::SeqCst) {
            return Ok(());
        }
        let path = format!("/session/{}", self.inner.id);
        if let Err(e) = self.inner.transport.send(Method::Delete, &path, None) {
            log::warn!("session {} closed locally; remote delete failed: {e}", self.inner.id);
        }
        Ok(())
    }
}

impl Element {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    fn path(&self, suffix: &str) -> String {
        format!("/element/{}{suffix}", self.id)
    }

    pub fn click(&self) -> Result<()> {
        self.session.command(Method::Post, &self.path("/click"), None, None)?;
        Ok(())
    }

    /// Appends `text` to the element's value.
    pub fn send_keys(&self, text: &str) -> Result<()> {
        self.session
            .command(Method::Post, &self.path("/value"), Some(json!({ "text": text })), None)?;
        Ok(())
    }

    pub fn clear(&self) -> Result<()> {
        self.session.command(Method::Post, &self.path("/clear"), None, None)?;
        Ok(())
    }

    /// `GET /session/{id}/element/{eid}/text`.
    pub fn text(&self) -> Result<String> {
        let value = self.session.command(Method::Get, &self.path("/text"), None, None)?;
        value
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| WebDriverError::Protocol("element text is not a string".into()))
    }
}
