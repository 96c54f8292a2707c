//! In-process WebDriver endpoint serving a [`PortalSpec`].

use std::collections::BTreeMap;
use std::net::{SocketAddr, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use base64::Engine;
use serde_json::{json, Value};
use thiserror::Error;

use super::portal::{ElementKind, PortalSpec, PortalSpecError};
use crate::webdriver::ELEMENT_KEY;

/// The screenshot every mock session returns: a 1x1 RGBA PNG.
pub const PIXEL_PNG_BASE64: &str =
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mOQz9/yHwAENQJCohKFywAAAABJRU5ErkJggg==";

pub fn pixel_png() -> Vec<u8> {
    base64::engine::general_purpose::STANDARD
        .decode(PIXEL_PNG_BASE64)
        .expect("fixture PNG is valid base64")
}

const WORKERS: usize = 4;

#[derive(Debug, Error)]
pub enum MockError {
    #[error("invalid portal spec: {0}")]
    InvalidSpec(#[from] PortalSpecError),
    #[error("cannot bind {addr}: {message}")]
    BindFailure { addr: String, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionState {
    pub browser: String,
    pub current_page: Option<String>,
    pub url: Option<String>,
    /// Bumped on every page load; element references from older loads are stale.
    pub generation: u64,
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default)]
pub struct MockState {
    pub sessions: BTreeMap<String, SessionState>,
    pub click_log: Vec<(String, String)>,
    pub request_log: Vec<(String, String)>,
    next_session: u64,
}

type Reply = (u16, Value);

fn ok(value: Value) -> Reply {
    (200, json!({ "value": value }))
}

fn error(status: u16, code: &str, message: impl Into<String>) -> Reply {
    (
        status,
        json!({ "value": { "error": code, "message": message.into(), "stacktrace": "" } }),
    )
}

fn no_session(id: &str) -> Reply {
    error(404, "invalid session id", format!("session {id} does not exist"))
}

/// Element name addressed by a `#id` CSS selector or `//*[@id='x']` XPath.
fn selector_target(using: &str, value: &str) -> Option<String> {
    match using {
        "css selector" => {
            let id = value.strip_prefix('#')?;
            let plain = !id.is_empty()
                && id
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            plain.then(|| id.to_string())
        }
        "xpath" => {
            let inner = value.strip_prefix("//*[@id=")?.strip_suffix(']')?;
            let id = inner
                .strip_prefix('\'')
                .and_then(|s| s.strip_suffix('\''))
                .or_else(|| inner.strip_prefix('"').and_then(|s| s.strip_suffix('"')))?;
            (!id.is_empty()).then(|| id.to_string())
        }
        _ => None,
    }
}

fn element_ref(generation: u64, name: &str) -> String {
    format!("e-{generation}-{name}")
}

fn parse_element_ref(eid: &str) -> Option<(u64, &str)> {
    let mut parts = eid.splitn(3, '-');
    match (parts.next(), parts.next(), parts.next()) {
        (Some("e"), Some(g), Some(name)) => Some((g.parse().ok()?, name)),
        _ => None,
    }
}

impl MockState {
    fn load_page(spec: &PortalSpec, session: &mut SessionState, page: &str) {
        session.generation += 1;
        session.current_page = Some(page.to_string());
        session.values = spec.pages[page]
            .elements
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect();
    }

    /// Routes one request. Pure with respect to the portal spec.
    pub fn handle(
        &mut self,
        spec: &PortalSpec,
        accepted_browsers: &[String],
        method: &str,
        path: &str,
        body: &Value,
    ) -> Reply {
        self.request_log.push((method.to_string(), path.to_string()));
        let segments: Vec<&str> = path.trim_matches('/').split('/').collect();
        match (method, segments.as_slice()) {
            ("POST", ["session"]) => self.new_session(accepted_browsers, body),
            ("DELETE", ["session", id]) => match self.sessions.remove(*id) {
                Some(_) => ok(Value::Null),
                None => no_session(id),
            },
            ("POST", ["session", id, "url"]) => self.navigate(spec, id, body),
            ("POST", ["session", id, "element"]) => self.find_element(spec, id, body),
            ("GET", ["session", id, "screenshot"]) => match self.sessions.get(*id) {
                Some(_) => ok(json!(PIXEL_PNG_BASE64)),
                None => no_session(id),
            },
            ("POST", ["session", id, "element", eid, action]) => {
                self.element_command(spec, id, eid, action, body)
            }
            ("GET", ["session", id, "element", eid, "text"]) => {
                self.element_command(spec, id, eid, "text", body)
            }
            (_, ["session"])
            | (_, ["session", _])
            | (_, ["session", _, "url" | "element" | "screenshot"]) => {
                error(405, "unknown method", format!("{method} not allowed on {path}"))
            }
            _ => error(404, "unknown command", format!("{method} {path}")),
        }
    }

    fn new_session(&mut self, accepted: &[String], body: &Value) -> Reply {
        let caps = &body["capabilities"];
        let browser = caps["alwaysMatch"]["browserName"]
            .as_str()
            .or_else(|| {
                caps["firstMatch"]
                    .as_array()
                    .and_then(|a| a.iter().find_map(|c| c["browserName"].as_str()))
            })
            .unwrap_or("mock");
        if !accepted.iter().any(|b| b == browser) {
            return error(
                500,
                "session not created",
                format!("browser {browser:?} is not available on this endpoint"),
            );
        }
        self.next_session += 1;
        let id = format!("mock-session-{}", self.next_session);
        self.sessions.insert(
            id.clone(),
            SessionState {
                browser: browser.to_string(),
                ..SessionState::default()
            },
        );
        ok(json!({ "sessionId": id, "capabilities": { "browserName": browser } }))
    }

    fn navigate(&mut self, spec: &PortalSpec, id: &str, body: &Value) -> Reply {
        let Some(url) = body["url"].as_str() else {
            return error(400, "invalid argument", "url must be a string");
        };
        let Some(session) = self.sessions.get_mut(id) else {
            return no_session(id);
        };
        session.url = Some(url.to_string());
        Self::load_page(spec, session, &spec.initial_page);
        ok(Value::Null)
    }

    fn find_element(&mut self, spec: &PortalSpec, id: &str, body: &Value) -> Reply {
        let (Some(using), Some(value)) = (body["using"].as_str(), body["value"].as_str()) else {
            return error(400, "invalid argument", "using and value must be strings");
        };
        let Some(session) = self.sessions.get(id) else {
            return no_session(id);
        };
        let Some(name) = selector_target(using, value) else {
            return error(400, "invalid selector", format!("unsupported selector {using} {value:?}"));
        };
        let found = session
            .current_page
            .as_ref()
            .is_some_and(|p| spec.pages[p].elements.contains_key(&name));
        if !found {
            return error(404, "no such element", format!("no element matches {value:?}"));
        }
        ok(json!({ ELEMENT_KEY: element_ref(session.generation, &name) }))
    }

    fn element_command(
        &mut self,
        spec: &PortalSpec,
        id: &str,
        eid: &str,
        action: &str,
        body: &Value,
    ) -> Reply {
        let Some(session) = self.sessions.get_mut(id) else {
            return no_session(id);
        };
        let Some((generation, name)) = parse_element_ref(eid) else {
            return error(404, "no such element", format!("unknown element reference {eid:?}"));
        };
        if generation != session.generation {
            return error(404, "stale element reference", format!("{eid} is from an earlier page"));
        }
        let page = session.current_page.clone().unwrap_or_default();
        let Some(element) = spec.pages.get(&page).and_then(|p| p.elements.get(name)) else {
            return error(404, "no such element", format!("unknown element reference {eid:?}"));
        };
        match action {
            "click" => {
                self.click_log.push((id.to_string(), name.to_string()));
                let target = spec.transitions.iter().find(|t| {
                    t.on_click == name
                        && t.from.as_ref().is_none_or(|f| *f == page)
                        && t.when.holds(&session.values)
                });
                if let Some(t) = target {
                    Self::load_page(spec, session, &t.goto);
                }
                ok(Value::Null)
            }
            "value" => {
                let Some(text) = body["text"].as_str() else {
                    return error(400, "invalid argument", "text must be a string");
                };
                if element.kind != ElementKind::Input {
                    return error(400, "element not interactable", format!("{name} does not accept input"));
                }
                session.values.entry(name.to_string()).or_default().push_str(text);
                ok(Value::Null)
            }
            "clear" => {
                if element.kind != ElementKind::Input {
                    return error(400, "invalid element state", format!("{name} is not editable"));
                }
                session.values.insert(name.to_string(), String::new());
                ok(Value::Null)
            }
            "text" => {
                let text = match element.kind {
                    ElementKind::Input => String::new(),
                    _ => session.values.get(name).cloned().unwrap_or_default(),
                };
                ok(json!(text))
            }
            _ => error(404, "unknown command", format!("element command {action:?}")),
        }
    }
}

struct Shared {
    addr: SocketAddr,
    spec: PortalSpec,
    accepted_browsers: Vec<String>,
    state: Mutex<MockState>,
    stopped: AtomicBool,
    /// Requests left before the endpoint shuts itself down.
    budget: Mutex<Option<u64>>,
    server: Mutex<Option<Arc<tiny_http::Server>>>,
}

impl Shared {
    /// Marks the endpoint stopped and releases the owner's listener handle.
    /// The listener closes once every worker has let go of its handle.
    fn shut_down(&self) {
        self.stopped.store(true, Ordering::SeqCst);
        if let Some(server) = self.server.lock().unwrap().take() {
            for _ in 0..WORKERS {
                server.unblock();
            }
        }
    }

    /// Waits until connections to the port are refused.
    fn await_closed(&self) {
        // tiny_http closes its listener on a background thread
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline
            && TcpStream::connect_timeout(&self.addr, Duration::from_millis(50)).is_ok()
        {
            std::thread::sleep(Duration::from_millis(5));
        }
    }
}

/// A running mock endpoint.
pub struct MockWebDriver {
    addr: SocketAddr,
    shared: Arc<Shared>,
    workers: Vec<JoinHandle<()>>,
}

#[derive(Debug, Clone)]
pub struct MockOptions {
    /// `host:port`; port 0 picks an ephemeral port.
    pub bind: String,
    pub accepted_browsers: Vec<String>,
}

impl Default for MockOptions {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:0".into(),
            accepted_browsers: vec!["mock".into()],
        }
    }
}

/// Starts a mock endpoint on an ephemeral loopback port.
pub fn start_mock(spec: PortalSpec) -> Result<MockWebDriver, MockError> {
    MockWebDriver::start(spec, MockOptions::default())
}

impl MockWebDriver {
    pub fn start(spec: PortalSpec, options: MockOptions) -> Result<Self, MockError> {
        spec.validate()?;
        let server = tiny_http::Server::http(options.bind.as_str()).map_err(|e| MockError::BindFailure {
            addr: options.bind.clone(),
            message: e.to_string(),
        })?;
        let addr = server
            .server_addr()
            .to_ip()
            .expect("mock binds a TCP address");
        let server = Arc::new(server);
        let shared = Arc::new(Shared {
            addr,
            spec,
            accepted_browsers: options.accepted_browsers,
            state: Mutex::new(MockState::default()),
            stopped: AtomicBool::new(false),
            budget: Mutex::new(None),
            server: Mutex::new(Some(Arc::clone(&server))),
        });
        let workers = (0..WORKERS)
            .map(|_| {
                let server = Arc::clone(&server);
                let shared = Arc::clone(&shared);
                std::thread::spawn(move || serve(server, shared))
            })
            .collect();
        Ok(Self {
            addr,
            shared,
            workers,
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// `http://host:port`
    pub fn url(&self) -> url::Url {
        url::Url::parse(&format!("http://{}", self.addr)).expect("socket address forms a URL")
    }

    pub fn spec(&self) -> &PortalSpec {
        &self.shared.spec
    }

    /// Snapshot of the server state.
    pub fn state(&self) -> MockState {
        self.shared.state.lock().unwrap().clone()
    }

    pub fn element_value(&self, session_id: &str, element: &str) -> Option<String> {
        let state = self.shared.state.lock().unwrap();
        state.sessions.get(session_id)?.values.get(element).cloned()
    }

    pub fn current_page(&self, session_id: &str) -> Option<String> {
        let state = self.shared.state.lock().unwrap();
        state.sessions.get(session_id)?.current_page.clone()
    }

    pub fn click_log(&self) -> Vec<(String, String)> {
        self.shared.state.lock().unwrap().click_log.clone()
    }

    pub fn request_count(&self) -> usize {
        self.shared.state.lock().unwrap().request_log.len()
    }

    /// Drops a session on the remote side, as if the browser crashed.
    pub fn expire_session(&self, session_id: &str) -> bool {
        self.shared
            .state
            .lock()
            .unwrap()
            .sessions
            .remove(session_id)
            .is_some()
    }

    /// Serves `n` more requests, then stops accepting connections. The
    /// n-th response is only sent once the port refuses connections.
    pub fn kill_after(&self, n: u64) {
        if n == 0 {
            self.shared.shut_down();
            return;
        }
        *self.shared.budget.lock().unwrap() = Some(n);
    }

    pub fn is_stopped(&self) -> bool {
        self.shared.stopped.load(Ordering::SeqCst)
    }

    /// Stops serving and releases the port. Idempotent.
    pub fn stop(&mut self) {
        self.shared.shut_down();
        for worker in self.workers.drain(..) {
            let _ = worker.join();
        }
        self.shared.state.lock().unwrap().sessions.clear();
        self.shared.await_closed();
    }
}

impl Drop for MockWebDriver {
    fn drop(&mut self) {
        self.stop();
    }
}

fn serve(server: Arc<tiny_http::Server>, shared: Arc<Shared>) {
    while !shared.stopped.load(Ordering::SeqCst) {
        let mut request = match server.recv_timeout(Duration::from_millis(50)) {
            Ok(Some(r)) => r,
            Ok(None) => continue,
            Err(_) => break,
        };
        let last = match shared.budget.lock().unwrap().as_mut() {
            Some(n) => {
                *n = n.saturating_sub(1);
                *n == 0
            }
            None => false,
        };
        let method = request.method().as_str().to_ascii_uppercase();
        let path = request.url().split('?').next().unwrap_or("").to_string();
        let mut raw = String::new();
        let (status, body) = match request.as_reader().read_to_string(&mut raw) {
            Err(_) => error(400, "invalid argument", "body is not UTF-8"),
            Ok(_) => {
                let parsed = if raw.trim().is_empty() {
                    Ok(json!({}))
                } else {
                    serde_json::from_str::<Value>(&raw)
                };
                match parsed {
                    Ok(body) => shared.state.lock().unwrap().handle(
                        &shared.spec,
                        &shared.accepted_browsers,
                        &method,
                        &path,
                        &body,
                    ),
                    Err(e) => error(400, "invalid argument", format!("malformed JSON: {e}")),
                }
            }
        };
        let header = tiny_http::Header::from_bytes(
            &b"Content-Type"[..],
            &b"application/json; charset=utf-8"[..],
        )
        .expect("static header is valid");
        let response = tiny_http::Response::from_string(body.to_string())
            .with_status_code(status)
            .with_header(header);
        if last {
            shared.shut_down();
            drop(server);
            shared.await_closed();
            let _ = request.respond(response);
            return;
        }
        let _ = request.respond(response);
    }
}
