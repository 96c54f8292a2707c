//! Hermetic stand-ins for the systems a run talks to: a WebDriver endpoint
//! over a scriptable virtual portal, and a MySQL-protocol server over
//! in-memory tables.

pub mod mysql;
mod portal;
mod webdriver;

pub use portal::{
    default_login_spec, Condition, Credential, ElementKind, ElementSpec, PageSpec, PortalSpec,
    PortalSpecError, Transition,
};
pub use webdriver::{
    pixel_png, start_mock, MockError, MockOptions, MockState, MockWebDriver, SessionState,
    PIXEL_PNG_BASE64,
};

/// Stops a mock endpoint and releases its port.
pub fn stop_mock(mock: &mut MockWebDriver) {
    mock.stop();
}
