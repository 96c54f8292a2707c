mod common;

use base64::Engine as _;
use hybrid_taf::mock::{default_login_spec, start_mock, MockOptions, MockWebDriver};
use hybrid_taf::webdriver::{new_session, WebDriverError};
use hybrid_taf::Locator;

fn id(s: &str) -> Locator {
    Locator::id(s).unwrap()
}

fn open(mock: &MockWebDriver) -> hybrid_taf::webdriver::Session {
    let s = new_session(&mock.url(), "mock").unwrap();
    s.navigate("http://portal.test/login").unwrap();
    s
}

#[test]
fn session_lifecycle() {
    let mock = common::portal();
    let s = new_session(&mock.url(), "mock").unwrap();
    assert!(s.id().starts_with("mock-session-"));
    assert!(s.is_open());
    assert!(mock.state().sessions.contains_key(s.id()));

    s.delete().unwrap();
    assert!(!s.is_open());
    assert!(mock.state().sessions.is_empty());
    let before = mock.request_count();
    s.delete().unwrap();
    assert_eq!(mock.request_count(), before, "second delete must stay local");
}

#[test]
fn unsupported_browser_is_rejected() {
    let mock = common::portal();
    let err = new_session(&mock.url(), "chrome").unwrap_err();
    assert!(matches!(err, WebDriverError::SessionNotCreated(_)), "{err:?}");
}

#[test]
fn navigate_loads_initial_page() {
    let mock = common::portal();
    let s = open(&mock);
    assert_eq!(mock.current_page(s.id()).as_deref(), Some("login"));
}

#[test]
fn invalid_url_is_caught_locally() {
    let mock = common::portal();
    let s = new_session(&mock.url(), "mock").unwrap();
    let before = mock.request_count();
    for bad in ["", "not a url", "http://"] {
        assert!(matches!(s.navigate(bad), Err(WebDriverError::InvalidUrl(_))), "{bad:?}");
    }
    assert_eq!(mock.request_count(), before);
}

#[test]
fn find_element_by_every_strategy() {
    let mock = common::portal();
    let s = open(&mock);
    for loc in ["id:username", "css:#username", "xpath://*[@id='username']"] {
        let el = s.find_element(&Locator::parse(loc).unwrap()).unwrap();
        assert!(el.id().ends_with("-username"), "{loc} -> {}", el.id());
    }
}

#[test]
fn no_such_element() {
    let mock = common::portal();
    let s = open(&mock);
    let err = s.find_element(&id("captcha")).unwrap_err();
    assert_eq!(err, WebDriverError::NoSuchElement("id:captcha".into()));
    assert!(s.is_open(), "element errors leave the session usable");
}

#[test]
fn send_keys_appends_and_clear_empties() {
    let mock = common::portal();
    let s = open(&mock);
    let user = s.find_element(&id("username")).unwrap();
    user.send_keys("ade").unwrap();
    user.send_keys("bayo").unwrap();
    assert_eq!(mock.element_value(s.id(), "username").as_deref(), Some("adebayo"));
    user.clear().unwrap();
    assert_eq!(mock.element_value(s.id(), "username").as_deref(), Some(""));
    user.send_keys("x").unwrap();
    assert_eq!(mock.element_value(s.id(), "username").as_deref(), Some("x"));
}

#[test]
fn typing_into_a_button_is_not_interactable() {
    let mock = common::portal();
    let s = open(&mock);
    let submit = s.find_element(&id("submit")).unwrap();
    assert!(matches!(submit.send_keys("x"), Err(WebDriverError::ElementNotInteractable(_))));
    assert!(matches!(submit.clear(), Err(WebDriverError::Remote { .. })));
}

fn login(mock: &MockWebDriver, user: &str, pass: &str) -> String {
    let s = open(mock);
    s.find_element(&id("username")).unwrap().send_keys(user).unwrap();
    s.find_element(&id("password")).unwrap().send_keys(pass).unwrap();
    s.find_element(&id("submit")).unwrap().click().unwrap();
    let text = s.find_element(&id("result")).unwrap().text().unwrap();
    s.delete().unwrap();
    text
}

#[test]
fn click_follows_credential_transition() {
    let mock = common::portal();
    let (u, p) = common::accounts().remove(0);
    assert_eq!(login(&mock, &u, &p), "PASS");
    assert_eq!(login(&mock, &u, "wrong"), "FAIL");
    assert_eq!(login(&mock, "nobody", &p), "FAIL");
    let clicks: Vec<String> = mock.click_log().into_iter().map(|(_, e)| e).collect();
    assert_eq!(clicks, ["submit", "submit", "submit"]);
}

#[test]
fn empty_credential_list_rejects_everyone() {
    let mock = start_mock(default_login_spec(Vec::<(String, String)>::new())).unwrap();
    assert_eq!(login(&mock, "", ""), "FAIL");
    assert_eq!(login(&mock, "adebayo", "Ife#2019"), "FAIL");
}

#[test]
fn stale_element_after_navigation() {
    let mock = common::portal();
    let s = open(&mock);
    let user = s.find_element(&id("username")).unwrap();
    s.navigate("http://portal.test/login").unwrap();
    assert_eq!(user.send_keys("x"), Err(WebDriverError::StaleElement));
    assert_eq!(user.click(), Err(WebDriverError::StaleElement));
    s.find_element(&id("username")).unwrap().send_keys("x").unwrap();
}

#[test]
fn screenshot_is_png() {
    let mock = common::portal();
    let s = open(&mock);
    let b64 = s.take_screenshot().unwrap();
    let bytes = base64::engine::general_purpose::STANDARD.decode(b64).unwrap();
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
}

#[test]
fn invalid_session_id_closes_handle() {
    let mock = common::portal();
    let s = open(&mock);
    let submit = s.find_element(&id("submit")).unwrap();
    assert!(mock.expire_session(s.id()));
    assert_eq!(submit.click(), Err(WebDriverError::NoSuchSession));
    assert!(!s.is_open());

    let before = mock.request_count();
    assert_eq!(submit.click().unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(s.take_screenshot().unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(s.navigate("http://portal.test/").unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(mock.request_count(), before, "closed handle must not touch the network");
}

#[test]
fn commands_after_delete_stay_local() {
    let mock = common::portal();
    let s = open(&mock);
    let user = s.find_element(&id("username")).unwrap();
    s.delete().unwrap();
    let before = mock.request_count();
    assert_eq!(user.send_keys("x").unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(user.clear().unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(s.find_element(&id("username")).unwrap_err(), WebDriverError::NoSuchSession);
    assert_eq!(mock.request_count(), before);
}

#[test]
fn unreachable_endpoint() {
    let err = new_session(&common::dead_endpoint(), "mock").unwrap_err();
    assert!(matches!(err, WebDriverError::ConnectionRefused(_)), "{err:?}");
    assert!(err.is_fatal());
}

#[test]
fn stop_releases_port_and_is_idempotent() {
    let mut mock = common::portal();
    let url = mock.url();
    mock.stop();
    assert!(mock.is_stopped());
    mock.stop();
    let err = new_session(&url, "mock").unwrap_err();
    assert!(matches!(err, WebDriverError::ConnectionRefused(_)), "{err:?}");

    // the port can be bound again
    let rebound = MockWebDriver::start(
        default_login_spec(common::accounts()),
        MockOptions {
            bind: mock.addr().to_string(),
            ..MockOptions::default()
        },
    )
    .unwrap();
    assert_eq!(rebound.addr(), mock.addr());
}

#[test]
fn endpoint_killed_mid_session() {
    let mock = common::portal();
    let s = open(&mock);
    mock.kill_after(1);
    s.find_element(&id("username")).unwrap();
    let err = s.find_element(&id("password")).unwrap_err();
    assert!(matches!(err, WebDriverError::ConnectionRefused(_)), "{err:?}");
}

#[test]
fn concurrent_sessions_are_isolated() {
    let mock = common::portal();
    std::thread::scope(|scope| {
        for i in 0..4 {
            let mock = &mock;
            scope.spawn(move || {
                let s = open(mock);
                let text = format!("user{i}");
                s.find_element(&id("username")).unwrap().send_keys(&text).unwrap();
                assert_eq!(mock.element_value(s.id(), "username"), Some(text));
                s.delete().unwrap();
            });
        }
    });
    assert!(mock.state().sessions.is_empty());
}
