//! Builds a custom portal with an extra page and serves it from the mock
//! WebDriver endpoint.

use hybrid_taf::mock::{
    default_login_spec, start_mock, Condition, ElementSpec, PageSpec, Transition,
};
use hybrid_taf::webdriver::new_session;
use hybrid_taf::Locator;

fn main() {
    let mut spec = default_login_spec([("student", "password123")]);
    let mut help = PageSpec::default();
    help.elements.insert("result".into(), ElementSpec::text("HELP"));
    spec.pages.insert("help".into(), help);
    spec.pages
        .get_mut("login")
        .unwrap()
        .elements
        .insert("forgot".into(), ElementSpec::button("Forgot password?"));
    spec.transitions.push(Transition {
        on_click: "forgot".into(),
        from: Some("login".into()),
        when: Condition::Always,
        goto: "help".into(),
    });
    spec.validate().expect("consistent spec");
    println!("{}", spec.to_json());

    let mock = start_mock(spec).unwrap();
    let id = |s: &str| Locator::id(s).unwrap();
    let session = new_session(&mock.url(), "mock").unwrap();
    session.navigate("http://portal.test/").unwrap();
    session.find_element(&id("forgot")).unwrap().click().unwrap();
    println!("page: {:?}", mock.current_page(session.id()));
    println!("banner: {}", session.find_element(&id("result")).unwrap().text().unwrap());
    session.delete().unwrap();
    println!("requests served: {}", mock.request_count());
}
