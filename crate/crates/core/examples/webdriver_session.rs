//! Drives a login by hand with the WebDriver client, including the
//! error a missing element produces.

use hybrid_taf::mock::{default_login_spec, start_mock};
use hybrid_taf::webdriver::{new_session, WebDriverError};
use hybrid_taf::Locator;

fn main() -> Result<(), WebDriverError> {
    let mock = start_mock(default_login_spec([("student", "password123")])).unwrap();
    let id = |s: &str| Locator::id(s).unwrap();

    let session = new_session(&mock.url(), "mock")?;
    println!("session {}", session.id());
    session.navigate("http://portal.test/login")?;
    session.find_element(&id("username"))?.send_keys("student")?;
    session
        .find_element(&Locator::css("#password").unwrap())?
        .send_keys("password123")?;
    session
        .find_element(&Locator::xpath("//*[@id='submit']").unwrap())?
        .click()?;
    println!("result: {}", session.find_element(&id("result"))?.text()?);

    let png = session.take_screenshot()?;
    println!("screenshot: {} base64 chars", png.len());

    match session.find_element(&id("captcha")) {
        Err(e) => println!("missing element: {e} (fatal: {})", e.is_fatal()),
        Ok(_) => unreachable!(),
    }
    session.delete()?;
    println!("after delete: {:?}", session.navigate("http://portal.test/"));
    Ok(())
}
