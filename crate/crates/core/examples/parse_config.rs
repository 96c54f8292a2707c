//! Parses a config document, prints any warnings and the redacted form.

use hybrid_taf::config::parse_config_with_warnings;

const DOC: &str = "\
# portal suite
AUT_URL=http://portal.test/login
BROWSER_CHOICE=chrome
WEBDRIVER_URL=http://127.0.0.1:4444
DATA_SOURCE=DATABASE
MYSQL_URL=db.internal:3306
MYSQL_DATABASE=taf
MYSQL_USER=qa
MYSQL_PASS=correct-horse
TABLE_NAME=login_cases
REQUEST_TIMEOUT=20s
SOMETHING_ELSE=ignored
";

fn main() {
    let (config, warnings) = parse_config_with_warnings(DOC).expect("valid config");
    for w in &warnings {
        println!("warning: {w}");
    }
    println!("browser: {}", config.browser_choice.token());
    println!("timeout: {:?}", config.request_timeout);
    println!("--- redacted ---\n{}", config.redacted());
}
