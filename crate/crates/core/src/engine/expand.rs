use thiserror::Error;

use crate::config::TestConfig;
use crate::model::{KeywordStep, LocatorConstants, TestCaseData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpandError {
    #[error("test case lacks the {0:?} field")]
    MissingField(&'static str),
}

/// Column holding an optional human description of a case.
pub const DESCRIPTION_FIELD: &str = "description";

/// Expands a login row into its ten keyword steps:
///
/// ```text
/// OPEN_BROWSER, NAVIGATE(aut_url), INPUT(user), INPUT(password), CLICK(submit),
/// VALIDATE(expected), SCREENSHOT, CLEAR(user), CLEAR(password), CLOSE_BROWSER
/// ```
pub fn expand_login_case(
    case: &TestCaseData,
    config: &TestConfig,
    locators: &LocatorConstants,
) -> Result<Vec<KeywordStep>, ExpandError> {
    let username = case
        .field("username")
        .ok_or(ExpandError::MissingField("username"))?;
    let password = case
        .field("password")
        .ok_or(ExpandError::MissingField("password"))?;
    Ok(vec![
        KeywordStep::open_browser(),
        KeywordStep::navigate(config.aut_url.as_str()),
        KeywordStep::input(locators.user_field.clone(), username),
        KeywordStep::input(locators.password_field.clone(), password),
        KeywordStep::click(locators.submit_button.clone()),
        KeywordStep::validate(case.expected.clone()),
        KeywordStep::screenshot(),
        KeywordStep::clear(locators.user_field.clone()),
        KeywordStep::clear(locators.password_field.clone()),
        KeywordStep::close_browser(),
    ])
}

/// The `description` column when present, else a summary of the login.
pub fn case_description(case: &TestCaseData) -> String {
    match case.field(DESCRIPTION_FIELD) {
        Some(d) if !d.trim().is_empty() => d.to_string(),
        _ => format!(
            "login as {:?}, expecting {}",
            case.field("username").unwrap_or_default(),
            case.expected
        ),
    }
}
